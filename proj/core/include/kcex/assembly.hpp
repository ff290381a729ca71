#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "kcex/geometry.hpp"

namespace kcex {

/// Nodal values of a piecewise-linear function on a mesh.
struct Field {
    Eigen::VectorXd values;

    int size() const { return static_cast<int>(values.size()); }
};

/// Stiffness (grad-grad) and mass matrices of the P1 discretization,
/// plus the interior node list and the lumped mass vector Mm*1.
struct OperatorPair {
    Eigen::SparseMatrix<double> stiffness;
    Eigen::SparseMatrix<double> mass;
    std::vector<int> interior;
    Eigen::VectorXd lumped_mass;
};

/// Exact P1 element integrals: 1D hat functions / linear triangles.
OperatorPair assemble(const Mesh& mesh);

/// v^T K v, the squared H^1_0 gradient seminorm of the nodal field.
double h1_norm_sq(const Field& field, const OperatorPair& ops);

/// Piecewise-linear interpolation of a field given on `source_mesh` at the
/// node coordinates of `target_mesh`. Target nodes must lie inside the
/// source mesh up to a small boundary round-off tolerance.
Field restrict_onto(const Field& source, const Mesh& source_mesh, const Mesh& target_mesh);

} // namespace kcex
