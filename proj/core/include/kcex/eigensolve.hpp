#pragma once

#include "kcex/assembly.hpp"
#include "kcex/geometry.hpp"

namespace kcex {

/// Principal Dirichlet eigenpair: positive at interior nodes, zero on the
/// boundary, sup-normalized to max value 1.
struct EigenPair {
    double lambda = 0.0;
    Field phi;
    double residual = 0.0;  // max-norm of (K phi - lambda Mm phi) over interior rows
};

/// Smallest generalized eigenvalue of (K, Mm) restricted to interior nodes,
/// by inverse power iteration with a sparse LDLT inner solve. Iteration
/// budget 200; exceeding it raises NoConvergence.
EigenPair principal_eigenpair(const OperatorPair& ops, const Mesh& mesh);

/// lambda_tau / lambda_1 for a nested pair of domains; must lie in (0, 1].
double eigenvalue_ratio(const EigenPair& inner, const EigenPair& outer);

} // namespace kcex
