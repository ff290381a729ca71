#include "kcex/eigensolve.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>
#include <vector>

#include "kcex/errors.hpp"

namespace kcex {

namespace {

Eigen::SparseMatrix<double> interior_block(const Eigen::SparseMatrix<double>& full,
                                           const std::vector<int>& interior,
                                           const std::vector<int>& to_interior)
{
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(full.nonZeros()));
    for (int col = 0; col < full.outerSize(); ++col) {
        const int jc = to_interior[static_cast<std::size_t>(col)];
        if (jc < 0) continue;
        for (Eigen::SparseMatrix<double>::InnerIterator it(full, col); it; ++it) {
            const int ir = to_interior[static_cast<std::size_t>(it.row())];
            if (ir < 0) continue;
            trips.emplace_back(ir, jc, it.value());
        }
    }
    const int n = static_cast<int>(interior.size());
    Eigen::SparseMatrix<double> block(n, n);
    block.setFromTriplets(trips.begin(), trips.end());
    block.makeCompressed();
    return block;
}

} // namespace

EigenPair principal_eigenpair(const OperatorPair& ops, const Mesh& mesh)
{
    const auto& interior = ops.interior;
    if (interior.empty()) {
        throw MeshTooCoarse("eigenproblem needs at least one interior node");
    }
    std::vector<int> to_interior(static_cast<std::size_t>(mesh.node_count()), -1);
    for (std::size_t k = 0; k < interior.size(); ++k) {
        to_interior[static_cast<std::size_t>(interior[k])] = static_cast<int>(k);
    }
    const auto Ki = interior_block(ops.stiffness, interior, to_interior);
    const auto Mi = interior_block(ops.mass, interior, to_interior);

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(Ki);
    if (solver.info() != Eigen::Success) {
        throw NoConvergence("stiffness factorization failed");
    }

    const int n = static_cast<int>(interior.size());
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
    double lambda = 0.0;
    double lambda_old = 0.0;
    bool converged = false;
    for (int it = 0; it < 200; ++it) {
        Eigen::VectorXd y = solver.solve(Mi * v);
        y /= std::sqrt(y.dot(Mi * y));
        lambda = y.dot(Ki * y) / y.dot(Mi * y);
        const double res = (Ki * y - lambda * (Mi * y)).cwiseAbs().maxCoeff();
        v = y;
        // iterate past the contract floor (1e-9 lambda) down toward round-off
        // so downstream density margins are not limited by the solver
        if (it > 0 && std::abs(lambda - lambda_old) <= 1e-13 * lambda &&
            res <= 1e-12 * lambda) {
            converged = true;
            break;
        }
        if (it == 199 && res <= 1e-9 * lambda) {
            converged = true;
        }
        lambda_old = lambda;
    }
    if (!converged) {
        throw NoConvergence("inverse power iteration exhausted its budget of 200 iterations");
    }

    EigenPair pair;
    pair.lambda = lambda;
    pair.phi.values = Eigen::VectorXd::Zero(mesh.node_count());
    for (std::size_t k = 0; k < interior.size(); ++k) {
        pair.phi.values[interior[k]] = v[static_cast<Eigen::Index>(k)];
    }
    Eigen::Index imax = 0;
    pair.phi.values.cwiseAbs().maxCoeff(&imax);
    if (pair.phi.values[imax] < 0.0) {
        pair.phi.values = -pair.phi.values;
    }
    pair.phi.values /= pair.phi.values.maxCoeff();

    const Eigen::VectorXd defect =
        ops.stiffness * pair.phi.values - lambda * (ops.mass * pair.phi.values);
    double res = 0.0;
    for (int i : interior) {
        res = std::max(res, std::abs(defect[i]));
        if (!(pair.phi.values[i] > 0.0)) {
            throw NoConvergence("eigenvector not strictly positive at an interior node");
        }
    }
    pair.residual = res;
    if (res > 1e-9 * lambda) {
        throw NoConvergence("eigenpair residual above 1e-9 * lambda");
    }
    return pair;
}

double eigenvalue_ratio(const EigenPair& inner, const EigenPair& outer)
{
    const double ratio = outer.lambda / inner.lambda;
    if (!(ratio > 0.0)) {
        throw DomainOrderViolation("eigenvalue ratio must be positive");
    }
    if (ratio > 1.0 + 1e-8) {
        throw DomainOrderViolation(
            "lambda_tau exceeds lambda_1: meshes inconsistent with domain inclusion");
    }
    return ratio;
}

} // namespace kcex
