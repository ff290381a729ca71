#include "kcex/construct.hpp"

#include <algorithm>
#include <cmath>

#include "kcex/errors.hpp"

namespace kcex {

namespace {

constexpr double kRatioSafety = 1e-3;
constexpr double kNormRelTol = 1e-6;
constexpr int kTauHalvings = 40;

double ratio_target(const IncreasingPair& pair)
{
    return pair.M1 / pair.M2 * (1.0 + kRatioSafety);
}

} // namespace

const char* to_string(Mode mode)
{
    switch (mode) {
        case Mode::Ssm: return "SSM";
        case Mode::StrongCp: return "STRONG_CP";
        case Mode::WeakCp: return "WEAK_CP";
    }
    return "SSM";
}

TouchingData compute_c_tau(const EigenPair& phi1, const Field& phi_tau_restricted,
                           const Mesh& mesh)
{
    if (phi1.phi.size() != mesh.node_count() || phi_tau_restricted.size() != mesh.node_count()) {
        throw DimensionMismatch("fields do not match the mesh");
    }
    for (int i = 0; i < mesh.node_count(); ++i) {
        if (!(phi_tau_restricted.values[i] > 0.0)) {
            throw PositivityFailure(
                "phi_tau must be strictly positive on the closed inner domain");
        }
    }
    TouchingData data;
    double best = -1.0;
    for (int i = 0; i < mesh.node_count(); ++i) {
        if (mesh.boundary[static_cast<std::size_t>(i)]) continue;
        const double r = phi1.phi.values[i] / phi_tau_restricted.values[i];
        if (r > best) {  // strict: smallest index wins on ties
            best = r;
            data.p_tilde_index = i;
        }
    }
    data.c_tau = best;
    data.p_tilde = mesh.nodes[static_cast<std::size_t>(data.p_tilde_index)];
    data.gap.values = data.c_tau * phi_tau_restricted.values - phi1.phi.values;
    return data;
}

GluedFunction glue(const TouchingData& touching, const EigenPair& phi1,
                   const Field& phi_tau_restricted, double epsilon)
{
    if (!(epsilon > 0.0) || !(epsilon <= 1.0)) {
        throw PreconditionViolated("glue requires epsilon in (0, 1]");
    }
    GluedFunction g;
    g.epsilon = epsilon;
    const Eigen::Index n = phi1.phi.values.size();
    g.values.values.resize(n);
    g.inner_set.assign(static_cast<std::size_t>(n), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double capped = touching.c_tau * phi_tau_restricted.values[i];
        const double scaled = phi1.phi.values[i] / epsilon;
        if (scaled < capped) {
            g.values.values[i] = scaled;
            g.inner_set[static_cast<std::size_t>(i)] = 1;
        } else {
            g.values.values[i] = capped;
        }
    }
    return g;
}

double select_theta(double lambda1, double lambda_tau, double M1, double M2)
{
    const double lo = lambda1 * M1;
    const double hi = lambda_tau * M2;
    if (!(lo < hi)) {
        throw EmptyInterval("no admissible Theta: lambda1 M(t1) >= lambda_tau M(t2)");
    }
    return 0.5 * (lo + hi);
}

double select_scale_A(double alpha, double norm_phi1_sq, double t1)
{
    if (!(alpha > 0.0) || !(norm_phi1_sq > 0.0) || !(t1 > 0.0)) {
        throw PreconditionViolated("select_scale_A requires positive inputs");
    }
    return std::sqrt(t1) / (alpha * std::sqrt(norm_phi1_sq));
}

TauSelection select_tau(const MFunctionSpec& M, const IncreasingPair& pair,
                        const DomainSpec& domain, double h, std::optional<double> tau_override)
{
    (void)M;
    if (!(pair.M1 < pair.M2)) {
        throw PreconditionViolated("select_tau requires M(t1) < M(t2)");
    }
    TauSelection sel;
    sel.inner_mesh = build_mesh(domain, h);
    sel.inner_ops = assemble(sel.inner_mesh);
    sel.inner = principal_eigenpair(sel.inner_ops, sel.inner_mesh);

    const double target = ratio_target(pair);
    const double spacing = sel.inner_mesh.dim == 1 ? max_element_extent(sel.inner_mesh) : 0.0;
    // in 1D the enlarged grid should contain the inner grid nodes, so the
    // restriction of phi_tau is free of resampling error
    auto snap = [&](double tau) {
        if (sel.inner_mesh.dim != 1) return tau;
        return std::ceil(tau / spacing - 1e-12) * spacing;
    };

    auto try_tau = [&](double tau) -> bool {
        const DomainSpec big = enlarge(domain, tau);
        const double outer_h = sel.inner_mesh.dim == 1 ? spacing : h;
        sel.outer_mesh = build_mesh(big, outer_h);
        const OperatorPair outer_ops = assemble(sel.outer_mesh);
        sel.outer = principal_eigenpair(outer_ops, sel.outer_mesh);
        sel.tau = tau;
        return eigenvalue_ratio(sel.inner, sel.outer) > target;
    };

    if (tau_override) {
        if (!(*tau_override > 0.0)) {
            throw PreconditionViolated("explicit tau must be positive");
        }
        if (!try_tau(*tau_override)) {
            throw NoAdmissibleTau("explicit tau fails the eigenvalue-ratio condition");
        }
        return sel;
    }

    double tau = inradius(domain) / 4.0;
    for (int attempt = 0; attempt <= kTauHalvings; ++attempt) {
        if (try_tau(snap(tau))) {
            return sel;
        }
        tau /= 2.0;
        if (sel.inner_mesh.dim == 1 && tau < spacing) {
            break;  // cannot subdivide below one grid cell
        }
    }
    throw NoAdmissibleTau(
        "halving budget exhausted: M(t1)/M(t2) too close to 1 for this mesh resolution");
}

EpsilonSelection select_epsilon(const std::function<GluedFunction(double)>& builder, double A,
                                double t2, const OperatorPair& ops)
{
    if (!(A > 0.0) || !(t2 > 0.0)) {
        throw PreconditionViolated("select_epsilon requires positive A and t2");
    }
    auto scaled_norm = [&](const GluedFunction& g) { return A * A * h1_norm_sq(g.values, ops); };

    GluedFunction at_one = builder(1.0);
    const double base = scaled_norm(at_one);
    if (std::abs(base - t2) <= kNormRelTol * t2) {
        return {1.0, std::move(at_one)};
    }
    if (base > t2) {
        throw PreconditionViolated("A^2 ||u_{1,tau}||^2 exceeds t2; no epsilon can match");
    }

    double lo = 1.0;
    double f_lo = base;
    while (f_lo <= t2) {
        lo /= 10.0;
        if (lo < 1e-12) {
            throw BracketFailure(
                "norm target not bracketed above eps = 1e-12: mesh too coarse for the layer");
        }
        f_lo = scaled_norm(builder(lo));
    }

    double hi = lo * 10.0;
    for (int it = 0; it < 300; ++it) {
        const double mid = std::sqrt(lo * hi);
        GluedFunction g = builder(mid);
        const double f = scaled_norm(g);
        if (std::abs(f - t2) <= kNormRelTol * t2) {
            return {mid, std::move(g)};
        }
        if (f > t2) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    throw NoConvergence("epsilon bisection did not reach the norm tolerance");
}

Counterexample build_counterexample(const DomainSpec& domain, const MFunctionSpec& M,
                                    const IncreasingPair& pair, Mode mode, double h,
                                    std::optional<double> tau_override)
{
    if (!(pair.t1 > 0.0) || !(pair.t1 < pair.t2)) {
        throw PreconditionViolated("increasing pair requires 0 < t1 < t2");
    }
    if (!(pair.M1 < pair.M2)) {
        // the Theta interval (lambda1 M1, lambda_tau M2) is empty for any tau
        throw EmptyInterval("M(t1) >= M(t2): the construction has no admissible Theta");
    }

    Counterexample cex;
    TauSelection sel = select_tau(M, pair, domain, h, tau_override);
    cex.mesh = std::move(sel.inner_mesh);
    cex.ops = std::move(sel.inner_ops);
    cex.eigen_inner = std::move(sel.inner);
    cex.lambda_tau = sel.outer.lambda;
    cex.outer_node_count = sel.outer_mesh.node_count();

    cex.phi_tau_restricted = restrict_onto(sel.outer.phi, sel.outer_mesh, cex.mesh);
    cex.touching = compute_c_tau(cex.eigen_inner, cex.phi_tau_restricted, cex.mesh);

    const double theta =
        select_theta(cex.eigen_inner.lambda, cex.lambda_tau, pair.M1, pair.M2);

    double alpha = 1.0;
    if (mode == Mode::WeakCp) {
        const double bound =
            pair.M2 * cex.lambda_tau / (pair.M1 * cex.eigen_inner.lambda);
        alpha = std::min(std::sqrt(bound), 1.5);
    }

    const double norm_phi1_sq = h1_norm_sq(cex.eigen_inner.phi, cex.ops);
    const double A = select_scale_A(alpha, norm_phi1_sq, pair.t1);

    auto builder = [&](double eps) {
        return glue(cex.touching, cex.eigen_inner, cex.phi_tau_restricted, eps);
    };
    EpsilonSelection eps_sel = select_epsilon(builder, A, pair.t2, cex.ops);
    cex.glued = std::move(eps_sel.glued);

    cex.lower.values = A * alpha * cex.eigen_inner.phi.values;
    cex.upper.values = A * cex.glued.values.values;

    cex.params.tau = sel.tau;
    cex.params.theta = theta;
    cex.params.alpha = alpha;
    cex.params.A = A;
    cex.params.epsilon = eps_sel.epsilon;
    cex.params.t1 = pair.t1;
    cex.params.t2 = pair.t2;
    cex.params.mode = mode;
    cex.params.lambda1 = cex.eigen_inner.lambda;
    cex.params.lambda_tau = cex.lambda_tau;
    cex.params.c_tau = cex.touching.c_tau;
    cex.params.norm_phi1_sq = norm_phi1_sq;
    cex.params.norm_u_sq = h1_norm_sq(cex.glued.values, cex.ops);
    return cex;
}

} // namespace kcex
