#include "kcex/verify.hpp"

#include <algorithm>
#include <cmath>

#include "kcex/errors.hpp"

namespace kcex {

namespace {

Eigen::VectorXd density_margin(const Eigen::VectorXd& residual, const OperatorPair& ops)
{
    Eigen::VectorXd out(static_cast<Eigen::Index>(ops.interior.size()));
    for (std::size_t k = 0; k < ops.interior.size(); ++k) {
        const int i = ops.interior[k];
        out[static_cast<Eigen::Index>(k)] = residual[i] / ops.lumped_mass[i];
    }
    return out;
}

double refine_root(const std::function<double(double)>& g, double lo, double hi)
{
    double g_lo = g(lo);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double g_mid = g(mid);
        if (g_mid == 0.0) {
            return mid;
        }
        if ((g_lo < 0.0) == (g_mid < 0.0)) {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 1e-12 * std::max(1.0, std::abs(hi))) {
            break;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

const char* to_string(Verdict verdict)
{
    return verdict == Verdict::CertifiedFailure ? "CERTIFIED_FAILURE" : "NOT_CERTIFIED";
}

double check_weak_supersolution(const Field& u, double coeff, const OperatorPair& ops)
{
    if (u.values.size() != ops.stiffness.rows()) {
        throw DimensionMismatch("field length does not match the operator dimension");
    }
    const double scale = u.values.cwiseAbs().maxCoeff();
    std::vector<std::uint8_t> is_interior(static_cast<std::size_t>(u.values.size()), 0);
    for (int i : ops.interior) {
        is_interior[static_cast<std::size_t>(i)] = 1;
    }
    for (Eigen::Index i = 0; i < u.values.size(); ++i) {
        if (!is_interior[static_cast<std::size_t>(i)] &&
            std::abs(u.values[i]) > 1e-12 * scale) {
            throw PreconditionViolated("field must vanish on boundary nodes");
        }
    }
    const Eigen::VectorXd residual =
        ops.stiffness * u.values - coeff * (ops.mass * u.values);
    return density_margin(residual, ops).minCoeff();
}

OrderingReport check_pair_ordering(const Counterexample& cex)
{
    OrderingReport report;
    const Eigen::VectorXd gap = cex.upper.values - cex.lower.values;
    report.min_gap = gap.minCoeff();
    const double tol = 1e-9 * cex.upper.values.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < gap.size(); ++i) {
        if (gap[i] <= tol) {
            report.touch_nodes.push_back(static_cast<int>(i));
        }
    }
    return report;
}

StrictMargins check_strict_inequalities(const Counterexample& cex, const MFunctionSpec& M)
{
    const double M1 = eval_M(M, cex.params.t1);
    const double M2 = eval_M(M, cex.params.t2);
    const double theta = cex.params.theta;
    const Eigen::VectorXd sub = theta * (cex.ops.mass * cex.lower.values) -
                                M1 * (cex.ops.stiffness * cex.lower.values);
    const Eigen::VectorXd super = M2 * (cex.ops.stiffness * cex.upper.values) -
                                  theta * (cex.ops.mass * cex.upper.values);
    StrictMargins margins;
    margins.sub_margin = density_margin(sub, cex.ops).minCoeff();
    margins.super_margin = density_margin(super, cex.ops).minCoeff();
    return margins;
}

SolutionSet nonlocal_linear_solution_set(const MFunctionSpec& M, double lambda1,
                                         double norm_phi1_sq, double theta, double s_max)
{
    if (!(s_max > 0.0)) {
        throw PreconditionViolated("solution-set scan needs s_max > 0");
    }
    constexpr int kScan = 4096;
    auto g = [&](double s) { return eval_M(M, s * s * norm_phi1_sq) * lambda1 - theta; };

    SolutionSet set;
    set.n_scan = kScan;
    set.s_lo = s_max / kScan;
    set.s_hi = s_max;

    const double near_zero = 1e-9 * std::abs(theta);
    int plateau_run = 0;
    double prev_s = set.s_lo;
    double prev_g = g(prev_s);
    if (std::abs(prev_g) <= near_zero) {
        plateau_run = 1;
    }
    std::function<double(double)> gf = g;
    for (int i = 2; i <= kScan; ++i) {
        const double s = s_max * i / kScan;
        const double gs = g(s);
        if (std::abs(gs) <= near_zero) {
            if (++plateau_run >= 3) {
                set.degenerate_plateau = true;
            }
        } else {
            plateau_run = 0;
        }
        if ((prev_g < 0.0) != (gs < 0.0) && prev_g != 0.0 && gs != 0.0) {
            const double root = refine_root(gf, prev_s, s);
            const double res = std::abs(g(root));
            if (res <= near_zero) {
                set.roots.push_back(root);
                set.residuals.push_back(res);
            }
        } else if (gs == 0.0) {
            set.roots.push_back(s);
            set.residuals.push_back(0.0);
        }
        prev_s = s;
        prev_g = gs;
    }
    return set;
}

Certificate certify(const Counterexample& cex, const MFunctionSpec& M)
{
    Certificate cert;
    cert.mode = cex.params.mode;
    cert.params = cex.params;
    cert.mesh_h = cex.mesh.h;
    cert.inner_nodes = cex.mesh.node_count();
    cert.outer_nodes = cex.outer_node_count;
    cert.p_tilde_index = cex.touching.p_tilde_index;
    cert.p_tilde = cex.touching.p_tilde;

    const auto strict = check_strict_inequalities(cex, M);
    cert.margins.sub_strict = strict.sub_margin;
    cert.margins.super_strict = strict.super_margin;

    const auto ordering = check_pair_ordering(cex);
    cert.margins.ordering_min_gap = ordering.min_gap;

    const int pt = cex.touching.p_tilde_index;
    cert.margins.touch_gap_at_p_tilde = cex.upper.values[pt] - cex.lower.values[pt];
    cert.weak_cp_violation = cex.lower.values[pt] - cex.upper.values[pt];

    cert.margins.weak_supersolution_min =
        check_weak_supersolution(cex.upper, cex.params.lambda_tau, cex.ops);

    const double max_upper = cex.upper.values.cwiseAbs().maxCoeff();
    const auto& tol = cert.tolerances;

    cert.forced_s = cex.params.A * cex.params.alpha;
    const double s_max =
        4.0 * std::max(cert.forced_s, std::sqrt(cex.params.t2 / cex.params.norm_phi1_sq));
    cert.solution_set = nonlocal_linear_solution_set(
        M, cex.params.lambda1, cex.params.norm_phi1_sq, cex.params.theta, s_max);
    cert.forced_s_residual =
        std::abs(eval_M(M, cert.forced_s * cert.forced_s * cex.params.norm_phi1_sq) *
                     cex.params.lambda1 -
                 cex.params.theta);

    // a root is admissible when s phi_1 fits between lower and upper nodally
    const double sandwich_tol = tol.sandwich_rel * max_upper;
    for (double s : cert.solution_set.roots) {
        const double A_s = s;
        bool fits = true;
        for (Eigen::Index i = 0; i < cex.lower.values.size(); ++i) {
            const double v = A_s * cex.eigen_inner.phi.values[i];
            if (v < cex.lower.values[i] - sandwich_tol ||
                v > cex.upper.values[i] + sandwich_tol) {
                fits = false;
                break;
            }
        }
        if (fits) {
            cert.admissible_root_found = true;
        }
    }

    // gates in a fixed order; the first failure names the check
    auto fail = [&](const char* name) {
        if (cert.failing_check.empty()) {
            cert.failing_check = name;
        }
    };
    if (!(cert.margins.sub_strict > tol.strict_margin)) fail("sub_strict");
    if (!(cert.margins.super_strict > tol.strict_margin)) fail("super_strict");
    if (cert.mode == Mode::Ssm || cert.mode == Mode::StrongCp) {
        if (!(cert.margins.ordering_min_gap >= -tol.ordering)) fail("ordering_min_gap");
        if (!(std::abs(cert.margins.touch_gap_at_p_tilde) <= tol.touch_rel * max_upper)) {
            fail("touch_gap_at_p_tilde");
        }
    }
    if (cert.mode == Mode::Ssm) {
        if (cert.solution_set.degenerate_plateau) fail("solution_set_degenerate");
        if (!(cert.forced_s_residual > tol.forced_root_rel * std::abs(cex.params.theta))) {
            fail("forced_s_residual");
        }
        if (cert.admissible_root_found) fail("admissible_root");
    }
    if (cert.mode == Mode::WeakCp) {
        if (!(cert.weak_cp_violation > tol.weak_violation)) fail("weak_cp_violation");
    }
    cert.verdict =
        cert.failing_check.empty() ? Verdict::CertifiedFailure : Verdict::NotCertified;
    return cert;
}

ReversedPairReport demonstrate_product_necessity(const MFunctionSpec& M, double t1, double t2,
                                                 const EigenPair& phi1, const OperatorPair& ops)
{
    if (!(t1 > 0.0) || !(t1 < t2)) {
        throw PreconditionViolated("necessity argument requires 0 < t1 < t2");
    }
    ReversedPairReport report;
    report.product_t1 = eval_M(M, t1 * t1) * t1;
    report.product_t2 = eval_M(M, t2 * t2) * t2;
    if (report.product_t1 < report.product_t2) {
        throw PreconditionViolated(
            "necessity argument requires M(t1^2) t1 >= M(t2^2) t2 (product not increasing)");
    }
    report.degenerate =
        std::abs(report.product_t1 - report.product_t2) <= 1e-12 * std::max(report.product_t1, 1.0);

    // H-normalized eigenfunction
    const double norm = std::sqrt(h1_norm_sq(phi1.phi, ops));
    Field phi_hat;
    phi_hat.values = phi1.phi.values / norm;
    report.lower.values = t1 * phi_hat.values;  // w
    report.upper.values = t2 * phi_hat.values;  // ell

    // -M(||ell||^2) Lap ell <= -M(||w||^2) Lap w as densities
    const Eigen::VectorXd rhs_gap = (report.product_t1 - report.product_t2) * phi1.lambda *
                                    (ops.mass * phi_hat.values);
    report.rhs_margin = density_margin(rhs_gap, ops).minCoeff();

    double min_gap = std::numeric_limits<double>::infinity();
    for (int i : ops.interior) {
        min_gap = std::min(min_gap, (t2 - t1) * phi_hat.values[i]);
    }
    report.ordering_margin = min_gap;
    return report;
}

} // namespace kcex
