#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "kcex/errors.hpp"
#include "kcex/verify.hpp"

using namespace kcex;
using namespace kcex::testing;

namespace {

constexpr double kPi = std::numbers::pi;

} // namespace

TEST_CASE("weak supersolution margin: equality, certified inequality, violation")
{
    // default tau search: the snapped enlargement aligns the grids, so the
    // interpolated phi_tau keeps the discrete inequality at the 1e-8 scale
    const Counterexample cex = kirchhoff_1d(Mode::Ssm, std::nullopt);

    // the eigenfunction with its own eigenvalue is the equality case
    const double eq =
        check_weak_supersolution(cex.eigen_inner.phi, cex.eigen_inner.lambda, cex.ops);
    CHECK(std::abs(eq) <= 1e-6);
    CHECK(eq >= -1e-8);

    // the glued function is a discrete weak supersolution for lambda_tau
    const double super = check_weak_supersolution(cex.glued.values, cex.lambda_tau, cex.ops);
    CHECK(super >= -1e-8);

    // an over-demanding coefficient is detected
    const double bad =
        check_weak_supersolution(cex.eigen_inner.phi, 2.0 * cex.eigen_inner.lambda, cex.ops);
    CHECK(bad < 0.0);
}

TEST_CASE("weak supersolution margin is monotone in the coefficient")
{
    const Counterexample cex = kirchhoff_1d(Mode::Ssm, std::nullopt);
    double prev = std::numeric_limits<double>::infinity();
    for (double coeff : {0.0, 0.5, 1.0, 2.0}) {
        const double m = check_weak_supersolution(cex.upper, coeff, cex.ops);
        CHECK(m <= prev + 1e-15);
        prev = m;
    }
}

TEST_CASE("weak supersolution check rejects fields with boundary support")
{
    const Counterexample cex = kirchhoff_1d();
    Field bad = cex.upper;
    bad.values[0] = 1.0;
    CHECK_THROWS_AS(check_weak_supersolution(bad, 1.0, cex.ops), PreconditionViolated);
}

TEST_CASE("pair ordering holds with touching at p_tilde for SSM")
{
    const Counterexample cex = kirchhoff_1d(Mode::Ssm, 0.5);
    const OrderingReport rep = check_pair_ordering(cex);
    CHECK(rep.min_gap >= -1e-9);
    CHECK(std::find(rep.touch_nodes.begin(), rep.touch_nodes.end(),
                    cex.touching.p_tilde_index) != rep.touch_nodes.end());
}

TEST_CASE("pair ordering is deliberately violated at p_tilde in weak mode")
{
    const Counterexample cex = kirchhoff_1d(Mode::WeakCp, 0.5);
    const OrderingReport rep = check_pair_ordering(cex);
    CHECK(rep.min_gap < 0.0);
    const Eigen::VectorXd gap = cex.upper.values - cex.lower.values;
    int argmin = 0;
    gap.minCoeff(&argmin);
    CHECK(argmin == cex.touching.p_tilde_index);
}

TEST_CASE("identical fields touch everywhere")
{
    Counterexample cex = kirchhoff_1d(Mode::Ssm, 0.5);
    cex.lower = cex.upper;
    const OrderingReport rep = check_pair_ordering(cex);
    CHECK(rep.min_gap == 0.0);
    CHECK(static_cast<int>(rep.touch_nodes.size()) == cex.mesh.node_count());
}

TEST_CASE("strict inequalities hold with positive margins, degenerate Theta flagged")
{
    Counterexample cex = kirchhoff_1d(Mode::Ssm, 0.5);
    const MFunctionSpec m = kirchhoff_m();
    const StrictMargins good = check_strict_inequalities(cex, m);
    CHECK(good.sub_margin > 1e-8);
    CHECK(good.super_margin > 1e-8);

    // Theta at the lower endpoint degenerates the subsolution margin
    cex.params.theta = cex.params.lambda1 * eval_M(m, cex.params.t1);
    const StrictMargins degen = check_strict_inequalities(cex, m);
    CHECK(std::abs(degen.sub_margin) <= 1e-6);
}

TEST_CASE("solution set scan matches the affine closed form")
{
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> coef(0.1, 10.0);
    std::uniform_real_distribution<double> rootpos(0.1, 2.0);
    const double lambda1 = 1.0;
    const double norm = kPi / 2;
    for (int k = 0; k < 100; ++k) {
        const double a = coef(rng);
        const double b = coef(rng);
        const double s_true = rootpos(rng);
        const double theta = lambda1 * (a + b * s_true * s_true * norm);
        const MFunctionSpec m = make_m_function(MFunctionSpec{Affine{a, b}});
        const SolutionSet set = nonlocal_linear_solution_set(m, lambda1, norm, theta, 4.0);
        REQUIRE(set.roots.size() == 1);
        CHECK(set.roots[0] == doctest::Approx(s_true).epsilon(1e-10));
        CHECK(set.residuals[0] <= 1e-9 * theta);
        CHECK_FALSE(set.degenerate_plateau);
    }
}

TEST_CASE("solution set is empty below inf M and degenerate for constant M")
{
    const MFunctionSpec m = make_m_function(MFunctionSpec{Affine{2.0, 1.0}});
    const SolutionSet empty = nonlocal_linear_solution_set(m, 1.0, 1.0, 1.0, 5.0);
    CHECK(empty.roots.empty());
    CHECK_FALSE(empty.degenerate_plateau);

    const MFunctionSpec constant = make_m_function(MFunctionSpec{Affine{1.0, 0.0}});
    const SolutionSet plateau = nonlocal_linear_solution_set(constant, 1.0, 1.0, 1.0, 5.0);
    CHECK(plateau.degenerate_plateau);
}

TEST_CASE("SSM certificate for the 1D Kirchhoff scenario")
{
    const Counterexample cex = kirchhoff_1d(Mode::Ssm, 0.5);
    const Certificate cert = certify(cex, kirchhoff_m());
    CHECK(cert.verdict == Verdict::CertifiedFailure);
    CHECK(cert.failing_check.empty());
    CHECK(cert.margins.sub_strict > 1e-8);
    CHECK(cert.margins.super_strict > 1e-8);
    CHECK(cert.margins.ordering_min_gap >= -1e-9);
    REQUIRE(cert.solution_set.roots.size() == 1);
    CHECK(cert.solution_set.roots[0] == doctest::Approx(0.956957).epsilon(1e-3));
    CHECK(std::abs(cert.solution_set.roots[0] - cert.params.A) > 0.1);
    // the forced value A is visibly not a root of g
    CHECK(cert.forced_s_residual == doctest::Approx(0.4384838).epsilon(1e-3));
    CHECK(cert.forced_s_residual > 1e-6 * cert.params.theta);
    CHECK_FALSE(cert.admissible_root_found);
}

TEST_CASE("certify is deterministic")
{
    const Counterexample cex = kirchhoff_1d(Mode::Ssm, 0.5);
    const Certificate a = certify(cex, kirchhoff_m());
    const Certificate b = certify(cex, kirchhoff_m());
    CHECK(std::memcmp(&a.margins, &b.margins, sizeof(a.margins)) == 0);
    CHECK(a.forced_s_residual == b.forced_s_residual);
    CHECK(a.solution_set.roots == b.solution_set.roots);
    CHECK(a.verdict == b.verdict);
}

TEST_CASE("tampered Theta is rejected and names the failing margin")
{
    Counterexample cex = kirchhoff_1d(Mode::Ssm, 0.5);
    cex.params.theta = 0.5 * cex.params.lambda1 * 2.0;  // below lambda1 M(t1)
    const Certificate cert = certify(cex, kirchhoff_m());
    CHECK(cert.verdict == Verdict::NotCertified);
    CHECK(cert.failing_check == "sub_strict");
}

TEST_CASE("strong CP certificate requires equality at p_tilde")
{
    const Counterexample cex = kirchhoff_1d(Mode::StrongCp, 0.5);
    const Certificate cert = certify(cex, kirchhoff_m());
    CHECK(cert.verdict == Verdict::CertifiedFailure);
    CHECK(std::abs(cert.margins.touch_gap_at_p_tilde) <=
          1e-9 * cex.upper.values.cwiseAbs().maxCoeff());
    CHECK(cert.margins.sub_strict > 0.0);
    CHECK(cert.margins.super_strict > 0.0);
}

TEST_CASE("weak CP certificate requires the ordering violation at p_tilde")
{
    const Counterexample cex = kirchhoff_1d(Mode::WeakCp, 0.5);
    const Certificate cert = certify(cex, kirchhoff_m());
    CHECK(cert.verdict == Verdict::CertifiedFailure);
    CHECK(cert.weak_cp_violation > 1e-9);
    const double bound =
        5.0 * cex.params.lambda_tau / (2.0 * cex.params.lambda1);
    CHECK(cert.params.alpha > 1.0);
    CHECK(cert.params.alpha < bound);
}

TEST_CASE("necessity demonstration reproduces the reversed pair")
{
    const DomainSpec dom = pi_interval();
    const Mesh mesh = build_mesh(dom, kPi / 2000);
    const OperatorPair ops = assemble(mesh);
    const EigenPair phi1 = principal_eigenpair(ops, mesh);
    const MFunctionSpec m = make_m_function(MFunctionSpec{RationalDecay{1.0}});

    const ReversedPairReport rep = demonstrate_product_necessity(m, 1.0, 2.0, phi1, ops);
    CHECK(rep.product_t1 == doctest::Approx(0.5));
    CHECK(rep.product_t2 == doctest::Approx(0.4));
    CHECK_FALSE(rep.degenerate);
    CHECK(rep.rhs_margin > 0.0);
    CHECK(rep.ordering_margin > 0.0);

    // margin density equals (0.1 lambda1) times the minimal phi density
    double min_density = std::numeric_limits<double>::infinity();
    const double norm = std::sqrt(h1_norm_sq(phi1.phi, ops));
    const Eigen::VectorXd mass_phi = ops.mass * (phi1.phi.values / norm);
    for (int i : ops.interior) {
        min_density = std::min(min_density, mass_phi[i] / ops.lumped_mass[i]);
    }
    CHECK(rep.rhs_margin ==
          doctest::Approx(0.1 * phi1.lambda * min_density).epsilon(1e-9));

    // every interior node satisfies ell > w
    for (int i : ops.interior) {
        CHECK(rep.upper.values[i] > rep.lower.values[i]);
    }
}

TEST_CASE("necessity demonstration flags the degenerate equality case")
{
    const DomainSpec dom = pi_interval();
    const Mesh mesh = build_mesh(dom, kPi / 200);
    const OperatorPair ops = assemble(mesh);
    const EigenPair phi1 = principal_eigenpair(ops, mesh);

    // tabulated M with M(1) * 1 = M(4) * 2 = 0.5
    const MFunctionSpec m =
        make_m_function(MFunctionSpec{Tabulated{{0.0, 1.0, 4.0, 10.0}, {0.5, 0.5, 0.25, 0.1}}});
    const ReversedPairReport rep = demonstrate_product_necessity(m, 1.0, 2.0, phi1, ops);
    CHECK(rep.degenerate);

    const MFunctionSpec constant = make_m_function(MFunctionSpec{Affine{1.0, 0.0}});
    CHECK_THROWS_AS(demonstrate_product_necessity(constant, 1.0, 2.0, phi1, ops),
                    PreconditionViolated);
    CHECK_THROWS_AS(demonstrate_product_necessity(m, 2.0, 1.0, phi1, ops),
                    PreconditionViolated);
}

TEST_CASE("no certificate can be forged for the CP_HOLDS family")
{
    // nonincreasing M with increasing product: M(t) = a (1+t)^(-q), q <= 0.45
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> adist(0.5, 5.0);
    std::uniform_real_distribution<double> qdist(0.05, 0.45);
    for (int k = 0; k < 20; ++k) {
        const double a = adist(rng);
        const double q = qdist(rng);
        Tabulated tab;
        const int n = 4001;
        for (int i = 0; i < n; ++i) {
            const double t = 120.0 * i / (n - 1);
            tab.t.push_back(t);
            tab.m.push_back(a * std::pow(1.0 + t, -q));
        }
        const MFunctionSpec m = make_m_function(MFunctionSpec{std::move(tab)});
        CHECK(classify(m, 10.0, 512).verdict == CPVerdict::Holds);
        CHECK_FALSE(find_increasing_pair(m, 10.0, 512).has_value());
    }
}
