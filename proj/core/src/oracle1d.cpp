#include "kcex/oracle1d.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include "kcex/errors.hpp"

namespace kcex {

namespace {

// 16-point Gauss-Legendre nodes and weights on [-1, 1]
constexpr double kGlx[8] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499,
};
constexpr double kGlw[8] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541,
};

double gl16(const std::function<double(double)>& f, double a, double b)
{
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (int k = 0; k < 8; ++k) {
        sum += kGlw[k] * (f(mid - half * kGlx[k]) + f(mid + half * kGlx[k]));
    }
    return half * sum;
}

// composite panels doubled until the value settles to relative 1e-12
double adaptive_quad(const std::function<double(double)>& f, double a, double b)
{
    if (!(b > a)) {
        return 0.0;
    }
    double prev = gl16(f, a, b);
    for (int panels = 2; panels <= 4096; panels *= 2) {
        double sum = 0.0;
        for (int p = 0; p < panels; ++p) {
            const double x0 = a + (b - a) * p / panels;
            const double x1 = a + (b - a) * (p + 1) / panels;
            sum += gl16(f, x0, x1);
        }
        if (std::abs(sum - prev) <= 1e-12 * std::max(std::abs(sum), 1e-300)) {
            return sum;
        }
        prev = sum;
    }
    return prev;
}

} // namespace

Oracle1DReport oracle_report(double tau, double epsilon, double alpha)
{
    if (!(tau > 0.0)) {
        throw PreconditionViolated("oracle requires tau > 0");
    }
    if (!(epsilon > 0.0) || !(epsilon <= 1.0)) {
        throw PreconditionViolated("oracle requires epsilon in (0, 1]");
    }
    if (!(alpha >= 1.0)) {
        throw PreconditionViolated("oracle requires alpha >= 1");
    }

    constexpr double half_pi = std::numbers::pi / 2.0;
    Oracle1DReport rep;
    rep.tau = tau;
    rep.epsilon = epsilon;
    rep.alpha = alpha;
    rep.L = 1.0 + 2.0 * tau / std::numbers::pi;
    rep.lambda1 = 1.0;
    rep.lambda_tau = 1.0 / (rep.L * rep.L);
    rep.c_tau = 1.0;  // cos(x)/cos(x/L) has its strict maximum 1 at the origin
    rep.p_tilde = 0.0;
    rep.norm_phi1_sq = half_pi;

    // branch crossing: cos(x)/eps = cos(x/L); d is strictly decreasing on (0, pi/2)
    if (epsilon >= 1.0) {
        rep.kink_x = 0.0;
    } else {
        auto d = [&](double x) { return std::cos(x) / epsilon - std::cos(x / rep.L); };
        double lo = 0.0, hi = half_pi;
        while (hi - lo > 1e-14) {
            const double mid = 0.5 * (lo + hi);
            if (d(mid) > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        rep.kink_x = 0.5 * (lo + hi);
    }

    const double inner = adaptive_quad(
        [&](double x) {
            const double s = std::sin(x / rep.L) / rep.L;
            return s * s;
        },
        0.0, rep.kink_x);
    const double outer = adaptive_quad(
        [&](double x) {
            const double s = std::sin(x) / epsilon;
            return s * s;
        },
        rep.kink_x, half_pi);
    rep.norm_u_sq = 2.0 * (inner + outer);
    return rep;
}

} // namespace kcex
