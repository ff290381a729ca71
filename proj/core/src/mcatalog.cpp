#include "kcex/mcatalog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kcex/errors.hpp"

namespace kcex {

namespace {

constexpr double kStrictTol = 1e-12;  // ties within this count against strict increase
constexpr double kGridSpan = 1e6;     // geometric grid covers [t_max/kGridSpan, t_max]

struct TabRange {
    double lo;
    double hi;
};

TabRange tab_range(const MFunctionSpec& spec)
{
    if (const auto* tab = std::get_if<Tabulated>(&spec.kind)) {
        return {tab->t.front(), tab->t.back()};
    }
    return {0.0, std::numeric_limits<double>::infinity()};
}

std::vector<double> geometric_grid(double lo, double hi, int n)
{
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        g[static_cast<std::size_t>(i)] =
            hi * std::pow(lo / hi, static_cast<double>(n - 1 - i) / (n - 1));
    }
    g.front() = lo;
    g.back() = hi;
    return g;
}

void validate_scan_args(double t_max, int n_grid)
{
    if (!(t_max > 0.0)) {
        throw PreconditionViolated("scan range t_max must be positive");
    }
    if (n_grid < 3) {
        throw PreconditionViolated("scan grid needs at least 3 points");
    }
}

// nonincreasing on the grid = no pair i < j with M(t_j) - min_{k<=i} M(t_k)
// beyond the strictness tolerance; shared with find_increasing_pair so the
// two always agree
bool grid_nonincreasing(const std::vector<double>& values)
{
    double run_min = values.front();
    for (std::size_t j = 1; j < values.size(); ++j) {
        if (values[j] - run_min > kStrictTol) {
            return false;
        }
        run_min = std::min(run_min, values[j]);
    }
    return true;
}

} // namespace

MFunctionSpec make_m_function(MFunctionSpec spec)
{
    std::visit(
        [](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Affine>) {
                if (!(m.a > 0.0) || !(m.b >= 0.0)) {
                    throw PreconditionViolated("affine M requires a > 0 and b >= 0");
                }
            } else if constexpr (std::is_same_v<T, Power>) {
                if (!(m.a >= 0.0) || !(m.p > 0.0)) {
                    throw PreconditionViolated("power M requires a >= 0 and p > 0");
                }
            } else if constexpr (std::is_same_v<T, RationalDecay>) {
                if (!(m.a > 0.0)) {
                    throw PreconditionViolated("rational-decay M requires a > 0");
                }
            } else {
                if (m.t.size() < 2 || m.t.size() != m.m.size()) {
                    throw PreconditionViolated(
                        "tabulated M needs matching grids with at least 2 samples");
                }
                for (std::size_t i = 0; i + 1 < m.t.size(); ++i) {
                    if (!(m.t[i] < m.t[i + 1])) {
                        throw PreconditionViolated("tabulated grid must be strictly increasing");
                    }
                }
                for (double v : m.m) {
                    if (!(v >= 0.0)) {
                        throw PreconditionViolated("tabulated M must be nonnegative");
                    }
                }
            }
        },
        spec.kind);
    return spec;
}

double eval_M(const MFunctionSpec& spec, double t)
{
    if (!(t >= 0.0)) {
        throw OutOfRange("M is only defined for t >= 0");
    }
    return std::visit(
        [t](const auto& m) -> double {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Affine>) {
                return m.a + m.b * t;
            } else if constexpr (std::is_same_v<T, Power>) {
                return m.a + m.b * std::pow(t, m.p);
            } else if constexpr (std::is_same_v<T, RationalDecay>) {
                return m.a / (1.0 + t);
            } else {
                if (t < m.t.front() - 1e-12 || t > m.t.back() + 1e-12) {
                    throw OutOfRange("t outside the tabulated range");
                }
                const double tc = std::clamp(t, m.t.front(), m.t.back());
                const auto it = std::upper_bound(m.t.begin(), m.t.end(), tc);
                const std::size_t j = std::min(
                    m.t.size() - 2,
                    static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - m.t.begin() - 1)));
                const double w = (tc - m.t[j]) / (m.t[j + 1] - m.t[j]);
                return (1.0 - w) * m.m[j] + w * m.m[j + 1];
            }
        },
        spec.kind);
}

std::vector<double> monotonicity_grid(const MFunctionSpec& spec, double t_max, int n_grid)
{
    validate_scan_args(t_max, n_grid);
    const auto range = tab_range(spec);
    const double hi = std::min(t_max, range.hi);
    const double lo = std::max(hi / kGridSpan, range.lo);
    if (!(lo < hi)) {
        throw PreconditionViolated("empty scan range after clamping to the tabulated grid");
    }
    return geometric_grid(std::max(lo, std::numeric_limits<double>::min()), hi, n_grid);
}

std::optional<IncreasingPair> find_increasing_pair(const MFunctionSpec& spec, double t_max,
                                                   int n_grid)
{
    const auto grid = monotonicity_grid(spec, t_max, n_grid);
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        values[i] = eval_M(spec, grid[i]);
        if (!(values[i] >= 0.0)) {
            throw PreconditionViolated("M is negative on the scan grid");
        }
    }

    // running prefix minimum (earliest index on ties) maximizes M2/M1
    std::size_t min_idx = 0;
    std::size_t best_i = 0, best_j = 0;
    double best_score = -1.0;  // ratio M2/M1, infinity encoded below
    bool found = false;
    for (std::size_t j = 1; j < grid.size(); ++j) {
        const double m1 = values[min_idx];
        if (values[j] - m1 > kStrictTol) {
            const double score = m1 > 0.0 ? values[j] / m1 : std::numeric_limits<double>::infinity();
            if (!found || score > best_score) {
                found = true;
                best_score = score;
                best_i = min_idx;
                best_j = j;
            }
        }
        if (values[j] < values[min_idx]) {
            min_idx = j;
        }
    }
    if (!found) {
        return std::nullopt;
    }
    return IncreasingPair{grid[best_i], grid[best_j], values[best_i], values[best_j]};
}

MClassification classify(const MFunctionSpec& spec, double t_max, int n_grid)
{
    const auto grid = monotonicity_grid(spec, t_max, n_grid);
    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        values[i] = eval_M(spec, grid[i]);
        if (!(values[i] >= 0.0)) {
            throw PreconditionViolated("M is negative on the scan grid");
        }
    }

    // product scan needs M at t^2, so its grid is capped at sqrt of the
    // representable range for tabulated specs
    const auto range = tab_range(spec);
    const double hi_p = std::min({t_max, range.hi, std::sqrt(range.hi)});
    const double lo_p = std::max({hi_p / kGridSpan, range.lo, std::sqrt(range.lo)});
    MClassification out;
    out.t_max = t_max;
    out.n_grid = n_grid;
    out.nonincreasing = grid_nonincreasing(values);

    bool product_ties_everywhere = true;
    bool product_increasing = true;
    if (lo_p < hi_p) {
        const auto pgrid = geometric_grid(std::max(lo_p, std::numeric_limits<double>::min()),
                                          hi_p, n_grid);
        double prev = eval_M(spec, pgrid.front() * pgrid.front()) * pgrid.front();
        for (std::size_t i = 1; i < pgrid.size(); ++i) {
            const double cur = eval_M(spec, pgrid[i] * pgrid[i]) * pgrid[i];
            const double diff = cur - prev;
            if (std::abs(diff) > kStrictTol) {
                product_ties_everywhere = false;
            }
            if (diff <= kStrictTol) {
                product_increasing = false;  // tie or decrease
            }
            prev = cur;
        }
    } else {
        product_increasing = false;
    }
    out.product_increasing = product_increasing;

    if (!out.nonincreasing) {
        out.verdict = CPVerdict::FailsByIncrease;
    } else if (out.product_increasing) {
        out.verdict = CPVerdict::Holds;
    } else if (product_ties_everywhere) {
        out.verdict = CPVerdict::Unknown;
    } else {
        out.verdict = CPVerdict::FailsByProduct;
    }
    return out;
}

const char* to_string(CPVerdict verdict)
{
    switch (verdict) {
        case CPVerdict::Holds: return "CP_HOLDS";
        case CPVerdict::FailsByIncrease: return "CP_FAILS_BY_INCREASE";
        case CPVerdict::FailsByProduct: return "CP_FAILS_BY_PRODUCT";
        case CPVerdict::Unknown: return "UNKNOWN";
    }
    return "UNKNOWN";
}

} // namespace kcex
