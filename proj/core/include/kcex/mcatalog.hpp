#pragma once

#include <optional>
#include <variant>
#include <vector>

namespace kcex {

/// M(t) = a + b t, a > 0, b >= 0 (b = 0 is the constant case).
struct Affine {
    double a = 1.0;
    double b = 0.0;
};

/// M(t) = a + b t^p, p > 0.
struct Power {
    double a = 1.0;
    double b = 0.0;
    double p = 1.0;
};

/// M(t) = a / (1 + t), a > 0.
struct RationalDecay {
    double a = 1.0;
};

/// Piecewise-linear interpolation of sampled values on a strictly
/// increasing grid; evaluation outside the grid is an error.
struct Tabulated {
    std::vector<double> t;
    std::vector<double> m;
};

struct MFunctionSpec {
    std::variant<Affine, Power, RationalDecay, Tabulated> kind;
};

/// Validates the structural invariants of the spec and returns it.
MFunctionSpec make_m_function(MFunctionSpec spec);

double eval_M(const MFunctionSpec& spec, double t);

/// A detected violation of monotonicity: 0 < t1 < t2 with M(t1) < M(t2).
struct IncreasingPair {
    double t1 = 0.0;
    double t2 = 0.0;
    double M1 = 0.0;
    double M2 = 0.0;
};

/// Geometric scan grid shared by find_increasing_pair and classify.
std::vector<double> monotonicity_grid(const MFunctionSpec& spec, double t_max, int n_grid);

/// Scans a geometric grid on (0, t_max] and returns the increasing pair
/// maximizing M(t2)/M(t1), or nothing when M is nonincreasing on the grid.
std::optional<IncreasingPair> find_increasing_pair(const MFunctionSpec& spec, double t_max,
                                                   int n_grid);

enum class CPVerdict {
    Holds,            // nonincreasing and M(t^2) t strictly increasing
    FailsByIncrease,  // M increases somewhere
    FailsByProduct,   // M nonincreasing but the product is not increasing
    Unknown,          // grid evidence equivocal (ties everywhere)
};

struct MClassification {
    bool nonincreasing = false;
    bool product_increasing = false;
    CPVerdict verdict = CPVerdict::Unknown;
    double t_max = 0.0;
    int n_grid = 0;
};

/// Grid-based monotonicity classification with strictness tolerance 1e-12
/// on differences; ties count against strict increase.
MClassification classify(const MFunctionSpec& spec, double t_max, int n_grid);

const char* to_string(CPVerdict verdict);

} // namespace kcex
