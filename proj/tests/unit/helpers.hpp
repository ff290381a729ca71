#pragma once

#include <numbers>
#include <optional>

#include "kcex/construct.hpp"

namespace kcex::testing {

inline DomainSpec pi_interval()
{
    return make_domain(DomainSpec{Interval{-std::numbers::pi / 2, std::numbers::pi / 2}});
}

inline MFunctionSpec kirchhoff_m()
{
    return make_m_function(MFunctionSpec{Affine{1.0, 1.0}});
}

inline IncreasingPair kirchhoff_pair(double t1 = 1.0, double t2 = 4.0)
{
    const MFunctionSpec m = kirchhoff_m();
    return IncreasingPair{t1, t2, eval_M(m, t1), eval_M(m, t2)};
}

/// The paper's 1D Kirchhoff scenario; tau = 0.5 pinned unless told otherwise.
inline Counterexample kirchhoff_1d(Mode mode = Mode::Ssm,
                                   std::optional<double> tau = 0.5,
                                   double h = std::numbers::pi / 2000)
{
    return build_counterexample(pi_interval(), kirchhoff_m(), kirchhoff_pair(), mode, h, tau);
}

} // namespace kcex::testing
