#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "kcex/assembly.hpp"
#include "kcex/eigensolve.hpp"
#include "kcex/geometry.hpp"
#include "kcex/mcatalog.hpp"

namespace kcex {

enum class Mode { Ssm, StrongCp, WeakCp };

const char* to_string(Mode mode);

/// c_tau with the touching point p_tilde where c_tau * phi_tau = phi_1,
/// and the nonnegative gap field c_tau * phi_tau|_Omega - phi_1.
struct TouchingData {
    double c_tau = 1.0;
    int p_tilde_index = -1;
    Point p_tilde;
    Field gap;
};

/// Nodal minimum of c_tau * phi_tau and phi_1 / epsilon. `inner_set` marks
/// the boundary-layer set where phi_1 / epsilon < c_tau * phi_tau.
struct GluedFunction {
    double epsilon = 1.0;
    Field values;
    std::vector<std::uint8_t> inner_set;
};

struct CounterexampleParams {
    double tau = 0.0;
    double theta = 0.0;
    double alpha = 1.0;
    double A = 0.0;
    double epsilon = 1.0;
    double t1 = 0.0;
    double t2 = 0.0;
    Mode mode = Mode::Ssm;
    // derived quantities recorded for certificates
    double lambda1 = 0.0;
    double lambda_tau = 0.0;
    double c_tau = 1.0;
    double norm_phi1_sq = 0.0;
    double norm_u_sq = 0.0;  // squared H-norm of the unscaled glued function
};

/// Everything the verification stage needs: the ordered pair on the inner
/// mesh together with the operators and construction data that produced it.
struct Counterexample {
    Mesh mesh;
    OperatorPair ops;
    Field lower;  // A alpha phi_1      (the subsolution / ell)
    Field upper;  // A u_{eps,tau}      (the supersolution / w)
    EigenPair eigen_inner;
    double lambda_tau = 0.0;
    Field phi_tau_restricted;
    TouchingData touching;
    GluedFunction glued;
    CounterexampleParams params;
    int outer_node_count = 0;
};

/// c_tau = max over interior nodes of phi_1 / phi_tau|_Omega, with the argmax
/// node as touching point (smallest index on ties).
TouchingData compute_c_tau(const EigenPair& phi1, const Field& phi_tau_restricted,
                           const Mesh& mesh);

GluedFunction glue(const TouchingData& touching, const EigenPair& phi1,
                   const Field& phi_tau_restricted, double epsilon);

/// Midpoint of the open interval (lambda1 M1, lambda_tau M2).
double select_theta(double lambda1, double lambda_tau, double M1, double M2);

/// A = sqrt(t1) / (alpha sqrt(norm_phi1_sq)).
double select_scale_A(double alpha, double norm_phi1_sq, double t1);

struct TauSelection {
    double tau = 0.0;
    EigenPair inner;
    EigenPair outer;
    Mesh inner_mesh;
    Mesh outer_mesh;
    OperatorPair inner_ops;
};

/// Finds tau with lambda_tau/lambda_1 > M(t1)/M(t2) * (1 + 1e-3), halving
/// from a quarter of the inradius at most 40 times. In 1D candidate taus are
/// rounded up to whole multiples of the grid spacing so the enlarged grid
/// contains the inner grid nodes. An explicit tau skips the search but is
/// still validated against the ratio condition.
TauSelection select_tau(const MFunctionSpec& M, const IncreasingPair& pair,
                        const DomainSpec& domain, double h,
                        std::optional<double> tau_override = std::nullopt);

struct EpsilonSelection {
    double epsilon = 1.0;
    GluedFunction glued;
};

/// Bisection on log(eps) for A^2 ||u_eps||^2 = t2 to relative 1e-6. The
/// lower bracket expands downward by factors of 10; reaching 1e-12 without
/// bracketing raises BracketFailure.
EpsilonSelection select_epsilon(const std::function<GluedFunction(double)>& builder, double A,
                                double t2, const OperatorPair& ops);

/// Full pipeline: select_tau -> compute_c_tau -> select_theta -> alpha per
/// mode -> select_scale_A -> select_epsilon.
Counterexample build_counterexample(const DomainSpec& domain, const MFunctionSpec& M,
                                    const IncreasingPair& pair, Mode mode, double h,
                                    std::optional<double> tau_override = std::nullopt);

} // namespace kcex
