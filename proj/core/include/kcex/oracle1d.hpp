#pragma once

namespace kcex {

/// Closed-form reference values on Omega = (-pi/2, pi/2): phi_1 = cos(x),
/// lambda_1 = 1, and on the tau-enlarged interval phi_tau = cos(x/L) with
/// L = 1 + 2 tau / pi, lambda_tau = 1/L^2.
struct Oracle1DReport {
    double tau = 0.0;
    double epsilon = 1.0;
    double alpha = 1.0;
    double L = 1.0;
    double lambda1 = 1.0;
    double lambda_tau = 1.0;
    double c_tau = 1.0;
    double p_tilde = 0.0;
    double norm_phi1_sq = 0.0;  // pi/2
    double kink_x = 0.0;        // root of cos(x/L) = cos(x)/eps in (0, pi/2); 0 at eps = 1
    double norm_u_sq = 0.0;     // squared H-norm of min{cos(x/L), cos(x)/eps}
};

/// kink_x by bisection to 1e-14; norm_u_sq by composite Gauss-Legendre
/// quadrature of the piecewise |u'|^2 to relative 1e-10.
Oracle1DReport oracle_report(double tau, double epsilon, double alpha);

} // namespace kcex
