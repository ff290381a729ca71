#pragma once

#include <string>
#include <vector>

#include "kcex/construct.hpp"

namespace kcex {

/// Minimum over interior rows of (K u - coeff Mm u)_i / (Mm 1)_i, a
/// mass-normalized per-node density. A value >= -1e-8 certifies the discrete
/// weak inequality -Laplace(u) >= coeff * u against all nonnegative hats.
double check_weak_supersolution(const Field& u, double coeff, const OperatorPair& ops);

struct OrderingReport {
    double min_gap = 0.0;
    std::vector<int> touch_nodes;
};

/// min over nodes of (upper - lower) and the nodes where the gap is within
/// 1e-9 * max|upper| of zero.
OrderingReport check_pair_ordering(const Counterexample& cex);

struct StrictMargins {
    double sub_margin = 0.0;    // min (Theta Mm lower - M(t1) K lower) / (Mm 1)
    double super_margin = 0.0;  // min (M(t2) K upper - Theta Mm upper) / (Mm 1)
};

StrictMargins check_strict_inequalities(const Counterexample& cex, const MFunctionSpec& M);

/// Roots of g(s) = M(s^2 norm_phi1_sq) lambda1 - Theta on (0, s_max].
struct SolutionSet {
    std::vector<double> roots;
    std::vector<double> residuals;
    double s_lo = 0.0;
    double s_hi = 0.0;
    int n_scan = 0;
    bool degenerate_plateau = false;
};

/// Sign-change scan on 4096 points plus bisection refinement to 1e-12
/// relative. An empty set is a valid result; a run of near-zero scan values
/// flags a degenerate plateau (constant-M eigenvalue case).
SolutionSet nonlocal_linear_solution_set(const MFunctionSpec& M, double lambda1,
                                         double norm_phi1_sq, double theta, double s_max);

enum class Verdict { CertifiedFailure, NotCertified };

const char* to_string(Verdict verdict);

struct CertificateMargins {
    double sub_strict = 0.0;
    double super_strict = 0.0;
    double ordering_min_gap = 0.0;
    double touch_gap_at_p_tilde = 0.0;     // upper(p~) - lower(p~), signed
    double weak_supersolution_min = 0.0;   // diagnostic, see notes in certify
};

struct CertificateTolerances {
    double strict_margin = 1e-8;
    double ordering = 1e-9;
    double touch_rel = 1e-9;
    double weak_violation = 1e-9;
    double forced_root_rel = 1e-6;
    double sandwich_rel = 1e-9;
    double weak_supersolution = 1e-8;
};

struct Certificate {
    Mode mode = Mode::Ssm;
    Verdict verdict = Verdict::NotCertified;
    std::string failing_check;  // empty when certified
    CertificateMargins margins;
    double weak_cp_violation = 0.0;  // lower(p~) - upper(p~), WeakCp only
    SolutionSet solution_set;
    double forced_s = 0.0;           // A alpha, the value the touching point forces
    double forced_s_residual = 0.0;  // |g(A alpha)|
    bool admissible_root_found = false;
    CounterexampleParams params;
    CertificateTolerances tolerances;
    // provenance
    double mesh_h = 0.0;
    int inner_nodes = 0;
    int outer_nodes = 0;
    int p_tilde_index = -1;
    Point p_tilde;
};

/// Machine-checks every inequality of the construction and issues the
/// verdict. Gates per mode:
///   Ssm:      strict margins > 1e-8, ordering >= -1e-9, touch at p~, and the
///             no-solution argument (the touching point forces s = A alpha;
///             |g(A alpha)| must exceed 1e-6 Theta and no scanned root may fit
///             between lower and upper).
///   StrongCp: strict margins, ordering, touch at p~.
///   WeakCp:   strict margins and lower(p~) - upper(p~) > 1e-9.
/// The weak-supersolution density margin is recorded for reference; on
/// non-nested 2D meshes interpolation noise makes it meaningless at the
/// 1e-8 scale, so it does not gate the verdict.
Certificate certify(const Counterexample& cex, const MFunctionSpec& M);

struct ReversedPairReport {
    double rhs_margin = 0.0;       // min density gap of the reversed operator inequality
    double ordering_margin = 0.0;  // min interior gap of ell - w
    bool degenerate = false;       // equality of the two products
    double product_t1 = 0.0;       // M(t1^2) t1
    double product_t2 = 0.0;       // M(t2^2) t2
    Field lower;                   // w = t1 phi_hat
    Field upper;                   // ell = t2 phi_hat
};

/// The introduction's necessity argument for the product condition: with
/// M(t1^2) t1 >= M(t2^2) t2 the pair ell = t2 phi_hat, w = t1 phi_hat
/// satisfies the reversed operator inequality while ell > w inside.
ReversedPairReport demonstrate_product_necessity(const MFunctionSpec& M, double t1, double t2,
                                                 const EigenPair& phi1, const OperatorPair& ops);

} // namespace kcex
