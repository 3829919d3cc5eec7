#pragma once

namespace vsd::specfun {

/// Evaluation policy for the two-parameter Mittag-Leffler function on the
/// negative real axis.
///
/// Three branches are used: the power series (summed in extended precision)
/// near the origin, the algebraic asymptotic expansion far out, and a
/// fixed-Talbot inversion of the Laplace transform in between. A branch is
/// only taken when its own error estimate is below `tolerance`.
struct MLSeriesConfig {
    int series_terms = 120;
    double asymptotic_switch = 5.0;
    double tolerance = 1e-10;
    int asymptotic_terms = 10;
    int talbot_nodes = 32;

    void validate() const;
};

double gamma_fn(double x);

/// 1/Gamma(x), defined everywhere (zero at the poles).
double reciprocal_gamma(double x);

double digamma_fn(double x);

/// E_{alpha,beta}(z) for alpha in (0,1], beta > 0, z <= 0.
double mittag_leffler(double alpha, double beta, double z, const MLSeriesConfig& cfg = {});

enum class MLBranch { series, asymptotic, contour };

/// Branch mittag_leffler() would select for these arguments.
MLBranch mittag_leffler_branch(double alpha, double beta, double z, const MLSeriesConfig& cfg = {});

namespace detail {
// Individual branches, exposed for cross-checking. No range policing.
double ml_series(double alpha, double beta, double z, int max_terms, double* max_term = nullptr);
double ml_asymptotic(double alpha, double beta, double z, int terms, double* tail = nullptr);
double ml_talbot(double alpha, double beta, double z, int nodes);
}  // namespace detail

}  // namespace vsd::specfun
