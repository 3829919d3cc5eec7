#include "vsd/specfun.hpp"

#include <array>
#include <cfloat>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace vsd::specfun {

namespace {

// Lanczos coefficients, g = 7, n = 9.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

double lanczos_gamma(double x) {
    // Valid for x >= 0.5.
    x -= 1.0;
    double a = kLanczos[0];
    const double t = x + kLanczosG + 0.5;
    for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (x + static_cast<double>(i));
    return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, x + 0.5) * std::exp(-t) * a;
}

// Exact (n-1)! for integer arguments up to 23, where it is still representable.
bool exact_factorial(double x, double& out) {
    if (x < 1.0 || x > 23.0 || x != std::floor(x)) return false;
    out = 1.0;
    for (int k = 2; k < static_cast<int>(x); ++k) out *= k;
    return true;
}

}  // namespace

void MLSeriesConfig::validate() const {
    if (series_terms < 20) throw std::invalid_argument("MLSeriesConfig: series_terms must be >= 20");
    if (!(tolerance > 0.0)) throw std::invalid_argument("MLSeriesConfig: tolerance must be > 0");
    if (!(asymptotic_switch > 0.0)) throw std::invalid_argument("MLSeriesConfig: asymptotic_switch must be > 0");
    if (asymptotic_terms < 1) throw std::invalid_argument("MLSeriesConfig: asymptotic_terms must be >= 1");
    if (talbot_nodes < 8) throw std::invalid_argument("MLSeriesConfig: talbot_nodes must be >= 8");
}

double gamma_fn(double x) {
    if (std::isnan(x)) throw std::domain_error("gamma_fn: NaN argument");
    if (is_nonpositive_integer(x)) throw std::domain_error("gamma_fn: pole at " + std::to_string(x));
    if (x < 0.5) {
        // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x).
        return std::numbers::pi / (std::sin(std::numbers::pi * x) * lanczos_gamma(1.0 - x));
    }
    if (x > 171.6) return std::numeric_limits<double>::infinity();
    if (double f; exact_factorial(x, f)) return f;
    return lanczos_gamma(x);
}

double reciprocal_gamma(double x) {
    if (is_nonpositive_integer(x)) return 0.0;
    if (x < 0.5) return std::sin(std::numbers::pi * x) * lanczos_gamma(1.0 - x) / std::numbers::pi;
    if (x > 171.6) return 0.0;
    if (double f; exact_factorial(x, f)) return 1.0 / f;
    return 1.0 / lanczos_gamma(x);
}

double digamma_fn(double x) {
    if (!(x > 0.0)) throw std::domain_error("digamma_fn: argument must be positive");
    double acc = 0.0;
    while (x < 10.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double inv2 = 1.0 / (x * x);
    // Bernoulli tail: B_2k / (2k x^2k), k = 1..6
    const double series =
        inv2 * (1.0 / 12.0 -
                inv2 * (1.0 / 120.0 -
                        inv2 * (1.0 / 252.0 - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * (691.0 / 32760.0))))));
    return acc + std::log(x) - 0.5 / x - series;
}

namespace detail {

double ml_series(double alpha, double beta, double z, int max_terms, double* max_term) {
    using ld = long double;
    const ld lz = static_cast<ld>(z);
    ld sum = 0.0L;
    ld biggest = 0.0L;
    const ld log_abs_z = (z != 0.0) ? std::log(std::fabs(lz)) : 0.0L;
    for (int k = 0; k < max_terms; ++k) {
        const ld arg = static_cast<ld>(alpha) * k + static_cast<ld>(beta);
        ld term;
        if (k == 0) {
            term = 1.0L / std::tgamma(arg);
        } else if (z == 0.0) {
            break;
        } else {
            term = std::exp(k * log_abs_z - std::lgamma(arg));
            if (z < 0.0 && (k % 2) == 1) term = -term;
        }
        sum += term;
        biggest = std::max(biggest, std::fabs(term));
        if (k > 4 && std::fabs(term) < LDBL_EPSILON * std::fabs(sum)) break;
    }
    if (max_term) *max_term = static_cast<double>(biggest);
    return static_cast<double>(sum);
}

double ml_asymptotic(double alpha, double beta, double z, int terms, double* tail) {
    // E_{a,b}(z) ~ -sum_{k=1}^{K} z^{-k} / Gamma(b - a k), |arg(-z)| < (1 - a/2) pi.
    double sum = 0.0;
    double zpow = 1.0;
    for (int k = 1; k <= terms; ++k) {
        zpow /= z;
        sum -= zpow * reciprocal_gamma(beta - alpha * k);
    }
    if (tail) {
        const double next = zpow / z * reciprocal_gamma(beta - alpha * (terms + 1));
        const double last = zpow * reciprocal_gamma(beta - alpha * terms);
        *tail = std::fabs(next) + std::fabs(last);
    }
    return sum;
}

double ml_talbot(double alpha, double beta, double z, int nodes) {
    // t^{b-1} E_{a,b}(-x t^a) has Laplace transform s^{a-b}/(s^a + x); invert at t = 1
    // with the fixed Talbot contour.
    using cd = std::complex<double>;
    const double x = -z;
    const auto F = [&](cd s) { return std::pow(s, alpha - beta) / (std::pow(s, alpha) + x); };
    const int M = nodes;
    const double r = 2.0 * M / 5.0;
    double acc = 0.5 * std::exp(r) * F(cd(r, 0.0)).real();
    for (int k = 1; k < M; ++k) {
        const double theta = k * std::numbers::pi / M;
        const double cot = 1.0 / std::tan(theta);
        const cd s(r * theta * cot, r * theta);
        const double sigma = theta + (theta * cot - 1.0) * cot;
        acc += (std::exp(s) * F(s) * cd(1.0, sigma)).real();
    }
    return r / M * acc;
}

}  // namespace detail

namespace {

void check_ml_args(double alpha, double beta, double z) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::domain_error("mittag_leffler: alpha must lie in (0,1]");
    if (!(beta > 0.0)) throw std::domain_error("mittag_leffler: beta must be positive");
    if (!(z <= 0.0)) throw std::domain_error("mittag_leffler: only z <= 0 is supported");
}

struct BranchChoice {
    MLBranch branch;
    double value;
};

BranchChoice choose(double alpha, double beta, double z, const MLSeriesConfig& cfg) {
    const double az = std::fabs(z);
    if (az <= cfg.asymptotic_switch) {
        double biggest = 0.0;
        const double s = detail::ml_series(alpha, beta, z, cfg.series_terms, &biggest);
        const double roundoff = 16.0 * static_cast<double>(LDBL_EPSILON) * biggest;
        // First omitted term; the series is alternating once the terms decrease.
        const double k = cfg.series_terms;
        const double truncation = std::exp(k * std::log(az) - std::lgamma(alpha * k + beta));
        if (roundoff <= 0.1 * cfg.tolerance && truncation <= 0.1 * cfg.tolerance) return {MLBranch::series, s};
    } else {
        double tail = 0.0;
        const double a = detail::ml_asymptotic(alpha, beta, z, cfg.asymptotic_terms, &tail);
        // alpha = 1 carries an exponentially small e^z z^{1-b} term the expansion omits.
        if (alpha == 1.0) tail += std::exp(z) * std::pow(az, 1.0 - beta);
        if (tail <= 0.1 * cfg.tolerance) return {MLBranch::asymptotic, a};
    }
    return {MLBranch::contour, detail::ml_talbot(alpha, beta, z, cfg.talbot_nodes)};
}

}  // namespace

double mittag_leffler(double alpha, double beta, double z, const MLSeriesConfig& cfg) {
    check_ml_args(alpha, beta, z);
    cfg.validate();
    if (z == 0.0) return reciprocal_gamma(beta);
    if (alpha == 1.0 && beta == 1.0) return std::exp(z);
    return choose(alpha, beta, z, cfg).value;
}

MLBranch mittag_leffler_branch(double alpha, double beta, double z, const MLSeriesConfig& cfg) {
    check_ml_args(alpha, beta, z);
    cfg.validate();
    if (z == 0.0 || (alpha == 1.0 && beta == 1.0)) return MLBranch::series;
    return choose(alpha, beta, z, cfg).branch;
}

}  // namespace vsd::specfun
