#include "vsd/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "vsd/specfun.hpp"

namespace vsd {

namespace {

constexpr int kProfileSamples = 10000;
constexpr double kNearZero = 1e-2;

// Roundoff slack when comparing n*dt against the horizon.
bool within_horizon(double t, double horizon) { return t <= horizon * (1.0 + 1e-12); }

}  // namespace

ExponentProfile ExponentProfile::affine(double a0, double slope, double horizon) {
    if (!(horizon > 0.0)) throw std::invalid_argument("ExponentProfile: horizon must be positive");
    const double a_end = a0 + slope * horizon;
    if (!(a0 > 0.0 && a0 < 1.0 && a_end > 0.0 && a_end < 1.0)) {
        throw std::domain_error("ExponentProfile: affine order leaves (0,1) on [0, horizon]");
    }
    ExponentProfile p;
    p.kind_ = Kind::affine;
    p.a0_ = a0;
    p.slope_ = slope;
    p.horizon_ = horizon;
    return p;
}

ExponentProfile ExponentProfile::custom(std::function<double(double)> alpha,
                                        std::function<double(double)> alpha_prime, double horizon) {
    if (!alpha || !alpha_prime) throw std::invalid_argument("ExponentProfile: empty callable");
    if (!(horizon > 0.0)) throw std::invalid_argument("ExponentProfile: horizon must be positive");
    for (int i = 0; i <= kProfileSamples; ++i) {
        const double t = horizon * i / kProfileSamples;
        const double a = alpha(t);
        if (!(a > 0.0 && a < 1.0) || !std::isfinite(alpha_prime(t))) {
            throw std::domain_error("ExponentProfile: custom order invalid at t=" + std::to_string(t));
        }
    }
    ExponentProfile p;
    p.kind_ = Kind::custom;
    p.a0_ = alpha(0.0);
    p.slope_ = alpha_prime(0.0);
    p.horizon_ = horizon;
    p.alpha_ = std::move(alpha);
    p.alpha_prime_ = std::move(alpha_prime);
    return p;
}

AlphaValue ExponentProfile::eval(double t) const {
    if (!(t >= 0.0) || !within_horizon(t, horizon_)) {
        throw std::domain_error("ExponentProfile::eval: t=" + std::to_string(t) + " outside [0,T]");
    }
    if (kind_ == Kind::affine) return {a0_ + slope_ * t, slope_};
    return {alpha_(t), alpha_prime_(t)};
}

AlphaValue eval_alpha(const ExponentProfile& p, double t) { return p.eval(t); }

KernelSplit::KernelSplit(ExponentProfile profile, double horizon)
    : profile_(std::move(profile)), alpha0_(profile_.eval(0.0).alpha), horizon_(horizon) {
    if (!(horizon_ > 0.0)) throw std::invalid_argument("KernelSplit: horizon must be positive");
    if (!within_horizon(horizon_, profile_.horizon())) {
        throw std::invalid_argument("KernelSplit: horizon exceeds the profile's validated range");
    }
    rgamma0_ = specfun::reciprocal_gamma(1.0 - alpha0_);
    log_gamma0_ = std::log(specfun::gamma_fn(1.0 - alpha0_));
}

void KernelSplit::check_time(double t, const char* who) const {
    if (!within_horizon(t, horizon_)) {
        throw std::domain_error(std::string(who) + ": t=" + std::to_string(t) + " beyond horizon");
    }
}

double KernelSplit::abel_kernel(double t) const {
    if (!(t > 0.0)) throw std::domain_error("abel_kernel: t must be positive");
    check_time(t, "abel_kernel");
    const double a = profile_.eval(t).alpha;
    return std::exp(-a * std::log(t)) * specfun::reciprocal_gamma(1.0 - a);
}

double KernelSplit::leading_kernel(double t) const {
    if (!(t > 0.0)) throw std::domain_error("leading_kernel: t must be positive");
    return std::exp(-alpha0_ * std::log(t)) * rgamma0_;
}

double KernelSplit::gtilde(double t) const {
    if (t < 0.0 || std::isnan(t)) throw std::domain_error("gtilde: t must be nonnegative");
    if (t == 0.0) return 0.0;
    check_time(t, "gtilde");
    // k/beta = exp(-(a - a0) ln t) * Gamma(1-a0)/Gamma(1-a); expm1 keeps the small
    // difference accurate as t -> 0.
    const double a = profile_.eval(t).alpha;
    const double exponent = -(a - alpha0_) * std::log(t) + (log_gamma0_ - std::log(specfun::gamma_fn(1.0 - a)));
    return leading_kernel(t) * std::expm1(exponent);
}

double KernelSplit::gtilde_prime(double t) const {
    if (!(t > 0.0)) throw std::domain_error("gtilde_prime: t must be positive");
    check_time(t, "gtilde_prime");
    const auto [a, ap] = profile_.eval(t);
    const double beta = leading_kernel(t);
    const double g = gtilde(t);
    const double k = beta + g;
    // k' = k (-a' ln t - a/t + psi(1-a) a'); the 1/t parts of k' and beta' are
    // combined as a*g + (a - a0)*beta to avoid cancellation.
    return k * ap * (specfun::digamma_fn(1.0 - a) - std::log(t)) - (a * g + (a - alpha0_) * beta) / t;
}

std::vector<double> KernelSplit::convolution_weights(double dt, std::size_t n) const {
    if (!(dt > 0.0)) throw std::domain_error("convolution_weights: dt must be positive");
    if (!within_horizon(dt * static_cast<double>(n), horizon_)) {
        throw std::domain_error("convolution_weights: n*dt exceeds the horizon");
    }
    std::vector<double> w(n);
    double prev = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double next = gtilde(std::min(dt * static_cast<double>(j + 1), horizon_));
        w[j] = next - prev;
        prev = next;
    }
    return w;
}

double eval_abel_kernel(const KernelSplit& ks, double t) { return ks.abel_kernel(t); }
double eval_gtilde(const KernelSplit& ks, double t) { return ks.gtilde(t); }
double eval_gtilde_prime(const KernelSplit& ks, double t) { return ks.gtilde_prime(t); }
std::vector<double> convolution_weights(const KernelSplit& ks, double dt, std::size_t n) {
    return ks.convolution_weights(dt, n);
}

KernelBoundReport verify_kernel_bounds(const KernelSplit& ks, std::span<const double> t_grid) {
    if (t_grid.empty()) throw std::invalid_argument("verify_kernel_bounds: empty grid");
    const double a0 = ks.alpha0();
    double g_small = 0.0, g_large = 0.0, gp_small = 0.0, gp_large = 0.0;
    bool any_small = false, any_large = false;
    for (const double t : t_grid) {
        if (!(t > 0.0)) throw std::invalid_argument("verify_kernel_bounds: grid points must lie in (0,T]");
        const double log_weight = 1.0 + std::fabs(std::log(t));
        const double rg = std::fabs(ks.gtilde(t)) / (std::pow(t, 1.0 - a0) * log_weight);
        const double rgp = std::fabs(ks.gtilde_prime(t)) / (std::pow(t, -a0) * log_weight);
        if (t < kNearZero) {
            any_small = true;
            g_small = std::max(g_small, rg);
            gp_small = std::max(gp_small, rgp);
        } else {
            any_large = true;
            g_large = std::max(g_large, rg);
            gp_large = std::max(gp_large, rgp);
        }
    }
    KernelBoundReport report;
    report.c_g = std::max(g_small, g_large);
    report.c_gp = std::max(gp_small, gp_large);
    const auto ratio = [&](double small, double large) {
        if (!any_small || !any_large || small == 0.0) return 0.0;
        return large > 0.0 ? small / large : std::numeric_limits<double>::infinity();
    };
    report.near_zero_ratio_g = ratio(g_small, g_large);
    report.near_zero_ratio_gp = ratio(gp_small, gp_large);
    report.pass = std::isfinite(report.c_g) && std::isfinite(report.c_gp) && report.near_zero_ratio_g <= 10.0 &&
                  report.near_zero_ratio_gp <= 10.0;
    return report;
}

}  // namespace vsd
