#pragma once

#include <functional>
#include <span>
#include <vector>

namespace vsd {

struct AlphaValue {
    double alpha;
    double alpha_prime;
};

/// Variable fractional order alpha(t) on [0, horizon].
///
/// Construction verifies 0 < alpha < 1 on the whole horizon: exactly at the
/// endpoints for the affine kind, by sampling 10^4 points for custom callables.
class ExponentProfile {
public:
    enum class Kind { affine, custom };

    static ExponentProfile affine(double a0, double slope, double horizon);
    static ExponentProfile custom(std::function<double(double)> alpha,
                                  std::function<double(double)> alpha_prime, double horizon);

    AlphaValue eval(double t) const;

    Kind kind() const noexcept { return kind_; }
    double a0() const noexcept { return a0_; }
    double slope() const noexcept { return slope_; }
    double horizon() const noexcept { return horizon_; }
    bool is_constant() const noexcept { return kind_ == Kind::affine && slope_ == 0.0; }

private:
    ExponentProfile() = default;

    Kind kind_ = Kind::affine;
    double a0_ = 0.5;
    double slope_ = 0.0;
    double horizon_ = 1.0;
    std::function<double(double)> alpha_;
    std::function<double(double)> alpha_prime_;
};

AlphaValue eval_alpha(const ExponentProfile& p, double t);

/// Split k(t) = t^{-a0}/Gamma(1-a0) + gtilde(t) of the variable-order Abel kernel.
class KernelSplit {
public:
    KernelSplit(ExponentProfile profile, double horizon);

    const ExponentProfile& profile() const noexcept { return profile_; }
    double alpha0() const noexcept { return alpha0_; }
    double horizon() const noexcept { return horizon_; }

    /// k(t) = t^{-alpha(t)} / Gamma(1 - alpha(t)), t > 0.
    double abel_kernel(double t) const;
    /// Constant-order part t^{-a0} / Gamma(1 - a0), t > 0.
    double leading_kernel(double t) const;
    /// gtilde(t) = k(t) - leading_kernel(t); gtilde(0) = 0.
    double gtilde(double t) const;
    double gtilde_prime(double t) const;

    /// weights[j] = gtilde(t_{j+1}) - gtilde(t_j), t_j = j dt, j < n.
    std::vector<double> convolution_weights(double dt, std::size_t n) const;

private:
    void check_time(double t, const char* who) const;

    ExponentProfile profile_;
    double alpha0_;
    double horizon_;
    double rgamma0_;  // 1 / Gamma(1 - a0)
    double log_gamma0_;
};

double eval_abel_kernel(const KernelSplit& ks, double t);
double eval_gtilde(const KernelSplit& ks, double t);
double eval_gtilde_prime(const KernelSplit& ks, double t);
std::vector<double> convolution_weights(const KernelSplit& ks, double dt, std::size_t n);

struct KernelBoundReport {
    double c_g = 0.0;   // max |gtilde| / (t^{1-a0} (1 + |ln t|))
    double c_gp = 0.0;  // max |gtilde'| / (t^{-a0} (1 + |ln t|))
    // Ratio of the fitted constant over t < 1e-2 to the one over t >= 1e-2;
    // a growing ratio would mean the bound fails as t -> 0.
    double near_zero_ratio_g = 0.0;
    double near_zero_ratio_gp = 0.0;
    bool pass = false;
};

/// Fit the real-axis constants of |gtilde| <= C t^{1-a0}(1+|ln t|) and
/// |gtilde'| <= C t^{-a0}(1+|ln t|) over `t_grid` (all points in (0, T]).
KernelBoundReport verify_kernel_bounds(const KernelSplit& ks, std::span<const double> t_grid);

}  // namespace vsd
