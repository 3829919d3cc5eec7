#pragma once

#include <functional>
#include <vector>

#include "vsd/grid.hpp"
#include "vsd/kernel.hpp"

namespace vsd::oracle {

/// Dirichlet eigenpair of -Delta on the unit square with its source coefficient.
/// phi_{nm} = 2 sin(n pi x) sin(m pi y), lambda = pi^2 (n^2 + m^2).
struct Mode {
    int n;
    int m;
    double lambda;
    double coefficient;
};

struct ModeSet {
    int max_index = 0;
    std::vector<Mode> modes;  // (n, m) in row-major order, 1 <= n,m <= M
};

/// L2 projections onto phi_{nm} by composite Simpson on >= 4M intervals per axis.
ModeSet project_modes(const std::function<double(double, double)>& f, int max_index);
/// Projection of a grid field (nodal samples plus zero boundary). Simpson when
/// the cell count is even, trapezoidal otherwise.
ModeSet project_modes(const GridField& f, int max_index);

/// Scalar Volterra problem c d^{a0} c + lambda c + gtilde' * c = q + gtilde c0,
/// c(0) = c0, on a uniform mesh of `steps` cells over [0, horizon]. Returns
/// c at t_0..t_steps.
std::vector<double> solve_mode_scalar(const KernelSplit& ks, double lambda, const std::function<double(double)>& q,
                                      double c0, int steps, double horizon);

/// Truncated eigenfunction expansion of the zero-initial-value solution driven by f(x) beta(t).
class SpectralSolution {
public:
    SpectralSolution(ModeSet modes, double horizon, int steps, std::vector<std::vector<double>> coefficients);

    double value(double x, double y, double t) const;
    /// Samples the expansion on the interior nodes of `grid` at time t.
    GridField field(const Grid2D& grid, double t) const;
    /// Mode coefficient c_{nm}(t) (linear in time between fine mesh points).
    double coefficient(std::size_t mode_index, double t) const;

    const ModeSet& modes() const noexcept { return modes_; }
    double horizon() const noexcept { return horizon_; }
    int steps() const noexcept { return steps_; }

private:
    void locate(double t, std::size_t& i, double& theta) const;

    ModeSet modes_;
    double horizon_;
    int steps_;
    std::vector<std::vector<double>> coef_;  // per mode, per fine time
};

/// Modes whose |coefficient| is below `drop_below` times the largest are skipped.
SpectralSolution spectral_solution(const KernelSplit& ks, const ModeSet& modes, const std::function<double(double)>& beta,
                                   int fine_steps, double horizon, double drop_below = 1e-14);

}  // namespace vsd::oracle
