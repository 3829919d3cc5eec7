#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "vsd/grid.hpp"
#include "vsd/kernel.hpp"

namespace vsd {

/// b_j = (j+1)^{1-a0} - j^{1-a0}, j = 0..n-1 (L1 weights of the Caputo derivative).
std::vector<double> l1_weights(double alpha0, std::size_t n);

/// Uniform time mesh t_n = n dt on [0,T] together with the L1 weights for a0.
class TimeGrid {
public:
    TimeGrid(double horizon, int steps, double alpha0);

    double horizon() const noexcept { return horizon_; }
    int steps() const noexcept { return steps_; }
    double dt() const noexcept { return dt_; }
    double alpha0() const noexcept { return alpha0_; }
    double time(int n) const noexcept { return n == steps_ ? horizon_ : n * dt_; }
    const std::vector<double>& l1() const noexcept { return l1_; }
    /// dt^{-a0} / Gamma(2 - a0), the L1 scaling constant.
    double l1_scale() const noexcept { return l1_scale_; }

private:
    double horizon_;
    int steps_;
    double dt_;
    double alpha0_;
    double l1_scale_;
    std::vector<double> l1_;
};

/// Fields at t_0..t_Nt on one grid.
struct Trajectory {
    TimeGrid timegrid;
    std::vector<GridField> fields;

    const GridField& at(int n) const { return fields.at(static_cast<std::size_t>(n)); }
};

/// Right-hand side f(x) beta(t) + extra(t).
struct SourceSpec {
    GridField f;
    std::function<double(double)> beta;
    std::function<GridField(double)> extra_rhs;
};

enum class SpatialBackend {
    sine_transform,  // exact fast solve of the constant step operator
    conjugate_gradient,
};

struct SolverOptions {
    SpatialBackend backend = SpatialBackend::sine_transform;
    double cg_tol = 1e-10;
    // Disabling drops the gtilde' * u history sum and the gtilde u0 source;
    // only meaningful for checking the constant-order reduction.
    bool include_memory = true;
};

/// Implicit L1 + product-integration march for
///   c d^{a0} u - Delta_h u + gtilde' * u = gtilde u0 + F,  u(0) = u0.
Trajectory solve_forward(const KernelSplit& ks, const Grid2D& grid, const TimeGrid& tg, const SourceSpec& src,
                         const GridField& u0, const SolverOptions& opts = {});

/// Generic march: `rhs(n, out)` writes F(t_n) into `out` for n = 1..Nt.
Trajectory march(const KernelSplit& ks, const Grid2D& grid, const TimeGrid& tg, const GridField& u0,
                 const std::function<void(int, GridField&)>& rhs, const SolverOptions& opts = {});

/// Adjoint solution phi on the forward time axis. The backward problem with
/// the right-sided Riemann-Liouville derivative is reflected to a forward
/// problem for phi_T(t) = phi(T - t) with phi_T(0) = 0, solved by march(),
/// and reflected back. omega(k, t) is called with k indexing mask.nodes().
Trajectory solve_adjoint(const KernelSplit& ks, const Grid2D& grid, const TimeGrid& tg, const RegionMask& mask,
                         const std::function<double(std::size_t, double)>& omega, const SolverOptions& opts = {});

/// Same, with omega given on mask nodes at the mesh times: samples[n][k] is
/// omega at t_n and node mask.nodes()[k], n = 0..Nt.
Trajectory solve_adjoint_sampled(const KernelSplit& ks, const Grid2D& grid, const TimeGrid& tg,
                                 const RegionMask& mask, const std::vector<std::vector<double>>& samples,
                                 const SolverOptions& opts = {});

/// beta(t) = coefficient * t^power.
struct PowerBeta {
    double coefficient = 1.0;
    double power = 0.0;
    double operator()(double t) const;
};

/// Duhamel representation u = theta * v with J^{1-a0} theta = beta, where v
/// solves c d^{a0} v - Delta_h v + gtilde' * v = 0, v(0) = f. Cell integrals of
/// theta are exact and v is interpolated linearly.
///
/// With `gtilde_source` the v-problem instead carries the source gtilde f.
/// theta * v then picks up the extra term theta * gtilde f, so the two sides no
/// longer agree; the switch exists to measure that gap.
Trajectory duhamel_reconstruct(const KernelSplit& ks, const Grid2D& grid, const TimeGrid& tg, const GridField& f,
                               const PowerBeta& beta, const SolverOptions& opts = {}, bool gtilde_source = false);

/// Discrete L2(Omega x (0,T)) norm with the trapezoidal rule in time.
double space_time_norm(const Trajectory& u);
/// Same norm of the difference of two trajectories on one mesh.
double space_time_distance(const Trajectory& a, const Trajectory& b);

}  // namespace vsd
