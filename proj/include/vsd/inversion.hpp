#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "vsd/grid.hpp"
#include "vsd/kernel.hpp"
#include "vsd/timestep.hpp"

namespace vsd {

/// How the time direction is weighted in the data-space inner product.
///   lebesgue: h^2 sum_k dt sum_n c_n g w     (discrete L2(Omega_0 x (0,T)))
///   sample:   h^2 sum_k sum_n c_n g w        (the same without the dt factor)
/// c_n is the trapezoidal weight, 1/2 at t_Nt. The two differ by the constant dt,
/// which changes the scale of G*G relative to the thresholding constant A but
/// nothing else.
enum class TimeMeasure { lebesgue, sample };

struct InversionSetup {
    KernelSplit ks;
    Grid2D grid;
    TimeGrid tg;
    std::function<double(double)> beta;
    RegionMask mask;
    SolverOptions solver{};
    TimeMeasure measure = TimeMeasure::sample;

    double time_weight(int n) const;
};

/// Data on mask nodes at t_1..t_Nt; value(n, k) is node mask.nodes()[k] at t_n.
struct Observation {
    int steps = 0;
    std::size_t nodes = 0;
    std::vector<double> data;
    double noise_level = 0.0;
    std::uint64_t seed = 0;

    Observation() = default;
    Observation(int steps, std::size_t nodes) : steps(steps), nodes(nodes), data(static_cast<std::size_t>(steps) * nodes, 0.0) {}

    double& value(int n, std::size_t k) { return data[static_cast<std::size_t>(n - 1) * nodes + k]; }
    double value(int n, std::size_t k) const { return data[static_cast<std::size_t>(n - 1) * nodes + k]; }
};

double obs_inner(const Observation& a, const Observation& b, const InversionSetup& setup);
double obs_norm(const Observation& a, const InversionSetup& setup);
Observation obs_difference(const Observation& a, const Observation& b);

/// Restriction of a trajectory to the mask at t_1..t_Nt.
Observation restrict_to_mask(const Trajectory& u, const RegionMask& mask);

/// G f = u[f]|_{Omega_0 x (0,T)} with u(0) = 0 and source f beta.
Observation apply_G(const GridField& f, const InversionSetup& setup);

/// G* w = int_0^T beta(t) phi[w](t) dt (trapezoidal), scaled to be the adjoint
/// of G for obs_inner. The adjoint problem is discretized on its own, so the
/// pairing holds only up to discretization error.
GridField apply_Gstar(const Observation& w, const InversionSetup& setup);

/// |<G f, w> - <f, G* w>| / (||G f|| ||w||), the discrete mismatch of the
/// adjoint pairing.
double duality_gap(const GridField& f, const Observation& w, const InversionSetup& setup);

/// g (1 + delta zeta) entrywise, zeta iid standard normal from a seeded
/// mt19937_64; entries are drawn in storage order.
Observation add_noise(const Observation& g, double delta, std::uint64_t seed);

struct InversionConfig {
    double A = 30.0;
    double eps = 3e-3;
    double rho = 2e-4;
    double kappa = 1.0;
    double tau = 1.05;
    double gamma0_bar = 1.0;
    double gamma1_bar = 100.0;
    std::function<double(int)> lambda_schedule = [](int n) { return n / (n + 5.0); };
    int max_outer = 5000;
    int pdhg_iters = 200;

    void validate() const;
};

/// Record n describes iterate n; rel_change is the step from n-1 to n and is
/// NaN on record 0.
struct IterationRecord {
    int iter = 0;
    double residual = 0.0;
    double rel_change = std::numeric_limits<double>::quiet_NaN();
    double rel_error = std::numeric_limits<double>::quiet_NaN();
    double gamma = std::numeric_limits<double>::quiet_NaN();
    double lambda = std::numeric_limits<double>::quiet_NaN();
    double prox_gap = std::numeric_limits<double>::quiet_NaN();
};

enum class StopReason { tolerance, discrepancy, cap };
std::string to_string(StopReason r);

struct ReconstructionResult {
    GridField f_inv;
    int iterations = 0;
    std::vector<IterationRecord> history;
    StopReason stop_reason = StopReason::cap;
    double delta_abs = 0.0;
};

/// f_{n+1} = (A f_n - G*(G f_n - g)) / (A + eps), stopped when
/// ||f_{n+1} - f_n|| / ||f_n|| <= rho. When ||f_n|| = 0 the absolute change is
/// compared with rho for that step. `truth` only feeds the history.
ReconstructionResult iterative_thresholding(const Observation& g_delta, const InversionConfig& cfg, const GridField& f0,
                                            const InversionSetup& setup, const GridField* truth = nullptr);

struct ProxReport {
    int iterations = 0;
    double primal = 0.0;
    double dual = 0.0;
    /// (primal - dual) / max(|primal|, tiny)
    double relative_gap = 0.0;
};

/// ||grad_h z||_1 in L1(Omega): h^2 sum |grad_h z| with forward differences and
/// a zero difference past the last node in each direction.
double total_variation(const GridField& z);

/// 1/2 ||z - v||^2 + weight TV(z) in the grid norms.
double rof_energy(const GridField& z, const GridField& v, double weight);

/// Dual field of the primal-dual TV solver; passing the same state to
/// successive calls warm-starts them.
struct TvDualState {
    std::vector<double> px, py;
};

/// argmin_z 1/2 ||z - v||^2 + weight TV(z) by accelerated primal-dual iterations
/// (step sizes with sigma tau 8 / h^2 <= 1).
GridField tv_prox(const GridField& v, double weight, int iters, ProxReport* report = nullptr,
                  TvDualState* warm = nullptr);

/// Two-step proximal gradient with the L2 + TV penalty
///   R(f) = ||f||^2 / (2 kappa) + TV(f),
/// stopped by the discrepancy principle ||G z_n - g|| <= tau delta_abs.
/// `delta_abs` is the absolute data-norm noise magnitude.
ReconstructionResult nesterov_tpg(const Observation& g_delta, const InversionConfig& cfg, const GridField& f0,
                                  const GridField& xi0, double delta_abs, const InversionSetup& setup,
                                  const GridField* truth = nullptr);

/// ||f_inv - f_true|| / ||f_true||; throws when f_true = 0.
double relative_error(const GridField& f_inv, const GridField& f_true);

/// |A and B| / |A or B| for A = {a > ta}, B = {b > tb}; 1 when both are empty.
double jaccard(const GridField& a, double ta, const GridField& b, double tb);

/// 4-connected components of {f > threshold}, each a sorted node list;
/// components are ordered by their smallest node index.
std::vector<std::vector<std::size_t>> connected_components(const GridField& f, double threshold);

}  // namespace vsd
