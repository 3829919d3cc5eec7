#include "vsd/timestep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>

#include "vsd/errors.hpp"
#include "vsd/specfun.hpp"

namespace vsd {

std::vector<double> l1_weights(double alpha0, std::size_t n) {
    if (!(alpha0 > 0.0 && alpha0 < 1.0)) throw std::domain_error("l1_weights: alpha0 must lie in (0,1)");
    const double e = 1.0 - alpha0;
    std::vector<double> b(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double jd = static_cast<double>(j);
        b[j] = std::pow(jd + 1.0, e) - std::pow(jd, e);
    }
    return b;
}

TimeGrid::TimeGrid(double horizon, int steps, double alpha0)
    : horizon_(horizon), steps_(steps), dt_(horizon / steps), alpha0_(alpha0) {
    if (!(horizon > 0.0)) throw std::invalid_argument("TimeGrid: horizon must be positive");
    if (steps < 1) throw std::invalid_argument("TimeGrid: need at least one step");
    l1_ = l1_weights(alpha0, static_cast<std::size_t>(steps));
    l1_scale_ = std::pow(dt_, -alpha0) / specfun::gamma_fn(2.0 - alpha0);
}

namespace {

void check_finite(const GridField& u, int n) {
    for (const double v : u.values()) {
        if (!std::isfinite(v)) {
            throw SolverError("time march produced a non-finite value at step " + std::to_string(n),
                              std::numeric_limits<double>::quiet_NaN());
        }
    }
}

}  // namespace

Trajectory march(const KernelSplit& ks, const Grid2D& grid, const TimeGrid& tg, const GridField& u0,
                 const std::function<void(int, GridField&)>& rhs, const SolverOptions& opts) {
    if (tg.horizon() > ks.horizon() * (1.0 + 1e-12)) throw std::invalid_argument("march: time grid exceeds kernel horizon");
    if (!(u0.grid() == grid)) throw std::invalid_argument("march: initial value lives on another grid");
    const int nt = tg.steps();
    const double dt = tg.dt();
    const double cl = tg.l1_scale();
    const auto& b = tg.l1();
    const bool memory = opts.include_memory && !ks.profile().is_constant();
    const std::vector<double> w =
        memory ? ks.convolution_weights(dt, static_cast<std::size_t>(nt)) : std::vector<double>(nt, 0.0);

    // Newest half-cell of the memory sum, w[0]/2 = gtilde(dt)/2, is implicit.
    const double diag = cl * b[0] + 0.5 * w[0];
    std::unique_ptr<ShiftedLaplacianSolver> direct;
    if (opts.backend == SpatialBackend::sine_transform) direct = std::make_unique<ShiftedLaplacianSolver>(grid, diag);

    Trajectory out{tg, {}};
    out.fields.reserve(static_cast<std::size_t>(nt) + 1);
    out.fields.push_back(u0);
    GridField f(grid);
    for (int n = 1; n <= nt; ++n) {
        f.fill(0.0);
        rhs(n, f);
        if (memory) f.axpy(ks.gtilde(tg.time(n)), u0);

        // History u^0..u^{n-1}: L1 differences plus trapezoidal memory cells.
        const auto un = static_cast<std::size_t>(n);
        f.axpy(cl * b[un - 1] - 0.5 * w[un - 1], out.fields[0]);
        for (std::size_t k = 1; k < un; ++k) {
            const double a = cl * (b[un - k] - b[un - k - 1]) + 0.5 * (w[un - 1 - k] + w[un - k]);
            f.axpy(-a, out.fields[k]);
        }

        if (direct) {
            GridField next(grid);
            direct->solve(f, next);
            out.fields.push_back(std::move(next));
        } else {
            out.fields.push_back(solve_spd(cl * b[0], 0.5 * w[0], f, opts.cg_tol, &out.fields.back()));
        }
        check_finite(out.fields.back(), n);
    }
    return out;
}

Trajectory solve_forward(const KernelSplit& ks, const Grid2D& grid, const TimeGrid& tg, const SourceSpec& src,
                         const GridField& u0, const SolverOptions& opts) {
    if (!(src.f.grid() == grid)) throw std::invalid_argument("solve_forward: source lives on another grid");
    return march(
        ks, grid, tg, u0,
        [&](int n, GridField& out) {
            const double t = tg.time(n);
            if (src.beta) out.axpy(src.beta(t), src.f);
            if (src.extra_rhs) out += src.extra_rhs(t);
        },
        opts);
}

namespace {

Trajectory reflect(Trajectory&& reversed) {
    std::reverse(reversed.fields.begin(), reversed.fields.end());
    return std::move(reversed);
}

}  // namespace

Trajectory solve_adjoint(const KernelSplit& ks, const Grid2D& grid, const TimeGrid& tg, const RegionMask& mask,
                         const std::function<double(std::size_t, double)>& omega, const SolverOptions& opts) {
    if (!(mask.grid() == grid)) throw std::invalid_argument("solve_adjoint: mask lives on another grid");
    const double horizon = tg.horizon();
    const auto nodes = mask.nodes();
    auto reversed = march(
        ks, grid, tg, GridField(grid),
        [&](int m, GridField& out) {
            const double t = horizon - tg.time(m);
            for (std::size_t k = 0; k < nodes.size(); ++k) out[nodes[k]] = omega(k, t < 0.0 ? 0.0 : t);
        },
        opts);
    return reflect(std::move(reversed));
}

Trajectory solve_adjoint_sampled(const KernelSplit& ks, const Grid2D& grid, const TimeGrid& tg,
                                 const RegionMask& mask, const std::vector<std::vector<double>>& samples,
                                 const SolverOptions& opts) {
    if (!(mask.grid() == grid)) throw std::invalid_argument("solve_adjoint_sampled: mask lives on another grid");
    const int nt = tg.steps();
    if (samples.size() != static_cast<std::size_t>(nt) + 1) {
        throw std::invalid_argument("solve_adjoint_sampled: need Nt+1 time samples");
    }
    const auto nodes = mask.nodes();
    for (const auto& row : samples) {
        if (row.size() != nodes.size()) throw std::invalid_argument("solve_adjoint_sampled: sample row size != mask size");
    }
    auto reversed = march(
        ks, grid, tg, GridField(grid),
        [&](int m, GridField& out) {
            const auto& row = samples[static_cast<std::size_t>(nt - m)];
            for (std::size_t k = 0; k < nodes.size(); ++k) out[nodes[k]] = row[k];
        },
        opts);
    return reflect(std::move(reversed));
}

double PowerBeta::operator()(double t) const {
    if (power == 0.0) return coefficient;
    return coefficient * std::pow(t, power);
}

Trajectory duhamel_reconstruct(const KernelSplit& ks, const Grid2D& grid, const TimeGrid& tg, const GridField& f,
                               const PowerBeta& beta, const SolverOptions& opts, bool gtilde_source) {
    if (!(beta.power >= 0.0) || !std::isfinite(beta.coefficient)) {
        throw std::invalid_argument("duhamel_reconstruct: beta must be c t^p with p >= 0");
    }
    const double a0 = ks.alpha0();
    const double p = beta.power;
    // theta = c Gamma(p+1)/Gamma(p+a0) t^{p+a0-1}; antiderivative below.
    const double theta_scale = beta.coefficient * specfun::gamma_fn(p + 1.0) * specfun::reciprocal_gamma(p + a0 + 1.0);
    const auto theta_integral = [&](double t) { return t <= 0.0 ? 0.0 : theta_scale * std::pow(t, p + a0); };

    // march() always adds gtilde u0 when the memory term is active; cancel it
    // unless the sourced variant was asked for.
    const bool cancel = !gtilde_source && opts.include_memory && !ks.profile().is_constant();
    const Trajectory v = march(
        ks, grid, tg, f,
        [&](int n, GridField& out) {
            if (cancel) out.axpy(-ks.gtilde(tg.time(n)), f);
        },
        opts);

    const int nt = tg.steps();
    Trajectory u{tg, {}};
    u.fields.reserve(static_cast<std::size_t>(nt) + 1);
    u.fields.emplace_back(grid);
    for (int n = 1; n <= nt; ++n) {
        GridField un(grid);
        for (int j = 0; j < n; ++j) {
            const double weight = theta_integral(tg.time(n) - tg.time(j)) - theta_integral(tg.time(n) - tg.time(j + 1));
            un.axpy(0.5 * weight, v.fields[static_cast<std::size_t>(j)]);
            un.axpy(0.5 * weight, v.fields[static_cast<std::size_t>(j) + 1]);
        }
        u.fields.push_back(std::move(un));
    }
    return u;
}

double space_time_norm(const Trajectory& u) {
    const int nt = u.timegrid.steps();
    double acc = 0.0;
    for (int n = 0; n <= nt; ++n) {
        const double wgt = (n == 0 || n == nt) ? 0.5 : 1.0;
        const double v = norm2(u.at(n));
        acc += wgt * v * v;
    }
    return std::sqrt(acc * u.timegrid.dt());
}

double space_time_distance(const Trajectory& a, const Trajectory& b) {
    if (a.fields.size() != b.fields.size()) throw std::invalid_argument("space_time_distance: trajectory length mismatch");
    Trajectory d{a.timegrid, {}};
    d.fields.reserve(a.fields.size());
    for (std::size_t n = 0; n < a.fields.size(); ++n) d.fields.push_back(a.fields[n] - b.fields[n]);
    return space_time_norm(d);
}

}  // namespace vsd
