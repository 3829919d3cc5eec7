#include "vsd/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "vsd/specfun.hpp"

namespace vsd::oracle {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> simpson_weights(int intervals, double width) {
    std::vector<double> w(static_cast<std::size_t>(intervals) + 1);
    const double step = width / intervals;
    if (intervals % 2 == 0) {
        for (int i = 0; i <= intervals; ++i) w[i] = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        for (double& v : w) v *= step / 3.0;
    } else {
        for (int i = 0; i <= intervals; ++i) w[i] = (i == 0 || i == intervals) ? 0.5 * step : step;
    }
    return w;
}

// samples[i * (P+1) + j] = f(x_i, y_j) on the uniform (P+1)^2 tensor mesh of [0,1]^2.
ModeSet project_samples(const std::vector<double>& samples, int intervals, int max_index) {
    if (max_index < 1) throw std::invalid_argument("project_modes: max_index must be >= 1");
    const int P = intervals;
    const std::size_t stride = static_cast<std::size_t>(P) + 1;
    const auto w = simpson_weights(P, 1.0);
    const auto M = static_cast<std::size_t>(max_index);

    // sines[n-1][i] = sin(n pi x_i)
    std::vector<std::vector<double>> sines(M, std::vector<double>(stride));
    for (std::size_t n = 1; n <= M; ++n) {
        for (std::size_t i = 0; i < stride; ++i) sines[n - 1][i] = std::sin(kPi * n * i / P);
    }
    // partial[n-1][j] = sum_i w_i sin(n pi x_i) f(x_i, y_j)
    std::vector<std::vector<double>> partial(M, std::vector<double>(stride, 0.0));
    for (std::size_t n = 0; n < M; ++n) {
        for (std::size_t i = 0; i < stride; ++i) {
            const double wi = w[i] * sines[n][i];
            if (wi == 0.0) continue;
            for (std::size_t j = 0; j < stride; ++j) partial[n][j] += wi * samples[i * stride + j];
        }
    }
    ModeSet out;
    out.max_index = max_index;
    out.modes.reserve(M * M);
    for (std::size_t n = 1; n <= M; ++n) {
        for (std::size_t m = 1; m <= M; ++m) {
            double s = 0.0;
            for (std::size_t j = 0; j < stride; ++j) s += w[j] * sines[m - 1][j] * partial[n - 1][j];
            out.modes.push_back(
                {static_cast<int>(n), static_cast<int>(m), kPi * kPi * static_cast<double>(n * n + m * m), 2.0 * s});
        }
    }
    return out;
}

}  // namespace

ModeSet project_modes(const std::function<double(double, double)>& f, int max_index) {
    if (max_index < 1) throw std::invalid_argument("project_modes: max_index must be >= 1");
    const int P = 16 * max_index;
    const std::size_t stride = static_cast<std::size_t>(P) + 1;
    std::vector<double> samples(stride * stride);
    for (std::size_t i = 0; i < stride; ++i) {
        for (std::size_t j = 0; j < stride; ++j) {
            samples[i * stride + j] = f(static_cast<double>(i) / P, static_cast<double>(j) / P);
        }
    }
    return project_samples(samples, P, max_index);
}

ModeSet project_modes(const GridField& f, int max_index) {
    const Grid2D& g = f.grid();
    const int P = g.n_cells();
    const std::size_t stride = static_cast<std::size_t>(P) + 1;
    std::vector<double> samples(stride * stride, 0.0);
    for (int i = 1; i < P; ++i) {
        for (int j = 1; j < P; ++j) samples[static_cast<std::size_t>(i) * stride + j] = f[g.index(i, j)];
    }
    return project_samples(samples, P, max_index);
}

std::vector<double> solve_mode_scalar(const KernelSplit& ks, double lambda, const std::function<double(double)>& q,
                                      double c0, int steps, double horizon) {
    if (steps < 10) throw std::invalid_argument("solve_mode_scalar: need at least 10 steps");
    if (!(lambda > 0.0)) throw std::invalid_argument("solve_mode_scalar: lambda must be positive");
    const double a0 = ks.alpha0();
    const double dt = horizon / steps;
    const auto ns = static_cast<std::size_t>(steps);

    std::vector<double> b(ns);
    for (std::size_t j = 0; j < ns; ++j) b[j] = std::pow(j + 1.0, 1.0 - a0) - std::pow(static_cast<double>(j), 1.0 - a0);
    const double cl = std::pow(dt, -a0) / specfun::gamma_fn(2.0 - a0);
    const std::vector<double> w = ks.convolution_weights(dt, ns);

    std::vector<double> c(ns + 1, 0.0);
    c[0] = c0;
    const double diag = cl * b[0] + 0.5 * w[0] + lambda;
    for (std::size_t n = 1; n <= ns; ++n) {
        const double t = n == ns ? horizon : static_cast<double>(n) * dt;
        double rhs = (q ? q(t) : 0.0) + ks.gtilde(t) * c0;
        rhs += (cl * b[n - 1] - 0.5 * w[n - 1]) * c0;
        for (std::size_t k = 1; k < n; ++k) {
            rhs -= (cl * (b[n - k] - b[n - k - 1]) + 0.5 * (w[n - 1 - k] + w[n - k])) * c[k];
        }
        c[n] = rhs / diag;
    }
    return c;
}

SpectralSolution::SpectralSolution(ModeSet modes, double horizon, int steps, std::vector<std::vector<double>> coefficients)
    : modes_(std::move(modes)), horizon_(horizon), steps_(steps), coef_(std::move(coefficients)) {
    if (coef_.size() != modes_.modes.size()) throw std::invalid_argument("SpectralSolution: one coefficient history per mode");
}

void SpectralSolution::locate(double t, std::size_t& i, double& theta) const {
    if (t < 0.0 || t > horizon_ * (1.0 + 1e-12)) throw std::domain_error("SpectralSolution: t outside [0,T]");
    const double s = std::min(t / horizon_ * steps_, static_cast<double>(steps_));
    i = std::min(static_cast<std::size_t>(s), static_cast<std::size_t>(steps_ - 1));
    theta = s - static_cast<double>(i);
}

double SpectralSolution::coefficient(std::size_t mode_index, double t) const {
    const auto& c = coef_.at(mode_index);
    if (c.empty()) return 0.0;
    std::size_t i;
    double theta;
    locate(t, i, theta);
    return (1.0 - theta) * c[i] + theta * c[i + 1];
}

double SpectralSolution::value(double x, double y, double t) const {
    double s = 0.0;
    for (std::size_t k = 0; k < modes_.modes.size(); ++k) {
        if (coef_[k].empty()) continue;
        const Mode& md = modes_.modes[k];
        s += coefficient(k, t) * 2.0 * std::sin(kPi * md.n * x) * std::sin(kPi * md.m * y);
    }
    return s;
}

GridField SpectralSolution::field(const Grid2D& grid, double t) const {
    const int nodes = grid.nodes_per_axis();
    const auto M = static_cast<std::size_t>(modes_.max_index);
    // C[n][m] then u = 2 Sx^T C Sy
    std::vector<double> C(M * M, 0.0);
    for (std::size_t k = 0; k < modes_.modes.size(); ++k) {
        if (coef_[k].empty()) continue;
        const Mode& md = modes_.modes[k];
        C[(md.n - 1) * M + (md.m - 1)] = coefficient(k, t);
    }
    std::vector<double> s(M * static_cast<std::size_t>(nodes));
    for (std::size_t n = 0; n < M; ++n) {
        for (int i = 0; i < nodes; ++i) s[n * nodes + i] = std::sin(kPi * (n + 1.0) * grid.x(i + 1));
    }
    std::vector<double> a(M * static_cast<std::size_t>(nodes), 0.0);  // a[n][j] = sum_m C[n][m] s[m][j]
    for (std::size_t n = 0; n < M; ++n) {
        for (std::size_t m = 0; m < M; ++m) {
            const double cnm = C[n * M + m];
            if (cnm == 0.0) continue;
            for (int j = 0; j < nodes; ++j) a[n * nodes + j] += cnm * s[m * nodes + j];
        }
    }
    GridField u(grid);
    for (int j = 0; j < nodes; ++j) {
        for (int i = 0; i < nodes; ++i) {
            double v = 0.0;
            for (std::size_t n = 0; n < M; ++n) v += s[n * nodes + i] * a[n * nodes + j];
            u[grid.index(i + 1, j + 1)] = 2.0 * v;
        }
    }
    return u;
}

SpectralSolution spectral_solution(const KernelSplit& ks, const ModeSet& modes, const std::function<double(double)>& beta,
                                   int fine_steps, double horizon, double drop_below) {
    if (fine_steps < 10) throw std::invalid_argument("spectral_solution: need at least 10 fine steps");
    double biggest = 0.0;
    for (const Mode& md : modes.modes) biggest = std::max(biggest, std::fabs(md.coefficient));

    // The response is linear in the coefficient, so one scalar solve per
    // distinct eigenvalue n^2 + m^2 suffices.
    std::map<int, std::size_t> slot_of;
    std::vector<int> keys;
    for (const Mode& md : modes.modes) {
        if (biggest == 0.0 || std::fabs(md.coefficient) <= drop_below * biggest) continue;
        const int key = md.n * md.n + md.m * md.m;
        if (slot_of.emplace(key, keys.size()).second) keys.push_back(key);
    }
    std::vector<std::vector<double>> unit(keys.size());
    const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), 16u));
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t i = w; i < keys.size(); i += workers) {
                    unit[i] = solve_mode_scalar(ks, kPi * kPi * keys[i], beta, 0.0, fine_steps, horizon);
                }
            });
        }
    }
    std::vector<std::vector<double>> coef(modes.modes.size());
    for (std::size_t k = 0; k < modes.modes.size(); ++k) {
        const Mode& md = modes.modes[k];
        const auto it = slot_of.find(md.n * md.n + md.m * md.m);
        if (it == slot_of.end() || std::fabs(md.coefficient) <= drop_below * biggest) continue;
        const auto& base = unit[it->second];
        coef[k].resize(base.size());
        for (std::size_t i = 0; i < base.size(); ++i) coef[k][i] = md.coefficient * base[i];
    }
    return SpectralSolution(modes, horizon, fine_steps, std::move(coef));
}

}  // namespace vsd::oracle
