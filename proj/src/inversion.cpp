#include "vsd/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "vsd/errors.hpp"

namespace vsd {

double InversionSetup::time_weight(int n) const {
    const double c = n == tg.steps() ? 0.5 : 1.0;
    return measure == TimeMeasure::lebesgue ? c * tg.dt() : c;
}

namespace {

void require_shape(const Observation& a, const InversionSetup& setup, const char* who) {
    if (a.steps != setup.tg.steps() || a.nodes != setup.mask.count() || a.data.size() != a.nodes * a.steps) {
        throw std::invalid_argument(std::string(who) + ": observation shape does not match the setup");
    }
}

}  // namespace

double obs_inner(const Observation& a, const Observation& b, const InversionSetup& setup) {
    require_shape(a, setup, "obs_inner");
    require_shape(b, setup, "obs_inner");
    const double h = setup.grid.h();
    double total = 0.0;
    for (int n = 1; n <= a.steps; ++n) {
        double s = 0.0;
        for (std::size_t k = 0; k < a.nodes; ++k) s += a.value(n, k) * b.value(n, k);
        total += setup.time_weight(n) * s;
    }
    return h * h * total;
}

double obs_norm(const Observation& a, const InversionSetup& setup) { return std::sqrt(obs_inner(a, a, setup)); }

Observation obs_difference(const Observation& a, const Observation& b) {
    if (a.steps != b.steps || a.nodes != b.nodes) throw std::invalid_argument("obs_difference: shape mismatch");
    Observation out(a.steps, a.nodes);
    for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i] - b.data[i];
    return out;
}

Observation restrict_to_mask(const Trajectory& u, const RegionMask& mask) {
    const int nt = u.timegrid.steps();
    const auto nodes = mask.nodes();
    Observation out(nt, nodes.size());
    for (int n = 1; n <= nt; ++n) {
        const GridField& un = u.at(n);
        if (!(un.grid() == mask.grid())) throw std::invalid_argument("restrict_to_mask: grid mismatch");
        for (std::size_t k = 0; k < nodes.size(); ++k) out.value(n, k) = un[nodes[k]];
    }
    return out;
}

Observation apply_G(const GridField& f, const InversionSetup& setup) {
    const SourceSpec src{f, setup.beta, {}};
    return restrict_to_mask(solve_forward(setup.ks, setup.grid, setup.tg, src, GridField(setup.grid), setup.solver),
                            setup.mask);
}

GridField apply_Gstar(const Observation& w, const InversionSetup& setup) {
    require_shape(w, setup, "apply_Gstar");
    const int nt = setup.tg.steps();
    std::vector<std::vector<double>> samples(static_cast<std::size_t>(nt) + 1, std::vector<double>(w.nodes));
    for (int n = 1; n <= nt; ++n) {
        for (std::size_t k = 0; k < w.nodes; ++k) samples[static_cast<std::size_t>(n)][k] = w.value(n, k);
    }
    // Data carry no t_0 sample; hold the first one.
    samples[0] = samples[1];
    const Trajectory phi = solve_adjoint_sampled(setup.ks, setup.grid, setup.tg, setup.mask, samples, setup.solver);

    GridField out(setup.grid);
    for (int n = 0; n <= nt; ++n) {
        const double c = (n == 0 || n == nt) ? 0.5 : 1.0;
        const double b = setup.beta ? setup.beta(setup.tg.time(n)) : 0.0;
        if (b != 0.0) out.axpy(c * b, phi.at(n));
    }
    if (setup.measure == TimeMeasure::lebesgue) out *= setup.tg.dt();
    return out;
}

double duality_gap(const GridField& f, const Observation& w, const InversionSetup& setup) {
    const Observation gf = apply_G(f, setup);
    const double scale = obs_norm(gf, setup) * obs_norm(w, setup);
    if (!(scale > 0.0)) throw std::invalid_argument("duality_gap: G f and w must be nonzero");
    return std::abs(obs_inner(gf, w, setup) - inner(f, apply_Gstar(w, setup))) / scale;
}

Observation add_noise(const Observation& g, double delta, std::uint64_t seed) {
    if (!(delta >= 0.0)) throw std::invalid_argument("add_noise: delta must be nonnegative");
    Observation out = g;
    out.noise_level = delta;
    out.seed = seed;
    if (delta == 0.0) return out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> zeta(0.0, 1.0);
    for (double& v : out.data) v *= 1.0 + delta * zeta(rng);
    return out;
}

void InversionConfig::validate() const {
    if (!(A > 0.0)) throw std::invalid_argument("InversionConfig: A must be > 0");
    if (!(eps >= 0.0)) throw std::invalid_argument("InversionConfig: eps must be >= 0");
    if (!(rho > 0.0)) throw std::invalid_argument("InversionConfig: rho must be > 0");
    if (!(kappa > 0.0)) throw std::invalid_argument("InversionConfig: kappa must be > 0");
    if (!(tau > 1.0)) throw std::invalid_argument("InversionConfig: tau must be > 1");
    if (!(gamma0_bar > 0.0 && gamma1_bar > 0.0)) throw std::invalid_argument("InversionConfig: step caps must be > 0");
    if (!lambda_schedule || lambda_schedule(0) != 0.0) throw std::invalid_argument("InversionConfig: lambda_0 must be 0");
    if (max_outer < 1) throw std::invalid_argument("InversionConfig: max_outer must be >= 1");
    if (pdhg_iters < 1) throw std::invalid_argument("InversionConfig: pdhg_iters must be >= 1");
}

std::string to_string(StopReason r) {
    switch (r) {
        case StopReason::tolerance: return "tolerance";
        case StopReason::discrepancy: return "discrepancy";
        case StopReason::cap: return "cap";
    }
    return "unknown";
}

namespace {

void check_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw SolverError(std::string("inversion: non-finite ") + what, v);
}

double error_against(const GridField& f, const GridField* truth) {
    return truth ? relative_error(f, *truth) : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

ReconstructionResult iterative_thresholding(const Observation& g_delta, const InversionConfig& cfg, const GridField& f0,
                                            const InversionSetup& setup, const GridField* truth) {
    cfg.validate();
    require_shape(g_delta, setup, "iterative_thresholding");
    if (!(f0.grid() == setup.grid)) throw std::invalid_argument("iterative_thresholding: f0 lives on another grid");

    ReconstructionResult res{f0, 0, {}, StopReason::cap, 0.0};
    GridField f = f0;
    double last_change = std::numeric_limits<double>::quiet_NaN();
    for (int n = 0;; ++n) {
        const Observation r = obs_difference(apply_G(f, setup), g_delta);
        const double residual = obs_norm(r, setup);
        check_finite(residual, "data residual");
        IterationRecord rec;
        rec.iter = n;
        rec.residual = residual;
        rec.rel_change = last_change;
        rec.rel_error = error_against(f, truth);
        res.history.push_back(rec);
        res.iterations = n;
        if (n > 0 && last_change <= cfg.rho) {
            res.stop_reason = StopReason::tolerance;
            break;
        }
        if (n == cfg.max_outer) break;

        GridField next = apply_Gstar(r, setup);
        next *= -1.0;
        next.axpy(cfg.A, f);
        next *= 1.0 / (cfg.A + cfg.eps);

        const double fn = norm2(f);
        const double change = norm2(next - f);
        // Relative change needs ||f_n|| > 0; fall back to the absolute change.
        last_change = fn > 0.0 ? change / fn : change;
        f = std::move(next);
    }
    res.f_inv = std::move(f);
    return res;
}

namespace {

// Per-node forward differences; the difference past the last node is zero.
void gradient(const std::vector<double>& z, int m, double inv_h, std::vector<double>& gx, std::vector<double>& gy) {
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * m + i;
            gx[k] = i + 1 < m ? (z[k + 1] - z[k]) * inv_h : 0.0;
            gy[k] = j + 1 < m ? (z[k + m] - z[k]) * inv_h : 0.0;
        }
    }
}

// Transpose of gradient(), i.e. minus the discrete divergence.
void gradient_adjoint(const std::vector<double>& px, const std::vector<double>& py, int m, double inv_h,
                      std::vector<double>& out) {
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * m + i;
            double s = 0.0;
            if (i + 1 < m) s -= px[k];
            if (i > 0) s += px[k - 1];
            if (j + 1 < m) s -= py[k];
            if (j > 0) s += py[k - m];
            out[k] = s * inv_h;
        }
    }
}

double tv_sum(const std::vector<double>& z, int m, double inv_h) {
    std::vector<double> gx(z.size()), gy(z.size());
    gradient(z, m, inv_h, gx, gy);
    double s = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) s += std::hypot(gx[k], gy[k]);
    return s;
}

}  // namespace

double total_variation(const GridField& z) {
    const Grid2D& g = z.grid();
    const auto v = z.values();
    const double s = tv_sum(std::vector<double>(v.begin(), v.end()), g.nodes_per_axis(), 1.0 / g.h());
    return g.h() * g.h() * s;
}

double rof_energy(const GridField& z, const GridField& v, double weight) {
    const double d = norm2(z - v);
    return 0.5 * d * d + weight * total_variation(z);
}

GridField tv_prox(const GridField& v, double weight, int iters, ProxReport* report, TvDualState* warm) {
    if (!(weight > 0.0)) throw std::invalid_argument("tv_prox: weight must be > 0");
    if (iters < 1) throw std::invalid_argument("tv_prox: need at least one iteration");
    const Grid2D& g = v.grid();
    const int m = g.nodes_per_axis();
    const double inv_h = 1.0 / g.h();
    const std::size_t n = v.size();
    const auto vv = v.values();
    const std::vector<double> data(vv.begin(), vv.end());

    // Node-wise problem: min 1/2 sum (z - v)^2 + weight sum |grad z|, with
    // ||grad||^2 <= 8 / h^2. Primal term is 1-strongly convex, so the
    // accelerated variant applies. The primal step is kept O(1) and the dual
    // step absorbs the 1/h^2.
    double tau = 1.0 / std::sqrt(8.0);
    double sigma = 0.99 * g.h() * g.h() / (8.0 * tau);
    std::vector<double> z = data, zbar = data, px(n, 0.0), py(n, 0.0);
    if (warm && warm->px.size() == n && warm->py.size() == n) {
        for (std::size_t k = 0; k < n; ++k) {
            // Rescale into the feasible set in case the weight changed.
            const double scale = std::max(1.0, std::hypot(warm->px[k], warm->py[k]) / weight);
            px[k] = warm->px[k] / scale;
            py[k] = warm->py[k] / scale;
        }
    }
    std::vector<double> gx(n), gy(n), div(n);
    if (warm) {
        // Primal estimate z = v - grad^T p of the warm dual.
        gradient_adjoint(px, py, m, inv_h, div);
        for (std::size_t k = 0; k < n; ++k) z[k] = zbar[k] = data[k] - div[k];
    }
    for (int it = 0; it < iters; ++it) {
        gradient(zbar, m, inv_h, gx, gy);
        for (std::size_t k = 0; k < n; ++k) {
            const double qx = px[k] + sigma * gx[k];
            const double qy = py[k] + sigma * gy[k];
            const double scale = std::max(1.0, std::hypot(qx, qy) / weight);
            px[k] = qx / scale;
            py[k] = qy / scale;
        }
        gradient_adjoint(px, py, m, inv_h, div);
        const double theta = 1.0 / std::sqrt(1.0 + 2.0 * tau);
        for (std::size_t k = 0; k < n; ++k) {
            const double znew = (z[k] - tau * div[k] + tau * data[k]) / (1.0 + tau);
            zbar[k] = znew + theta * (znew - z[k]);
            z[k] = znew;
        }
        tau *= theta;
        sigma /= theta;
    }

    if (warm) {
        warm->px = px;
        warm->py = py;
    }
    if (report) {
        double primal = 0.0;
        for (std::size_t k = 0; k < n; ++k) primal += 0.5 * (z[k] - data[k]) * (z[k] - data[k]);
        primal += weight * tv_sum(z, m, inv_h);
        gradient_adjoint(px, py, m, inv_h, div);
        double dual = 0.0;
        for (std::size_t k = 0; k < n; ++k) dual += 0.5 * data[k] * data[k] - 0.5 * (data[k] - div[k]) * (data[k] - div[k]);
        const double h2 = g.h() * g.h();
        report->iterations = iters;
        report->primal = h2 * primal;
        report->dual = h2 * dual;
        report->relative_gap = (primal - dual) / std::max(std::fabs(primal), 1e-300);
    }
    return GridField(g, std::move(z));
}

ReconstructionResult nesterov_tpg(const Observation& g_delta, const InversionConfig& cfg, const GridField& f0,
                                  const GridField& xi0, double delta_abs, const InversionSetup& setup,
                                  const GridField* truth) {
    cfg.validate();
    require_shape(g_delta, setup, "nesterov_tpg");
    if (!(f0.grid() == setup.grid) || !(xi0.grid() == setup.grid)) {
        throw std::invalid_argument("nesterov_tpg: initial guesses live on another grid");
    }
    if (!(delta_abs >= 0.0)) throw std::invalid_argument("nesterov_tpg: delta_abs must be nonnegative");
    const double bound = cfg.tau * delta_abs;

    ReconstructionResult res{f0, 0, {}, StopReason::cap, delta_abs};
    GridField xi_prev = xi0;
    GridField xi = xi0;
    GridField z_prev = f0;
    TvDualState dual;
    for (int n = 0;; ++n) {
        const double lambda = cfg.lambda_schedule(n);
        if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("nesterov_tpg: lambda_n outside [0,1]");
        GridField eta = xi;
        eta.axpy(lambda, xi - xi_prev);

        ProxReport prox;
        GridField z = tv_prox(cfg.kappa * eta, cfg.kappa, cfg.pdhg_iters, &prox, &dual);
        const Observation r = obs_difference(g_delta, apply_G(z, setup));
        const double residual = obs_norm(r, setup);
        check_finite(residual, "data residual");

        IterationRecord rec;
        rec.iter = n;
        rec.residual = residual;
        rec.lambda = lambda;
        rec.prox_gap = prox.relative_gap;
        rec.rel_error = error_against(z, truth);
        if (n > 0) {
            const double zn = norm2(z_prev);
            const double change = norm2(z - z_prev);
            rec.rel_change = zn > 0.0 ? change / zn : change;
        }

        if (residual <= bound) {
            rec.gamma = 0.0;
            res.history.push_back(rec);
            res.stop_reason = StopReason::discrepancy;
            res.iterations = n;
            res.f_inv = std::move(z);
            return res;
        }
        if (n == cfg.max_outer) {
            rec.gamma = 0.0;
            res.history.push_back(rec);
            res.iterations = n;
            res.f_inv = std::move(z);
            return res;
        }

        const GridField grad = apply_Gstar(r, setup);
        const double gnorm = norm2(grad);
        const double gamma = gnorm > 0.0 ? std::min(cfg.gamma0_bar * residual * residual / (gnorm * gnorm), cfg.gamma1_bar)
                                         : cfg.gamma1_bar;
        rec.gamma = gamma;
        res.history.push_back(rec);

        xi_prev = xi;
        xi.axpy(gamma, grad);
        z_prev = std::move(z);
    }
}

double relative_error(const GridField& f_inv, const GridField& f_true) {
    const double d = norm2(f_true);
    if (d == 0.0) throw std::invalid_argument("relative_error: reference field is zero");
    return norm2(f_inv - f_true) / d;
}

double jaccard(const GridField& a, double ta, const GridField& b, double tb) {
    if (!(a.grid() == b.grid())) throw std::invalid_argument("jaccard: grid mismatch");
    std::size_t both = 0, either = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const bool in_a = a[k] > ta;
        const bool in_b = b[k] > tb;
        both += (in_a && in_b) ? 1 : 0;
        either += (in_a || in_b) ? 1 : 0;
    }
    return either == 0 ? 1.0 : static_cast<double>(both) / static_cast<double>(either);
}

std::vector<std::vector<std::size_t>> connected_components(const GridField& f, double threshold) {
    const int m = f.grid().nodes_per_axis();
    const std::size_t n = f.size();
    std::vector<char> seen(n, 0);
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < n; ++start) {
        if (seen[start] || !(f[start] > threshold)) continue;
        std::vector<std::size_t> comp;
        seen[start] = 1;
        stack.push_back(start);
        while (!stack.empty()) {
            const std::size_t k = stack.back();
            stack.pop_back();
            comp.push_back(k);
            const int i = static_cast<int>(k % m);
            const int j = static_cast<int>(k / m);
            const auto visit = [&](int ii, int jj) {
                if (ii < 0 || jj < 0 || ii >= m || jj >= m) return;
                const std::size_t q = static_cast<std::size_t>(jj) * m + ii;
                if (!seen[q] && f[q] > threshold) {
                    seen[q] = 1;
                    stack.push_back(q);
                }
            };
            visit(i - 1, j);
            visit(i + 1, j);
            visit(i, j - 1);
            visit(i, j + 1);
        }
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
    }
    return out;
}

}  // namespace vsd
