#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "vsd/experiment.hpp"
#include "vsd/inversion.hpp"

using namespace vsd;

namespace {

const double kPi = std::acos(-1.0);

InversionSetup small_setup(int n, int nt, TimeMeasure measure = TimeMeasure::sample) {
    const Grid2D g(n);
    return InversionSetup{KernelSplit(ExponentProfile::affine(0.5, 0.25, 1.0), 1.0),
                          g,
                          TimeGrid(1.0, nt, 0.5),
                          [](double) { return 1.0; },
                          region_mask(g, {0.3, 0.7, 0.3, 0.7}),
                          {},
                          measure};
}

GridField bump(const Grid2D& g) {
    return GridField::sample(g, [](double x, double y) { return 1.0 + std::sin(kPi * x) * std::sin(kPi * y); });
}

}  // namespace

TEST_CASE("data-space inner products") {
    const auto s = small_setup(10, 8);
    const auto l = small_setup(10, 8, TimeMeasure::lebesgue);
    Observation a(8, s.mask.count());
    for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] = std::sin(0.1 * static_cast<double>(i));
    CHECK(obs_inner(a, a, l) == doctest::Approx(s.tg.dt() * obs_inner(a, a, s)).epsilon(1e-14));
    Observation ones(8, s.mask.count());
    for (double& v : ones.data) v = 1.0;
    // h^2 |mask| (7 + 1/2)
    CHECK(obs_norm(ones, s) * obs_norm(ones, s) ==
          doctest::Approx(0.01 * static_cast<double>(s.mask.count()) * 7.5).epsilon(1e-14));
    CHECK_THROWS_AS(obs_inner(Observation(7, s.mask.count()), a, s), std::invalid_argument);
    CHECK_THROWS_AS(obs_difference(Observation(7, 3), a), std::invalid_argument);
}

TEST_CASE("forward operator is linear") {
    const auto s = small_setup(12, 20);
    const GridField f1 = bump(s.grid);
    const GridField f2 = GridField::sample(s.grid, [](double x, double y) { return x - y * y; });
    const Observation a = apply_G(f1, s);
    const Observation b = apply_G(f2, s);
    const Observation c = apply_G(2.0 * f1 + f2, s);
    double worst = 0.0;
    for (std::size_t i = 0; i < c.data.size(); ++i) worst = std::max(worst, std::abs(c.data[i] - 2 * a.data[i] - b.data[i]));
    CHECK(worst <= 1e-12 * obs_norm(c, s));
    CHECK(obs_norm(apply_G(GridField(s.grid), s), s) == 0.0);
}

TEST_CASE("adjoint duality gap is small and shrinks under refinement") {
    double prev = 1e300;
    for (int level = 0; level < 2; ++level) {
        const auto s = small_setup(16 << level, 50 << level);
        const auto [f, w] = random_smooth_pair(s, 11);
        const double gap = duality_gap(f, w, s);
        CHECK(gap <= 5e-2);
        CHECK(gap < prev);
        prev = gap;
    }
    // The pairing is scale-independent.
    const auto l = small_setup(16, 50, TimeMeasure::lebesgue);
    const auto s = small_setup(16, 50);
    const auto [f, w] = random_smooth_pair(s, 11);
    CHECK(duality_gap(f, w, l) == doctest::Approx(duality_gap(f, w, s)).epsilon(1e-10));
    CHECK_THROWS_AS(duality_gap(GridField(s.grid), w, s), std::invalid_argument);
}

TEST_CASE("multiplicative noise") {
    Observation g(50, 40);
    for (std::size_t i = 0; i < g.data.size(); ++i) g.data[i] = 1.0 + 0.01 * static_cast<double>(i % 17);
    const Observation a = add_noise(g, 0.05, 3);
    const Observation b = add_noise(g, 0.05, 3);
    const Observation c = add_noise(g, 0.05, 4);
    CHECK(a.data == b.data);
    CHECK(a.data != c.data);
    CHECK(a.noise_level == 0.05);
    CHECK(a.seed == 3);
    CHECK(add_noise(g, 0.0, 3).data == g.data);

    std::mt19937_64 rng(3);
    std::normal_distribution<double> z(0.0, 1.0);
    CHECK(a.data[0] == g.data[0] * (1.0 + 0.05 * z(rng)));
    CHECK(a.data[1] == g.data[1] * (1.0 + 0.05 * z(rng)));

    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < g.data.size(); ++i) {
        num += (a.data[i] - g.data[i]) * (a.data[i] - g.data[i]);
        den += g.data[i] * g.data[i];
    }
    CHECK(std::sqrt(num / den) / 0.05 == doctest::Approx(1.0).epsilon(0.1));
    CHECK_THROWS_AS(add_noise(g, -0.1, 1), std::invalid_argument);
}

TEST_CASE("config validation") {
    InversionConfig c;
    CHECK_NOTHROW(c.validate());
    c.tau = 1.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = InversionConfig{};
    c.lambda_schedule = [](int n) { return n / (n + 5.0) + 0.1; };
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = InversionConfig{};
    c.A = 0.0;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("iterative thresholding on noise-free inverse-crime data") {
    const auto s = small_setup(12, 20);
    const GridField truth = bump(s.grid);
    const Observation g = apply_G(truth, s);
    InversionConfig cfg;
    cfg.rho = 1e-4;
    GridField f0(s.grid);
    f0.fill(1.0);
    const auto res = iterative_thresholding(g, cfg, f0, s, &truth);
    CHECK(res.stop_reason == StopReason::tolerance);
    CHECK(res.iterations < cfg.max_outer);
    REQUIRE(res.history.size() >= 2);
    for (std::size_t i = 1; i < res.history.size(); ++i) CHECK(res.history[i].residual <= res.history[i - 1].residual);
    CHECK(res.history.back().rel_error < res.history.front().rel_error);
    CHECK(std::isnan(res.history.front().rel_change));
    CHECK(res.history.back().rel_change <= cfg.rho);
    CHECK(res.history[1].rel_change > cfg.rho);

    // From the zero field the first step compares the absolute change.
    InversionConfig one = cfg;
    one.max_outer = 1;
    const auto z = iterative_thresholding(g, one, GridField(s.grid), s);
    CHECK(z.stop_reason == StopReason::cap);
    CHECK(z.iterations == 1);
}

TEST_CASE("total variation conventions") {
    const Grid2D g(10);
    const GridField ramp = GridField::sample(g, [](double x, double) { return x; });
    // |dz/dx| = 1 on 8 x 9 differences, zero past the last node
    CHECK(total_variation(ramp) == doctest::Approx(0.01 * 72).epsilon(1e-12));
    GridField c(g);
    c.fill(3.0);
    CHECK(total_variation(c) == 0.0);
    CHECK(rof_energy(c, c, 2.0) == 0.0);
    CHECK(rof_energy(ramp, c, 0.5) == doctest::Approx(0.5 * norm2(ramp - c) * norm2(ramp - c) + 0.5 * 0.72));
}

TEST_CASE("TV prox against brute force on a column step") {
    // 5 x 5 nodes; v depends on the column only, so the minimizer does too and
    // the energy reduces to 1/2 sum (z_i - v_i)^2 + mu sum |z_{i+1} - z_i|
    // (times h^2 * 5) with weight = mu h.
    const Grid2D g(6);
    const double h = g.h();
    const double mu = 0.5;
    const std::vector<double> col = {0, 0, 1, 1, 1};
    GridField v(g);
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = col[k % 5];

    const auto reduced = [&](const std::vector<double>& z) {
        double e = 0.0;
        for (int i = 0; i < 5; ++i) e += 0.5 * (z[i] - col[i]) * (z[i] - col[i]);
        for (int i = 0; i < 4; ++i) e += mu * std::abs(z[i + 1] - z[i]);
        return e * h * h * 5;
    };
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> z(5), arg(5);
    for (int a = 0; a < 13 * 13 * 13 * 13 * 13; ++a) {
        int r = a;
        for (int i = 0; i < 5; ++i) {
            z[i] = (r % 13) / 12.0;
            r /= 13;
        }
        const double e = reduced(z);
        if (e < best) {
            best = e;
            arg = z;
        }
    }
    CHECK(arg[0] == doctest::Approx(0.25));
    CHECK(arg[4] == doctest::Approx(10.0 / 12.0));

    ProxReport rep;
    const GridField p = tv_prox(v, mu * h, 5000, &rep);
    CHECK(std::abs(rof_energy(p, v, mu * h) - best) <= 1e-6);
    for (std::size_t k = 0; k < p.size(); ++k) CHECK(p[k] == doctest::Approx(arg[k % 5]).epsilon(1e-3));
    CHECK(rep.relative_gap >= -1e-12);
    CHECK(rep.relative_gap <= 1e-6);
    CHECK_THROWS_AS(tv_prox(v, 0.0, 10), std::invalid_argument);
    CHECK_THROWS_AS(tv_prox(v, 1.0, 0), std::invalid_argument);
}

TEST_CASE("warm-started prox keeps the duality gap down") {
    const Grid2D g(24);
    const GridField v = GridField::sample(g, [](double x, double y) { return (x - 0.5) * (x - 0.5) + (y - 0.4) * (y - 0.4) < 0.06 ? 2.0 : 0.0; });
    TvDualState dual;
    ProxReport cold, warm;
    tv_prox(v, 0.05, 30, &cold);
    for (int i = 0; i < 5; ++i) tv_prox(v, 0.05, 30, &warm, &dual);
    CHECK(warm.relative_gap < cold.relative_gap);
}

TEST_CASE("TPG with an infinite noise bound stops at the initial prox") {
    const auto s = small_setup(10, 10);
    const Observation g = apply_G(bump(s.grid), s);
    InversionConfig cfg;
    const GridField xi0 = bump(s.grid);
    const auto res = nesterov_tpg(g, cfg, GridField(s.grid), xi0, std::numeric_limits<double>::infinity(), s);
    CHECK(res.stop_reason == StopReason::discrepancy);
    CHECK(res.iterations == 0);
    const GridField expect = tv_prox(cfg.kappa * xi0, cfg.kappa, cfg.pdhg_iters, nullptr, nullptr);
    CHECK(norm2(res.f_inv - expect) <= 1e-12);
}

TEST_CASE("TPG decreases the residual on inverse-crime data") {
    const auto s = small_setup(12, 20);
    const GridField truth = GridField::sample(s.grid, [](double x, double y) { return (x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5) <= 0.0625 ? 2.0 : 0.0; });
    const Observation g = apply_G(truth, s);
    InversionConfig cfg;
    cfg.gamma1_bar = 4.0;
    cfg.max_outer = 30;
    cfg.pdhg_iters = 50;
    const double dabs = 0.01 * obs_norm(g, s);
    const auto res = nesterov_tpg(g, cfg, GridField(s.grid), GridField(s.grid), dabs, s, &truth);
    REQUIRE(!res.history.empty());
    CHECK(res.history.back().residual < 0.5 * res.history.front().residual);
    CHECK(res.history[0].lambda == 0.0);
    CHECK(res.history[5].lambda == doctest::Approx(0.5));
    for (const auto& r : res.history) {
        if (r.iter < res.iterations) CHECK(r.gamma > 0.0);
        if (r.iter < res.iterations) CHECK(r.gamma <= cfg.gamma1_bar);
    }
    CHECK_THROWS_AS(nesterov_tpg(g, cfg, GridField(s.grid), GridField(s.grid), -1.0, s), std::invalid_argument);
}

TEST_CASE("region metrics") {
    const Grid2D g(8);
    GridField a(g), b(g);
    // two blocks in a, one of them in b
    for (int j = 1; j <= 2; ++j)
        for (int i = 1; i <= 2; ++i) {
            a[g.index(i, j)] = 2.0;
            a[g.index(i + 4, j + 4)] = 2.0;
            b[g.index(i, j)] = 2.0;
        }
    CHECK(jaccard(a, 1.0, b, 1.0) == doctest::Approx(0.5));
    CHECK(jaccard(a, 5.0, b, 5.0) == 1.0);
    const auto comps = connected_components(a, 1.0);
    REQUIRE(comps.size() == 2);
    CHECK(comps[0].size() == 4);
    CHECK(comps[0].front() == g.index(1, 1));
    CHECK(comps[1].front() == g.index(5, 5));
    // diagonal neighbours are separate components
    GridField d(g);
    d[g.index(1, 1)] = 1.0;
    d[g.index(2, 2)] = 1.0;
    CHECK(connected_components(d, 0.5).size() == 2);
    CHECK(relative_error(b, b) == 0.0);
    CHECK_THROWS_AS(relative_error(a, GridField(g)), std::invalid_argument);
    CHECK_THROWS_AS(jaccard(a, 1.0, GridField(Grid2D(10)), 1.0), std::invalid_argument);
}
