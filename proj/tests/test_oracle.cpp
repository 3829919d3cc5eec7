#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "vsd/oracle.hpp"
#include "vsd/specfun.hpp"
#include "vsd/timestep.hpp"

using namespace vsd;

namespace {

const double kPi = std::acos(-1.0);

KernelSplit variable() { return KernelSplit(ExponentProfile::affine(0.5, 0.25, 1.0), 1.0); }
KernelSplit constant() { return KernelSplit(ExponentProfile::affine(0.5, 0.0, 1.0), 1.0); }

double s11(double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); }
double s22(double x, double y) { return std::sin(2 * kPi * x) * std::sin(2 * kPi * y); }

}  // namespace

TEST_CASE("mode projection") {
    const auto ms = oracle::project_modes(s11, 6);
    REQUIRE(ms.modes.size() == 36);
    CHECK(ms.modes[0].n == 1);
    CHECK(ms.modes[1].m == 2);
    CHECK(ms.modes[0].lambda == doctest::Approx(2 * kPi * kPi));
    CHECK(ms.modes[0].coefficient == doctest::Approx(0.5).epsilon(1e-12));
    for (std::size_t i = 1; i < ms.modes.size(); ++i) CHECK(std::abs(ms.modes[i].coefficient) <= 1e-10);

    const auto two = oracle::project_modes(s22, 4);
    for (const auto& m : two.modes) {
        if (m.n == 2 && m.m == 2) CHECK(m.coefficient == doctest::Approx(0.5).epsilon(1e-12));
        else CHECK(std::abs(m.coefficient) <= 1e-10);
    }
    for (const auto& m : oracle::project_modes([](double, double) { return 0.0; }, 3).modes) CHECK(m.coefficient == 0.0);

    // constant 1: (1, 2 sin sin) = 8 / (n m pi^2) for odd n, m
    const auto c = oracle::project_modes([](double, double) { return 1.0; }, 5);
    CHECK(c.modes[0].coefficient == doctest::Approx(8.0 / (kPi * kPi)).epsilon(1e-6));
    CHECK(c.modes[2 * 5 + 2].coefficient == doctest::Approx(8.0 / (9 * kPi * kPi)).epsilon(1e-5));
    CHECK(std::abs(c.modes[1].coefficient) <= 1e-10);

    const Grid2D g(32);
    const auto from_grid = oracle::project_modes(GridField::sample(g, s11), 4);
    CHECK(from_grid.modes[0].coefficient == doctest::Approx(0.5).epsilon(1e-10));
    CHECK_THROWS_AS(oracle::project_modes(s11, 0), std::invalid_argument);
}

TEST_CASE("scalar mode solver against Mittag-Leffler closed forms") {
    const int steps = 10000;
    for (double lam : {2 * kPi * kPi, 5 * kPi * kPi}) {
        const auto hom = oracle::solve_mode_scalar(constant(), lam, [](double) { return 0.0; }, 1.0, steps, 1.0);
        const auto inh = oracle::solve_mode_scalar(constant(), lam, [](double) { return 1.0; }, 0.0, steps, 1.0);
        double e_hom = 0.0, e_inh = 0.0;
        // The first steps carry the L1 initial layer; compare from t = 0.01 on.
        for (int n = steps / 100; n <= steps; ++n) {
            const double t = static_cast<double>(n) / steps;
            const double e = specfun::mittag_leffler(0.5, 1.0, -lam * std::sqrt(t));
            e_hom = std::max(e_hom, std::abs(hom[static_cast<std::size_t>(n)] - e));
            e_inh = std::max(e_inh, std::abs(inh[static_cast<std::size_t>(n)] - (1.0 - e) / lam));
        }
        CHECK(e_hom <= 1e-3);
        CHECK(e_inh <= 1e-3);
    }
    const auto zero = oracle::solve_mode_scalar(variable(), 3.0, [](double) { return 0.0; }, 0.0, 50, 1.0);
    for (double v : zero) CHECK(v == 0.0);
    CHECK_THROWS_AS(oracle::solve_mode_scalar(variable(), 3.0, [](double) { return 0.0; }, 1.0, 5, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(oracle::solve_mode_scalar(variable(), 0.0, [](double) { return 0.0; }, 1.0, 50, 1.0),
                    std::invalid_argument);
}

TEST_CASE("scalar solver self-convergence for the variable exponent") {
    const double lam = 2 * kPi * kPi;
    double prev = 1e300;
    for (int steps : {1000, 2000, 4000}) {
        const auto a = oracle::solve_mode_scalar(variable(), lam, [](double) { return 1.0; }, 0.0, steps, 1.0);
        const auto b = oracle::solve_mode_scalar(variable(), lam, [](double) { return 1.0; }, 0.0, 2 * steps, 1.0);
        const double d = std::abs(a.back() - b.back());
        CHECK(d < prev);
        prev = d;
    }
}

TEST_CASE("mode decay in lambda") {
    double prev = 1e300;
    for (double lam : {20.0, 50.0, 100.0, 400.0}) {
        const auto c = oracle::solve_mode_scalar(variable(), lam, [](double) { return 1.0; }, 0.0, 400, 1.0);
        CHECK(std::abs(c[200]) <= prev);
        prev = std::abs(c[200]);
    }
}

TEST_CASE("spectral solution assembly") {
    const auto one = [](double) { return 1.0; };
    const auto single = oracle::spectral_solution(variable(), oracle::project_modes(s11, 4), one, 400, 1.0);
    CHECK(single.value(0.5, 0.5, 1.0) == doctest::Approx(2 * single.coefficient(0, 1.0)).epsilon(1e-12));
    CHECK(single.value(0.5, 0.5, 0.0) == 0.0);
    CHECK_THROWS_AS(single.value(0.5, 0.5, 1.5), std::domain_error);

    const auto both = oracle::spectral_solution(
        variable(), oracle::project_modes([](double x, double y) { return s11(x, y) + s22(x, y); }, 4), one, 400, 1.0);
    const auto only22 = oracle::spectral_solution(variable(), oracle::project_modes(s22, 4), one, 400, 1.0);
    for (double t : {0.1, 0.5, 1.0}) {
        for (double x : {0.2, 0.4, 0.9}) {
            const double sum = single.value(x, 0.3, t) + only22.value(x, 0.3, t);
            CHECK(std::abs(both.value(x, 0.3, t) - sum) <= 1e-12);
        }
    }
}

TEST_CASE("truncation study for the smooth example source") {
    const auto f = [](double x, double y) { return 1.0 + s11(x, y); };
    const auto one = [](double) { return 1.0; };
    const auto a = oracle::spectral_solution(variable(), oracle::project_modes(f, 25), one, 400, 1.0);
    const auto b = oracle::spectral_solution(variable(), oracle::project_modes(f, 50), one, 400, 1.0);
    const Grid2D g(100);
    CHECK(norm2(a.field(g, 1.0) - b.field(g, 1.0)) <= 1e-4);
}

TEST_CASE("grid solver agrees with the oracle on a coarse mesh") {
    const Grid2D g(32);
    const TimeGrid tg(1.0, 200, 0.5);
    const auto u = solve_forward(variable(), g, tg, SourceSpec{GridField::sample(g, s11), [](double) { return 1.0; }, {}},
                                 GridField(g));
    const auto modal = oracle::spectral_solution(variable(), oracle::project_modes(s11, 10), [](double) { return 1.0; },
                                                2000, 1.0);
    Trajectory ref{tg, {}};
    for (int n = 0; n <= tg.steps(); ++n) ref.fields.push_back(modal.field(g, tg.time(n)));
    CHECK(space_time_distance(u, ref) <= 2e-2 * space_time_norm(ref));
}
