#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "vsd/specfun.hpp"

using namespace vsd::specfun;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

// Reference values below come from mpmath at 60 digits.

TEST_CASE("gamma matches high-precision values") {
    CHECK(gamma_fn(1.0) == 1.0);
    CHECK(gamma_fn(5.0) == 24.0);
    CHECK(rel(gamma_fn(0.5), 1.7724538509055160273) <= 1e-13);
    CHECK(rel(gamma_fn(0.1), 9.5135076986687312858) <= 1e-12);
    CHECK(rel(gamma_fn(2.5), 1.3293403881791370205) <= 1e-12);
    CHECK(rel(gamma_fn(7.3), 1271.4236336639088399) <= 1e-12);
    CHECK(rel(gamma_fn(29.5), 1.6348125198274266444e+30) <= 1e-12);
}

TEST_CASE("gamma recurrence on [0.5, 10]") {
    for (double x = 0.5; x <= 10.0; x += 0.0625) {
        CHECK(std::abs(gamma_fn(x + 1.0) / gamma_fn(x) - x) <= 1e-11);
    }
}

TEST_CASE("gamma rejects poles and NaN") {
    CHECK_THROWS_AS(gamma_fn(0.0), std::domain_error);
    CHECK_THROWS_AS(gamma_fn(-3.0), std::domain_error);
    CHECK_THROWS_AS(gamma_fn(std::nan("")), std::domain_error);
    CHECK(reciprocal_gamma(0.0) == 0.0);
    CHECK(reciprocal_gamma(-2.0) == 0.0);
    CHECK(rel(reciprocal_gamma(0.25), 1.0 / gamma_fn(0.25)) <= 1e-14);
}

TEST_CASE("digamma matches high-precision values") {
    CHECK(std::abs(digamma_fn(1.0) + 0.57721566490153286061) <= 1e-12);
    CHECK(std::abs(digamma_fn(2.0) - 0.42278433509846713939) <= 1e-12);
    CHECK(rel(digamma_fn(0.1), -10.423754940411076232) <= 1e-10);
    CHECK(rel(digamma_fn(0.3), -3.5025242222001331249) <= 1e-10);
    CHECK(rel(digamma_fn(7.5), 1.9467574842460867881) <= 1e-10);
    CHECK(rel(digamma_fn(25.0), 3.1987425128519740085) <= 1e-10);
}

TEST_CASE("digamma recurrence and domain") {
    for (double x = 0.1; x <= 30.0; x += 0.37) {
        CHECK(std::abs(digamma_fn(x + 1.0) - digamma_fn(x) - 1.0 / x) <= 1e-12);
    }
    CHECK_THROWS_AS(digamma_fn(0.0), std::domain_error);
    CHECK_THROWS_AS(digamma_fn(-1.5), std::domain_error);
}

TEST_CASE("Mittag-Leffler closed forms and reference values") {
    CHECK(std::abs(mittag_leffler(1.0, 1.0, -1.0) - 0.3678794411714423216) <= 1e-12);
    for (double b : {0.5, 1.0, 1.7}) CHECK(std::abs(mittag_leffler(0.6, b, 0.0) - 1.0 / gamma_fn(b)) <= 1e-14);
    // E_{1/2}(-x) = exp(x^2) erfc(x)
    CHECK(std::abs(mittag_leffler(0.5, 1.0, -1.0) - 0.42758357615580700441) <= 1e-10);
    CHECK(std::abs(mittag_leffler(0.5, 1.0, -10.0) - 0.056140992743822585858) <= 1e-10);
    CHECK(std::abs(mittag_leffler(0.5, 1.0, -1e4) - 0.000056418958072680841152) <= 1e-10);
    CHECK(std::abs(mittag_leffler(0.75, 1.0, -3.0) - 0.12585513691184152704) <= 1e-10);
    CHECK(std::abs(mittag_leffler(0.6, 1.0, -7.0) - 0.06725512678932835387) <= 1e-10);
    // Large arguments: Laplace-integral representation in mpmath.
    CHECK(std::abs(mittag_leffler(0.9, 1.0, -1e4) - 0.000010513113058088607289) <= 1e-10);
    CHECK(std::abs(mittag_leffler(0.3, 1.0, -500.0) - 0.0015389639145855397884) <= 1e-10);
    // E_{a,a} = a dE_a/dz, differentiated numerically in mpmath.
    CHECK(std::abs(mittag_leffler(0.4, 0.4, -20.0) - 0.00064856865742100458589) <= 1e-10);
}

TEST_CASE("Mittag-Leffler stays in (0,1] and is nonincreasing in |z|") {
    for (double a : {0.4, 0.5, 0.75}) {
        double prev = 1.0;
        for (double x = 0.0; x <= 50.0; x += 0.25) {
            const double e = mittag_leffler(a, 1.0, -x);
            CHECK(e > 0.0);
            CHECK(e <= 1.0);
            CHECK(e <= prev + 1e-12);
            prev = e;
        }
    }
}

TEST_CASE("raw series and asymptotic branches agree where both are valid") {
    for (double x = 6.4; x <= 7.0; x += 0.1) {
        double tail = 0.0;
        const double s = detail::ml_series(0.6, 1.0, -x, 400);
        const double a = detail::ml_asymptotic(0.6, 1.0, -x, 10, &tail);
        CHECK(std::abs(s - a) <= 2e-7);
    }
}

TEST_CASE("combined evaluator is continuous across the branch switches") {
    const MLSeriesConfig cfg;
    for (double a : {0.3, 0.5, 0.7, 0.9}) {
        for (double x = 1.0; x <= 200.0; x *= 1.05) {
            const double left = mittag_leffler(a, 1.0, -x * (1.0 - 1e-9), cfg);
            const double right = mittag_leffler(a, 1.0, -x * (1.0 + 1e-9), cfg);
            CHECK(std::abs(left - right) <= 1e-9 + 4e-9 * x * std::abs(left));
        }
    }
}

TEST_CASE("Mittag-Leffler argument checks") {
    CHECK_THROWS_AS(mittag_leffler(0.0, 1.0, -1.0), std::domain_error);
    CHECK_THROWS_AS(mittag_leffler(1.2, 1.0, -1.0), std::domain_error);
    CHECK_THROWS_AS(mittag_leffler(0.5, 0.0, -1.0), std::domain_error);
    CHECK_THROWS_AS(mittag_leffler(0.5, 1.0, 0.5), std::domain_error);
    MLSeriesConfig bad;
    bad.series_terms = 10;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = MLSeriesConfig{};
    bad.tolerance = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
