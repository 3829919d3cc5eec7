#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "vsd/io.hpp"

using namespace vsd;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "vsd_test_io";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

InversionSetup setup() {
    const Grid2D g(10);
    return InversionSetup{KernelSplit(ExponentProfile::affine(0.5, 0.25, 1.0), 1.0),
                          g,
                          TimeGrid(1.0, 4, 0.5),
                          [](double) { return 1.0; },
                          region_mask(g, {0.3, 0.5, 0.3, 0.5}),
                          {},
                          TimeMeasure::sample};
}

}  // namespace

TEST_CASE("real formatting round-trips exactly") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const double v = u(rng) * std::pow(10.0, static_cast<int>(u(rng) * 30));
        CHECK(parse_real(format_real(v)) == v);
    }
    CHECK(format_real(0.5) == "0.5");
    CHECK(format_real(-2.0) == "-2");
    CHECK(std::isnan(parse_real("")));
    CHECK(std::isnan(parse_real(format_real(std::numeric_limits<double>::quiet_NaN()))));
    CHECK_THROWS_AS(parse_real("1.5x"), std::runtime_error);
    CHECK_THROWS_AS(parse_real("abc"), std::runtime_error);
}

TEST_CASE("field CSV round trip") {
    const Grid2D g(7);
    const GridField f = GridField::sample(g, [](double x, double y) { return std::exp(x) * std::cos(3 * y) / 3.0; });
    const fs::path p = scratch("field.csv");
    write_field_csv(f, p);
    const std::string text = slurp(p);
    CHECK(text.rfind("x,y,value\n", 0) == 0);
    const GridField back = read_field_csv(g, p);
    for (std::size_t k = 0; k < f.size(); ++k) CHECK(back[k] == f[k]);
    CHECK_THROWS_AS(read_field_csv(Grid2D(8), p), std::runtime_error);
    CHECK_THROWS_AS(read_field_csv(g, scratch("missing.csv")), std::runtime_error);
}

TEST_CASE("log CSV keeps NaN entries empty") {
    std::vector<IterationRecord> h(3);
    for (int i = 0; i < 3; ++i) {
        h[static_cast<std::size_t>(i)].iter = i;
        h[static_cast<std::size_t>(i)].residual = 1.0 / (i + 3);
    }
    h[1].rel_change = 0.25;
    h[2].gamma = 4.0;
    h[2].lambda = 2.0 / 7.0;
    const fs::path p = scratch("log.csv");
    write_log_csv(h, p);
    const std::string text = slurp(p);
    CHECK(text.rfind("iter,residual,rel_change,rel_error,gamma_n,lambda_n\n", 0) == 0);
    CHECK(text.find("0,0.33333333333333331,,,,\n") != std::string::npos);
    const auto back = read_log_csv(p);
    REQUIRE(back.size() == 3);
    CHECK(back[1].rel_change == 0.25);
    CHECK(std::isnan(back[0].rel_change));
    CHECK(back[2].lambda == h[2].lambda);
    CHECK(back[2].residual == h[2].residual);
}

TEST_CASE("observation CSV round trip and validation") {
    const InversionSetup s = setup();
    Observation g(s.tg.steps(), s.mask.count());
    for (std::size_t i = 0; i < g.data.size(); ++i) g.data[i] = std::sqrt(static_cast<double>(i) + 0.1);
    const fs::path p = scratch("obs.csv");
    write_observation_csv(g, s, p);
    const Observation back = read_observation_csv(s, p);
    CHECK(back.steps == g.steps);
    CHECK(back.nodes == g.nodes);
    CHECK(back.data == g.data);

    InversionSetup other = setup();
    other.tg = TimeGrid(1.0, 5, 0.5);
    CHECK_THROWS_AS(read_observation_csv(other, p), std::runtime_error);
    CHECK_THROWS_AS(write_observation_csv(Observation(3, 2), s, p), std::invalid_argument);
}

TEST_CASE("trajectory snapshots and index") {
    const Grid2D g(5);
    Trajectory u{TimeGrid(1.0, 5, 0.5), {}};
    for (int n = 0; n <= 5; ++n) {
        GridField f(g);
        f.fill(n);
        u.fields.push_back(f);
    }
    const fs::path dir = scratch("traj");
    fs::remove_all(dir);
    write_trajectory(u, dir, "u", 2);
    CHECK(fs::exists(dir / "u_0.csv"));
    CHECK(fs::exists(dir / "u_2.csv"));
    CHECK(fs::exists(dir / "u_4.csv"));
    CHECK(fs::exists(dir / "u_5.csv"));
    CHECK_FALSE(fs::exists(dir / "u_1.csv"));
    const std::string index = slurp(dir / "u_index.csv");
    CHECK(index.rfind("t,filename\n", 0) == 0);
    CHECK(index.find("u_5.csv") != std::string::npos);
    CHECK(read_field_csv(g, dir / "u_4.csv")[3] == 4.0);
    CHECK_THROWS_AS(write_trajectory(u, dir, "u", 0), std::invalid_argument);
}
