#include "vsd/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "vsd/errors.hpp"
#include "vsd/io.hpp"
#include "vsd/kernel.hpp"
#include "vsd/oracle.hpp"

namespace vsd {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

constexpr double kPi = 3.14159265358979323846;

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

// Strict object reader: every requested key must exist, and finish() rejects
// keys nobody asked for.
class Fields {
public:
    Fields(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
    }

    const json& at(const std::string& key) {
        if (!obj_.contains(key)) throw ConfigError(join(path_, key), "missing field");
        seen_.insert(key);
        return obj_.at(key);
    }
    std::string where(const std::string& key) const { return join(path_, key); }
    const std::string& path() const { return path_; }

    double real(const std::string& key) {
        const json& v = at(key);
        if (!v.is_number()) throw ConfigError(where(key), "expected a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ConfigError(where(key), "must be finite");
        return d;
    }
    int integer(const std::string& key) {
        const json& v = at(key);
        if (!v.is_number_integer()) throw ConfigError(where(key), "expected an integer");
        const auto i = v.get<long long>();
        if (i < -1000000000LL || i > 1000000000LL) throw ConfigError(where(key), "integer out of range");
        return static_cast<int>(i);
    }
    std::uint64_t unsigned64(const std::string& key) {
        const json& v = at(key);
        if (!v.is_number_unsigned()) throw ConfigError(where(key), "expected a nonnegative integer");
        return v.get<std::uint64_t>();
    }
    std::string text(const std::string& key) {
        const json& v = at(key);
        if (!v.is_string()) throw ConfigError(where(key), "expected a string");
        return v.get<std::string>();
    }
    Fields object(const std::string& key) { return Fields(at(key), where(key)); }

    void finish() const {
        for (auto it = obj_.begin(); it != obj_.end(); ++it) {
            if (!seen_.count(it.key())) throw ConfigError(join(path_, it.key()), "unknown field");
        }
    }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

SourceFormula parse_source(Fields f) {
    SourceFormula s;
    const std::string kind = f.text("kind");
    if (kind == "sines") {
        s.kind = SourceFormula::Kind::sines;
        s.constant = f.real("constant");
        const json& terms = f.at("terms");
        if (!terms.is_array()) throw ConfigError(f.where("terms"), "expected an array");
        for (std::size_t i = 0; i < terms.size(); ++i) {
            Fields t(terms[i], f.where("terms") + "[" + std::to_string(i) + "]");
            SourceFormula::SineTerm term{t.real("amplitude"), t.integer("n"), t.integer("m")};
            if (term.n < 1) throw ConfigError(t.where("n"), "must be >= 1");
            if (term.m < 1) throw ConfigError(t.where("m"), "must be >= 1");
            t.finish();
            s.terms.push_back(term);
        }
    } else if (kind == "discs") {
        s.kind = SourceFormula::Kind::discs;
        const json& discs = f.at("discs");
        if (!discs.is_array()) throw ConfigError(f.where("discs"), "expected an array");
        for (std::size_t i = 0; i < discs.size(); ++i) {
            Fields d(discs[i], f.where("discs") + "[" + std::to_string(i) + "]");
            SourceFormula::Disc disc{d.real("cx"), d.real("cy"), d.real("radius"), d.real("height")};
            if (!(disc.radius > 0.0)) throw ConfigError(d.where("radius"), "must be positive");
            d.finish();
            s.discs.push_back(disc);
        }
    } else {
        throw ConfigError(f.where("kind"), "unknown source kind '" + kind + "' (expected sines or discs)");
    }
    f.finish();
    return s;
}

ojson source_json(const SourceFormula& s) {
    ojson j;
    if (s.kind == SourceFormula::Kind::sines) {
        j["kind"] = "sines";
        j["constant"] = s.constant;
        j["terms"] = ojson::array();
        for (const auto& t : s.terms) j["terms"].push_back(ojson{{"amplitude", t.amplitude}, {"n", t.n}, {"m", t.m}});
    } else {
        j["kind"] = "discs";
        j["discs"] = ojson::array();
        for (const auto& d : s.discs) {
            j["discs"].push_back(ojson{{"cx", d.cx}, {"cy", d.cy}, {"radius", d.radius}, {"height", d.height}});
        }
    }
    return j;
}

ojson config_object(const ExperimentConfig& c) {
    ojson j;
    j["name"] = c.name;
    j["model"] = ojson{{"a0", c.a0}, {"slope", c.slope}, {"T", c.T},
                       {"beta", ojson{{"coefficient", c.beta.coefficient}, {"power", c.beta.power}}}};
    j["grid"] = ojson{{"N", c.N}, {"Nt", c.Nt}};
    j["source"] = ojson{{"truth", source_json(c.truth)}, {"initial", source_json(c.initial)}};
    j["observation"] = ojson{{"box", ojson::array({c.box.x0, c.box.x1, c.box.y0, c.box.y1})},
                             {"time_measure", c.measure == TimeMeasure::sample ? "sample" : "lebesgue"}};
    j["noise"] = ojson{{"delta", c.delta}, {"seed", c.seed}};
    j["data"] = ojson{{"refine", c.data_refine}};
    const InversionConfig& v = c.inversion;
    j["algorithm"] = ojson{{"kind", c.algorithm == Algorithm::thresholding ? "thresholding" : "tpg"},
                           {"A", v.A},
                           {"eps", v.eps},
                           {"rho", v.rho},
                           {"kappa", v.kappa},
                           {"tau", v.tau},
                           {"gamma0_bar", v.gamma0_bar},
                           {"gamma1_bar", v.gamma1_bar},
                           {"lambda_shift", c.lambda_shift},
                           {"max_outer", v.max_outer},
                           {"pdhg_iters", v.pdhg_iters}};
    j["oracle"] = ojson{{"modes", c.oracle.modes},
                        {"report_modes", c.oracle.report_modes},
                        {"fine_steps", c.oracle.fine_steps},
                        {"tolerance", c.oracle.tolerance}};
    j["output"] = ojson{{"dir", c.output_dir}, {"snapshot_stride", c.snapshot_stride}};
    return j;
}

std::function<double(int)> lambda_schedule(double shift) {
    return [shift](int n) { return n / (n + shift); };
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text;
    out.close();
    if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

std::size_t count_components(const GridField& f, double threshold) { return connected_components(f, threshold).size(); }

}  // namespace

double SourceFormula::operator()(double x, double y) const {
    if (kind == Kind::sines) {
        double s = constant;
        for (const auto& t : terms) s += t.amplitude * std::sin(kPi * t.n * x) * std::sin(kPi * t.m * y);
        return s;
    }
    double s = 0.0;
    for (const auto& d : discs) {
        const double r2 = (x - d.cx) * (x - d.cx) + (y - d.cy) * (y - d.cy);
        // Closed disc; the slack keeps nodes exactly on the circle inside.
        if (r2 <= d.radius * d.radius * (1.0 + 1e-12)) s += d.height;
    }
    return s;
}

GridField SourceFormula::sample(const Grid2D& grid) const {
    return GridField::sample(grid, [this](double x, double y) { return (*this)(x, y); });
}

ExperimentConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
    }
    Fields top(root, "");
    ExperimentConfig c;

    c.name = top.text("name");
    if (c.name.empty()) throw ConfigError("name", "must not be empty");

    {
        Fields m = top.object("model");
        c.a0 = m.real("a0");
        c.slope = m.real("slope");
        c.T = m.real("T");
        if (!(c.T > 0.0)) throw ConfigError(m.where("T"), "must be positive");
        if (!(c.a0 > 0.0 && c.a0 < 1.0)) throw ConfigError(m.where("a0"), "must lie in (0,1)");
        const double end = c.a0 + c.slope * c.T;
        if (!(end > 0.0 && end < 1.0)) throw ConfigError(m.where("slope"), "alpha(T) = a0 + slope T must lie in (0,1)");
        Fields b = m.object("beta");
        c.beta.coefficient = b.real("coefficient");
        c.beta.power = b.real("power");
        if (!(c.beta.power >= 0.0)) throw ConfigError(b.where("power"), "must be >= 0");
        b.finish();
        m.finish();
    }
    {
        Fields g = top.object("grid");
        c.N = g.integer("N");
        c.Nt = g.integer("Nt");
        if (c.N < 4) throw ConfigError(g.where("N"), "must be >= 4");
        if (c.Nt < 1) throw ConfigError(g.where("Nt"), "must be >= 1");
        g.finish();
    }
    {
        Fields s = top.object("source");
        c.truth = parse_source(s.object("truth"));
        c.initial = parse_source(s.object("initial"));
        s.finish();
    }
    {
        Fields o = top.object("observation");
        const json& box = o.at("box");
        if (!box.is_array() || box.size() != 4) throw ConfigError(o.where("box"), "expected [x0, x1, y0, y1]");
        double b[4];
        for (int i = 0; i < 4; ++i) {
            if (!box[i].is_number()) throw ConfigError(o.where("box") + "[" + std::to_string(i) + "]", "expected a number");
            b[i] = box[i].get<double>();
        }
        if (!(0.0 <= b[0] && b[0] < b[1] && b[1] <= 1.0 && 0.0 <= b[2] && b[2] < b[3] && b[3] <= 1.0)) {
            throw ConfigError(o.where("box"), "need 0 <= x0 < x1 <= 1 and 0 <= y0 < y1 <= 1");
        }
        c.box = Box{b[0], b[1], b[2], b[3]};
        const std::string measure = o.text("time_measure");
        if (measure == "sample") {
            c.measure = TimeMeasure::sample;
        } else if (measure == "lebesgue") {
            c.measure = TimeMeasure::lebesgue;
        } else {
            throw ConfigError(o.where("time_measure"), "expected sample or lebesgue");
        }
        o.finish();
    }
    {
        Fields n = top.object("noise");
        c.delta = n.real("delta");
        if (!(c.delta >= 0.0)) throw ConfigError(n.where("delta"), "must be >= 0");
        c.seed = n.unsigned64("seed");
        n.finish();
    }
    {
        Fields d = top.object("data");
        c.data_refine = d.integer("refine");
        if (c.data_refine < 1 || c.data_refine > 8) throw ConfigError(d.where("refine"), "must lie in 1..8");
        d.finish();
    }
    {
        Fields a = top.object("algorithm");
        const std::string kind = a.text("kind");
        if (kind == "thresholding") {
            c.algorithm = Algorithm::thresholding;
        } else if (kind == "tpg") {
            c.algorithm = Algorithm::tpg;
        } else {
            throw ConfigError(a.where("kind"), "expected thresholding or tpg");
        }
        InversionConfig& v = c.inversion;
        v.A = a.real("A");
        v.eps = a.real("eps");
        v.rho = a.real("rho");
        v.kappa = a.real("kappa");
        v.tau = a.real("tau");
        v.gamma0_bar = a.real("gamma0_bar");
        v.gamma1_bar = a.real("gamma1_bar");
        c.lambda_shift = a.real("lambda_shift");
        if (!(c.lambda_shift > 0.0)) throw ConfigError(a.where("lambda_shift"), "must be positive");
        v.lambda_schedule = lambda_schedule(c.lambda_shift);
        v.max_outer = a.integer("max_outer");
        v.pdhg_iters = a.integer("pdhg_iters");
        try {
            v.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(a.path(), e.what());
        }
        a.finish();
    }
    {
        Fields o = top.object("oracle");
        c.oracle.modes = o.integer("modes");
        c.oracle.report_modes = o.integer("report_modes");
        c.oracle.fine_steps = o.integer("fine_steps");
        c.oracle.tolerance = o.real("tolerance");
        if (c.oracle.modes < 1) throw ConfigError(o.where("modes"), "must be >= 1");
        if (c.oracle.report_modes < 1 || c.oracle.report_modes > c.oracle.modes) {
            throw ConfigError(o.where("report_modes"), "must lie in 1..modes");
        }
        if (c.oracle.fine_steps < 10) throw ConfigError(o.where("fine_steps"), "must be >= 10");
        if (!(c.oracle.tolerance > 0.0)) throw ConfigError(o.where("tolerance"), "must be positive");
        o.finish();
    }
    {
        Fields o = top.object("output");
        c.output_dir = o.text("dir");
        c.snapshot_stride = o.integer("snapshot_stride");
        if (c.output_dir.empty()) throw ConfigError(o.where("dir"), "must not be empty");
        if (c.snapshot_stride < 1) throw ConfigError(o.where("snapshot_stride"), "must be >= 1");
        o.finish();
    }
    top.finish();

    // Catch geometry problems now rather than in the middle of a run.
    try {
        region_mask(Grid2D(c.N), c.box);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("observation.box", e.what());
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_text(path);
    } catch (const std::runtime_error& e) {
        throw ConfigError("<file>", e.what());
    }
    return parse_config(text);
}

std::string config_to_json(const ExperimentConfig& cfg) { return config_object(cfg).dump(2) + "\n"; }

std::string content_hash(const std::string& text) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

InversionSetup make_setup(const ExperimentConfig& cfg) {
    KernelSplit ks(ExponentProfile::affine(cfg.a0, cfg.slope, cfg.T), cfg.T);
    Grid2D grid(cfg.N);
    TimeGrid tg(cfg.T, cfg.Nt, ks.alpha0());
    const PowerBeta beta = cfg.beta;
    return InversionSetup{ks, grid, tg, [beta](double t) { return beta(t); }, region_mask(grid, cfg.box), {}, cfg.measure};
}

Observation synthesize_clean_data(const ExperimentConfig& cfg, const InversionSetup& setup) {
    const int r = cfg.data_refine;
    if (r == 1) return apply_G(cfg.truth.sample(setup.grid), setup);
    const Grid2D fine(r * cfg.N);
    const TimeGrid tg(cfg.T, r * cfg.Nt, setup.ks.alpha0());
    const Trajectory u =
        solve_forward(setup.ks, fine, tg, SourceSpec{cfg.truth.sample(fine), setup.beta, {}}, GridField(fine), setup.solver);
    const auto nodes = setup.mask.nodes();
    const int m = setup.grid.nodes_per_axis();
    Observation g(cfg.Nt, nodes.size());
    for (int n = 1; n <= cfg.Nt; ++n) {
        const GridField& un = u.at(r * n);
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            const int i = static_cast<int>(nodes[k] % m) + 1;
            const int j = static_cast<int>(nodes[k] / m) + 1;
            g.value(n, k) = un[fine.index(r * i, r * j)];
        }
    }
    return g;
}

InversionRun run_inversion(const ExperimentConfig& cfg, const std::optional<Observation>& data) {
    const InversionSetup setup = make_setup(cfg);
    InversionConfig icfg = cfg.inversion;
    icfg.lambda_schedule = lambda_schedule(cfg.lambda_shift);

    InversionRun run{ReconstructionResult{GridField(setup.grid), 0, {}, StopReason::cap, 0.0}, cfg.truth.sample(setup.grid)};
    Observation g;
    if (data) {
        g = *data;
        run.data_from_file = true;
        run.data_norm = obs_norm(g, setup);
    } else {
        const Observation clean = synthesize_clean_data(cfg, setup);
        run.data_norm = obs_norm(clean, setup);
        g = add_noise(clean, cfg.delta, cfg.seed);
    }
    g.noise_level = cfg.delta;
    g.seed = cfg.seed;
    const double delta_abs = cfg.delta * run.data_norm;

    const GridField f0 = cfg.initial.sample(setup.grid);
    if (cfg.algorithm == Algorithm::thresholding) {
        run.result = iterative_thresholding(g, icfg, f0, setup, &run.truth);
        run.result.delta_abs = delta_abs;
    } else {
        const GridField xi0 = (1.0 / icfg.kappa) * f0;
        run.result = nesterov_tpg(g, icfg, f0, xi0, delta_abs, setup, &run.truth);
    }
    run.relative_error = relative_error(run.result.f_inv, run.truth);
    return run;
}

std::filesystem::path output_directory(const ExperimentConfig& cfg) {
    if (const char* root = std::getenv("VSD_OUT"); root != nullptr && *root != '\0') {
        return std::filesystem::path(root) / cfg.name;
    }
    return std::filesystem::path(cfg.output_dir);
}

void write_inversion_artifacts(const ExperimentConfig& cfg, const InversionRun& run, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_field_csv(run.result.f_inv, dir / "reconstruction.csv");
    write_field_csv(run.truth, dir / "truth.csv");
    write_log_csv(run.result.history, dir / "log.csv");

    const std::string config_text = config_to_json(cfg);
    ojson meta;
    meta["config"] = config_object(cfg);
    meta["config_hash"] = content_hash(config_text);
    meta["seed"] = cfg.seed;
    meta["stop_reason"] = to_string(run.result.stop_reason);
    meta["iterations"] = run.result.iterations;
    meta["delta_abs"] = run.result.delta_abs;
    meta["data_norm"] = run.data_norm;
    meta["data_source"] = run.data_from_file ? "file" : "synthetic";
    meta["data_grid"] = ojson{{"N", cfg.N * cfg.data_refine}, {"Nt", cfg.Nt * cfg.data_refine}};
    meta["adjoint"] = "optimize-then-discretize";
    meta["relative_error"] = run.relative_error;
    meta["final_residual"] = run.result.history.empty() ? 0.0 : run.result.history.back().residual;
    if (cfg.algorithm == Algorithm::tpg) {
        meta["jaccard_above_1"] = jaccard(run.result.f_inv, 1.0, run.truth, 1.0);
        meta["components_above_1_5"] = count_components(run.result.f_inv, 1.5);
    }
    meta["reconstruction_hash"] = content_hash(read_text(dir / "reconstruction.csv"));
    write_text(dir / "metadata.json", meta.dump(2) + "\n");
}

void run_forward(const ExperimentConfig& cfg, const std::filesystem::path& dir) {
    const InversionSetup setup = make_setup(cfg);
    const Trajectory u = solve_forward(setup.ks, setup.grid, setup.tg,
                                       SourceSpec{cfg.truth.sample(setup.grid), setup.beta, {}},
                                       GridField(setup.grid), setup.solver);
    write_trajectory(u, dir / "forward", "u", cfg.snapshot_stride);

    const Observation clean = synthesize_clean_data(cfg, setup);
    write_observation_csv(add_noise(clean, cfg.delta, cfg.seed), setup, dir / "data.csv");

    ojson meta;
    meta["config"] = config_object(cfg);
    meta["config_hash"] = content_hash(config_to_json(cfg));
    meta["seed"] = cfg.seed;
    meta["data_norm"] = obs_norm(clean, setup);
    meta["data_grid"] = ojson{{"N", cfg.N * cfg.data_refine}, {"Nt", cfg.Nt * cfg.data_refine}};
    meta["solution_norm"] = space_time_norm(u);
    write_text(dir / "forward_metadata.json", meta.dump(2) + "\n");
}

std::vector<OracleRow> oracle_check(const ExperimentConfig& cfg) {
    const InversionSetup setup = make_setup(cfg);
    const Trajectory u = solve_forward(setup.ks, setup.grid, setup.tg,
                                       SourceSpec{cfg.truth.sample(setup.grid), setup.beta, {}},
                                       GridField(setup.grid), setup.solver);
    const SourceFormula truth = cfg.truth;
    const auto modes = oracle::project_modes([&truth](double x, double y) { return truth(x, y); }, cfg.oracle.modes);
    const auto sol = oracle::spectral_solution(setup.ks, modes, setup.beta, cfg.oracle.fine_steps, cfg.T);

    const int R = cfg.oracle.report_modes;
    const int M = cfg.oracle.modes;
    const auto oracle_index = [M](int n, int m) { return static_cast<std::size_t>((n - 1) * M + (m - 1)); };

    std::vector<double> dev(static_cast<std::size_t>(R * R), 0.0);
    double scale = 0.0;
    for (int step = 1; step <= cfg.Nt; ++step) {
        const double t = setup.tg.time(step);
        const auto grid_modes = oracle::project_modes(u.at(step), R);
        for (int n = 1; n <= R; ++n) {
            for (int m = 1; m <= R; ++m) {
                const double c_or = sol.coefficient(oracle_index(n, m), t);
                const double c_grid = grid_modes.modes[static_cast<std::size_t>((n - 1) * R + (m - 1))].coefficient;
                auto& d = dev[static_cast<std::size_t>((n - 1) * R + (m - 1))];
                d = std::max(d, std::abs(c_grid - c_or));
                scale = std::max(scale, std::abs(c_or));
            }
        }
    }
    std::vector<OracleRow> rows;
    for (int n = 1; n <= R; ++n) {
        for (int m = 1; m <= R; ++m) {
            const double d = dev[static_cast<std::size_t>((n - 1) * R + (m - 1))];
            const double rel = scale > 0.0 ? d / scale : d;
            rows.push_back(OracleRow{n, m, kPi * kPi * (n * n + m * m), rel, rel <= cfg.oracle.tolerance});
        }
    }
    return rows;
}

void write_oracle_csv(const std::vector<OracleRow>& rows, const std::filesystem::path& path) {
    std::ostringstream out;
    out << "mode,lambda,max_deviation,verdict\n";
    for (const auto& r : rows) {
        out << '(' << r.n << ' ' << r.m << ")," << format_real(r.lambda) << ',' << format_real(r.max_deviation) << ','
            << (r.pass ? "pass" : "fail") << '\n';
    }
    write_text(path, out.str());
}

std::pair<GridField, Observation> random_smooth_pair(const InversionSetup& setup, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    double a[3][3];
    for (auto& row : a) {
        for (double& v : row) v = normal(gen);
    }
    const GridField f = GridField::sample(setup.grid, [&](double x, double y) {
        double s = 0.0;
        for (int n = 1; n <= 3; ++n) {
            for (int m = 1; m <= 3; ++m) s += a[n - 1][m - 1] * std::sin(kPi * n * x) * std::sin(kPi * m * y) / (n * m);
        }
        return s;
    });

    double b[3][2][2];
    for (auto& p : b) {
        for (auto& row : p) {
            for (double& v : row) v = normal(gen);
        }
    }
    const auto nodes = setup.mask.nodes();
    Observation w(setup.tg.steps(), nodes.size());
    for (int step = 1; step <= setup.tg.steps(); ++step) {
        const double t = setup.tg.time(step) / setup.tg.horizon();
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            const double x = setup.grid.x_of(nodes[k]);
            const double y = setup.grid.y_of(nodes[k]);
            double s = 0.0;
            for (int p = 0; p < 3; ++p) {
                for (int n = 1; n <= 2; ++n) {
                    for (int m = 1; m <= 2; ++m) {
                        s += b[p][n - 1][m - 1] * std::cos(kPi * p * t) * std::sin(kPi * n * x) * std::sin(kPi * m * y);
                    }
                }
            }
            w.value(step, k) = s;
        }
    }
    return {f, w};
}

std::vector<VerifyItem> run_verify() {
    std::vector<VerifyItem> items;
    const KernelSplit ks(ExponentProfile::affine(0.5, 0.25, 1.0), 1.0);

    {
        std::vector<double> t(1000);
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::pow(10.0, -6.0 + 6.0 * static_cast<double>(i) / 999.0);
        const KernelBoundReport rep = verify_kernel_bounds(ks, t);
        const double ratio = std::max(rep.near_zero_ratio_g, rep.near_zero_ratio_gp);
        items.push_back({"kernel_bounds_ratio", ratio, 10.0, rep.pass});
    }
    {
        // Example 1a source through the observation operator against the
        // spectral oracle restricted to the same nodes and times.
        const Grid2D grid(50);
        const TimeGrid tg(1.0, 100, ks.alpha0());
        const InversionSetup setup{ks, grid, tg, [](double) { return 1.0; }, region_mask(grid, {0.3, 0.7, 0.3, 0.7})};
        const auto fx = [](double x, double y) { return 1.0 + std::sin(kPi * x) * std::sin(kPi * y); };
        const Observation g = apply_G(GridField::sample(grid, fx), setup);
        const auto sol = oracle::spectral_solution(ks, oracle::project_modes(fx, 40), setup.beta, 4000, 1.0);
        Observation ref(tg.steps(), setup.mask.count());
        for (int n = 1; n <= tg.steps(); ++n) {
            const GridField un = sol.field(grid, tg.time(n));
            for (std::size_t k = 0; k < ref.nodes; ++k) ref.value(n, k) = un[setup.mask.nodes()[k]];
        }
        const double rel = obs_norm(obs_difference(g, ref), setup) / obs_norm(ref, setup);
        items.push_back({"oracle_observation_rel", rel, 2e-2, rel <= 2e-2});
    }
    {
        const Grid2D grid(32);
        const TimeGrid tg(1.0, 100, ks.alpha0());
        const InversionSetup setup{ks, grid, tg, [](double) { return 1.0; }, region_mask(grid, {0.3, 0.7, 0.3, 0.7})};
        double worst = 0.0;
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            const auto [f, w] = random_smooth_pair(setup, seed);
            worst = std::max(worst, duality_gap(f, w, setup));
        }
        items.push_back({"adjoint_duality_gap", worst, 5e-2, worst <= 5e-2});
    }
    {
        const Grid2D grid(32);
        const TimeGrid tg(1.0, 400, ks.alpha0());
        const GridField f = GridField::sample(grid, [](double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); });
        const Trajectory u = solve_forward(ks, grid, tg, SourceSpec{f, [](double) { return 1.0; }, {}}, GridField(grid));
        const Trajectory d = duhamel_reconstruct(ks, grid, tg, f, PowerBeta{});
        const double gap = space_time_distance(u, d) / space_time_norm(u);
        items.push_back({"duhamel_gap", gap, 2e-2, gap <= 2e-2});
    }
    return items;
}

}  // namespace vsd
