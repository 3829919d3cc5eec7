#include "vsd/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace vsd {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

void close_out(std::ofstream& out, const std::filesystem::path& path) {
    out.close();
    if (!out) throw std::runtime_error("write to " + path.string() + " failed");
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return in;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        parts.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return parts;
}

bool next_line(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

void expect_header(std::istream& in, const std::string& header, const std::filesystem::path& path) {
    std::string line;
    if (!next_line(in, line) || line != header) {
        throw std::runtime_error(path.string() + ": expected header '" + header + "'");
    }
}

std::vector<std::string> row(const std::string& line, std::size_t columns, const std::filesystem::path& path,
                             std::size_t lineno) {
    auto parts = split(line);
    if (parts.size() != columns) {
        throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected " +
                                 std::to_string(columns) + " columns");
    }
    return parts;
}

bool same_coordinate(double read, double expected) { return std::abs(read - expected) <= 1e-12; }

std::string format_optional(double v) { return std::isnan(v) ? std::string() : format_real(v); }

}  // namespace

std::string format_real(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    if (res.ec != std::errc()) throw std::runtime_error("format_real: conversion failed");
    return std::string(buf, res.ptr);
}

double parse_real(const std::string& text) {
    if (text.empty()) return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const char* first = text.data();
    const char* last = first + text.size();
    if (*first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr != last) throw std::runtime_error("not a number: '" + text + "'");
    return v;
}

void write_field_csv(const GridField& f, const std::filesystem::path& path) {
    auto out = open_out(path);
    const Grid2D& g = f.grid();
    out << "x,y,value\n";
    for (std::size_t k = 0; k < f.size(); ++k) {
        out << format_real(g.x_of(k)) << ',' << format_real(g.y_of(k)) << ',' << format_real(f[k]) << '\n';
    }
    close_out(out, path);
}

GridField read_field_csv(const Grid2D& grid, const std::filesystem::path& path) {
    auto in = open_in(path);
    expect_header(in, "x,y,value", path);
    GridField f(grid);
    std::string line;
    std::size_t k = 0;
    while (next_line(in, line)) {
        if (line.empty()) continue;
        if (k >= f.size()) throw std::runtime_error(path.string() + ": more rows than grid nodes");
        const auto p = row(line, 3, path, k + 2);
        if (!same_coordinate(parse_real(p[0]), grid.x_of(k)) || !same_coordinate(parse_real(p[1]), grid.y_of(k))) {
            throw std::runtime_error(path.string() + ":" + std::to_string(k + 2) + ": node coordinates do not match the grid");
        }
        f[k++] = parse_real(p[2]);
    }
    if (k != f.size()) throw std::runtime_error(path.string() + ": fewer rows than grid nodes");
    return f;
}

void write_log_csv(const std::vector<IterationRecord>& history, const std::filesystem::path& path) {
    auto out = open_out(path);
    out << "iter,residual,rel_change,rel_error,gamma_n,lambda_n\n";
    for (const auto& r : history) {
        out << r.iter << ',' << format_real(r.residual) << ',' << format_optional(r.rel_change) << ','
            << format_optional(r.rel_error) << ',' << format_optional(r.gamma) << ',' << format_optional(r.lambda)
            << '\n';
    }
    close_out(out, path);
}

std::vector<IterationRecord> read_log_csv(const std::filesystem::path& path) {
    auto in = open_in(path);
    expect_header(in, "iter,residual,rel_change,rel_error,gamma_n,lambda_n", path);
    std::vector<IterationRecord> out;
    std::string line;
    std::size_t lineno = 1;
    while (next_line(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto p = row(line, 6, path, lineno);
        IterationRecord r;
        r.iter = std::stoi(p[0]);
        r.residual = parse_real(p[1]);
        r.rel_change = parse_real(p[2]);
        r.rel_error = parse_real(p[3]);
        r.gamma = parse_real(p[4]);
        r.lambda = parse_real(p[5]);
        out.push_back(r);
    }
    return out;
}

void write_observation_csv(const Observation& g, const InversionSetup& setup, const std::filesystem::path& path) {
    auto out = open_out(path);
    const auto nodes = setup.mask.nodes();
    if (g.nodes != nodes.size() || g.steps != setup.tg.steps()) {
        throw std::invalid_argument("write_observation_csv: data shape does not match the setup");
    }
    out << "n,t,x,y,value\n";
    for (int n = 1; n <= g.steps; ++n) {
        const std::string t = format_real(setup.tg.time(n));
        for (std::size_t k = 0; k < g.nodes; ++k) {
            out << n << ',' << t << ',' << format_real(setup.grid.x_of(nodes[k])) << ','
                << format_real(setup.grid.y_of(nodes[k])) << ',' << format_real(g.value(n, k)) << '\n';
        }
    }
    close_out(out, path);
}

Observation read_observation_csv(const InversionSetup& setup, const std::filesystem::path& path) {
    auto in = open_in(path);
    expect_header(in, "n,t,x,y,value", path);
    const auto nodes = setup.mask.nodes();
    Observation g(setup.tg.steps(), nodes.size());
    std::string line;
    std::size_t row_index = 0;
    const std::size_t rows = g.data.size();
    while (next_line(in, line)) {
        if (line.empty()) continue;
        const std::size_t lineno = row_index + 2;
        if (row_index >= rows) throw std::runtime_error(path.string() + ": more rows than the setup expects");
        const auto p = row(line, 5, path, lineno);
        const int n = static_cast<int>(row_index / nodes.size()) + 1;
        const std::size_t k = row_index % nodes.size();
        if (std::stoi(p[0]) != n || !same_coordinate(parse_real(p[1]), setup.tg.time(n)) ||
            !same_coordinate(parse_real(p[2]), setup.grid.x_of(nodes[k])) ||
            !same_coordinate(parse_real(p[3]), setup.grid.y_of(nodes[k]))) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                                     ": time or node does not match the observation setup");
        }
        g.value(n, k) = parse_real(p[4]);
        if (!std::isfinite(g.value(n, k))) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": non-finite value");
        }
        ++row_index;
    }
    if (row_index != rows) throw std::runtime_error(path.string() + ": fewer rows than the setup expects");
    return g;
}

void write_trajectory(const Trajectory& u, const std::filesystem::path& dir, const std::string& stem, int stride) {
    if (stride < 1) throw std::invalid_argument("write_trajectory: stride must be positive");
    std::filesystem::create_directories(dir);
    const std::filesystem::path index_path = dir / (stem + "_index.csv");
    auto index = open_out(index_path);
    index << "t,filename\n";
    const int last = static_cast<int>(u.fields.size()) - 1;
    for (int n = 0; n <= last; ++n) {
        if (n % stride != 0 && n != last) continue;
        const std::string name = stem + "_" + std::to_string(n) + ".csv";
        write_field_csv(u.at(n), dir / name);
        index << format_real(u.timegrid.time(n)) << ',' << name << '\n';
    }
    close_out(index, index_path);
}

}  // namespace vsd
