#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "vsd/grid.hpp"
#include "vsd/inversion.hpp"
#include "vsd/timestep.hpp"

namespace vsd {

/// 17 significant digits in %g style, always with '.' whatever the locale.
std::string format_real(double v);
/// Inverse of format_real; empty text reads as NaN. Throws on trailing garbage.
double parse_real(const std::string& text);

/// Header `x,y,value`, one row per interior node in storage order.
void write_field_csv(const GridField& f, const std::filesystem::path& path);
/// Reads a field written by write_field_csv; node coordinates must match `grid`.
GridField read_field_csv(const Grid2D& grid, const std::filesystem::path& path);

/// Header `iter,residual,rel_change,rel_error,gamma_n,lambda_n`; NaN entries are empty.
void write_log_csv(const std::vector<IterationRecord>& history, const std::filesystem::path& path);
std::vector<IterationRecord> read_log_csv(const std::filesystem::path& path);

/// Header `n,t,x,y,value`; rows in Observation storage order.
void write_observation_csv(const Observation& g, const InversionSetup& setup, const std::filesystem::path& path);
/// Reads data written for `setup`; times and node coordinates must match.
Observation read_observation_csv(const InversionSetup& setup, const std::filesystem::path& path);

/// Snapshots every `stride` steps (and the last one) as field CSVs named
/// `<stem>_<n>.csv`, plus an index `t,filename` at `<stem>_index.csv`.
void write_trajectory(const Trajectory& u, const std::filesystem::path& dir, const std::string& stem, int stride);

}  // namespace vsd
