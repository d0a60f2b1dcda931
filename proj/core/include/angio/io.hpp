#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "angio/engine.hpp"

namespace angio::io {

/// Raw little-endian float64 values, n*n, row-major (see Grid).
void write_field(const std::filesystem::path& path, const ScalarField& field);
std::vector<double> read_field(const std::filesystem::path& path);

/// CSV with header `step,time_s,kind,index,x_um,y_um`.
void write_cells(const std::filesystem::path& path, long long step, double time, const CellPopulation& cells);

nlohmann::json snapshot_meta(const SimState& state, const Grid& grid, const SimConfig& config);

/// `<output_dir>/step_<n>/{c_V,c_D,c_M,c_U,f_B,f_E,f_F}.f64 + meta.json + cells.csv`
std::filesystem::path write_snapshot(const std::filesystem::path& output_dir, const SimState& state, const Grid& grid,
                                     const SimConfig& config);

nlohmann::json summary_json(const RunSummary& summary, const SimConfig& config);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace angio::io
