#include "angio/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "angio/errors.hpp"

namespace angio::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

void finish(std::ofstream& out, const fs::path& path) {
    out.flush();
    if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

void write_field(const fs::path& path, const ScalarField& field) {
    auto out = open_out(path, std::ios::binary);
    const auto values = field.values();
    std::vector<unsigned char> bytes(values.size() * 8);
    for (std::size_t i = 0; i < values.size(); ++i) {
        auto bits = std::bit_cast<std::uint64_t>(values[i]);
        for (int b = 0; b < 8; ++b) bytes[i * 8 + b] = static_cast<unsigned char>(bits >> (8 * b));
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    finish(out, path);
}

std::vector<double> read_field(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() % 8 != 0) throw IoError(path.string() + ": size is not a multiple of 8 bytes");
    std::vector<double> values(bytes.size() / 8);
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[i * 8 + b]) << (8 * b);
        values[i] = std::bit_cast<double>(bits);
    }
    return values;
}

void write_cells(const fs::path& path, long long step, double time, const CellPopulation& cells) {
    auto out = open_out(path);
    out << "step,time_s,kind,index,x_um,y_um\n";
    out << std::setprecision(17);
    auto rows = [&](const char* kind, const std::vector<Vec2>& pts) {
        for (std::size_t k = 0; k < pts.size(); ++k) {
            out << step << ',' << time << ',' << kind << ',' << k << ',' << pts[k].x << ',' << pts[k].y << '\n';
        }
    };
    rows("tip", cells.tips);
    rows("stalk", cells.stalks);
    finish(out, path);
}

json snapshot_meta(const SimState& state, const Grid& grid, const SimConfig& config) {
    json meta;
    meta["build"] = build_id();
    meta["step"] = state.step;
    meta["time_s"] = state.time();
    meta["grid"] = {
        {"n", grid.n()},
        {"k", grid.k()},
        {"h", grid.h()},
        {"R", grid.radius()},
        {"mask", grid.mask_mode() == MaskMode::Disk ? "disk" : "square"},
        {"active_nodes", grid.active_count()},
        {"layout", "row-major: value[i*n+j] is the node at x=((k-i)h, (k-j)h)"},
    };
    json fields = json::array();
    for (const char* name : kFieldNames) {
        fields.push_back({{"name", name},
                          {"file", std::string(name) + ".f64"},
                          {"dtype", "float64"},
                          {"endian", "little"},
                          {"shape", {grid.n(), grid.n()}}});
    }
    meta["fields"] = fields;
    meta["cells"] = {{"file", "cells.csv"}, {"tips", state.cells.tips.size()}, {"stalks", state.cells.stalks.size()}};
    meta["config"] = json::parse(serialize_config(config));
    return meta;
}

void write_json(const fs::path& path, const json& doc) {
    auto out = open_out(path);
    out << doc.dump(2) << '\n';
    finish(out, path);
}

fs::path write_snapshot(const fs::path& output_dir, const SimState& state, const Grid& grid, const SimConfig& config) {
    std::ostringstream name;
    name << "step_" << state.step;
    const fs::path dir = output_dir / name.str();
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

    const std::array<const ScalarField*, 7> fields{&state.c[Species::V], &state.c[Species::D], &state.c[Species::M],
                                                   &state.c[Species::U], &state.f.membrane,    &state.f.fluid,
                                                   &state.f.fibrin};
    for (std::size_t k = 0; k < fields.size(); ++k) {
        write_field(dir / (std::string(kFieldNames[k]) + ".f64"), *fields[k]);
    }
    write_cells(dir / "cells.csv", state.step, state.time(), state.cells);
    write_json(dir / "meta.json", snapshot_meta(state, grid, config));
    return dir;
}

json summary_json(const RunSummary& summary, const SimConfig& config) {
    json doc;
    doc["build"] = build_id();
    doc["config"] = json::parse(serialize_config(config));
    doc["negative_warnings"] = summary.negative_warnings;
    doc["flushed_negatives"] = summary.flushed_negatives;
    json snaps = json::array();
    for (const auto& s : summary.snapshots) {
        json fields = json::object();
        for (std::size_t k = 0; k < kFieldNames.size(); ++k) {
            fields[kFieldNames[k]] = {
                {"min", s.fields[k].min}, {"max", s.fields[k].max}, {"integral", s.fields[k].integral}};
        }
        snaps.push_back({{"step", s.step},
                         {"time_s", s.time},
                         {"fields", fields},
                         {"tip_stalk_spread_um", s.tip_stalk_spread},
                         {"visited_nodes", s.visited_nodes},
                         {"visited_min_f_B", s.visited_min_membrane},
                         {"visited_min_f_F", s.visited_min_fibrin},
                         {"visited_min_f_B_ratio", s.visited_min_membrane_ratio},
                         {"visited_min_f_F_ratio", s.visited_min_fibrin_ratio}});
    }
    doc["snapshots"] = snaps;
    json inv = json::array();
    for (const auto& c : summary.invariants) {
        inv.push_back({{"name", c.name}, {"passed", c.passed}, {"violations", c.violations}, {"first_failure", c.first_failure}});
    }
    doc["invariants"] = inv;
    return doc;
}

}  // namespace angio::io
