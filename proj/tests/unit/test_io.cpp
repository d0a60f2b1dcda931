#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>

#include "angio/errors.hpp"
#include "angio/io.hpp"

using namespace angio;
namespace fs = std::filesystem;

namespace {
fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("angio_io_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}
}  // namespace

TEST_CASE("field files are raw little-endian float64") {
    const fs::path dir = scratch("bytes");
    auto grid = make_grid(10.0, 10.0);  // 3 x 3
    ScalarField f(grid);
    f.at(1, 1) = 1.0;
    io::write_field(dir / "f.f64", f);
    const std::string bytes = slurp(dir / "f.f64");
    REQUIRE(bytes.size() == 9u * 8u);
    const unsigned char one[8] = {0, 0, 0, 0, 0, 0, 0xf0, 0x3f};
    CHECK(std::memcmp(bytes.data() + 4 * 8, one, 8) == 0);
    fs::remove_all(dir);
}

TEST_CASE("field round trip (property)") {
    const fs::path dir = scratch("roundtrip");
    auto grid = make_grid(100.0, 5.0);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1e300, 1e300);
    for (int t = 0; t < 10; ++t) {
        ScalarField f(grid);
        for (std::size_t idx = 0; idx < grid->size(); ++idx)
            if (grid->active(idx)) f[idx] = t % 2 ? u(rng) : std::ldexp(u(rng), -2000);
        io::write_field(dir / "f.f64", f);
        const auto back = io::read_field(dir / "f.f64");
        REQUIRE(back.size() == grid->size());
        CHECK(std::memcmp(back.data(), f.values().data(), back.size() * sizeof(double)) == 0);
    }
    CHECK_THROWS_AS(io::read_field(dir / "missing.f64"), IoError);
    fs::remove_all(dir);
}

TEST_CASE("snapshot layout") {
    const fs::path dir = scratch("snapshot");
    SimConfig c;
    c.seed = 2;
    Simulation sim(c, default_params());
    const fs::path step = io::write_snapshot(dir, sim.state(), *sim.grid(), c);
    CHECK(step == dir / "step_0");
    for (const char* name : {"c_V.f64", "c_D.f64", "c_M.f64", "c_U.f64", "f_B.f64", "f_E.f64", "f_F.f64"}) {
        CHECK(fs::file_size(step / name) == sim.grid()->size() * 8u);
    }
    const auto cV = io::read_field(step / "c_V.f64");
    CHECK(cV[sim.grid()->index(50, 50)] == sim.state().c[Species::V].at(50, 50));

    std::istringstream csv(slurp(step / "cells.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line == "step,time_s,kind,index,x_um,y_um");
    int rows = 0;
    while (std::getline(csv, line)) ++rows;
    CHECK(rows == 202);

    const auto meta = nlohmann::json::parse(slurp(step / "meta.json"));
    CHECK(meta.at("step") == 0);
    CHECK(meta.at("grid").at("n") == 101);
    CHECK(meta.at("grid").at("h") == 10.0);
    CHECK(meta.at("grid").at("active_nodes") == 7845);
    CHECK(meta.at("build").get<std::string>() == build_id());
    CHECK(meta.at("fields").size() == 7u);
    CHECK(meta.at("config").at("seed") == 2);
    fs::remove_all(dir);
}

TEST_CASE("summary json lists invariants") {
    RunSummary s;
    s.invariants.push_back({"cells_contained", true, 0, ""});
    s.invariants.push_back({"partition_of_unity", false, 3, "step 7"});
    const auto j = io::summary_json(s, SimConfig{});
    const std::string text = j.dump();
    CHECK(text.find("cells_contained") != std::string::npos);
    CHECK(text.find("partition_of_unity") != std::string::npos);
}
