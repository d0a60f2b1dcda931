// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "angio/engine.hpp"
#include "angio/oracles.hpp"
#include "cli.hpp"

using namespace angio;
namespace fs = std::filesystem;

namespace {

struct Verdict {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int precision = 4) {
    std::ostringstream os;
    os.precision(precision);
    os << v;
    return os.str();
}

const fs::path& work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "angio_acceptance";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

// --- diffusion convergence ---------------------------------------------------

Verdict diffusion_convergence() {
    const auto t0 = Clock::now();
    const oracles::DiffusionStudy study;
    const auto space = oracles::diffusion_space_study(study, {20.0, 10.0, 5.0}, 0.01);
    const auto time = oracles::diffusion_time_study(study, 5.0, {4.0, 2.0, 1.0});
    const double elapsed = seconds_since(t0);
    const bool ok = space.order >= 1.9 && time.order >= 0.9 && elapsed < 60.0;
    return {ok, "space order " + fmt(space.order) + " (>= 1.9), time order " + fmt(time.order) + " (>= 0.9), " +
                    fmt(elapsed, 3) + " s (< 60)"};
}

// --- conservation --------------------------------------------------------------

Verdict conservation() {
    ModelParams p = default_params();
    p.s_M = 0.0;  // no background sinks: every species is pure diffusion
    p.s_U = 0.0;
    const SimConfig config;
    const GridPtr grid = make_grid(p.domain_radius, config.h);
    const MollifierPotential kernel(p.mollifier_radius);
    SimState s = init_state(config, p, grid, kernel);
    for (Species sp : {Species::D, Species::M, Species::U}) s.c[sp] = s.c[Species::V];
    const RateFields none(grid);
    const ProteinStepOptions opt{config.tau, ReactionMode::Explicit, config.linear_tol, config.linear_max_iter};

    std::array<double, 4> mass0{};
    for (Species sp : kAllSpecies) mass0[static_cast<int>(sp)] = integrate(s.c[sp]);
    double worst = 0.0;
    Concentrations c = s.c;
    for (int step = 0; step < 1000; ++step) {
        c = step_concentrations(c, s.f, none, opt, p).c;
        for (Species sp : kAllSpecies) {
            const int k = static_cast<int>(sp);
            worst = std::max(worst, std::abs(integrate(c[sp]) - mass0[k]) / mass0[k]);
        }
    }
    return {worst <= 1e-12, "max relative mass drift " + fmt(worst, 3) + " over 1000 steps, 4 species (<= 1e-12)"};
}

// --- full runs -------------------------------------------------------------------

struct FullRun {
    RunSummary summary;
    double seconds = 0.0;
    fs::path dir;
};

FullRun full_run(std::uint64_t seed, ReactionMode mode, const std::string& tag) {
    SimConfig c;
    c.seed = seed;
    c.reaction_mode = mode;
    c.validate_invariants = true;
    c.output_dir = (work_dir() / tag).string();
    const auto t0 = Clock::now();
    FullRun r;
    r.summary = run(c, default_params());
    r.seconds = seconds_since(t0);
    r.dir = c.output_dir;
    return r;
}

bool invariant_passed(const RunSummary& s, const std::string& name) {
    for (const auto& c : s.invariants)
        if (c.name == name) return c.passed;
    return false;
}

Verdict linf_invariants(const FullRun& r) {
    const char* names[] = {"vegf_max_nonincreasing", "concentrations_nonnegative", "fractions_in_unit_interval",
                           "partition_of_unity", "fractions_nonincreasing"};
    std::string failed;
    for (const char* n : names)
        if (!invariant_passed(r.summary, n)) failed += std::string(failed.empty() ? "" : ", ") + n;
    const long long steps = r.summary.snapshots.empty() ? 0 : r.summary.snapshots.back().step;
    const bool ok = failed.empty() && steps == 1600 && r.summary.negative_warnings == 0;
    return {ok, ok ? "1600 implicit-sinks steps, all five invariants hold at every step, " +
                         std::to_string(r.summary.flushed_negatives) + " round-off negatives flushed"
                   : "failed: " + (failed.empty() ? std::string("negative values beyond round-off") : failed)};
}

// --- ODE -------------------------------------------------------------------------

Verdict ode_order() {
    const std::vector<double> taus{0.125, 0.0625, 0.03125, 0.015625};
    const auto quad = oracles::ode_trapezoid([](double t) { return t * t; }, [](double t) { return t * t * t / 3.0; },
                                             1.0, 1.0, taus);
    const auto lin = oracles::ode_trapezoid([](double t) { return t; }, [](double t) { return 0.5 * t * t; }, 1.0, 1.0,
                                            taus);
    const auto cst = oracles::ode_trapezoid([](double) { return 0.75; }, [](double t) { return 0.75 * t; }, 1.21, 1.0,
                                            taus);
    auto zero = [](const oracles::ConvergenceReport& r) {
        return std::all_of(r.errors.begin(), r.errors.end(), [](double e) { return e == 0.0; });
    };
    const bool ok = quad.order >= 1.9 && zero(lin) && zero(cst);
    return {ok, "t^2 order " + fmt(quad.order) + " (>= 1.9); linear errors " + (zero(lin) ? "all 0" : "nonzero") +
                    "; constant errors " + (zero(cst) ? "all 0" : "nonzero")};
}

// --- SDE noise ---------------------------------------------------------------------

Verdict noise_calibration() {
    const auto t0 = Clock::now();
    const auto m = oracles::brownian_moment(0.1, 1.0, 100, 100000, 2024);
    const double elapsed = seconds_since(t0);
    const double z = std::abs(m.mean - m.target) / m.standard_error;
    return {z <= 3.0 && elapsed < 30.0, "E|X_m - X_0|^2 = " + fmt(m.mean, 6) + " vs " + fmt(m.target) + ", " +
                                            fmt(z, 3) + " SE (<= 3), " + fmt(elapsed, 3) + " s (< 30)"};
}

// --- linear solver -------------------------------------------------------------------

Verdict solver_equivalence() {
    std::mt19937_64 rng(77);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const int rows = 1 + static_cast<int>(rng() % 20);
        const int cols = 1 + static_cast<int>(rng() % (400 / rows));
        const PentaSystem A = oracles::random_spd_penta(rows, cols, rng());
        const auto dense = oracles::dense_solve(A);
        const auto cg = solve_system(A, 1e-12, 10000).x;
        double diff = 0.0, scale = 0.0;
        for (std::size_t k = 0; k < dense.size(); ++k) {
            diff = std::max(diff, std::abs(cg[k] - dense[k]));
            scale = std::max(scale, std::abs(dense[k]));
        }
        worst = std::max(worst, diff / scale);
    }
    return {worst <= 1e-8, "max relative discrepancy " + fmt(worst, 3) + " over 50 systems, n <= 400 (<= 1e-8)"};
}

// --- mollifier ------------------------------------------------------------------------

Verdict normalization() {
    std::ostringstream out, err;
    const int code = cli::main({"normalize-check"}, out, err);
    const std::string text = out.str();
    const bool ok = code == 0 && text.find("check.I_stable=pass") != std::string::npos &&
                    text.find("check.error_monotone=pass") != std::string::npos &&
                    text.find("check.h1_error_below_1pct=pass") != std::string::npos;
    const auto rows = oracles::mollifier_grid_integrals(MollifierPotential(12.5), {1.0});
    const double drift = std::abs(bump_normalizer(1e-12) - bump_normalizer(1e-14));
    return {ok, "error at h=1 " + fmt(rows[0].error, 3) + " (< 1%), monotone under refinement, I drift " +
                    fmt(drift, 3) + " (<= 1e-10)"};
}

// --- seeded default runs -------------------------------------------------------------

Verdict containment(const std::vector<FullRun>& runs) {
    int bad = 0;
    for (const auto& r : runs)
        if (!invariant_passed(r.summary, "cells_contained")) ++bad;
    return {bad == 0, std::to_string(runs.size()) + " seeded runs, " + std::to_string(bad) +
                          " with a cell outside |X| <= R at some step"};
}

Verdict qualitative(const std::vector<FullRun>& runs) {
    int degraded = 0, tighter = 0;
    double slowest = 0.0;
    for (const auto& r : runs) {
        const auto& first = r.summary.snapshots.front();
        const auto& last = r.summary.snapshots.back();
        if (last.visited_min_membrane_ratio < 1.0) ++degraded;
        bool any = false;
        for (std::size_t t = 0; t < last.tip_stalk_spread.size(); ++t)
            any = any || last.tip_stalk_spread[t] < first.tip_stalk_spread[t];
        tighter += any;
        slowest = std::max(slowest, r.seconds);
    }
    const int n = static_cast<int>(runs.size());
    const bool ok = degraded == n && tighter >= 7 && slowest < 300.0;
    return {ok, "(a) f_B below initial along tip paths in " + std::to_string(degraded) + "/" + std::to_string(n) +
                    " runs; (b) spread shrank for some tip in " + std::to_string(tighter) + "/" + std::to_string(n) +
                    " seeds (>= 7); slowest run " + fmt(slowest, 3) + " s (< 300)"};
}

std::string read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

Verdict determinism(const fs::path& a, const fs::path& b) {
    std::vector<fs::path> files_a, files_b;
    for (const auto& e : fs::recursive_directory_iterator(a))
        if (e.is_regular_file()) files_a.push_back(fs::relative(e.path(), a));
    for (const auto& e : fs::recursive_directory_iterator(b))
        if (e.is_regular_file()) files_b.push_back(fs::relative(e.path(), b));
    std::sort(files_a.begin(), files_a.end());
    std::sort(files_b.begin(), files_b.end());
    if (files_a != files_b) return {false, "file lists differ"};
    for (const auto& rel : files_a)
        if (read_bytes(a / rel) != read_bytes(b / rel)) return {false, rel.string() + " differs"};
    return {true, std::to_string(files_a.size()) + " files byte-identical across two runs of seed 1"};
}

}  // namespace

int main() {
    int failures = 0;
    auto report = [&](const std::string& name, const Verdict& v) {
        std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail << std::endl;
        failures += !v.pass;
    };

    report("diffusion_convergence", diffusion_convergence());
    report("conservation", conservation());
    report("ode_trapezoid", ode_order());
    report("noise_calibration", noise_calibration());
    report("solver_oracle", solver_equivalence());
    report("mollifier_normalization", normalization());

    report("linf_positivity_invariants", linf_invariants(full_run(1, ReactionMode::ImplicitSinks, "implicit")));

    std::vector<FullRun> runs;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) runs.push_back(full_run(seed, ReactionMode::Explicit, "seed_" + std::to_string(seed)));
    report("containment", containment(runs));
    report("qualitative_direction", qualitative(runs));

    // same config (output path included) run twice; the first result is moved aside
    const fs::path first = work_dir() / "seed_1_first";
    fs::rename(runs.front().dir, first);
    const FullRun again = full_run(1, ReactionMode::Explicit, "seed_1");
    report("determinism", determinism(first, again.dir));

    fs::remove_all(work_dir());
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
