#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "angio/cells.hpp"
#include "angio/fractions.hpp"
#include "angio/grid.hpp"
#include "angio/params.hpp"
#include "angio/protein_solver.hpp"
#include "angio/sources.hpp"

namespace angio {

struct SimState {
    long long step = 0;
    double tau = 1.0;
    Concentrations c;
    VolumeFractions f;
    CellPopulation cells;
    RateFields rates;  // deposited from `cells`

    double time() const noexcept { return static_cast<double>(step) * tau; }
};

/// Initial VEGF bump 0.1 exp(-R_v / sqrt(R_v^2 - |x|^2)) on |x| < R_v.
double initial_vegf(double r, double support_radius) noexcept;

/// Fields, fractions and cell positions at step 0. Cell placement uses only
/// the seed, so all replicas of a seed start from the same configuration.
SimState init_state(const SimConfig& config, const ModelParams& params, const GridPtr& grid,
                    const MollifierPotential& kernel);

struct FieldStats {
    double min = 0.0;
    double max = 0.0;
    double integral = 0.0;
};

inline constexpr std::array<const char*, 7> kFieldNames{"c_V", "c_D", "c_M", "c_U", "f_B", "f_E", "f_F"};

struct SnapshotDiagnostics {
    long long step = 0;
    double time = 0.0;
    std::array<FieldStats, 7> fields{};  // ordered as kFieldNames
    std::vector<double> tip_stalk_spread;  // per tip: mean distance to its 20 nearest stalks
    std::size_t visited_nodes = 0;         // nodes within R_m of some tip position so far
    double visited_min_membrane = 0.0;     // min f_B over visited nodes
    double visited_min_fibrin = 0.0;
    double visited_min_membrane_ratio = 1.0;  // min f_B / f_B^0 over visited nodes with f_B^0 > 0
    double visited_min_fibrin_ratio = 1.0;
};

/// Outcome of the per-step invariant checks (validation mode).
struct InvariantCheck {
    std::string name;
    bool passed = true;
    long long violations = 0;
    std::string first_failure;
};

struct RunSummary {
    std::vector<SnapshotDiagnostics> snapshots;
    std::vector<InvariantCheck> invariants;  // empty unless validation was on
    long long negative_warnings = 0;  // nodes left negative after a solve
    long long flushed_negatives = 0;  // round-off negatives set to zero
};

/// Mean distance from `tip` to its `count` nearest stalk cells (all of them if fewer).
double nearest_stalk_spread(Vec2 tip, std::span<const Vec2> stalks, std::size_t count = 20);

class Simulation {
public:
    Simulation(SimConfig config, ModelParams params);

    const SimConfig& config() const noexcept { return config_; }
    const ModelParams& params() const noexcept { return params_; }
    const GridPtr& grid() const noexcept { return grid_; }
    const SimState& state() const noexcept { return state_; }

    /// Replaces the current state (same grid); rates are re-deposited from the cells.
    void reset(SimState state);

    /// Keeps cell positions fixed (fields still evolve from them).
    void freeze_cells(bool frozen) noexcept { frozen_ = frozen; }

    /// Runs the invariant checks after every advance when enabled.
    void enable_invariant_checks(bool on) noexcept { check_ = on; }
    const std::vector<InvariantCheck>& invariant_checks() const noexcept { return checks_; }
    bool invariants_hold() const noexcept;

    /// One coupled step: rates from X^n; c^{n+1} with D(f^n); f^{n+1} by the
    /// trapezoid exponential in c^n, c^{n+1}; X^{n+1} by Euler-Maruyama with
    /// drift from (c^{n+1}, f^{n+1}) (or the time-n fields if configured).
    void advance();

    SnapshotDiagnostics diagnostics() const;

    long long negative_warnings() const noexcept { return negative_warnings_; }
    long long flushed_negatives() const noexcept { return flushed_; }
    const std::array<SpeciesSolveInfo, 4>& last_solve() const noexcept { return last_solve_; }

    /// Optional observer called after every advance with (step, species info).
    std::function<void(long long, const std::array<SpeciesSolveInfo, 4>&)> on_solve;

private:
    void mark_visited();
    void check_invariants(const SimState& before);
    InvariantCheck& check(const std::string& name);

    SimConfig config_;
    ModelParams params_;
    GridPtr grid_;
    MollifierPotential kernel_;
    SimState state_;
    std::vector<std::uint8_t> visited_;
    bool frozen_ = false;
    bool check_ = false;
    std::vector<InvariantCheck> checks_;
    long long negative_warnings_ = 0;
    long long flushed_ = 0;
    std::array<SpeciesSolveInfo, 4> last_solve_{};
};

/// Build identifier embedded in every meta.json and printed by --version.
std::string build_id();

/// Executes `config.n_steps` advances, writing the step-0 snapshot and one
/// every `snapshot_every` steps under `config.output_dir`, plus summary.json.
/// Throws IoError / SolverError (the latter annotated with the step number).
RunSummary run(const SimConfig& config, const ModelParams& params);

}  // namespace angio
