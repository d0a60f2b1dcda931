#include "angio/engine.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include "angio/errors.hpp"
#include "angio/io.hpp"

#ifndef ANGIO_VERSION
#define ANGIO_VERSION "0.0.0"
#endif

namespace angio {

std::string build_id() { return std::string("angiosim ") + ANGIO_VERSION; }

double initial_vegf(double r, double support_radius) noexcept {
    if (r >= support_radius) return 0.0;
    return 0.1 * std::exp(-support_radius / std::sqrt(support_radius * support_radius - r * r));
}

SimState init_state(const SimConfig& config, const ModelParams& params, const GridPtr& grid,
                    const MollifierPotential& kernel) {
    // Placement ignores the replica: replicas are noise realizations from one start.
    const double R = params.domain_radius;
    CellPopulation cells = place_cells(config.n1, config.n2, 0.65 * R, 0.75 * R, NoiseKey{config.seed, 0});
    RateFields rates = assemble_rates(cells.tips, cells.stalks, params, grid, kernel);

    SimState s{0, config.tau, Concentrations(grid), init_fractions(grid, params), std::move(cells), std::move(rates)};
    s.c[Species::V] = sample(grid, [&](double x, double y) { return initial_vegf(std::hypot(x, y), params.vegf_radius); });
    return s;
}

double nearest_stalk_spread(Vec2 tip, std::span<const Vec2> stalks, std::size_t count) {
    if (stalks.empty() || count == 0) return 0.0;
    std::vector<double> d;
    d.reserve(stalks.size());
    for (const Vec2& s : stalks) d.push_back(norm(s - tip));
    const std::size_t m = std::min(count, d.size());
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(m), d.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) sum += d[i];
    return sum / static_cast<double>(m);
}

Simulation::Simulation(SimConfig config, ModelParams params)
    : config_(std::move(config)),
      params_(config_.apply(std::move(params))),
      grid_((params_.validate(), config_.validate(params_), make_grid(params_.domain_radius, config_.h))),
      kernel_(params_.mollifier_radius),
      state_(init_state(config_, params_, grid_, kernel_)),
      visited_(grid_->size(), 0) {
    mark_visited();
}

void Simulation::reset(SimState state) {
    if (!state.c[Species::V].same_grid(ScalarField(grid_))) throw DomainError("reset: state lives on a different grid");
    state.rates = assemble_rates(state.cells.tips, state.cells.stalks, params_, grid_, kernel_);
    state_ = std::move(state);
    std::fill(visited_.begin(), visited_.end(), 0);
    mark_visited();
}

void Simulation::mark_visited() {
    const Grid& g = *grid_;
    const double rm = params_.mollifier_radius;
    const double h = g.h();
    for (const Vec2& c : state_.cells.tips) {
        const int i_lo = std::max(0, static_cast<int>(std::floor(g.k() - (c.x + rm) / h)));
        const int i_hi = std::min(g.n() - 1, static_cast<int>(std::ceil(g.k() - (c.x - rm) / h)));
        const int j_lo = std::max(0, static_cast<int>(std::floor(g.k() - (c.y + rm) / h)));
        const int j_hi = std::min(g.n() - 1, static_cast<int>(std::ceil(g.k() - (c.y - rm) / h)));
        for (int i = i_lo; i <= i_hi; ++i) {
            for (int j = j_lo; j <= j_hi; ++j) {
                if (g.active(i, j) && norm(g.node(i, j) - c) <= rm) visited_[g.index(i, j)] = 1;
            }
        }
    }
}

void Simulation::advance() {
    const SimState& old = state_;
    ProteinStepOptions opt{config_.tau, config_.reaction_mode, config_.linear_tol, config_.linear_max_iter};
    ProteinStepResult solved = step_concentrations(old.c, old.f, old.rates, opt, params_);
    last_solve_ = solved.info;

    bool negatives = false;
    for (Species s : kAllSpecies) {
        const auto& info = solved.info[static_cast<std::size_t>(s)];
        flushed_ += static_cast<long long>(info.flushed);
        if (info.negative > 0) {
            negatives = true;
            negative_warnings_ += static_cast<long long>(info.negative);
            std::cerr << "warning: step " << old.step + 1 << ": c_" << species_name(s) << " has " << info.negative
                      << " negative nodes (worst " << info.worst_value << " at node " << info.worst_node << ")\n";
        }
    }
    if (on_solve) on_solve(old.step + 1, solved.info);

    // The fraction update needs nonnegative input; remaining negatives only
    // occur in explicit mode and were reported above.
    VolumeFractions f_next = [&] {
        if (!negatives) {
            return step_fractions(old.f, old.c[Species::M], solved.c[Species::M], old.c[Species::U],
                                  solved.c[Species::U], params_, config_.tau);
        }
        auto clip = [](ScalarField f) {
            for (double& v : f.values()) v = std::max(v, 0.0);
            return f;
        };
        return step_fractions(old.f, clip(old.c[Species::M]), clip(solved.c[Species::M]), clip(old.c[Species::U]),
                              clip(solved.c[Species::U]), params_, config_.tau);
    }();

    CellPopulation cells_next = old.cells;
    if (!frozen_) {
        const DriftOptions dopt{config_.drift_cutoff, config_.hertz_in_strain};
        const NoiseKey key{config_.seed, config_.replica};
        const auto step = static_cast<std::uint64_t>(old.step);
        if (config_.drift_fields == DriftFields::New) {
            cells_next = em_step(old.cells, DriftContext(solved.c, f_next), params_, dopt, config_.tau, key, step);
        } else {
            cells_next = em_step(old.cells, DriftContext(old.c, old.f), params_, dopt, config_.tau, key, step);
        }
    }

    RateFields rates_next = frozen_ ? old.rates : assemble_rates(cells_next.tips, cells_next.stalks, params_, grid_, kernel_);
    SimState next{old.step + 1, config_.tau, std::move(solved.c), std::move(f_next), std::move(cells_next),
                  std::move(rates_next)};
    if (check_) {
        SimState before = std::move(state_);
        state_ = std::move(next);
        check_invariants(before);
    } else {
        state_ = std::move(next);
    }
    mark_visited();
}

InvariantCheck& Simulation::check(const std::string& name) {
    for (auto& c : checks_) {
        if (c.name == name) return c;
    }
    checks_.push_back(InvariantCheck{name, true, 0, {}});
    return checks_.back();
}

bool Simulation::invariants_hold() const noexcept {
    return std::all_of(checks_.begin(), checks_.end(), [](const InvariantCheck& c) { return c.passed; });
}

void Simulation::check_invariants(const SimState& before) {
    const Grid& g = *grid_;
    const SimState& s = state_;
    auto record = [&](const std::string& name, bool ok, auto&& describe) {
        InvariantCheck& c = check(name);
        if (ok) return;
        if (c.passed) {
            std::ostringstream os;
            os << "step " << s.step << ": ";
            describe(os);
            c.first_failure = os.str();
        }
        c.passed = false;
        ++c.violations;
    };

    for (Species sp : kAllSpecies) {
        const auto v = s.c[sp].values();
        std::size_t bad = v.size();
        for (std::size_t p = 0; p < v.size(); ++p) {
            if (g.active(p) && !(v[p] >= 0.0)) {
                bad = p;
                break;
            }
        }
        record("concentrations_nonnegative", bad == v.size(),
               [&](std::ostream& os) { os << "c_" << species_name(sp) << " = " << v[bad] << " at node " << bad; });
    }

    const double max_before = before.c[Species::V].max_active();
    const double max_after = s.c[Species::V].max_active();
    record("vegf_max_nonincreasing", max_after <= max_before,
           [&](std::ostream& os) { os << "max c_V rose from " << max_before << " to " << max_after; });

    std::size_t range_bad = g.size();
    std::size_t sum_bad = g.size();
    std::size_t decay_bad = g.size();
    for (std::size_t p = 0; p < g.size(); ++p) {
        if (!g.active(p)) continue;
        const double b = s.f.membrane[p];
        const double f = s.f.fibrin[p];
        const double e = s.f.fluid[p];
        if (range_bad == g.size() && !(b >= 0 && b <= 1 && f >= 0 && f <= 1 && e >= 0 && e <= 1)) range_bad = p;
        if (sum_bad == g.size() && !((b + e) + f == 1.0 && b + (e + f) == 1.0 && (b + f) + e == 1.0)) sum_bad = p;
        if (decay_bad == g.size() && !(b <= before.f.membrane[p] && f <= before.f.fibrin[p])) decay_bad = p;
    }
    record("fractions_in_unit_interval", range_bad == g.size(), [&](std::ostream& os) { os << "node " << range_bad; });
    record("partition_of_unity", sum_bad == g.size(), [&](std::ostream& os) { os << "node " << sum_bad; });
    record("fractions_nonincreasing", decay_bad == g.size(), [&](std::ostream& os) { os << "node " << decay_bad; });

    double worst = 0.0;
    for (CellKind kind : {CellKind::Tip, CellKind::Stalk}) {
        for (const Vec2& x : s.cells.of(kind)) worst = std::max(worst, norm(x));
    }
    record("cells_contained", worst <= params_.domain_radius,
           [&](std::ostream& os) { os << "cell at radius " << worst; });

    bool rates_ok = true;
    for (const ScalarField* r : {&s.rates.alpha_V, &s.rates.alpha_D, &s.rates.alpha_M, &s.rates.alpha_U, &s.rates.beta_D}) {
        rates_ok = rates_ok && r->min_active() >= 0.0;
    }
    record("rates_nonnegative", rates_ok, [&](std::ostream& os) { os << "negative rate field"; });
}

SnapshotDiagnostics Simulation::diagnostics() const {
    const SimState& s = state_;
    SnapshotDiagnostics d;
    d.step = s.step;
    d.time = s.time();
    const std::array<const ScalarField*, 7> fields{&s.c[Species::V], &s.c[Species::D], &s.c[Species::M],
                                                   &s.c[Species::U], &s.f.membrane,    &s.f.fluid,
                                                   &s.f.fibrin};
    for (std::size_t k = 0; k < fields.size(); ++k) {
        d.fields[k] = {fields[k]->min_active(), fields[k]->max_active(), integrate(*fields[k])};
    }
    for (const Vec2& tip : s.cells.tips) d.tip_stalk_spread.push_back(nearest_stalk_spread(tip, s.cells.stalks));

    const Grid& g = *grid_;
    double min_b = std::numeric_limits<double>::infinity();
    double min_f = min_b;
    for (std::size_t p = 0; p < g.size(); ++p) {
        if (!visited_[p]) continue;
        ++d.visited_nodes;
        min_b = std::min(min_b, s.f.membrane[p]);
        min_f = std::min(min_f, s.f.fibrin[p]);
        if (s.f.membrane_initial[p] > 0.0) {
            d.visited_min_membrane_ratio = std::min(d.visited_min_membrane_ratio, s.f.membrane[p] / s.f.membrane_initial[p]);
        }
        if (s.f.fibrin_initial[p] > 0.0) {
            d.visited_min_fibrin_ratio = std::min(d.visited_min_fibrin_ratio, s.f.fibrin[p] / s.f.fibrin_initial[p]);
        }
    }
    d.visited_min_membrane = d.visited_nodes ? min_b : 0.0;
    d.visited_min_fibrin = d.visited_nodes ? min_f : 0.0;
    return d;
}

RunSummary run(const SimConfig& config, const ModelParams& params) {
    namespace fs = std::filesystem;
    Simulation sim(config, params);
    sim.enable_invariant_checks(config.validate_invariants);

    const fs::path out_dir(config.output_dir);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    std::ofstream solver_log;
    if (config.solver_log) {
        solver_log.open(out_dir / "solver_log.csv", std::ios::trunc);
        if (!solver_log) throw IoError("cannot open solver_log.csv");
        solver_log << "step,species,iterations,residual\n" << std::setprecision(6);
        sim.on_solve = [&](long long step, const std::array<SpeciesSolveInfo, 4>& info) {
            for (Species s : kAllSpecies) {
                const auto& i = info[static_cast<std::size_t>(s)];
                solver_log << step << ',' << species_name(s) << ',' << i.iterations << ',' << i.residual << '\n';
            }
        };
    }

    RunSummary summary;
    io::write_snapshot(out_dir, sim.state(), *sim.grid(), config);
    summary.snapshots.push_back(sim.diagnostics());
    for (long long n = 1; n <= config.n_steps; ++n) {
        try {
            sim.advance();
        } catch (const SolverError& e) {
            std::ostringstream os;
            os << "step " << n << ": " << e.what();
            throw SolverError(os.str(), e.iterations(), e.residual());
        }
        if (n % config.snapshot_every == 0 || n == config.n_steps) {
            io::write_snapshot(out_dir, sim.state(), *sim.grid(), config);
            summary.snapshots.push_back(sim.diagnostics());
        }
    }
    summary.invariants = sim.invariant_checks();
    summary.negative_warnings = sim.negative_warnings();
    summary.flushed_negatives = sim.flushed_negatives();
    io::write_json(out_dir / "summary.json", io::summary_json(summary, config));
    return summary;
}

}  // namespace angio
