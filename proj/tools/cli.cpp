#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "angio/engine.hpp"
#include "angio/errors.hpp"
#include "angio/io.hpp"
#include "angio/oracles.hpp"

namespace angio::cli {

namespace {

struct Overrides {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<long long> steps;
    std::optional<std::string> output_dir;
    std::optional<long long> snapshot_every;
    std::optional<std::string> reaction_mode;
    std::optional<std::string> drift_cutoff;
};

void add_overrides(CLI::App& cmd, Overrides& o) {
    cmd.add_option("-c,--config", o.config_path, "JSON config file")->check(CLI::ExistingFile);
    cmd.add_option("--seed", o.seed, "RNG seed");
    cmd.add_option("--steps", o.steps, "number of time steps");
    cmd.add_option("--output-dir", o.output_dir, "snapshot directory");
    cmd.add_option("--snapshot-every", o.snapshot_every, "steps between snapshots");
    cmd.add_option("--reaction-mode", o.reaction_mode, "explicit | implicit-sinks")
        ->check(CLI::IsMember({"explicit", "implicit-sinks"}));
    cmd.add_option("--drift-cutoff", o.drift_cutoff, "true | false")->check(CLI::IsMember({"true", "false"}));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SimConfig build_config(const Overrides& o, const ModelParams& params) {
    SimConfig c = o.config_path.empty() ? load_config("", params) : load_config(read_file(o.config_path), params);
    if (o.seed) c.seed = *o.seed;
    if (o.steps) c.n_steps = *o.steps;
    if (o.output_dir) c.output_dir = *o.output_dir;
    if (o.snapshot_every) c.snapshot_every = *o.snapshot_every;
    if (o.reaction_mode) c.reaction_mode = *o.reaction_mode == "explicit" ? ReactionMode::Explicit : ReactionMode::ImplicitSinks;
    if (o.drift_cutoff) c.drift_cutoff = *o.drift_cutoff == "true";
    c.validate(params);
    return c;
}

std::string sci(double v, int digits = 6) {
    std::ostringstream os;
    os << std::scientific << std::setprecision(digits) << v;
    return os.str();
}

int do_run(const Overrides& o, std::ostream& out, std::ostream& err) {
    const ModelParams params = default_params();
    const SimConfig config = build_config(o, params);
    err << "running " << config.n_steps << " steps, seed " << config.seed << ", output " << config.output_dir << '\n';
    const RunSummary summary = run(config, params);
    out << "status=ok\n";
    out << "steps=" << config.n_steps << '\n';
    out << "snapshots=" << summary.snapshots.size() << '\n';
    out << "output_dir=" << config.output_dir << '\n';
    out << "negative_warnings=" << summary.negative_warnings << '\n';
    const auto& last = summary.snapshots.back();
    out << "final_time_s=" << last.time << '\n';
    for (std::size_t t = 0; t < last.tip_stalk_spread.size(); ++t) {
        out << "tip" << t << ".spread_um=" << last.tip_stalk_spread[t] << '\n';
    }
    bool ok = true;
    for (const auto& c : summary.invariants) {
        out << "invariant." << c.name << '=' << (c.passed ? "pass" : "fail") << '\n';
        ok = ok && c.passed;
    }
    return ok ? kExitOk : kExitFailure;
}

int do_validate(Overrides o, std::ostream& out, std::ostream& err) {
    if (!o.steps) o.steps = 200;
    if (!o.reaction_mode) o.reaction_mode = "implicit-sinks";
    const ModelParams params = default_params();
    const SimConfig config = build_config(o, params);
    err << "validating " << config.n_steps << " steps in " << to_string(config.reaction_mode) << " mode\n";

    bool ok = true;
    auto verdict = [&](const std::string& name, bool pass, const std::string& detail = {}) {
        out << "invariant." << name << '=' << (pass ? "pass" : "fail") << '\n';
        if (!pass && !detail.empty()) err << name << ": " << detail << '\n';
        ok = ok && pass;
    };

    Simulation sim(config, params);
    Simulation twin(config, params);
    sim.enable_invariant_checks(true);
    bool identical = true;
    for (long long n = 0; n < config.n_steps; ++n) {
        sim.advance();
        if (n < 20) {
            twin.advance();
            identical = identical && sim.state().cells == twin.state().cells &&
                        std::equal(sim.state().c[Species::V].values().begin(), sim.state().c[Species::V].values().end(),
                                   twin.state().c[Species::V].values().begin());
        }
    }
    for (const auto& c : sim.invariant_checks()) verdict(c.name, c.passed, c.first_failure);
    verdict("deterministic_replay", identical);

    verdict("mollifier_normalizer_stable", std::abs(bump_normalizer(1e-12) - bump_normalizer(1e-14)) < 1e-10);
    out << "steps=" << config.n_steps << '\n';
    return ok ? kExitOk : kExitFailure;
}

int do_convergence(const std::string& json_out, std::ostream& out, std::ostream& err) {
    using namespace oracles;
    err << "running convergence studies\n";
    const DiffusionStudy study;
    std::vector<ConvergenceReport> reports;
    reports.push_back(diffusion_space_study(study, {20.0, 10.0, 5.0}, 0.01));
    reports.push_back(diffusion_time_study(study, 5.0, {4.0, 2.0, 1.0}));
    reports.push_back(ode_trapezoid([](double t) { return t * t; }, [](double t) { return t * t * t / 3.0; }, 1.0, 1.0,
                                    {0.25, 0.125, 0.0625, 0.03125}, "ode-trapezoid-quadratic"));
    reports.push_back(ode_trapezoid([](double t) { return t; }, [](double t) { return 0.5 * t * t; }, 1.0, 1.0,
                                    {0.25, 0.125, 0.0625, 0.03125}, "ode-trapezoid-linear"));
    reports.push_back(ode_trapezoid([](double) { return 0.75; }, [](double t) { return 0.75 * t; }, 1.0, 1.0,
                                    {0.25, 0.125, 0.0625, 0.03125}, "ode-trapezoid-constant"));

    nlohmann::json doc = nlohmann::json::array();
    for (const auto& r : reports) {
        for (std::size_t i = 0; i < r.resolutions.size(); ++i) {
            out << "study=" << std::left << std::setw(26) << r.name << ' ' << r.resolution_label << '=' << std::setw(10)
                << r.resolutions[i] << " error=" << sci(r.errors[i]) << '\n';
        }
        out << "study=" << std::left << std::setw(26) << r.name << " order=" << std::fixed << std::setprecision(4)
            << r.order << std::defaultfloat << std::setprecision(6) << '\n';
        doc.push_back(to_json(r));
    }
    if (!json_out.empty()) {
        io::write_json(json_out, doc);
        out << "json=" << json_out << '\n';
    }
    auto zero = [](const ConvergenceReport& r) {
        return std::all_of(r.errors.begin(), r.errors.end(), [](double e) { return e == 0.0; });
    };
    const bool ok = reports[0].order >= 1.9 && reports[1].order >= 0.9 && reports[2].order >= 1.9 && zero(reports[3]) &&
                    zero(reports[4]);
    out << "verdict=" << (ok ? "pass" : "fail") << '\n';
    return ok ? kExitOk : kExitFailure;
}

int do_normalize_check(std::ostream& out) {
    const ModelParams params = default_params();
    bool ok = true;
    std::vector<double> values;
    for (double tol : {1e-8, 1e-10, 1e-12, 1e-14}) {
        values.push_back(bump_normalizer(tol));
        out << "quadrature tol=" << std::left << std::setw(8) << tol << " I=" << std::setprecision(17) << values.back()
            << std::setprecision(6) << '\n';
    }
    const bool stable = std::abs(values[2] - values[3]) < 1e-10;
    const MollifierPotential kernel(params.mollifier_radius, values.back());
    const auto rows = oracles::mollifier_grid_integrals(kernel, {10.0, 5.0, 2.5, 1.25, 1.0, 0.5});
    bool monotone = true;
    double h1_error = 1.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out << "grid h=" << std::left << std::setw(6) << rows[i].h << " integral=" << std::setprecision(12)
            << rows[i].integral << " error=" << sci(rows[i].error, 3) << std::setprecision(6) << '\n';
        if (i > 0 && !(rows[i].error < rows[i - 1].error)) monotone = false;
        if (rows[i].h == 1.0) h1_error = rows[i].error;
    }
    out << "check.I_stable=" << (stable ? "pass" : "fail") << '\n';
    out << "check.error_monotone=" << (monotone ? "pass" : "fail") << '\n';
    out << "check.h1_error_below_1pct=" << (h1_error < 0.01 ? "pass" : "fail") << '\n';
    ok = stable && monotone && h1_error < 0.01;
    return ok ? kExitOk : kExitFailure;
}

}  // namespace

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Stochastic angiogenesis simulator", "angiosim"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", build_id());

    Overrides run_opts;
    auto* run_cmd = app.add_subcommand("run", "run the coupled simulation and write snapshots");
    add_overrides(*run_cmd, run_opts);

    Overrides validate_opts;
    auto* validate_cmd = app.add_subcommand("validate", "run the invariant suite on a short run");
    add_overrides(*validate_cmd, validate_opts);

    std::string json_out = "convergence.json";
    auto* conv_cmd = app.add_subcommand("convergence", "scheme convergence studies against analytic oracles");
    conv_cmd->add_option("--json", json_out, "where to write the reports (empty: skip)");

    auto* norm_cmd = app.add_subcommand("normalize-check", "mollifier normalization under grid refinement");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << "version=" << build_id() << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n' << app.help();
        return kExitUsage;
    }

    try {
        if (*run_cmd) return do_run(run_opts, out, err);
        if (*validate_cmd) return do_validate(validate_opts, out, err);
        if (*conv_cmd) return do_convergence(json_out, out, err);
        if (*norm_cmd) return do_normalize_check(out);
    } catch (const ConfigError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const SolverError& e) {
        err << "solver failure: " << e.what() << '\n';
        return kExitFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace angio::cli
