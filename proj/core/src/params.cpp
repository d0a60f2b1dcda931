#include "angio/params.hpp"

#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "angio/errors.hpp"

namespace angio {

using nlohmann::json;

std::string_view species_name(Species s) {
    switch (s) {
        case Species::V: return "V";
        case Species::D: return "D";
        case Species::M: return "M";
        case Species::U: return "U";
    }
    return "?";
}

std::string_view to_string(ReactionMode m) {
    return m == ReactionMode::Explicit ? "explicit" : "implicit-sinks";
}

std::string_view to_string(DriftFields d) { return d == DriftFields::Old ? "old" : "new"; }

ModelParams default_params() {
    ModelParams p;
    p.b_i = 0.02;
    p.F_i = 1000.0;
    p.mu = 0.2;
    p.lambda_tilde = 15.0;
    p.cell_radius = 11.25;

    p.rho_membrane = 1.06e-3;
    p.rho_fibrin = 1.06e-3;
    p.rho_fluid = 0.9933e-3;

    // {membrane, fibrin, fluid}
    p.diffusivity[static_cast<int>(Species::V)] = {100.0, 200.0, 10.0};
    p.diffusivity[static_cast<int>(Species::D)] = {0.51, 1.02, 0.051};
    p.diffusivity[static_cast<int>(Species::M)] = {1.23, 2.46, 0.123};
    p.diffusivity[static_cast<int>(Species::U)] = {0.53, 1.06, 0.053};

    p.r_D = 10.0;
    p.r_M = 10.0;
    p.r_U = 10.0;
    p.s_V = 0.024;
    p.s_D = 0.024;
    p.s_M = 0.024;
    p.s_U = 0.024;
    p.s_B = 1.21;
    p.s_F = 1.21;

    p.domain_radius = 500.0;
    p.mollifier_radius = 12.5;
    p.fibrin_radius = 0.75 * p.domain_radius;
    p.vegf_radius = 0.75 * p.domain_radius;
    return p;
}

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }
bool nonneg_finite(double v) { return std::isfinite(v) && v >= 0.0; }

}  // namespace

void ModelParams::validate() const {
    for (Species s : kAllSpecies) {
        const auto& d = diffusivity_of(s);
        std::string name(species_name(s));
        require(positive_finite(d.membrane) && positive_finite(d.fibrin) && positive_finite(d.fluid),
                "params: diffusivities of species " + name + " must be > 0");
    }
    for (double rate : {b_i, F_i, mu, lambda_tilde, r_D, r_M, r_U, s_V, s_D, s_M, s_U, s_B, s_F,
                        rho_membrane, rho_fibrin, rho_fluid}) {
        require(nonneg_finite(rate), "params: rate constants must be >= 0");
    }
    require(positive_finite(mu) && positive_finite(F_i), "params: mu and F_i must be > 0");
    require(positive_finite(cell_radius), "params: cell_radius must be > 0");
    require(positive_finite(domain_radius), "params: domain_radius must be > 0");
    require(positive_finite(mollifier_radius) && mollifier_radius < domain_radius,
            "params: mollifier_radius must satisfy 0 < R_m < R");
    require(positive_finite(fibrin_radius) && fibrin_radius <= domain_radius,
            "params: fibrin_radius must satisfy 0 < R_f <= R");
    require(positive_finite(vegf_radius) && vegf_radius <= domain_radius,
            "params: vegf_radius must satisfy 0 < radius <= R");
}

void SimConfig::validate(const ModelParams& params) const {
    require(positive_finite(h), "h: must be > 0");
    const double ratio = params.domain_radius / h;
    const double k = std::round(ratio);
    require(k >= 1.0 && std::abs(ratio - k) <= 1e-9 * ratio,
            "h: must divide the domain radius exactly (R/h integer)");
    require(positive_finite(tau), "tau: must be > 0");
    require(n_steps >= 0, "n_steps: must be >= 0");
    require(n1 >= 0, "n1: must be >= 0");
    require(n2 >= 0, "n2: must be >= 0");
    require(snapshot_every >= 1, "snapshot_every: must be >= 1");
    require(std::isfinite(linear_tol) && linear_tol > 0.0 && linear_tol < 1.0,
            "linear_tol: must lie in (0, 1)");
    require(linear_max_iter >= 1, "linear_max_iter: must be >= 1");
    require(!output_dir.empty(), "output_dir: must be non-empty");
    if (fibrin_radius) {
        require(positive_finite(*fibrin_radius) && *fibrin_radius <= params.domain_radius,
                "fibrin_radius: must satisfy 0 < R_f <= R");
    }
}

ModelParams SimConfig::apply(ModelParams params) const {
    if (fibrin_radius) params.fibrin_radius = *fibrin_radius;
    return params;
}

namespace {

template <class T>
T get_as(const json& v, const std::string& key) {
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw ConfigError(key + ": wrong type");
    }
}

double get_number(const json& v, const std::string& key) {
    if (!v.is_number()) throw ConfigError(key + ": expected a number");
    return v.get<double>();
}

long long get_integer(const json& v, const std::string& key) {
    if (!v.is_number_integer()) throw ConfigError(key + ": expected an integer");
    if (v.is_number_unsigned() && v.get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
        throw ConfigError(key + ": integer out of range");
    }
    return v.get<long long>();
}

int get_int(const json& v, const std::string& key) {
    long long x = get_integer(v, key);
    if (x < INT32_MIN || x > INT32_MAX) throw ConfigError(key + ": integer out of range");
    return static_cast<int>(x);
}

bool get_bool(const json& v, const std::string& key) {
    if (!v.is_boolean()) throw ConfigError(key + ": expected true or false");
    return v.get<bool>();
}

}  // namespace

SimConfig load_config(std::string_view document, const ModelParams& params) {
    json doc;
    bool blank = document.find_first_not_of(" \t\r\n") == std::string_view::npos;
    if (!blank) {
        try {
            doc = json::parse(document.begin(), document.end());
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("parse error: ") + e.what());
        }
        if (!doc.is_object()) throw ConfigError("parse error: config must be a JSON object");
    } else {
        doc = json::object();
    }

    SimConfig c;
    for (const auto& [key, v] : doc.items()) {
        if (key == "h") {
            c.h = get_number(v, key);
        } else if (key == "tau") {
            c.tau = get_number(v, key);
        } else if (key == "n_steps") {
            c.n_steps = get_integer(v, key);
        } else if (key == "n1") {
            c.n1 = get_int(v, key);
        } else if (key == "n2") {
            c.n2 = get_int(v, key);
        } else if (key == "seed") {
            if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
                throw ConfigError("seed: expected a nonnegative integer");
            }
            c.seed = v.get<std::uint64_t>();
        } else if (key == "replica") {
            long long r = get_integer(v, key);
            if (r < 0 || r > (1LL << 29) - 1) throw ConfigError("replica: must lie in [0, 2^29)");
            c.replica = static_cast<std::uint32_t>(r);
        } else if (key == "snapshot_every") {
            c.snapshot_every = get_integer(v, key);
        } else if (key == "reaction_mode") {
            auto s = get_as<std::string>(v, key);
            if (s == "explicit") {
                c.reaction_mode = ReactionMode::Explicit;
            } else if (s == "implicit-sinks") {
                c.reaction_mode = ReactionMode::ImplicitSinks;
            } else {
                throw ConfigError("reaction_mode: expected \"explicit\" or \"implicit-sinks\"");
            }
        } else if (key == "drift_cutoff") {
            c.drift_cutoff = get_bool(v, key);
        } else if (key == "drift_fields") {
            auto s = get_as<std::string>(v, key);
            if (s == "old") {
                c.drift_fields = DriftFields::Old;
            } else if (s == "new") {
                c.drift_fields = DriftFields::New;
            } else {
                throw ConfigError("drift_fields: expected \"old\" or \"new\"");
            }
        } else if (key == "hertz_in_strain") {
            c.hertz_in_strain = get_bool(v, key);
        } else if (key == "output_dir") {
            c.output_dir = get_as<std::string>(v, key);
        } else if (key == "linear_tol") {
            c.linear_tol = get_number(v, key);
        } else if (key == "linear_max_iter") {
            c.linear_max_iter = get_int(v, key);
        } else if (key == "validate_invariants") {
            c.validate_invariants = get_bool(v, key);
        } else if (key == "solver_log") {
            c.solver_log = get_bool(v, key);
        } else if (key == "fibrin_radius") {
            if (!v.is_null()) c.fibrin_radius = get_number(v, key);
        } else {
            throw ConfigError(key + ": unknown key");
        }
    }
    c.validate(params);
    return c;
}

std::string serialize_config(const SimConfig& c) {
    json j;
    j["h"] = c.h;
    j["tau"] = c.tau;
    j["n_steps"] = c.n_steps;
    j["n1"] = c.n1;
    j["n2"] = c.n2;
    j["seed"] = c.seed;
    j["replica"] = c.replica;
    j["snapshot_every"] = c.snapshot_every;
    j["reaction_mode"] = std::string(to_string(c.reaction_mode));
    j["drift_cutoff"] = c.drift_cutoff;
    j["drift_fields"] = std::string(to_string(c.drift_fields));
    j["hertz_in_strain"] = c.hertz_in_strain;
    j["output_dir"] = c.output_dir;
    j["linear_tol"] = c.linear_tol;
    j["linear_max_iter"] = c.linear_max_iter;
    j["validate_invariants"] = c.validate_invariants;
    j["solver_log"] = c.solver_log;
    j["fibrin_radius"] = c.fibrin_radius ? json(*c.fibrin_radius) : json(nullptr);
    return j.dump(2);
}

}  // namespace angio
