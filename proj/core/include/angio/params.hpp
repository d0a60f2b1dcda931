#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace angio {

enum class Species : int { V = 0, D = 1, M = 2, U = 3 };  // VEGF, DLL4, MMP, uPA
inline constexpr std::array<Species, 4> kAllSpecies{Species::V, Species::D, Species::M, Species::U};

std::string_view species_name(Species s);

/// Per-phase diffusivities of one protein (um^2/s).
struct PhaseDiffusivity {
    double membrane;  // D^B
    double fibrin;    // D^F
    double fluid;     // D^E
};

/// Physical constants of the model. Units are documented per field; all
/// arithmetic is done on raw doubles in these units.
struct ModelParams {
    double b_i = 0.0;           // 1/s
    double F_i = 0.0;           // nN
    double mu = 0.0;            // -
    double lambda_tilde = 0.0;  // -
    double cell_radius = 0.0;   // R_c, um (strain-energy kernel length)

    double rho_membrane = 0.0;  // ng/um^3
    double rho_fibrin = 0.0;
    double rho_fluid = 0.0;

    std::array<PhaseDiffusivity, 4> diffusivity{};  // indexed by Species

    double r_D = 0.0;  // um^3/s
    double r_M = 0.0;
    double r_U = 0.0;
    double s_V = 0.0;  // um^3/s
    double s_D = 0.0;  // um^3/s
    double s_M = 0.0;  // 1/s
    double s_U = 0.0;  // 1/s
    double s_B = 0.0;  // um^3/(ng s)
    double s_F = 0.0;  // um^3/(ng s)

    double domain_radius = 0.0;     // R, um
    double mollifier_radius = 0.0;  // R_m, um
    double fibrin_radius = 0.0;     // R_f, um (plateau/ramp of the initial fibrin fraction)
    double vegf_radius = 0.0;       // support radius of the initial VEGF bump, um

    const PhaseDiffusivity& diffusivity_of(Species s) const {
        return diffusivity[static_cast<std::size_t>(s)];
    }

    /// Throws ConfigError naming the first violated constraint.
    void validate() const;
};

ModelParams default_params();

enum class ReactionMode { Explicit, ImplicitSinks };
enum class DriftFields { Old, New };

std::string_view to_string(ReactionMode m);
std::string_view to_string(DriftFields d);

struct SimConfig {
    double h = 10.0;    // um
    double tau = 1.0;   // s
    long long n_steps = 1600;
    int n1 = 2;         // tip cells
    int n2 = 200;       // stalk cells
    std::uint64_t seed = 0;
    std::uint32_t replica = 0;
    long long snapshot_every = 400;
    ReactionMode reaction_mode = ReactionMode::Explicit;
    bool drift_cutoff = true;
    DriftFields drift_fields = DriftFields::New;
    bool hertz_in_strain = false;
    std::string output_dir = "angio_out";
    double linear_tol = 1e-10;
    int linear_max_iter = 10000;
    bool validate_invariants = false;
    bool solver_log = false;
    std::optional<double> fibrin_radius;  // overrides ModelParams::fibrin_radius

    /// Checks all config invariants against the domain radius in `params`.
    void validate(const ModelParams& params) const;

    /// Parameters with config overrides applied.
    ModelParams apply(ModelParams params) const;

    bool operator==(const SimConfig&) const = default;
};

/// Parses a JSON object of SimConfig keys. Missing keys keep their defaults,
/// unknown keys are rejected. Throws ConfigError.
SimConfig load_config(std::string_view document, const ModelParams& params = default_params());

/// JSON text that load_config parses back to an equal SimConfig.
std::string serialize_config(const SimConfig& config);

}  // namespace angio
