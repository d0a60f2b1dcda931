#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "angio/fractions.hpp"
#include "angio/grid.hpp"
#include "angio/params.hpp"
#include "angio/protein_solver.hpp"
#include "angio/rng.hpp"

namespace angio {

struct CellPopulation {
    std::vector<Vec2> tips;
    std::vector<Vec2> stalks;

    std::span<const Vec2> of(CellKind kind) const { return kind == CellKind::Tip ? tips : stalks; }
    std::vector<Vec2>& of(CellKind kind) { return kind == CellKind::Tip ? tips : stalks; }
    std::size_t size() const noexcept { return tips.size() + stalks.size(); }
    bool operator==(const CellPopulation&) const = default;
};

struct CellRef {
    CellKind kind;
    std::size_t index;
};

/// Isotropic noise amplitude (um / sqrt(s)): 1/10 up to 0.9 R, a quarter-circle
/// falloff to 0 at R, and 0 beyond.
double sigma_profile(Vec2 p, double domain_radius) noexcept;

struct StrainEnergy {
    double magnitude = 0.0;  // M
    Vec2 direction;          // z, unit or zero
};

/// Pairwise exponential strain kernel summed over every other cell.
/// `fluid_at_cell` is f_E at the cell position. With `include_hertz` the
/// Hertz contact term is subtracted from M (never from z).
StrainEnergy strain_energy(CellRef cell, const CellPopulation& pop, double fluid_at_cell, const ModelParams& params,
                           bool include_hertz = false);

/// Fields the drift is evaluated from.
class DriftContext {
public:
    DriftContext(const Concentrations& c, const VolumeFractions& f);

    const ScalarField& chemoattractant(CellKind kind) const { return kind == CellKind::Tip ? c_V_ : c_D_; }
    const ScalarField& membrane() const { return membrane_; }
    const ScalarField& fibrin() const { return fibrin_; }
    const ScalarField& fluid() const { return fluid_; }
    const ScalarField& solid() const { return solid_; }

private:
    ScalarField c_V_;
    ScalarField c_D_;
    ScalarField membrane_;
    ScalarField fibrin_;
    ScalarField fluid_;
    ScalarField solid_;
};

struct DriftOptions {
    bool cutoff = true;
    bool include_hertz = false;
};

/// Drift coefficients of the movement law, evaluated from the fractions at the cell.
double strain_coefficient(const ModelParams& params);                                        // alpha_0
double chemotaxis_coefficient(double f_B, double f_F, double f_E, const ModelParams& params);  // gamma
double durotaxis_coefficient(double f_E, const ModelParams& params);                           // lambda

/// g = alpha_0 M z + gamma grad c + lambda grad f_S, with c = c_V for tips and
/// c_D for stalks, all evaluated at the cell. With `cutoff` the result is
/// scaled by sigma(x) / 0.1 so it vanishes on the boundary. Throws
/// DomainError for a position outside the domain.
Vec2 drift(CellRef cell, const CellPopulation& pop, const DriftContext& ctx, const ModelParams& params,
           const DriftOptions& opt);

/// Radial projection onto the closed disk; the result satisfies |x| <= radius exactly.
Vec2 project_into_disk(Vec2 x, double radius) noexcept;

/// X + g tau + sigma sqrt(tau) xi.
inline Vec2 euler_maruyama_update(Vec2 x, Vec2 g, double sigma, double tau, Vec2 xi) noexcept {
    return x + tau * g + (sigma * std::sqrt(tau)) * xi;
}

struct NoiseKey {
    std::uint64_t seed = 0;
    std::uint32_t replica = 0;
};

/// One Euler-Maruyama step for every cell with drifts from the frozen
/// population `pop`, noise from each cell's substream at `step`, then
/// projection into the disk.
CellPopulation em_step(const CellPopulation& pop, const DriftContext& ctx, const ModelParams& params,
                       const DriftOptions& opt, double tau, NoiseKey key, std::uint64_t step);

/// Initial positions: (r, phi) uniform on [r_min, r_max] x [0, pi/2],
/// X = (r sin phi, r cos phi).
CellPopulation place_cells(int n_tips, int n_stalks, double r_min, double r_max, NoiseKey key);

}  // namespace angio
