#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "angio/fractions.hpp"
#include "angio/grid.hpp"
#include "angio/params.hpp"
#include "angio/sources.hpp"

namespace angio {

/// c_V, c_D, c_M, c_U indexed by Species.
struct Concentrations {
    std::array<ScalarField, 4> fields;

    explicit Concentrations(const GridPtr& grid) : fields{ScalarField(grid), ScalarField(grid), ScalarField(grid), ScalarField(grid)} {}

    ScalarField& operator[](Species s) { return fields[static_cast<std::size_t>(s)]; }
    const ScalarField& operator[](Species s) const { return fields[static_cast<std::size_t>(s)]; }
};

/// Symmetric matrix with the sparsity of a 5-point stencil on a rows x cols
/// node layout (flat index p = r * cols + c), stored as three diagonals:
///   A(p, p) = diag[p], A(p, p+1) = east[p], A(p, p+cols) = south[p].
/// east[p] must be 0 when p is the last node of a row.
struct PentaSystem {
    int rows = 0;
    int cols = 0;
    std::vector<double> diag;
    std::vector<double> east;
    std::vector<double> south;
    std::vector<double> rhs;

    PentaSystem() = default;
    PentaSystem(int rows, int cols);

    std::size_t size() const noexcept { return diag.size(); }

    /// y = A x
    void apply(std::span<const double> x, std::span<double> y) const;
};

struct SolveResult {
    std::vector<double> x;
    int iterations = 0;
    double residual = 0.0;  // ||b - A x|| / ||b||, recomputed from x
};

/// Jacobi-preconditioned conjugate gradients. `guess` (if given) seeds the
/// iteration. With `coarse` = w, the iterate is also corrected along w by the
/// Galerkin step x += (w.r / w.Aw) w before every residual check, which drives
/// w.r to round-off; passing the active-node indicator makes the solve
/// conserve mass to round-off for zero-reaction systems. Throws SolverError
/// when the relative residual is still above `tol` after `max_iter` iterations.
SolveResult solve_system(const PentaSystem& sys, double tol, int max_iter,
                         std::optional<std::span<const double>> guess = std::nullopt,
                         std::optional<std::span<const double>> coarse = std::nullopt);

/// D_j(f) = D_j^B f_B + D_j^E f_E + D_j^F f_F, clamped to the range of the three constants.
double mix_diffusivity(double membrane, double fibrin, double fluid, Species species, const ModelParams& params);

struct ProteinStepOptions {
    double tau = 1.0;
    ReactionMode mode = ReactionMode::Explicit;
    double tol = 1e-10;
    int max_iter = 10000;
};

/// Semi-implicit system for one species: implicit diffusion with
/// arithmetic-mean face diffusivities taken from f^n, zero flux across faces
/// touching an inactive node, reactions per `opt.mode`. Inactive nodes get an
/// identity row with zero right-hand side. Throws std::invalid_argument on
/// mismatched grids or non-finite inputs.
PentaSystem assemble_system(const Concentrations& c_old, const VolumeFractions& f_old, const RateFields& rates,
                            Species species, const ProteinStepOptions& opt, const ModelParams& params);

struct SpeciesSolveInfo {
    int iterations = 0;
    double residual = 0.0;
    std::size_t flushed = 0;    // round-off negatives set to zero
    std::size_t negative = 0;   // negatives beyond round-off (left in place)
    std::size_t worst_node = 0;
    double worst_value = 0.0;
};

struct ProteinStepResult {
    Concentrations c;
    std::array<SpeciesSolveInfo, 4> info;
};

/// Advances all four species by one step. The species systems only couple
/// through time-n values, so they are solved independently. Negative values
/// no larger in magnitude than tol * max|c| are flushed to zero and the
/// positive values scaled down by the same total, which keeps the discrete
/// mass; larger negatives are left in place and reported in `info`.
ProteinStepResult step_concentrations(const Concentrations& c_old, const VolumeFractions& f_old,
                                      const RateFields& rates, const ProteinStepOptions& opt,
                                      const ModelParams& params);

}  // namespace angio
