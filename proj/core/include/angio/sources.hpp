#pragma once

#include <span>

#include "angio/grid.hpp"
#include "angio/params.hpp"

namespace angio {

/// I = integral over the unit disk of exp(-1 / (1 - |u|^2)), computed as
/// pi * int_0^1 exp(-1/t) dt by adaptive Simpson quadrature to relative
/// tolerance `rel_tol`.
double bump_normalizer(double rel_tol = 1e-13);

/// Smooth compactly supported kernel
///   V(p) = exp(-R_m^2 / (R_m^2 - |p|^2)) / (I R_m^2)  for |p| < R_m, else 0,
/// with unit integral over the plane.
class MollifierPotential {
public:
    explicit MollifierPotential(double radius, double normalizer = bump_normalizer());

    double radius() const noexcept { return radius_; }
    double normalizer() const noexcept { return normalizer_; }
    double operator()(Vec2 p) const noexcept;

private:
    double radius_;
    double normalizer_;
    double radius2_;
    double scale_;
};

/// Reaction-rate fields (1/s) deposited by the cells.
struct RateFields {
    ScalarField alpha_V;
    ScalarField alpha_D;
    ScalarField alpha_M;
    ScalarField alpha_U;
    ScalarField beta_D;

    explicit RateFields(const GridPtr& grid)
        : alpha_V(grid), alpha_D(grid), alpha_M(grid), alpha_U(grid), beta_D(grid) {}
};

/// Sum of kernel copies centred at `centres`, sampled at active nodes. The
/// centres are summed in lexicographic (x, y) order, so the result does not
/// depend on the order of the input.
ScalarField deposit(std::span<const Vec2> centres, const MollifierPotential& kernel, const GridPtr& grid);

/// alpha_V = s_V a, alpha_j = r_j a (j = D, M, U), beta_D = s_D b, where a is
/// the deposit of the tip cells and b the deposit of the stalk cells.
/// Throws DomainError if a position lies outside the closed domain.
RateFields assemble_rates(std::span<const Vec2> tips, std::span<const Vec2> stalks, const ModelParams& params,
                          const GridPtr& grid);

RateFields assemble_rates(std::span<const Vec2> tips, std::span<const Vec2> stalks, const ModelParams& params,
                          const GridPtr& grid, const MollifierPotential& kernel);

}  // namespace angio
