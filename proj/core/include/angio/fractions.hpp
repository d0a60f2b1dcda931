#pragma once

#include "angio/grid.hpp"
#include "angio/params.hpp"

namespace angio {

/// Volume fractions of basement membrane (f_B), fibrin matrix (f_F) and
/// extracellular fluid (f_E).
///
/// The degradation ODEs have the closed form f(t) = f^0 exp(-s int_0^t c), so
/// alongside the fractions we carry the initial values and the accumulated
/// exposure int_0^t c (trapezoid rule per step, summed with Neumaier
/// compensation so the total is not polluted by per-step rounding). f_B and f_F are rounded down
/// onto the lattice 2^-52 Z; f_E = 1 - f_B - f_F and every partial sum of the
/// three are then exact in double precision.
struct VolumeFractions {
    ScalarField membrane;  // f_B
    ScalarField fibrin;    // f_F
    ScalarField fluid;     // f_E
    ScalarField membrane_initial;
    ScalarField fibrin_initial;
    ScalarField membrane_exposure;  // int c_M dt
    ScalarField fibrin_exposure;    // int c_U dt
    ScalarField membrane_exposure_carry;  // compensation terms of the two sums
    ScalarField fibrin_exposure_carry;

    explicit VolumeFractions(const GridPtr& grid)
        : membrane(grid),
          fibrin(grid),
          fluid(grid),
          membrane_initial(grid),
          fibrin_initial(grid),
          membrane_exposure(grid),
          fibrin_exposure(grid),
          membrane_exposure_carry(grid),
          fibrin_exposure_carry(grid) {}

    /// f_S = f_B + f_F
    ScalarField solid() const;
};

/// Rounds v in [0, 1] down onto the 2^-52 lattice.
double quantize_fraction(double v) noexcept;

/// Initial fibrin profile: 0.8 inside 0.7 R_f, cosine ramp to 0 at R_f.
double initial_fibrin(double r, double fibrin_radius) noexcept;

/// f_F^0 from initial_fibrin, f_B^0 = 0.2 f_F^0, f_E^0 = 1 - f_B^0 - f_F^0.
VolumeFractions init_fractions(const GridPtr& grid, const ModelParams& params);

/// Uniform fractions (tests and convergence studies).
VolumeFractions uniform_fractions(const GridPtr& grid, double membrane, double fibrin);

/// One step of the trapezoid-exponential update
///   f_B^{n+1} = f_B^n exp(-s_B tau/2 (c_M^n + c_M^{n+1})),  f_F likewise with s_F, c_U,
/// evaluated as f^0 exp(-s * exposure) with the exposure advanced by the
/// trapezoid increment; f_E is the complement. Throws std::invalid_argument
/// on mismatched grids or a negative concentration at an active node.
VolumeFractions step_fractions(const VolumeFractions& f, const ScalarField& c_M_old, const ScalarField& c_M_new,
                               const ScalarField& c_U_old, const ScalarField& c_U_new, const ModelParams& params,
                               double tau);

}  // namespace angio
