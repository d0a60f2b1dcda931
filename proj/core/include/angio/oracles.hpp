#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "angio/grid.hpp"
#include "angio/protein_solver.hpp"
#include "angio/sources.hpp"

/// Independent reference computations: analytic solutions, brute-force
/// solvers and Monte-Carlo moments used to check the simulator.
namespace angio::oracles {

struct ConvergenceReport {
    std::string name;
    std::string resolution_label;  // "h" or "tau"
    std::vector<double> resolutions;
    std::vector<double> errors;
    double order = 0.0;  // least-squares slope of log(error) against log(resolution)
};

/// Least-squares slope of log(errors) against log(resolutions). Needs >= 2 points.
double fit_order(const std::vector<double>& resolutions, const std::vector<double>& errors);

nlohmann::json to_json(const ConvergenceReport& report);

/// Side of the square the full-square grid discretizes: each node owns an
/// h x h cell, so the square is [-R - h/2, R + h/2]^2, side (2k + 1) h.
double heat_mode_side(const Grid& grid);

/// exp(-2 D (pi / L)^2 t)
double heat_mode_amplitude(double diffusivity, double side, double t);

/// u = cos(pi s_x / L) cos(pi s_y / L) exp(-2 D (pi/L)^2 t) + 1 with s the
/// distance from the lower-left corner of the square: the slowest Neumann
/// eigenmode plus a positivity offset. Requires a FullSquare grid.
ScalarField analytic_heat_mode(const GridPtr& grid, double diffusivity, double t);

/// Dense Gaussian elimination with partial pivoting. At most 2500 unknowns.
/// Throws std::invalid_argument for larger systems and std::runtime_error
/// for a singular matrix.
std::vector<double> dense_solve(const PentaSystem& sys);

/// Random symmetric strictly diagonally dominant pentadiagonal system with
/// positive diagonal (hence SPD) and a random right-hand side.
PentaSystem random_spd_penta(int rows, int cols, std::uint64_t seed);

struct MomentEstimate {
    double mean = 0.0;            // sample mean of |X_m - X_0|^2
    double standard_error = 0.0;  // of the mean
    double target = 0.0;          // 2 sigma^2 m tau
};

/// Monte-Carlo second moment of the driftless Euler-Maruyama walk, using the
/// simulator's noise substreams (path p uses tip substream p). n_paths >= 10^4.
MomentEstimate brownian_moment(double sigma, double tau, int m_steps, int n_paths, std::uint64_t seed);

/// Steps a uniform membrane fraction f^0 = 1 through step_fractions with
/// c_M(t) sampled at the step times and compares f(T) with
/// exp(-s int_0^T c) rounded onto the fraction storage lattice.
ConvergenceReport ode_trapezoid(const std::function<double(double)>& c, const std::function<double(double)>& antiderivative,
                                double s, double T, const std::vector<double>& taus, std::string name = "ode-trapezoid");

struct DiffusionStudy {
    double diffusivity = 100.0;
    double final_time = 400.0;
    double radius = 500.0;
};

/// Pure diffusion of one species with constant D on the full square from the
/// analytic mode at t = 0; max-node error against the mode at final_time.
double diffusion_error(const DiffusionStudy& study, double h, double tau, double tol = 1e-12);

/// Spatial study: tau = tau_per_h2 * h^2 so both error terms scale like h^2.
ConvergenceReport diffusion_space_study(const DiffusionStudy& study, const std::vector<double>& hs, double tau_per_h2);

ConvergenceReport diffusion_time_study(const DiffusionStudy& study, double h, const std::vector<double>& taus);

struct NormalizationRow {
    double h = 0.0;
    double integral = 0.0;  // h^2 * sum of V over a grid centred on the kernel
    double error = 0.0;     // |integral - 1|
};

/// Grid integral of the mollifier sampled on a disk grid of radius
/// `patch_radius` centred on the kernel, for each spacing in `hs`.
std::vector<NormalizationRow> mollifier_grid_integrals(const MollifierPotential& kernel, const std::vector<double>& hs,
                                                       double patch_radius = 50.0);

}  // namespace angio::oracles
