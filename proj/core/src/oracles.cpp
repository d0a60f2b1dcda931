#include "angio/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "angio/cells.hpp"
#include "angio/fractions.hpp"
#include "angio/rng.hpp"

namespace angio::oracles {

double fit_order(const std::vector<double>& res, const std::vector<double>& err) {
    if (res.size() != err.size() || res.size() < 2) throw std::invalid_argument("fit_order: need >= 2 paired points");
    const auto n = static_cast<double>(res.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < res.size(); ++i) {
        const double x = std::log(res[i]);
        const double y = std::log(err[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

nlohmann::json to_json(const ConvergenceReport& r) {
    return {{"name", r.name},
            {"resolution", r.resolution_label},
            {"resolutions", r.resolutions},
            {"errors", r.errors},
            {"order", r.order}};
}

double heat_mode_side(const Grid& grid) { return grid.n() * grid.h(); }

double heat_mode_amplitude(double diffusivity, double side, double t) {
    const double k = std::numbers::pi / side;
    return std::exp(-2.0 * diffusivity * k * k * t);
}

ScalarField analytic_heat_mode(const GridPtr& grid, double diffusivity, double t) {
    if (grid->mask_mode() != MaskMode::FullSquare) {
        throw std::invalid_argument("analytic_heat_mode: needs a full-square grid");
    }
    const double side = heat_mode_side(*grid);
    const double corner = grid->radius() + 0.5 * grid->h();
    const double amp = heat_mode_amplitude(diffusivity, side, t);
    return sample(grid, [&](double x, double y) {
        return std::cos(std::numbers::pi * (x + corner) / side) * std::cos(std::numbers::pi * (y + corner) / side) * amp +
               1.0;
    });
}

std::vector<double> dense_solve(const PentaSystem& sys) {
    const std::size_t n = sys.size();
    if (n > 2500) throw std::invalid_argument("dense_solve: at most 2500 unknowns");
    const auto stride = static_cast<std::size_t>(sys.cols);
    std::vector<double> a(n * n, 0.0);
    auto at = [&](std::size_t r, std::size_t c) -> double& { return a[r * n + c]; };
    for (std::size_t p = 0; p < n; ++p) {
        at(p, p) = sys.diag[p];
        if (p + 1 < n) at(p, p + 1) = at(p + 1, p) = sys.east[p];
        if (p + stride < n) at(p, p + stride) = at(p + stride, p) = sys.south[p];
    }
    std::vector<double> b = sys.rhs;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(at(r, col)) > std::abs(at(piv, col))) piv = r;
        }
        if (at(piv, col) == 0.0) throw std::runtime_error("dense_solve: singular matrix");
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(at(col, c), at(piv, c));
            std::swap(b[col], b[piv]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double m = at(r, col) / at(col, col);
            if (m == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) at(r, c) -= m * at(col, c);
            b[r] -= m * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t r = n; r-- > 0;) {
        double s = b[r];
        for (std::size_t c = r + 1; c < n; ++c) s -= at(r, c) * x[c];
        x[r] = s / at(r, r);
    }
    return x;
}

PentaSystem random_spd_penta(int rows, int cols, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> off(-1.0, 1.0);
    std::uniform_real_distribution<double> margin(0.1, 2.0);
    std::uniform_real_distribution<double> rhs(-1.0, 1.0);
    PentaSystem sys(rows, cols);
    const std::size_t n = sys.size();
    const auto stride = static_cast<std::size_t>(cols);
    for (std::size_t p = 0; p < n; ++p) {
        const bool row_end = (p + 1) % stride == 0;
        if (!row_end && p + 1 < n) sys.east[p] = off(gen);
        if (p + stride < n) sys.south[p] = off(gen);
    }
    for (std::size_t p = 0; p < n; ++p) {
        double s = std::abs(sys.east[p]) + std::abs(sys.south[p]);
        if (p >= 1) s += std::abs(sys.east[p - 1]);
        if (p >= stride) s += std::abs(sys.south[p - stride]);
        sys.diag[p] = s + margin(gen);
        sys.rhs[p] = rhs(gen);
    }
    return sys;
}

MomentEstimate brownian_moment(double sigma, double tau, int m_steps, int n_paths, std::uint64_t seed) {
    if (n_paths < 10000) throw std::invalid_argument("brownian_moment: need at least 10^4 paths");
    double sum = 0.0;
    double sum2 = 0.0;
    for (int p = 0; p < n_paths; ++p) {
        const CellStream stream(seed, 0, CellKind::Tip, static_cast<std::uint32_t>(p));
        Vec2 x;
        for (int s = 0; s < m_steps; ++s) {
            x = euler_maruyama_update(x, Vec2{}, sigma, tau, stream.normal2(static_cast<std::uint64_t>(s)));
        }
        const double d2 = norm2(x);
        sum += d2;
        sum2 += d2 * d2;
    }
    const double n = n_paths;
    MomentEstimate est;
    est.mean = sum / n;
    const double var = std::max(0.0, (sum2 - n * est.mean * est.mean) / (n - 1.0));
    est.standard_error = std::sqrt(var / n);
    est.target = 2.0 * sigma * sigma * m_steps * tau;
    return est;
}

ConvergenceReport ode_trapezoid(const std::function<double(double)>& c, const std::function<double(double)>& antiderivative,
                                double s, double T, const std::vector<double>& taus, std::string name) {
    ConvergenceReport rep;
    rep.name = std::move(name);
    rep.resolution_label = "tau";
    ModelParams params = default_params();
    params.s_B = s;
    const GridPtr grid = make_grid(1.0, 1.0);
    const std::size_t centre = grid->index(grid->k(), grid->k());
    const double exact = quantize_fraction(std::exp(-s * (antiderivative(T) - antiderivative(0.0))));

    for (double tau : taus) {
        const auto steps = static_cast<long long>(std::llround(T / tau));
        VolumeFractions f = uniform_fractions(grid, 1.0, 0.0);
        const ScalarField zero(grid);
        for (long long n = 0; n < steps; ++n) {
            const ScalarField c_old(grid, c(static_cast<double>(n) * tau));
            const ScalarField c_new(grid, c(static_cast<double>(n + 1) * tau));
            f = step_fractions(f, c_old, c_new, zero, zero, params, tau);
        }
        rep.resolutions.push_back(tau);
        rep.errors.push_back(std::abs(f.membrane[centre] - exact));
    }
    const bool all_positive = std::all_of(rep.errors.begin(), rep.errors.end(), [](double e) { return e > 0.0; });
    rep.order = all_positive && rep.errors.size() >= 2 ? fit_order(rep.resolutions, rep.errors) : 0.0;
    return rep;
}

double diffusion_error(const DiffusionStudy& study, double h, double tau, double tol) {
    const GridPtr grid = make_grid(study.radius, h, MaskMode::FullSquare);
    ModelParams params = default_params();
    params.domain_radius = study.radius;
    params.diffusivity[static_cast<int>(Species::V)] = {study.diffusivity, study.diffusivity, study.diffusivity};

    const VolumeFractions f = uniform_fractions(grid, 0.0, 0.0);
    const RateFields rates(grid);
    Concentrations c(grid);
    c[Species::V] = analytic_heat_mode(grid, study.diffusivity, 0.0);
    const ProteinStepOptions opt{tau, ReactionMode::Explicit, tol, 100000};

    const auto steps = static_cast<long long>(std::llround(study.final_time / tau));
    for (long long n = 0; n < steps; ++n) {
        const PentaSystem sys = assemble_system(c, f, rates, Species::V, opt, params);
        SolveResult sol = solve_system(sys, opt.tol, opt.max_iter, c[Species::V].values());
        std::copy(sol.x.begin(), sol.x.end(), c[Species::V].values().begin());
    }
    const ScalarField exact = analytic_heat_mode(grid, study.diffusivity, static_cast<double>(steps) * tau);
    double err = 0.0;
    for (std::size_t p = 0; p < grid->size(); ++p) err = std::max(err, std::abs(c[Species::V][p] - exact[p]));
    return err;
}

ConvergenceReport diffusion_space_study(const DiffusionStudy& study, const std::vector<double>& hs, double tau_per_h2) {
    ConvergenceReport rep;
    rep.name = "diffusion-space";
    rep.resolution_label = "h";
    for (double h : hs) {
        rep.resolutions.push_back(h);
        rep.errors.push_back(diffusion_error(study, h, tau_per_h2 * h * h));
    }
    rep.order = fit_order(rep.resolutions, rep.errors);
    return rep;
}

ConvergenceReport diffusion_time_study(const DiffusionStudy& study, double h, const std::vector<double>& taus) {
    ConvergenceReport rep;
    rep.name = "diffusion-time";
    rep.resolution_label = "tau";
    for (double tau : taus) {
        rep.resolutions.push_back(tau);
        rep.errors.push_back(diffusion_error(study, h, tau));
    }
    rep.order = fit_order(rep.resolutions, rep.errors);
    return rep;
}

std::vector<NormalizationRow> mollifier_grid_integrals(const MollifierPotential& kernel, const std::vector<double>& hs,
                                                       double patch_radius) {
    std::vector<NormalizationRow> rows;
    for (double h : hs) {
        const GridPtr grid = make_grid(patch_radius, h);
        const Vec2 centre{};
        const ScalarField v = deposit(std::span<const Vec2>(&centre, 1), kernel, grid);
        const double integral = integrate(v);
        rows.push_back({h, integral, std::abs(integral - 1.0)});
    }
    return rows;
}

}  // namespace angio::oracles
