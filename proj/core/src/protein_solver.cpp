#include "angio/protein_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "angio/errors.hpp"

namespace angio {

PentaSystem::PentaSystem(int r, int c) : rows(r), cols(c) {
    const auto n = static_cast<std::size_t>(r) * static_cast<std::size_t>(c);
    diag.assign(n, 0.0);
    east.assign(n, 0.0);
    south.assign(n, 0.0);
    rhs.assign(n, 0.0);
}

void PentaSystem::apply(std::span<const double> x, std::span<double> y) const {
    const std::size_t n = size();
    const auto stride = static_cast<std::size_t>(cols);
    for (std::size_t p = 0; p < n; ++p) {
        double v = diag[p] * x[p];
        if (p + 1 < n) v += east[p] * x[p + 1];
        if (p >= 1) v += east[p - 1] * x[p - 1];
        if (p + stride < n) v += south[p] * x[p + stride];
        if (p >= stride) v += south[p - stride] * x[p - stride];
        y[p] = v;
    }
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double l2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace

SolveResult solve_system(const PentaSystem& sys, double tol, int max_iter,
                         std::optional<std::span<const double>> guess,
                         std::optional<std::span<const double>> coarse) {
    const std::size_t n = sys.size();
    SolveResult res;
    res.x.assign(n, 0.0);
    if (guess) {
        if (guess->size() != n) throw std::invalid_argument("solve_system: guess has the wrong size");
        std::copy(guess->begin(), guess->end(), res.x.begin());
    }

    const double bnorm = l2(sys.rhs);
    if (bnorm == 0.0) {
        std::fill(res.x.begin(), res.x.end(), 0.0);
        return res;
    }

    std::vector<double> inv_diag(n);
    for (std::size_t p = 0; p < n; ++p) {
        if (!(sys.diag[p] > 0.0)) throw SolverError("solve_system: nonpositive diagonal entry", 0, 1.0);
        inv_diag[p] = 1.0 / sys.diag[p];
    }

    std::vector<double> r(n), z(n), dir(n), q(n);
    std::vector<double> coarse_image;
    double coarse_energy = 0.0;
    if (coarse) {
        if (coarse->size() != n) throw std::invalid_argument("solve_system: coarse vector has the wrong size");
        coarse_image.resize(n);
        sys.apply(*coarse, coarse_image);
        coarse_energy = dot(*coarse, coarse_image);
        if (!(coarse_energy > 0.0)) throw std::invalid_argument("solve_system: coarse vector has zero energy");
    }
    auto true_residual = [&] {
        sys.apply(res.x, q);
        for (std::size_t p = 0; p < n; ++p) r[p] = sys.rhs[p] - q[p];
        if (coarse) {
            const double delta = dot(*coarse, r) / coarse_energy;
            for (std::size_t p = 0; p < n; ++p) {
                res.x[p] += delta * (*coarse)[p];
                r[p] -= delta * coarse_image[p];
            }
        }
        return l2(r);
    };

    double rnorm = true_residual();
    int it = 0;
    // Outer loop restarts from the true residual if the recursive one drifted.
    while (rnorm > tol * bnorm && it < max_iter) {
        for (std::size_t p = 0; p < n; ++p) z[p] = inv_diag[p] * r[p];
        dir = z;
        double rz = dot(r, z);
        while (it < max_iter) {
            sys.apply(dir, q);
            const double alpha = rz / dot(dir, q);
            for (std::size_t p = 0; p < n; ++p) {
                res.x[p] += alpha * dir[p];
                r[p] -= alpha * q[p];
            }
            ++it;
            if (l2(r) <= tol * bnorm) break;
            for (std::size_t p = 0; p < n; ++p) z[p] = inv_diag[p] * r[p];
            const double rz_next = dot(r, z);
            const double beta = rz_next / rz;
            rz = rz_next;
            for (std::size_t p = 0; p < n; ++p) dir[p] = z[p] + beta * dir[p];
        }
        rnorm = true_residual();
    }
    res.iterations = it;
    res.residual = rnorm / bnorm;
    if (!(rnorm <= tol * bnorm)) {
        std::ostringstream os;
        os << "conjugate gradients did not converge: relative residual " << res.residual << " after " << it
           << " iterations (tol " << tol << ")";
        throw SolverError(os.str(), it, res.residual);
    }
    return res;
}

double mix_diffusivity(double membrane, double fibrin, double fluid, Species species, const ModelParams& params) {
    const PhaseDiffusivity& d = params.diffusivity_of(species);
    const double v = d.membrane * membrane + d.fluid * fluid + d.fibrin * fibrin;
    const double lo = std::min({d.membrane, d.fibrin, d.fluid});
    const double hi = std::max({d.membrane, d.fibrin, d.fluid});
    return std::clamp(v, lo, hi);
}

namespace {

void check_finite(const ScalarField& f, const char* name) {
    const Grid& g = f.grid();
    auto v = f.values();
    for (std::size_t p = 0; p < v.size(); ++p) {
        if (g.active(p) && !std::isfinite(v[p])) {
            std::ostringstream os;
            os << "assemble_system: non-finite " << name << " at node " << p;
            throw std::invalid_argument(os.str());
        }
    }
}

}  // namespace

PentaSystem assemble_system(const Concentrations& c_old, const VolumeFractions& f_old, const RateFields& rates,
                            Species species, const ProteinStepOptions& opt, const ModelParams& params) {
    const ScalarField& c = c_old[species];
    const ScalarField& cv = c_old[Species::V];
    for (const ScalarField* other : {&cv, &f_old.membrane, &f_old.fibrin, &f_old.fluid, &rates.alpha_V,
                                     &rates.alpha_D, &rates.alpha_M, &rates.alpha_U, &rates.beta_D}) {
        if (!other->same_grid(c)) throw std::invalid_argument("assemble_system: fields live on different grids");
    }
    check_finite(c, "concentration");
    check_finite(cv, "c_V");
    check_finite(f_old.membrane, "f_B");
    check_finite(f_old.fibrin, "f_F");

    const Grid& g = c.grid();
    const int n = g.n();
    const double tau = opt.tau;
    const double coef = tau / (g.h() * g.h());
    PentaSystem sys(n, n);

    std::vector<double> dcoef(g.size(), 0.0);
    for (std::size_t p = 0; p < g.size(); ++p) {
        if (g.active(p)) {
            dcoef[p] = mix_diffusivity(f_old.membrane[p], f_old.fibrin[p], f_old.fluid[p], species, params);
        }
    }

    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const std::size_t p = g.index(i, j);
            if (!g.active(p)) {
                sys.diag[p] = 1.0;
                continue;
            }
            sys.diag[p] += 1.0;

            double sink = 0.0;
            double production = 0.0;
            switch (species) {
                case Species::V: sink = rates.alpha_V[p]; break;
                case Species::D:
                    sink = rates.beta_D[p];
                    production = rates.alpha_D[p] * cv[p];
                    break;
                case Species::M:
                    sink = params.s_M * f_old.membrane[p];
                    production = rates.alpha_M[p] * cv[p];
                    break;
                case Species::U:
                    sink = params.s_U * f_old.fibrin[p];
                    production = rates.alpha_U[p] * cv[p];
                    break;
            }
            if (!std::isfinite(sink) || !std::isfinite(production)) {
                throw std::invalid_argument("assemble_system: non-finite reaction term");
            }
            if (opt.mode == ReactionMode::ImplicitSinks) {
                sys.diag[p] += tau * sink;
                sys.rhs[p] = c[p] + tau * production;
            } else {
                sys.rhs[p] = c[p] + tau * (production - sink * c[p]);
            }

            if (j + 1 < n && g.active(i, j + 1)) {
                const std::size_t q = g.index(i, j + 1);
                const double w = coef * 0.5 * (dcoef[p] + dcoef[q]);
                sys.east[p] = -w;
                sys.diag[p] += w;
                sys.diag[q] += w;
            }
            if (i + 1 < n && g.active(i + 1, j)) {
                const std::size_t q = g.index(i + 1, j);
                const double w = coef * 0.5 * (dcoef[p] + dcoef[q]);
                sys.south[p] = -w;
                sys.diag[p] += w;
                sys.diag[q] += w;
            }
        }
    }
    return sys;
}

ProteinStepResult step_concentrations(const Concentrations& c_old, const VolumeFractions& f_old,
                                      const RateFields& rates, const ProteinStepOptions& opt,
                                      const ModelParams& params) {
    ProteinStepResult out{Concentrations(c_old[Species::V].grid_ptr()), {}};
    const Grid& g = c_old[Species::V].grid();
    std::vector<double> active(g.size(), 0.0);
    for (std::size_t p = 0; p < g.size(); ++p) active[p] = g.active(p) ? 1.0 : 0.0;
    for (Species s : kAllSpecies) {
        const PentaSystem sys = assemble_system(c_old, f_old, rates, s, opt, params);
        SolveResult sol = solve_system(sys, opt.tol, opt.max_iter, c_old[s].values(), std::span<const double>(active));

        SpeciesSolveInfo& info = out.info[static_cast<std::size_t>(s)];
        info.iterations = sol.iterations;
        info.residual = sol.residual;

        double scale = 0.0;
        for (std::size_t p = 0; p < sol.x.size(); ++p) {
            if (g.active(p)) scale = std::max(scale, std::abs(sol.x[p]));
        }
        const double flush_below = opt.tol * scale;
        ScalarField& dst = out.c[s];
        double positive = 0.0;
        double flushed = 0.0;
        for (std::size_t p = 0; p < sol.x.size(); ++p) {
            if (!g.active(p)) continue;
            double v = sol.x[p];
            if (v < 0.0) {
                if (-v <= flush_below) {
                    flushed += v;
                    v = 0.0;
                    ++info.flushed;
                } else {
                    ++info.negative;
                    if (v < info.worst_value) {
                        info.worst_value = v;
                        info.worst_node = p;
                    }
                }
            } else {
                positive += v;
            }
            dst[p] = v;
        }
        // Hand the flushed mass back by shrinking the positive part, so
        // flushing neither creates mass nor raises the maximum.
        if (flushed < 0.0 && positive > 0.0) {
            const double shrink = (positive + flushed) / positive;
            for (std::size_t p = 0; p < sol.x.size(); ++p) {
                if (g.active(p) && dst[p] > 0.0) dst[p] *= shrink;
            }
        }
    }
    return out;
}

}  // namespace angio
