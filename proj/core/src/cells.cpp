#include "angio/cells.hpp"

#include <cmath>
#include <numbers>

#include "angio/errors.hpp"

namespace angio {

double sigma_profile(Vec2 p, double domain_radius) noexcept {
    const double r = norm(p);
    const double R = domain_radius;
    if (r >= R) return 0.0;
    if (r <= 0.9 * R) return 0.1;
    const double band = R / 10.0;
    const double offset = band - (R - r);
    return std::sqrt(std::max(0.0, band * band - offset * offset)) / R;
}

StrainEnergy strain_energy(CellRef cell, const CellPopulation& pop, double fluid_at_cell, const ModelParams& params,
                           bool include_hertz) {
    const double rc = params.cell_radius;
    const double kernel = params.F_i * params.F_i / (20.0 * std::numbers::pi * std::numbers::pi * rc * rc * rc * rc) *
                          (1.0 - fluid_at_cell);
    const double hertz = 2.0 * std::numbers::sqrt2 / std::numbers::pi;
    const Vec2 self = pop.of(cell.kind)[cell.index];

    StrainEnergy out;
    Vec2 v;
    for (CellKind kind : {CellKind::Tip, CellKind::Stalk}) {
        const auto cells = pop.of(kind);
        for (std::size_t l = 0; l < cells.size(); ++l) {
            if (kind == cell.kind && l == cell.index) continue;
            const Vec2 d = self - cells[l];
            const double dist = norm(d);
            const double term = kernel * std::exp(-dist / rc);
            out.magnitude += term;
            if (include_hertz) {
                const double overlap = std::max(0.0, rc - 0.5 * dist) / rc;
                out.magnitude -= hertz * std::pow(overlap, 2.5);
            }
            if (dist > 0.0) v += (term / dist) * d;
        }
    }
    const double len = norm(v);
    if (len > 0.0) out.direction = (1.0 / len) * v;
    return out;
}

DriftContext::DriftContext(const Concentrations& c, const VolumeFractions& f)
    : c_V_(c[Species::V]),
      c_D_(c[Species::D]),
      membrane_(f.membrane),
      fibrin_(f.fibrin),
      fluid_(f.fluid),
      solid_(f.solid()) {}

double strain_coefficient(const ModelParams& p) {
    return p.b_i * p.cell_radius * p.cell_radius * p.cell_radius / (p.F_i * p.mu);
}

double chemotaxis_coefficient(double f_B, double f_F, double f_E, const ModelParams& p) {
    const double density = p.rho_membrane * f_B + p.rho_fibrin * f_F + p.rho_fluid * f_E;
    return 0.1 * p.b_i * p.F_i * (1.0 - f_E) / density;
}

double durotaxis_coefficient(double f_E, const ModelParams& p) {
    return 64.0 * p.b_i * p.F_i * p.lambda_tilde / 30.0 * (1.0 - f_E) * (0.5 - f_E) * f_E;
}

Vec2 drift(CellRef cell, const CellPopulation& pop, const DriftContext& ctx, const ModelParams& params,
           const DriftOptions& opt) {
    const Vec2 x = pop.of(cell.kind)[cell.index];
    if (norm(x) > params.domain_radius) throw DomainError("drift: cell lies outside the domain");

    const double f_B = interpolate_at(ctx.membrane(), x);
    const double f_F = interpolate_at(ctx.fibrin(), x);
    const double f_E = interpolate_at(ctx.fluid(), x);

    const StrainEnergy se = strain_energy(cell, pop, f_E, params, opt.include_hertz);
    Vec2 g = (strain_coefficient(params) * se.magnitude) * se.direction;

    const double gamma = chemotaxis_coefficient(f_B, f_F, f_E, params);
    if (gamma != 0.0) g += gamma * gradient_at(ctx.chemoattractant(cell.kind), x);

    const double lambda = durotaxis_coefficient(f_E, params);
    if (lambda != 0.0) g += lambda * gradient_at(ctx.solid(), x);

    if (opt.cutoff) g *= sigma_profile(x, params.domain_radius) / 0.1;
    return g;
}

Vec2 project_into_disk(Vec2 x, double radius) noexcept {
    double r = norm(x);
    if (r <= radius) return x;
    double scale = radius / r;
    Vec2 y = scale * x;
    while (norm(y) > radius) {
        scale = std::nextafter(scale, 0.0);
        y = scale * x;
    }
    return y;
}

CellPopulation em_step(const CellPopulation& pop, const DriftContext& ctx, const ModelParams& params,
                       const DriftOptions& opt, double tau, NoiseKey key, std::uint64_t step) {
    CellPopulation next = pop;
    for (CellKind kind : {CellKind::Tip, CellKind::Stalk}) {
        const auto cells = pop.of(kind);
        auto& out = next.of(kind);
        for (std::size_t k = 0; k < cells.size(); ++k) {
            const Vec2 g = drift({kind, k}, pop, ctx, params, opt);
            const double sigma = sigma_profile(cells[k], params.domain_radius);
            const CellStream stream(key.seed, key.replica, kind, static_cast<std::uint32_t>(k));
            const Vec2 xi = sigma != 0.0 ? stream.normal2(step) : Vec2{};
            out[k] = project_into_disk(euler_maruyama_update(cells[k], g, sigma, tau, xi), params.domain_radius);
        }
    }
    return next;
}

CellPopulation place_cells(int n_tips, int n_stalks, double r_min, double r_max, NoiseKey key) {
    CellPopulation pop;
    auto draw = [&](CellKind kind, int count, std::vector<Vec2>& out) {
        out.reserve(static_cast<std::size_t>(count));
        for (int k = 0; k < count; ++k) {
            const CellStream stream(key.seed, key.replica, kind, static_cast<std::uint32_t>(k));
            const auto u = stream.uniform2(DrawPurpose::Placement, 0);
            const double r = r_min + (r_max - r_min) * u[0];
            const double phi = 0.5 * std::numbers::pi * u[1];
            out.push_back({r * std::sin(phi), r * std::cos(phi)});
        }
    };
    draw(CellKind::Tip, n_tips, pop.tips);
    draw(CellKind::Stalk, n_stalks, pop.stalks);
    return pop;
}

}  // namespace angio
