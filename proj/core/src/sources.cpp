#include "angio/sources.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "angio/errors.hpp"

namespace angio {

namespace {

double bump_integrand(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

double simpson(double fa, double fm, double fb, double a, double b) { return (b - a) / 6.0 * (fa + 4.0 * fm + fb); }

double adaptive_simpson(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = bump_integrand(lm);
    const double frm = bump_integrand(rm);
    const double left = simpson(fa, flm, fm, a, m);
    const double right = simpson(fm, frm, fb, m, b);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double bump_normalizer(double rel_tol) {
    // Seed the recursion with a fixed uniform split so the flat region near
    // t = 0 cannot fool the first error estimate.
    constexpr int kPanels = 16;
    // The integral is ~0.1485; scale the absolute tolerance accordingly.
    const double abs_tol = rel_tol * 0.15 / kPanels;
    double total = 0.0;
    for (int p = 0; p < kPanels; ++p) {
        const double a = static_cast<double>(p) / kPanels;
        const double b = static_cast<double>(p + 1) / kPanels;
        const double fa = bump_integrand(a);
        const double fb = bump_integrand(b);
        const double fm = bump_integrand(0.5 * (a + b));
        total += adaptive_simpson(a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), abs_tol, 50);
    }
    return std::numbers::pi * total;
}

MollifierPotential::MollifierPotential(double radius, double normalizer)
    : radius_(radius), normalizer_(normalizer), radius2_(radius * radius), scale_(1.0 / (normalizer * radius * radius)) {
    if (!(radius > 0.0) || !(normalizer > 0.0)) throw DomainError("mollifier: radius and normalizer must be > 0");
}

double MollifierPotential::operator()(Vec2 p) const noexcept {
    const double r2 = norm2(p);
    if (r2 >= radius2_) return 0.0;
    return scale_ * std::exp(-radius2_ / (radius2_ - r2));
}

ScalarField deposit(std::span<const Vec2> centres, const MollifierPotential& kernel, const GridPtr& grid) {
    std::vector<Vec2> sorted(centres.begin(), centres.end());
    std::sort(sorted.begin(), sorted.end(), [](Vec2 a, Vec2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); });

    ScalarField out(grid);
    const Grid& g = *grid;
    const double h = g.h();
    const double rm = kernel.radius();
    for (const Vec2& c : sorted) {
        // x = (k - i) h  =>  i = k - x / h
        const int i_lo = std::max(0, static_cast<int>(std::floor(g.k() - (c.x + rm) / h)));
        const int i_hi = std::min(g.n() - 1, static_cast<int>(std::ceil(g.k() - (c.x - rm) / h)));
        const int j_lo = std::max(0, static_cast<int>(std::floor(g.k() - (c.y + rm) / h)));
        const int j_hi = std::min(g.n() - 1, static_cast<int>(std::ceil(g.k() - (c.y - rm) / h)));
        for (int i = i_lo; i <= i_hi; ++i) {
            for (int j = j_lo; j <= j_hi; ++j) {
                if (!g.active(i, j)) continue;
                const double v = kernel(c - g.node(i, j));
                if (v != 0.0) out[g.index(i, j)] += v;
            }
        }
    }
    return out;
}

namespace {

void check_positions(std::span<const Vec2> cells, const Grid& g, const char* kind) {
    for (std::size_t k = 0; k < cells.size(); ++k) {
        if (!g.contains(cells[k])) {
            std::ostringstream os;
            os << kind << " cell " << k << " at (" << cells[k].x << ", " << cells[k].y << ") lies outside the domain";
            throw DomainError(os.str());
        }
    }
}

ScalarField scaled(const ScalarField& f, double s) {
    ScalarField out = f;
    for (double& v : out.values()) v *= s;
    return out;
}

}  // namespace

RateFields assemble_rates(std::span<const Vec2> tips, std::span<const Vec2> stalks, const ModelParams& params,
                          const GridPtr& grid, const MollifierPotential& kernel) {
    check_positions(tips, *grid, "tip");
    check_positions(stalks, *grid, "stalk");
    const ScalarField tip_sum = deposit(tips, kernel, grid);
    const ScalarField stalk_sum = deposit(stalks, kernel, grid);

    RateFields r(grid);
    r.alpha_V = scaled(tip_sum, params.s_V);
    r.alpha_D = scaled(tip_sum, params.r_D);
    r.alpha_M = scaled(tip_sum, params.r_M);
    r.alpha_U = scaled(tip_sum, params.r_U);
    r.beta_D = scaled(stalk_sum, params.s_D);
    return r;
}

RateFields assemble_rates(std::span<const Vec2> tips, std::span<const Vec2> stalks, const ModelParams& params,
                          const GridPtr& grid) {
    return assemble_rates(tips, stalks, params, grid, MollifierPotential(params.mollifier_radius));
}

}  // namespace angio
