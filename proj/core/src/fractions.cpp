#include "angio/fractions.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace angio {

ScalarField VolumeFractions::solid() const {
    ScalarField s = membrane;
    auto out = s.values();
    auto fb = fibrin.values();
    for (std::size_t idx = 0; idx < out.size(); ++idx) out[idx] += fb[idx];
    return s;
}

double quantize_fraction(double v) noexcept {
    if (!(v > 0.0)) return 0.0;
    if (v >= 1.0) return 1.0;
    return std::ldexp(std::floor(std::ldexp(v, 52)), -52);
}

double initial_fibrin(double r, double fibrin_radius) noexcept {
    if (r >= fibrin_radius) return 0.0;
    if (r <= 0.7 * fibrin_radius) return 0.8;
    return 0.4 * (1.0 - std::cos(std::numbers::pi / (0.3 * fibrin_radius) * (fibrin_radius - r)));
}

namespace {

void set_node(VolumeFractions& f, std::size_t idx, double membrane, double fibrin) {
    f.fibrin[idx] = f.fibrin_initial[idx] = quantize_fraction(fibrin);
    f.membrane[idx] = f.membrane_initial[idx] = quantize_fraction(membrane);
    f.fluid[idx] = 1.0 - f.membrane[idx] - f.fibrin[idx];
}

}  // namespace

VolumeFractions init_fractions(const GridPtr& grid, const ModelParams& params) {
    VolumeFractions f(grid);
    const Grid& g = *grid;
    for (int i = 0; i < g.n(); ++i) {
        for (int j = 0; j < g.n(); ++j) {
            if (!g.active(i, j)) continue;
            const double ff = initial_fibrin(norm(g.node(i, j)), params.fibrin_radius);
            set_node(f, g.index(i, j), 0.2 * ff, ff);
        }
    }
    return f;
}

VolumeFractions uniform_fractions(const GridPtr& grid, double membrane, double fibrin) {
    if (!(membrane >= 0.0 && fibrin >= 0.0 && membrane + fibrin <= 1.0)) {
        throw std::invalid_argument("uniform_fractions: need f_B, f_F >= 0 and f_B + f_F <= 1");
    }
    VolumeFractions f(grid);
    for (std::size_t idx = 0; idx < grid->size(); ++idx) {
        if (grid->active(idx)) set_node(f, idx, membrane, fibrin);
    }
    return f;
}

namespace {

void check_nonnegative(const ScalarField& c, const char* name) {
    const Grid& g = c.grid();
    auto v = c.values();
    for (std::size_t idx = 0; idx < v.size(); ++idx) {
        if (g.active(idx) && !(v[idx] >= 0.0)) {
            std::ostringstream os;
            os << "step_fractions: " << name << " is negative (" << v[idx] << ") at node " << idx;
            throw std::invalid_argument(os.str());
        }
    }
}

// Neumaier step: sum += x, with the lost low-order part collected in carry.
double accumulate(double& sum, double& carry, double x) noexcept {
    const double t = sum + x;
    carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
    return sum + carry;
}

}  // namespace

VolumeFractions step_fractions(const VolumeFractions& f, const ScalarField& c_M_old, const ScalarField& c_M_new,
                               const ScalarField& c_U_old, const ScalarField& c_U_new, const ModelParams& params,
                               double tau) {
    if (!c_M_old.same_grid(f.membrane) || !c_M_new.same_grid(f.membrane) || !c_U_old.same_grid(f.membrane) ||
        !c_U_new.same_grid(f.membrane)) {
        throw std::invalid_argument("step_fractions: fields live on different grids");
    }
    check_nonnegative(c_M_old, "c_M^n");
    check_nonnegative(c_M_new, "c_M^{n+1}");
    check_nonnegative(c_U_old, "c_U^n");
    check_nonnegative(c_U_new, "c_U^{n+1}");

    VolumeFractions out = f;
    const Grid& g = f.membrane.grid();
    const double half = 0.5 * tau;
    for (std::size_t idx = 0; idx < g.size(); ++idx) {
        if (!g.active(idx)) continue;
        const double eb = accumulate(out.membrane_exposure[idx], out.membrane_exposure_carry[idx],
                                     half * (c_M_old[idx] + c_M_new[idx]));
        const double ef = accumulate(out.fibrin_exposure[idx], out.fibrin_exposure_carry[idx],
                                     half * (c_U_old[idx] + c_U_new[idx]));
        const double b = f.membrane_initial[idx] * std::exp(-params.s_B * eb);
        const double ff = f.fibrin_initial[idx] * std::exp(-params.s_F * ef);
        // min() keeps the sequence monotone even if exp() were not.
        out.membrane[idx] = std::min(f.membrane[idx], quantize_fraction(b));
        out.fibrin[idx] = std::min(f.fibrin[idx], quantize_fraction(ff));
        out.fluid[idx] = 1.0 - out.membrane[idx] - out.fibrin[idx];
    }
    return out;
}

}  // namespace angio
