#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "angio/fractions.hpp"

using namespace angio;

TEST_CASE("initial fibrin profile") {
    const double Rf = 375.0;
    CHECK(initial_fibrin(0.0, Rf) == 0.8);
    CHECK(initial_fibrin(0.7 * Rf, Rf) == 0.8);
    CHECK(initial_fibrin(Rf, Rf) == 0.0);
    CHECK(initial_fibrin(480.0, Rf) == 0.0);
    CHECK(initial_fibrin(0.7 * Rf * (1 + 1e-12), Rf) == doctest::Approx(0.8).epsilon(1e-9));
    CHECK(initial_fibrin(0.85 * Rf, Rf) == doctest::Approx(0.4).epsilon(1e-12));
    double prev = 1.0;
    for (double r = 0.0; r <= 500.0; r += 1.0) {
        const double v = initial_fibrin(r, Rf);
        CHECK(v <= prev);
        prev = v;
    }
}

TEST_CASE("initial fractions at the centre") {
    auto grid = make_grid(500.0, 10.0);
    const VolumeFractions f = init_fractions(grid, default_params());
    const std::size_t c = grid->index(50, 50);
    CHECK(f.fibrin[c] == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(f.membrane[c] == doctest::Approx(0.16).epsilon(1e-15));
    CHECK(f.fluid[c] == doctest::Approx(0.04).epsilon(1e-13));
    CHECK(f.fluid[c] == 1.0 - f.membrane[c] - f.fibrin[c]);
    CHECK(f.fluid.at(50, 0) == 1.0);
    CHECK(f.membrane_exposure.max_active() == 0.0);
}

TEST_CASE("quantization") {
    CHECK(quantize_fraction(0.5) == 0.5);
    CHECK(quantize_fraction(1.0) == 1.0);
    CHECK(quantize_fraction(0.0) == 0.0);
    const double q = quantize_fraction(0.1);
    CHECK(q <= 0.1);
    CHECK(0.1 - q < 0x1p-52);
    CHECK(std::ldexp(q, 52) == std::floor(std::ldexp(q, 52)));
}

namespace {
struct Inputs {
    ScalarField cM0, cM1, cU0, cU1;
};
Inputs constant_inputs(const GridPtr& g, double v) {
    return {ScalarField(g, v), ScalarField(g, v), ScalarField(g, v), ScalarField(g, v)};
}
}  // namespace

TEST_CASE("zero concentrations leave fractions unchanged") {
    auto grid = make_grid(500.0, 10.0);
    const ModelParams p = default_params();
    const VolumeFractions f0 = init_fractions(grid, p);
    const Inputs in = constant_inputs(grid, 0.0);
    const VolumeFractions f1 = step_fractions(f0, in.cM0, in.cM1, in.cU0, in.cU1, p, 1.0);
    for (std::size_t idx = 0; idx < grid->size(); ++idx) {
        CHECK(f1.membrane[idx] == f0.membrane[idx]);
        CHECK(f1.fibrin[idx] == f0.fibrin[idx]);
        CHECK(f1.fluid[idx] == f0.fluid[idx]);
    }
}

TEST_CASE("unit concentration decays by exp(-s_B tau)") {
    auto grid = make_grid(500.0, 10.0);
    const ModelParams p = default_params();
    const VolumeFractions f0 = uniform_fractions(grid, 0.16, 0.8);
    const Inputs in = constant_inputs(grid, 1.0);
    const VolumeFractions f1 = step_fractions(f0, in.cM0, in.cM1, in.cU0, in.cU1, p, 1.0);
    const std::size_t c = grid->index(50, 50);
    CHECK(std::exp(-1.21) == doctest::Approx(0.2981972794298874).epsilon(1e-15));
    CHECK(f1.membrane[c] == doctest::Approx(f0.membrane[c] * std::exp(-1.21)).epsilon(1e-14));
    CHECK(f1.fibrin[c] == doctest::Approx(f0.fibrin[c] * std::exp(-1.21)).epsilon(1e-14));
    CHECK(f1.fluid[c] == 1.0 - f1.membrane[c] - f1.fibrin[c]);
}

TEST_CASE("two half steps equal one full step for constant concentration") {
    auto grid = make_grid(100.0, 10.0);
    const ModelParams p = default_params();
    const VolumeFractions f0 = uniform_fractions(grid, 0.3, 0.5);
    const Inputs in = constant_inputs(grid, 0.37);
    const VolumeFractions once = step_fractions(f0, in.cM0, in.cM1, in.cU0, in.cU1, p, 2.0);
    const VolumeFractions half = step_fractions(f0, in.cM0, in.cM1, in.cU0, in.cU1, p, 1.0);
    const VolumeFractions twice = step_fractions(half, in.cM0, in.cM1, in.cU0, in.cU1, p, 1.0);
    for (std::size_t idx = 0; idx < grid->size(); ++idx) {
        CHECK(twice.membrane[idx] == once.membrane[idx]);
        CHECK(twice.fibrin[idx] == once.fibrin[idx]);
    }
}

TEST_CASE("fraction invariants under random nonnegative concentrations (property)") {
    auto grid = make_grid(200.0, 10.0);
    const ModelParams p = default_params();
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> u(0.0, 0.05);
    VolumeFractions f = init_fractions(grid, p);
    auto random_field = [&] {
        ScalarField c(grid);
        for (std::size_t idx = 0; idx < grid->size(); ++idx)
            if (grid->active(idx)) c[idx] = u(rng) * (rng() % 4 == 0 ? 0.0 : 1.0);
        return c;
    };
    ScalarField cM = random_field(), cU = random_field();
    for (int step = 0; step < 100; ++step) {
        ScalarField cM1 = random_field(), cU1 = random_field();
        const VolumeFractions next = step_fractions(f, cM, cM1, cU, cU1, p, 0.7);
        for (std::size_t idx = 0; idx < grid->size(); ++idx) {
            if (!grid->active(idx)) continue;
            const double b = next.membrane[idx], fi = next.fibrin[idx], e = next.fluid[idx];
            CHECK(b >= 0.0);
            CHECK(fi >= 0.0);
            CHECK(e >= 0.0);
            CHECK(e <= 1.0);
            CHECK(b <= f.membrane[idx]);
            CHECK(fi <= f.fibrin[idx]);
            CHECK(b + fi + e == 1.0);
            CHECK(e + fi + b == 1.0);
            CHECK(fi + b + e == 1.0);
        }
        f = next;
        cM = std::move(cM1);
        cU = std::move(cU1);
    }
}

TEST_CASE("negative concentrations are rejected") {
    auto grid = make_grid(100.0, 10.0);
    const ModelParams p = default_params();
    const VolumeFractions f0 = uniform_fractions(grid, 0.2, 0.2);
    Inputs in = constant_inputs(grid, 0.0);
    in.cM1.at(10, 10) = -1e-3;
    CHECK_THROWS_AS(step_fractions(f0, in.cM0, in.cM1, in.cU0, in.cU1, p, 1.0), std::invalid_argument);
    auto other = make_grid(100.0, 5.0);
    const Inputs bad = constant_inputs(other, 0.0);
    CHECK_THROWS_AS(step_fractions(f0, bad.cM0, bad.cM1, bad.cU0, bad.cU1, p, 1.0), std::invalid_argument);
}
