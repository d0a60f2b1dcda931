#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "angio/errors.hpp"
#include "angio/sources.hpp"

using namespace angio;

namespace {
double normalizer_oracle() {
    // pi * int_0^1 e^{-1/t} dt = pi (e^{-1} + Ei(-1))
    return std::numbers::pi * (std::exp(-1.0) + std::expint(-1.0));
}
}  // namespace

TEST_CASE("bump normalizer") {
    const double I = bump_normalizer();
    CHECK(I == doctest::Approx(normalizer_oracle()).epsilon(1e-12));
    CHECK(I == doctest::Approx(0.4665123931783294).epsilon(1e-13));
    CHECK(std::abs(bump_normalizer(1e-12) - bump_normalizer(1e-14)) < 1e-10);
    CHECK(std::abs(bump_normalizer(1e-10) - I) < 1e-9);
}

TEST_CASE("mollifier values") {
    const MollifierPotential V(12.5);
    const double I = normalizer_oracle();
    CHECK(V({0.0, 0.0}) == doctest::Approx(std::exp(-1.0) / (I * 12.5 * 12.5)).epsilon(1e-12));
    CHECK(V({0.0, 0.0}) == doctest::Approx(0.005046872190161141).epsilon(1e-12));
    CHECK(V({12.5, 0.0}) == 0.0);
    CHECK(V({20.0, 20.0}) == 0.0);
    CHECK(V({6.25, 0.0}) == doctest::Approx(std::exp(-4.0 / 3.0) / (I * 156.25)).epsilon(1e-12));
    CHECK(V({3.0, 4.0}) == V({-4.0, 3.0}));
    CHECK(V({12.4999, 0.0}) >= 0.0);
}

TEST_CASE("mollifier is radially nonincreasing") {
    const MollifierPotential V(12.5);
    double prev = V({0.0, 0.0});
    for (double r = 0.1; r < 13.0; r += 0.1) {
        const double v = V({r, 0.0});
        CHECK(v <= prev);
        CHECK(v >= 0.0);
        prev = v;
    }
}

TEST_CASE("rates from no cells are zero") {
    auto grid = make_grid(500.0, 10.0);
    const RateFields r = assemble_rates({}, {}, default_params(), grid);
    for (const ScalarField* f : {&r.alpha_V, &r.alpha_D, &r.alpha_M, &r.alpha_U, &r.beta_D}) {
        CHECK(f->max_active() == 0.0);
        CHECK(f->min_active() == 0.0);
    }
}

TEST_CASE("single tip at a node") {
    auto grid = make_grid(500.0, 10.0);
    const ModelParams p = default_params();
    const MollifierPotential V(p.mollifier_radius);
    const std::vector<Vec2> tips{{100.0, -50.0}};
    const RateFields r = assemble_rates(tips, {}, p, grid, V);
    const std::size_t idx = grid->index(40, 55);
    CHECK(r.alpha_V[idx] == p.s_V * V({0.0, 0.0}));
    CHECK(r.alpha_D[idx] == p.r_D * V({0.0, 0.0}));
    CHECK(r.alpha_M[idx] == p.r_M * V({0.0, 0.0}));
    CHECK(r.alpha_U[idx] == p.r_U * V({0.0, 0.0}));
    CHECK(r.beta_D.max_active() == 0.0);
    CHECK(r.alpha_V.at(39, 55) == p.s_V * V({10.0, 0.0}));
    // support: nothing at nodes R_m or farther from the tip
    CHECK(r.alpha_V.at(38, 55) == 0.0);

    const std::vector<Vec2> twice{{100.0, -50.0}, {100.0, -50.0}};
    const RateFields r2 = assemble_rates(twice, {}, p, grid, V);
    CHECK(r2.alpha_V[idx] == 2.0 * r.alpha_V[idx]);
}

TEST_CASE("stalk deposit feeds only the DLL4 sink") {
    auto grid = make_grid(500.0, 10.0);
    const ModelParams p = default_params();
    const std::vector<Vec2> stalks{{0.0, 0.0}};
    const RateFields r = assemble_rates({}, stalks, p, grid);
    CHECK(r.alpha_V.max_active() == 0.0);
    CHECK(r.beta_D.at(50, 50) == doctest::Approx(p.s_D * 0.005046872190161141).epsilon(1e-12));
}

TEST_CASE("rate assembly is permutation invariant and linear (property)") {
    auto grid = make_grid(500.0, 5.0);
    const ModelParams p = default_params();
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-300.0, 300.0);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<Vec2> a, b;
        for (int k = 0; k < 30; ++k) a.push_back({u(rng), u(rng)});
        for (int k = 0; k < 30; ++k) b.push_back({u(rng), u(rng)});
        std::vector<Vec2> shuffled = a;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        const RateFields r1 = assemble_rates(a, {}, p, grid);
        const RateFields r2 = assemble_rates(shuffled, {}, p, grid);
        CHECK(std::equal(r1.alpha_V.values().begin(), r1.alpha_V.values().end(), r2.alpha_V.values().begin()));

        std::vector<Vec2> ab = a;
        ab.insert(ab.end(), b.begin(), b.end());
        const RateFields rb = assemble_rates(b, {}, p, grid);
        const RateFields rab = assemble_rates(ab, {}, p, grid);
        double worst = 0.0;
        for (std::size_t idx = 0; idx < grid->size(); ++idx)
            worst = std::max(worst, std::abs(rab.alpha_M[idx] - r1.alpha_M[idx] - rb.alpha_M[idx]));
        CHECK(worst <= 1e-15 * std::max(1.0, rab.alpha_M.max_active()));
    }
}

TEST_CASE("deposited kernel integrates to the cell count") {
    const ModelParams p = default_params();
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-25.0, 25.0);
    std::vector<Vec2> tips;
    for (int k = 0; k < 4; ++k) tips.push_back({u(rng), u(rng)});
    auto coarse = make_grid(50.0, 10.0);
    auto fine = make_grid(50.0, 1.0);
    const MollifierPotential V(p.mollifier_radius);
    const double coarse_mass = integrate(deposit(tips, V, coarse));
    const double fine_mass = integrate(deposit(tips, V, fine));
    CHECK(std::abs(coarse_mass / 4.0 - 1.0) < 0.25);
    CHECK(std::abs(fine_mass / 4.0 - 1.0) < 0.01);
}

TEST_CASE("positions outside the domain are rejected") {
    auto grid = make_grid(500.0, 10.0);
    const std::vector<Vec2> bad{{400.0, 400.0}};
    CHECK_THROWS_AS(assemble_rates(bad, {}, default_params(), grid), DomainError);
    CHECK_THROWS_AS(assemble_rates({}, bad, default_params(), grid), DomainError);
    const std::vector<Vec2> rim{{0.0, 500.0}};
    CHECK_NOTHROW(assemble_rates(rim, {}, default_params(), grid));
}
