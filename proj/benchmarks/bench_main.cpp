#include <benchmark/benchmark.h>

#include <random>

#include "angio/engine.hpp"

using namespace angio;

namespace {

SimConfig bench_config(double h) {
    SimConfig c;
    c.h = h;
    c.seed = 1;
    return c;
}

}  // namespace

static void BM_AssembleRates(benchmark::State& state) {
    const ModelParams p = default_params();
    auto grid = make_grid(p.domain_radius, 10.0);
    const MollifierPotential kernel(p.mollifier_radius);
    const CellPopulation cells = place_cells(2, static_cast<int>(state.range(0)), 325.0, 375.0, {1, 0});
    for (auto _ : state) {
        RateFields r = assemble_rates(cells.tips, cells.stalks, p, grid, kernel);
        benchmark::DoNotOptimize(r.alpha_V.values().data());
    }
}
BENCHMARK(BM_AssembleRates)->Arg(200)->Arg(2000);

static void BM_StrainEnergy(benchmark::State& state) {
    const ModelParams p = default_params();
    const CellPopulation cells = place_cells(2, static_cast<int>(state.range(0)), 325.0, 375.0, {1, 0});
    for (auto _ : state) {
        for (std::size_t k = 0; k < cells.stalks.size(); ++k)
            benchmark::DoNotOptimize(strain_energy({CellKind::Stalk, k}, cells, 0.2, p));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long long>(cells.stalks.size()));
}
BENCHMARK(BM_StrainEnergy)->Arg(200);

static void BM_ProteinSolve(benchmark::State& state) {
    const ModelParams p = default_params();
    const double h = static_cast<double>(state.range(0));
    Simulation sim(bench_config(h), p);
    const SimState& s = sim.state();
    const ProteinStepOptions opt{.tau = 1.0, .mode = ReactionMode::ImplicitSinks};
    const PentaSystem sys = assemble_system(s.c, s.f, s.rates, Species::V, opt, p);
    for (auto _ : state) {
        SolveResult r = solve_system(sys, 1e-10, 10000);
        benchmark::DoNotOptimize(r.x.data());
        state.counters["iterations"] = r.iterations;
    }
}
BENCHMARK(BM_ProteinSolve)->Arg(10)->Arg(5)->Unit(benchmark::kMillisecond);

static void BM_AdvanceStep(benchmark::State& state) {
    Simulation sim(bench_config(10.0), default_params());
    for (auto _ : state) sim.advance();
}
BENCHMARK(BM_AdvanceStep)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
