// serial vs OpenMP right-hand side and full RK4 step on the radial grid
#include <benchmark/benchmark.h>

#include "mis/certifier.hpp"
#include "mis/cli.hpp"
#include "mis/solver.hpp"

using namespace mis;

namespace {

struct Case {
    ConstitutiveSet set;
    ShellData data;
    Grid1D grid;
    Fields fields;

    explicit Case(int cells) {
        set.eos = IdealGasEos{4.0 / 3.0, 1.0};
        set.zeta_model = PowerExpZeta{1.0, 1.0, 1.0, 0.0};
        data.ell = 0.06;
        data.smooth_w = 0.03;
        data.sigma = 17.0;
        data.background = {1.0, 0.5};
        data.rho_contrast = 100.0;
        data.n_contrast = 100.0;
        grid = Grid1D::make(GridKind::radial, cells, 1.2);
        fields = initial_fields(grid, cli::shell_profile(data, GridKind::radial));
        fill_ghosts(grid, data.background, fields);
    }
};

template <bool Parallel>
void rhs(benchmark::State& state) {
    Case c(static_cast<int>(state.range(0)));
    Fields out(c.grid.cells);
    const SchemeOptions scheme;
    for (auto _ : state) {
        if constexpr (Parallel)
            rhs_parallel(c.grid, c.set, scheme, c.fields, out);
        else
            rhs_serial(c.grid, c.set, scheme, c.fields, out);
        benchmark::DoNotOptimize(out);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void step(benchmark::State& state) {
    Case c(static_cast<int>(state.range(0)));
    StepWorkspace ws(c.grid.cells);
    const SchemeOptions scheme;
    const double dt = 0.1 * scheme.cfl * c.grid.spacing;
    for (auto _ : state) {
        rk4_step(c.grid, c.set, c.data.background, scheme, dt, c.fields, ws, Parallel);
        benchmark::DoNotOptimize(c.fields);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(rhs<false>)->Name("rhs_serial")->RangeMultiplier(4)->Range(1 << 10, 1 << 16);
BENCHMARK(rhs<true>)->Name("rhs_parallel")->RangeMultiplier(4)->Range(1 << 10, 1 << 16);
BENCHMARK(step<false>)->Name("rk4_serial")->Arg(2000)->Arg(16000);
BENCHMARK(step<true>)->Name("rk4_parallel")->Arg(2000)->Arg(16000);

BENCHMARK_MAIN();
