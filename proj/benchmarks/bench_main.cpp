#include <benchmark/benchmark.h>

#include "magnex/demag.hpp"
#include "magnex/field_terms.hpp"
#include "magnex/fno.hpp"
#include "magnex/physics.hpp"
#include "magnex/problems.hpp"

using namespace magnex;

namespace {

FilmOptions film(int refine) {
    FilmOptions opt;
    opt.refine = refine;
    return opt;
}

void BM_DemagFft(benchmark::State& state) {
    const FilmOptions opt = film(static_cast<int>(state.range(0)));
    const VectorField3 m = perturbed_film_state(opt, 0.1, 1);
    DemagKernel kernel(m.grid());
    VectorField3 h(m.grid());
    for (auto _ : state) {
        h = demag_field_fft(m, kernel);
        benchmark::DoNotOptimize(h.data().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.cells()));
}
BENCHMARK(BM_DemagFft)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_Exchange(benchmark::State& state) {
    const FilmOptions opt = film(static_cast<int>(state.range(0)));
    const VectorField3 m = perturbed_film_state(opt, 0.1, 1);
    const MaterialMap mat(m.grid(), opt.Ms, opt.A, opt.alpha);
    VectorField3 h(m.grid());
    for (auto _ : state) {
        exchange_field(m, mat, BoundaryMode::ZeroFlux, h);
        benchmark::DoNotOptimize(h.data().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(m.cells()));
}
BENCHMARK(BM_Exchange)->Arg(1)->Arg(2)->Unit(benchmark::kMicrosecond);

void BM_NanodotExchangeDmi(benchmark::State& state) {
    const NanodotOptions opt;
    const MaterialMap mat = nanodot_material(opt);
    const VectorField3 m = nanodot_seed(mat, 1, opt.R, opt.D);
    VectorField3 h(m.grid());
    for (auto _ : state) {
        exchange_field(m, mat, BoundaryMode::Chiral, h);
        dmi_field(m, mat, BoundaryMode::Chiral, h);
        benchmark::DoNotOptimize(h.data().data());
    }
}
BENCHMARK(BM_NanodotExchangeDmi)->Unit(benchmark::kMicrosecond);

void BM_Step(benchmark::State& state) {
    FilmOptions opt = film(static_cast<int>(state.range(1)));
    opt.method = state.range(0) ? Method::MriKw3 : Method::RK4;
    PartitionedRHS rhs = film_rhs(opt, opt.alpha);
    rhs.set_bias(BiasSource(film_field(1)));
    VectorField3 m = perturbed_film_state(opt, 0.01, 3);
    IntegratorSpec spec;
    spec.method = opt.method;
    spec.dt = state.range(0) ? 1.25e-13 : 2.5e-14;
    Integrator integ(spec, m.grid());
    double t = 0.0;
    for (auto _ : state) {
        integ.step(rhs, t, m, spec.dt);
        t += spec.dt;
    }
    state.counters["sim_ps_per_s"] =
        benchmark::Counter(spec.dt * 1e12 * static_cast<double>(state.iterations()), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_Step)->ArgNames({"mri", "refine"})->Args({0, 1})->Args({1, 1})->Args({0, 2})->Args({1, 2})
    ->Unit(benchmark::kMillisecond);

void BM_FnoInfer(benchmark::State& state) {
    const FnoModel model = load_model(MAGNEX_FIXTURE_DIR "/fno_160x40.magw");
    const VectorField3 m = perturbed_film_state(FilmOptions{}, 0.1, 1);
    for (auto _ : state) {
        const VectorField3 h = infer_demag(m, model);
        benchmark::DoNotOptimize(h.data().data());
    }
}
BENCHMARK(BM_FnoInfer)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
