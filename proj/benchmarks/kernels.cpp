// Hot kernels of the pipeline.  Sizes follow the default scenario where
// that is affordable; the limiting-absorption case uses a smaller box.

#include "solsel/dynamics.hpp"
#include "solsel/experiment.hpp"
#include "solsel/lattice.hpp"
#include "solsel/modulation.hpp"

#include <benchmark/benchmark.h>

using namespace solsel;

namespace {

const ValidationReport& pt2() {
    static const ValidationReport v = validate(builtin_scenario("pt2-generic"));
    return v;
}

ZVec amplitudes() {
    ZVec z(2);
    z << 0.03, 0.03;
    return z;
}

} // namespace

static void BM_SplitStep(benchmark::State& state) {
    const auto& ps = *pt2().profile;
    SplitStepper st(ps.spec->op, ps.nl, 0.005, static_cast<int>(state.range(0)));
    CVec u = assemble_phi(ps, amplitudes());
    for (auto _ : state) {
        st.step(u);
        benchmark::DoNotOptimize(u.data());
    }
    state.SetLabel("n = " + std::to_string(ps.grid().n));
}
BENCHMARK(BM_SplitStep)->Arg(2)->Arg(6)->Unit(benchmark::kMicrosecond);

static void BM_ResolventSolve(benchmark::State& state) {
    const auto& ps = *pt2().profile;
    const MultiIndex m{2, -1};
    const RVec src = ps.nl.derivative_at_zero(1) * ps.spec->phi[0].array().square() * ps.spec->phi[1].array();
    const double lam = m.dot(ps.omega);
    for (auto _ : state) benchmark::DoNotOptimize(resolvent_solve(*ps.spec, lam, src));
}
BENCHMARK(BM_ResolventSolve)->Unit(benchmark::kMillisecond);

static void BM_LimitingAbsorption(benchmark::State& state) {
    auto sc = builtin_scenario("pt2-generic");
    static const SpectralData s = discrete_spectrum(build_operator(Grid(30.0, 2048), sc.potential), 4);
    const RVec f = s.phi[0].array() * s.phi[1].array().square();
    const double lam = 2 * s.omega[1] - s.omega[0];
    for (auto _ : state) benchmark::DoNotOptimize(limiting_absorption(s, lam, CVec(project_continuous(s, f).cast<cplx>())));
}
BENCHMARK(BM_LimitingAbsorption)->Unit(benchmark::kMillisecond);

static void BM_ModulationExtract(benchmark::State& state) {
    const auto& ps = *pt2().profile;
    const CVec u = assemble_phi(ps, amplitudes());
    const ZVec guess = linear_guess(ps, u);
    for (auto _ : state) benchmark::DoNotOptimize(extract(ps, u, guess));
}
BENCHMARK(BM_ModulationExtract)->Unit(benchmark::kMillisecond);

static void BM_IndexSets(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    std::vector<double> w;
    for (int j = 0; j < N; ++j) w.push_back(-2.9 + 0.83 * j + 0.017 * j * j);
    for (auto _ : state) benchmark::DoNotOptimize(index_sets_upto(w, 8));
}
BENCHMARK(BM_IndexSets)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_ProfileAssemble(benchmark::State& state) {
    const auto& ps = *pt2().profile;
    const ZVec z = amplitudes();
    for (auto _ : state) benchmark::DoNotOptimize(assemble_phi(ps, z));
}
BENCHMARK(BM_ProfileAssemble)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
