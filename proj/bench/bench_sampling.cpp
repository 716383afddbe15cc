#include <benchmark/benchmark.h>

#include "pbc/scenario_io.hpp"
#include "pbc/verification.hpp"

namespace {

const pbc::Scenario& scenario(const char* name) {
    static const pbc::Scenario coupling = pbc::load_scenario("coupling-device-ii");
    static const pbc::Scenario rlc = pbc::load_scenario("rlc-default");
    return std::string(name) == "rlc" ? rlc : coupling;
}

void cyclo(benchmark::State& state, const char* which, pbc::Exec exec) {
    const auto& sc = scenario(which);
    pbc::SampleSpec box = sc.box;
    box.count = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(pbc::check_cyclo_passivity(sc.plant, box, 1e-8, exec));
    state.SetItemsProcessed(state.iterations() * box.count);
}

void assumption3(benchmark::State& state, pbc::Exec exec) {
    const auto& sc = scenario("coupling");
    pbc::SampleSpec box = sc.box;
    box.count = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(pbc::check_assumption3(sc.plant, box, sc.u_bound, 1e-8, exec));
    state.SetItemsProcessed(state.iterations() * box.count);
}

void integrability(benchmark::State& state, pbc::Exec exec) {
    const auto& sc = scenario("rlc");
    pbc::SampleSpec box = sc.box;
    box.count = static_cast<int>(state.range(0));
    const auto pts = pbc::draw_samples(box);
    const auto bm = *sc.bm;
    for (auto _ : state)
        benchmark::DoNotOptimize(
            pbc::worst_case(pts, [&bm](const pbc::Vector& x) { return pbc::bm_integrability_residual(bm, x); }, exec));
    state.SetItemsProcessed(state.iterations() * box.count);
}

}  // namespace

BENCHMARK_CAPTURE(cyclo, coupling_serial, "coupling", pbc::Exec::serial)->Arg(1000)->Arg(10000);
BENCHMARK_CAPTURE(cyclo, coupling_parallel, "coupling", pbc::Exec::parallel)->Arg(1000)->Arg(10000);
BENCHMARK_CAPTURE(cyclo, rlc_serial, "rlc", pbc::Exec::serial)->Arg(1000)->Arg(10000);
BENCHMARK_CAPTURE(cyclo, rlc_parallel, "rlc", pbc::Exec::parallel)->Arg(1000)->Arg(10000);
BENCHMARK_CAPTURE(assumption3, serial, pbc::Exec::serial)->Arg(1000);
BENCHMARK_CAPTURE(assumption3, parallel, pbc::Exec::parallel)->Arg(1000);
BENCHMARK_CAPTURE(integrability, serial, pbc::Exec::serial)->Arg(1000);
BENCHMARK_CAPTURE(integrability, parallel, pbc::Exec::parallel)->Arg(1000);

BENCHMARK_MAIN();
