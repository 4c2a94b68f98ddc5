#include <benchmark/benchmark.h>

#include "pomdpsr/bounds.hpp"
#include "pomdpsr/envs.hpp"
#include "pomdpsr/kernels.hpp"
#include "pomdpsr/pbvi.hpp"

using namespace pomdpsr;

namespace {

const PomdpModel& tag_model() {
    static const PomdpModel m = tag();
    return m;
}

const PomdpSr& delivery() {
    static const PomdpSr p = robot_delivery({});
    return p;
}

Exec exec_of(const benchmark::State& state) { return state.range(0) == 0 ? Exec::Serial : Exec::Parallel; }

void BM_QmdpSweep(benchmark::State& state) {
    const PomdpModel& m = tag_model();
    std::vector<double> in(static_cast<std::size_t>(m.num_states()) * m.num_actions(), 1.0);
    std::vector<double> out(in.size());
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::qmdp_sweep(m, in, out, exec_of(state)));
        in.swap(out);
    }
}
BENCHMARK(BM_QmdpSweep)->Arg(0)->Arg(1)->ArgName("parallel");

void BM_FibSweep(benchmark::State& state) {
    const PomdpModel& m = tag_model();
    const JointTable joint(m);
    std::vector<double> in(static_cast<std::size_t>(m.num_states()) * m.num_actions(), 1.0);
    std::vector<double> out(in.size());
    for (auto _ : state) {
        benchmark::DoNotOptimize(kernels::fib_sweep(m, joint, in, in, out, exec_of(state)));
        in.swap(out);
    }
}
BENCHMARK(BM_FibSweep)->Arg(0)->Arg(1)->ArgName("parallel");

void BM_FibSrSolve(benchmark::State& state) {
    SolverOptions opts;
    opts.exec = exec_of(state);
    for (auto _ : state) benchmark::DoNotOptimize(fib_sr(delivery(), opts));
}
BENCHMARK(BM_FibSrSolve)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_PbviBackup(benchmark::State& state) {
    const BeliefSet points(delivery().model.num_states());
    const AlphaVectorSet start = pbvi_initial_set(delivery(), PbviInit::Blind);
    for (auto _ : state) benchmark::DoNotOptimize(pbvi_sr_backup(delivery(), points, start, exec_of(state)));
}
BENCHMARK(BM_PbviBackup)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
