#include <benchmark/benchmark.h>

#include "curvatlas/capacity.hpp"
#include "curvatlas/counting.hpp"
#include "curvatlas/crossings.hpp"
#include "curvatlas/generators.hpp"
#include "curvatlas/metric.hpp"

using namespace curvatlas;

static void BM_PartitionCount(benchmark::State& state) {
    const PolyCurve koch = gen_fixture(FixtureKind::koch, static_cast<int>(state.range(0)));
    const double l = 1.0 / 64.0;
    for (auto _ : state) benchmark::DoNotOptimize(partition_count(koch, l));
}
BENCHMARK(BM_PartitionCount)->Arg(4)->Arg(6);

static void BM_BoxCount(benchmark::State& state) {
    const PolyCurve koch = gen_fixture(FixtureKind::koch, static_cast<int>(state.range(0)));
    const double l = 1.0 / 64.0;
    for (auto _ : state) benchmark::DoNotOptimize(box_count(koch, l));
}
BENCHMARK(BM_BoxCount)->Arg(4)->Arg(6);

static void BM_ShellTraversals(benchmark::State& state) {
    const PolyCurve koch = gen_fixture(FixtureKind::koch, 6);
    Shell sh;
    sh.center = koch.at(0.5 * koch.length());
    sh.inner = 0.05;
    sh.outer = 0.2;
    for (auto _ : state) benchmark::DoNotOptimize(shell_traversals(koch, sh));
}
BENCHMARK(BM_ShellTraversals);

static void BM_Frechet(benchmark::State& state) {
    const PolyCurve a = gen_fixture(FixtureKind::koch, 5);
    PolyCurve b = gen_fixture(FixtureKind::staircase, 7);
    for (auto _ : state) benchmark::DoNotOptimize(curve_distance(a, b));
}
BENCHMARK(BM_Frechet);

static void BM_CapacityQP(benchmark::State& state) {
    const PolyCurve koch = gen_fixture(FixtureKind::koch, 6);
    const FractalHierarchy h = build_hierarchy(koch, 5.0, 4, 2);
    const DiscreteMeasure mu = hierarchy_measure(h);
    for (auto _ : state)
        benchmark::DoNotOptimize(capacity_qp(mu.support, 1.1, 0.0, 1e-8));
}
BENCHMARK(BM_CapacityQP);

BENCHMARK_MAIN();
