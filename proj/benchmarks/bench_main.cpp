#include <benchmark/benchmark.h>

#include <numeric>

#include "mcprox/calibration.hpp"
#include "mcprox/decision_tree.hpp"
#include "mcprox/features.hpp"
#include "mcprox/matching.hpp"
#include "mcprox/random_forest.hpp"
#include "mcprox/roll_tracing.hpp"
#include "mcprox/synth.hpp"

using namespace mcprox;

namespace {

const std::vector<double> kDistances{50, 100, 150, 200, 250, 300, 350, 400, 500, 600};

Dataset full_features(std::size_t rows_per_distance) {
    const auto rows = synthesize_matched(ChannelProfile::defaults(), "bench", "office", kDistances,
                                         rows_per_distance, 1);
    return Dataset::from_samples(rows, FeatureSet::Full);
}

}  // namespace

static void BM_BestSplit(benchmark::State& state) {
    const auto data = full_features(std::size_t(state.range(0)) / kDistances.size());
    std::vector<std::size_t> rows(data.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    std::vector<std::size_t> features(data.n_features());
    std::iota(features.begin(), features.end(), std::size_t{0});
    for (auto _ : state) benchmark::DoNotOptimize(best_split(data, rows, features));
    state.SetItemsProcessed(state.iterations() * std::int64_t(data.size()));
}
BENCHMARK(BM_BestSplit)->Arg(1000)->Arg(10000)->Arg(100000);

static void BM_TreeFit(benchmark::State& state) {
    const auto data = full_features(std::size_t(state.range(0)) / kDistances.size());
    for (auto _ : state) benchmark::DoNotOptimize(DecisionTree::fit(data, TreeParams{}));
    state.SetItemsProcessed(state.iterations() * std::int64_t(data.size()));
}
BENCHMARK(BM_TreeFit)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_ForestFit(benchmark::State& state) {
    const auto data = full_features(1000);
    ForestParams p;
    p.n_trees = std::size_t(state.range(0));
    p.tree.features_per_split = 2;
    for (auto _ : state) benchmark::DoNotOptimize(RandomForest::fit(data, p));
}
BENCHMARK(BM_ForestFit)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

static void BM_ForestPredict(benchmark::State& state) {
    const auto data = full_features(500);
    ForestParams p;
    p.n_trees = 100;
    p.tree.features_per_split = 2;
    const auto forest = RandomForest::fit(data, p);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(forest.predict(data.row(i)));
        i = (i + 1) % data.size();
    }
}
BENCHMARK(BM_ForestPredict);

static void BM_SolveCorrection(benchmark::State& state) {
    std::vector<ProfileEntry> entries;
    Rng rng(2);
    for (int i = 0; i < state.range(0); ++i)
        entries.push_back({50.0 * double(1 + uniform_index(rng, 12)), -40 - 40 * uniform_unit(rng), 1});
    entries.push_back({50, -45, 1});
    for (auto _ : state) benchmark::DoNotOptimize(solve_device_correction(entries, 0));
}
BENCHMARK(BM_SolveCorrection)->Arg(12)->Arg(120);

static void BM_TraceAndMatch(benchmark::State& state) {
    SynthScenario sc;
    SynthRun run;
    run.run_id = "bench";
    run.setup = Setup::Scenario;
    run.duration_s = double(state.range(0));
    run.devices = default_devices();
    double d = 50;
    for (auto& dev : run.devices) {
        dev.distance_cm = d += 120;
        dev.roll_period_s = 60;
    }
    sc.runs = {run};
    const auto out = generate_synthetic(sc);
    AssemblyOptions opt;
    opt.fingerprint_to_device = out.fingerprint_to_device;
    for (auto _ : state) benchmark::DoNotOptimize(assemble_matched(out.ble, out.wifi, out.metadata, opt));
    state.SetItemsProcessed(state.iterations() * std::int64_t(out.ble.size()));
}
BENCHMARK(BM_TraceAndMatch)->Arg(600)->Arg(3600)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
