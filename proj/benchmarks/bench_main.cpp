#include <benchmark/benchmark.h>

#include "tdgs/class_structure.hpp"
#include "tdgs/data_model.hpp"
#include "tdgs/experiment.hpp"
#include "tdgs/pairing.hpp"
#include "tdgs/svm_smo.hpp"

using namespace tdgs;

namespace {

const std::vector<Shot>& default_shots() {
    static const std::vector<Shot> shots = [] {
        SynthesisParams p;
        p.faults_per_shot = {1, 1, 0, 2, 0, 1, 1};
        return synthesize(p);
    }();
    return shots;
}

}  // namespace

static void BM_Features(benchmark::State& state) {
    const auto& shot = default_shots().front();
    FeatureConfig cfg;
    cfg.append_diff = state.range(0) != 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(features(shot.channels[0], shot.channels[1], cfg));
    }
}
BENCHMARK(BM_Features)->Arg(0)->Arg(1);

static void BM_BuildPairs(benchmark::State& state) {
    const auto& shots = default_shots();
    for (auto _ : state) {
        auto pairs = build_pairs(shots);
        benchmark::DoNotOptimize(pairs.data());
    }
    state.SetItemsProcessed(state.iterations() * 385);
}
BENCHMARK(BM_BuildPairs)->Unit(benchmark::kMillisecond);

static void BM_TrainSmo(benchmark::State& state) {
    const auto set = labeled_rows(build_pairs(default_shots()));
    TrainConfig cfg;
    cfg.penalty_c = static_cast<double>(state.range(0));
    for (auto _ : state) {
        auto model = train(set.x, set.y, cfg);
        benchmark::DoNotOptimize(model.bias);
    }
}
BENCHMARK(BM_TrainSmo)->Arg(1)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_ClassRatios(benchmark::State& state) {
    const StructureSpec spec(11, {1, 1, 0, 2, 0, 1, 1, 3, 0, 2, 1, 4});
    for (auto _ : state) benchmark::DoNotOptimize(class_ratios(spec));
}
BENCHMARK(BM_ClassRatios);
BENCHMARK_MAIN();
