#include "epl/experiment.hpp"

#include <benchmark/benchmark.h>

using namespace epl;

namespace {

const EncodedDataset& data()
{
    static const EncodedDataset d = load_experiment_dataset(ExperimentConfig{}).encoded;
    return d;
}

NetworkConfig net_config(int window = NetworkConfig{}.gc_window)
{
    NetworkConfig n;
    n.rng_seed = 1;
    n.gc_window = window;
    return n;
}

void BM_NaiveSniff(benchmark::State& state)
{
    Network net(net_config(), GammaConfig{});
    const auto& x = data().training[0];
    for (auto _ : state)
        benchmark::DoNotOptimize(net.run_sniff(x, Mode::test));
}
BENCHMARK(BM_NaiveSniff);

void BM_OneShotTraining(benchmark::State& state)
{
    const auto& d = data();
    for (auto _ : state) {
        Network net(net_config(), GammaConfig{});
        OdorLibrary lib;
        Rng rng(1);
        benchmark::DoNotOptimize(train_odor(net, d.training[0], d.labels[0], PlasticityConfig{}, lib, rng));
    }
}
BENCHMARK(BM_OneShotTraining)->Unit(benchmark::kMillisecond);

void BM_TrainedSniff(benchmark::State& state)
{
    const auto& d = data();
    const auto odors = static_cast<std::size_t>(state.range(0));
    std::vector<std::string> labels(d.labels.begin(), d.labels.begin() + static_cast<std::ptrdiff_t>(odors));
    std::vector<LevelVector> samples(d.training.begin(), d.training.begin() + static_cast<std::ptrdiff_t>(odors));
    auto tn = train_sequence(net_config(), GammaConfig{}, PlasticityConfig{}, labels, samples, 1);
    Rng rng(2);
    const auto x = occlude(d.training[0], 0.6, rng);
    for (auto _ : state)
        benchmark::DoNotOptimize(tn.net.run_sniff(x, Mode::test));
    state.counters["gcs"] = static_cast<double>(tn.net.num_gcs());
}
BENCHMARK(BM_TrainedSniff)->Arg(1)->Arg(10);

void BM_Classify(benchmark::State& state)
{
    const auto& d = data();
    auto tn = train_sequence(net_config(), GammaConfig{}, PlasticityConfig{}, d.labels, d.training, 1);
    const auto resp = tn.net.run_sniff(d.training[3], Mode::test);
    for (auto _ : state)
        benchmark::DoNotOptimize(classify_sniff(resp, tn.library));
}
BENCHMARK(BM_Classify);

void BM_TvDenoise(benchmark::State& state)
{
    Rng rng(3);
    std::vector<double> v(static_cast<std::size_t>(state.range(0)));
    for (auto& x : v)
        x = rng.uniform(0, 15);
    for (auto _ : state)
        benchmark::DoNotOptimize(tv_denoise_1d(v, 0.5));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_TvDenoise)->RangeMultiplier(4)->Range(72, 72 * 64)->Complexity(benchmark::oN);

void BM_MedianFilter(benchmark::State& state)
{
    Rng rng(4);
    std::vector<double> v(72);
    for (auto& x : v)
        x = rng.uniform(0, 15);
    for (auto _ : state)
        benchmark::DoNotOptimize(median_filter(v, 5));
}
BENCHMARK(BM_MedianFilter);

void BM_PcaFit(benchmark::State& state)
{
    std::vector<std::vector<double>> train;
    for (const auto& t : data().training)
        train.emplace_back(t.values().begin(), t.values().end());
    for (auto _ : state)
        benchmark::DoNotOptimize(PcaModel(train, 5));
}
BENCHMARK(BM_PcaFit);

} // namespace

BENCHMARK_MAIN();
