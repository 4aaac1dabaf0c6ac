#include <benchmark/benchmark.h>

#include <random>
#include <sstream>

#include "nimbus/cloud.hpp"
#include "nimbus/metrics.hpp"
#include "nimbus/profiles.hpp"
#include "nimbus/ras1.hpp"
#include "nimbus/spectral.hpp"

using namespace nimbus;

namespace {

CloudField make_field(int size, std::uint64_t seed) {
    FbmParams p;
    p.seed = seed;
    return generate_fbm_cloud(size, size, p);
}

MultiBandImage make_image(int size, int bands, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> dist(0.0f, 1.0f);
    std::vector<BandRaster> out;
    for (int b = 0; b < bands; ++b) {
        std::vector<float> data(static_cast<std::size_t>(size) * size);
        for (float& v : data)
            v = dist(rng);
        out.emplace_back(size, size, std::nullopt, std::move(data));
    }
    return MultiBandImage(std::move(out));
}

void BM_GenerateFbmCloud(benchmark::State& state) {
    const int size = static_cast<int>(state.range(0));
    FbmParams p;
    std::uint64_t seed = 0;
    for (auto _ : state) {
        p.seed = seed++;
        benchmark::DoNotOptimize(generate_fbm_cloud(size, size, p));
    }
    state.SetItemsProcessed(state.iterations() * size * size);
}
BENCHMARK(BM_GenerateFbmCloud)->Arg(256)->Arg(512);

void BM_ExtrapolateAll(benchmark::State& state) {
    const int size = static_cast<int>(state.range(0));
    const CloudField field = make_field(size, 7);
    const SensorProfile profile = landsat89_profile();
    for (auto _ : state)
        benchmark::DoNotOptimize(extrapolate_all(field, profile));
    state.SetItemsProcessed(state.iterations() * size * size * 5);
}
BENCHMARK(BM_ExtrapolateAll)->Arg(256)->Arg(512);

void BM_LsgfFit(benchmark::State& state) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> cdist(1e-4, 0.2);
    std::normal_distribution<double> noise(0.0, 0.05);
    std::vector<GammaSample> samples;
    samples.reserve(static_cast<std::size_t>(state.range(0)));
    for (std::int64_t i = 0; i < state.range(0); ++i) {
        const double c = cdist(rng);
        samples.push_back({c, -0.14 * std::log(c) + noise(rng)});
    }
    for (auto _ : state)
        benchmark::DoNotOptimize(lsgf_fit(samples, 250, Aggregator::median));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LsgfFit)->Arg(100000)->Arg(1000000);

void BM_Ssim(benchmark::State& state) {
    const int size = static_cast<int>(state.range(0));
    const MultiBandImage a = make_image(size, 1, 1);
    const MultiBandImage b = make_image(size, 1, 2);
    for (auto _ : state)
        benchmark::DoNotOptimize(ssim(a, b));
    state.SetItemsProcessed(state.iterations() * size * size);
}
BENCHMARK(BM_Ssim)->Arg(256)->Arg(512);

void BM_Ras1WriteRead(benchmark::State& state) {
    const MultiBandImage image = make_image(256, 5, 9);
    for (auto _ : state) {
        std::ostringstream buf(std::ios::binary);
        write_raster(image, buf);
        std::istringstream in(buf.str(), std::ios::binary);
        benchmark::DoNotOptimize(read_raster(in));
    }
    state.SetBytesProcessed(state.iterations() * 256 * 256 * 5 * 4);
}
BENCHMARK(BM_Ras1WriteRead);

} // namespace

BENCHMARK_MAIN();
