/**
 * Copyright 2026 The RoIMix Toolkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <vector>

#include <benchmark/benchmark.h>

#include "roimix/mixer.hpp"

namespace {

roimix::ImageBuffer noise_image(int w, int h, std::uint64_t seed)
{
    roimix::RandomStream rng(seed);
    std::vector<float> px(static_cast<std::size_t>(w) * h * 3);
    for (auto& v : px) {
        v = static_cast<float>(rng.uniform());
    }
    return roimix::ImageBuffer(w, h, 3, std::move(px));
}

void BM_SampleLambda(benchmark::State& state)
{
    roimix::RandomStream rng(1);
    const double alpha = static_cast<double>(state.range(0)) / 100.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(roimix::sample_lambda(alpha, rng));
    }
}
BENCHMARK(BM_SampleLambda)->Arg(1)->Arg(10)->Arg(100);

void BM_MixRegions(benchmark::State& state)
{
    const int side = static_cast<int>(state.range(0));
    const auto a = noise_image(side, side, 1);
    const auto b = noise_image(side / 2 + 1, side + 7, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(roimix::mix_regions(a, b, 0.7));
    }
}
BENCHMARK(BM_MixRegions)->Arg(32)->Arg(128);

void BM_RoimixBatch(benchmark::State& state)
{
    std::vector<roimix::ImageBuffer> images;
    std::vector<std::vector<roimix::LabeledBox>> anns;
    for (std::uint64_t i = 0; i < 2; ++i) {
        images.push_back(noise_image(320, 240, i));
        anns.push_back({{{20, 30, 120, 110}, "echinus", false}, {{150, 40, 300, 200}, "scallop", false}});
    }
    roimix::MixConfig config = roimix::select_variant("roimix");
    config.proposals_per_image = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(roimix::roimix_batch(images, anns, config));
    }
}
BENCHMARK(BM_RoimixBatch)->Arg(8)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_GaussianBlur(benchmark::State& state)
{
    const auto img = noise_image(320, 240, 3);
    const double sigma = static_cast<double>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(roimix::gaussian_blur(img, sigma));
    }
}
BENCHMARK(BM_GaussianBlur)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
