// SPDX-License-Identifier: Apache-2.0
#include <support.hpp>

#include <compagent/eval.hpp>

#include <benchmark/benchmark.h>

#include <random>

using namespace compagent;

namespace
{

void score_samples(benchmark::State& state)
{
    auto const n = static_cast<std::size_t>(state.range(0));
    auto rng = std::mt19937(1);
    auto samples = std::vector<Sample> {};
    auto predictions = std::map<std::string, std::optional<Assessment>> {};
    for (auto i = std::size_t { 0 }; i < n; ++i)
    {
        auto const id = "s" + std::to_string(i);
        samples.push_back({ id, test::test_image(id), (rng() & 1) ? Rating::Unsafe : Rating::Safe, std::nullopt });
        predictions[id] = Assessment { (rng() & 1) ? Rating::Unsafe : Rating::Safe, CategoryLabel::na(), "r" };
    }
    for (auto _: state)
        benchmark::DoNotOptimize(score(predictions, samples));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(score_samples)->Arg(1290)->Arg(2037);

void trajectories(benchmark::State& state)
{
    auto const pool = std::vector<std::string> { "image_summary", "object_detection", "face_detection", "safe_clip" };
    auto rng = std::mt19937(2);
    auto traces = std::vector<TraceRecord>(static_cast<std::size_t>(state.range(0)));
    for (auto& t: traces)
        for (auto k = rng() % 6; k > 0; --k)
            t.trajectory.push_back(pool[rng() % pool.size()]);
    for (auto _: state)
        benchmark::DoNotOptimize(count_trajectories(traces));
}
BENCHMARK(trajectories)->Arg(1290);

} // namespace
