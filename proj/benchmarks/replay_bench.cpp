// SPDX-License-Identifier: Apache-2.0
#include <support.hpp>

#include <compagent/eval.hpp>
#include <compagent_cli/engine.hpp>

#include <benchmark/benchmark.h>

using namespace compagent;

namespace
{

/// Full bundle replay: engine construction, 12 runs, scoring and report files.
void bundle_replay(benchmark::State& state)
{
    auto const pipeline = static_cast<Pipeline>(state.range(0));
    auto const config = cli::load_engine_config(test::bundle_dir() / "config.json");
    auto out = test::TempDir {};
    for (auto _: state)
    {
        auto engine = cli::build_engine(config, pipeline);
        auto const samples = load_manifest(test::bundle_dir() / "manifest.jsonl", engine.policy.get());
        benchmark::DoNotOptimize(run_benchmark(samples, pipeline, engine.setup, out.path()));
    }
    state.SetLabel(std::string(to_string(pipeline)));
}
BENCHMARK(bundle_replay)
    ->Arg(static_cast<int>(Pipeline::Agentic))
    ->Arg(static_cast<int>(Pipeline::Routing))
    ->Arg(static_cast<int>(Pipeline::ZeroShot))
    ->Unit(benchmark::kMillisecond);

} // namespace
