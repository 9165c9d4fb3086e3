// SPDX-License-Identifier: Apache-2.0
#include <support.hpp>

#include <compagent/assessment.hpp>
#include <compagent/routing.hpp>

#include <benchmark/benchmark.h>

using namespace compagent;

namespace
{

void parse_json_reply(benchmark::State& state)
{
    auto const policy = test::llavaguard();
    auto const text = std::string("Weighing the evidence first.\n```json\n")
                      + R"({"rating": "Unsafe", "category": "O6: Weapons or Substance Abuse", "rationale": "A knife is brandished."})"
                      + "\n```";
    for (auto _: state)
        benchmark::DoNotOptimize(parse_assessment(text, *policy));
}
BENCHMARK(parse_json_reply);

void parse_tagged_reply(benchmark::State& state)
{
    auto const policy = test::llavaguard();
    auto const text = std::string("<rating>Safe</rating>\n<category>NA: None applying</category>\n"
                                  "<rationale>A landscape with no people.</rationale>");
    for (auto _: state)
        benchmark::DoNotOptimize(parse_assessment(text, *policy));
}
BENCHMARK(parse_tagged_reply);

void fuse_outputs(benchmark::State& state)
{
    auto outputs = std::vector<ToolOutput>(4);
    for (auto i = 0u; i < outputs.size(); ++i)
    {
        outputs[i].tool_name = "tool" + std::to_string(i);
        for (auto k = 0; k < 10; ++k)
            outputs[i].detections.push_back({ "object", 0.1 * k, BoundingBox { 0.1, 0.1, 0.2, 0.2 }, std::nullopt });
        outputs[i].summary = "summary text";
    }
    for (auto _: state)
        benchmark::DoNotOptimize(fuse_metadata(outputs));
}
BENCHMARK(fuse_outputs);

} // namespace
