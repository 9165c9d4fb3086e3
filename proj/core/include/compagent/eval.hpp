// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compagent/assessment.hpp>
#include <compagent/image.hpp>
#include <compagent/llm_client.hpp>
#include <compagent/planner.hpp>
#include <compagent/policy.hpp>
#include <compagent/routing.hpp>
#include <compagent/tool_suite.hpp>
#include <compagent/trace.hpp>

#include <nlohmann/json.hpp>

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace compagent
{

struct Sample
{
    std::string id;
    ImageRef image; // image.id == id
    Rating label = Rating::Safe;
    std::optional<CategoryLabel> category;
};

/// Line-delimited {id, image, label: "safe"|"unsafe", category: string|null}.
/// Image paths resolve against the manifest's directory. Categories are
/// normalized against `policy` when given, else kept by their code token.
/// Throws Error{ManifestParse | DuplicateSampleId | Io} naming the line.
auto load_manifest(const std::filesystem::path& path, const Policy* policy = nullptr) -> std::vector<Sample>;
auto parse_manifest(std::string_view text, const std::filesystem::path& base_dir, const Policy* policy = nullptr,
                    std::string_view origin = "<manifest>") -> std::vector<Sample>;

/// Positive class is Unsafe.
struct ConfusionCounts
{
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;

    [[nodiscard]] auto total() const noexcept -> std::size_t { return tp + fp + fn + tn; }
    void add(Rating truth, Rating predicted) noexcept;

    auto operator==(const ConfusionCounts&) const -> bool = default;
};

struct MetricsReport
{
    double unsafe_precision = 0;
    double unsafe_recall = 0;
    double unsafe_f1 = 0;
    double safe_f1 = 0;
    double accuracy = 0;
    double macro_f1 = 0;
    ConfusionCounts counts;
    std::map<std::string, ConfusionCounts> per_category; // ground-truth code, "NA" or "unlabeled"
    std::size_t failures = 0;                            // failed or missing predictions
};

/// Harmonic mean; 0 when p + r == 0.
auto f1_score(double precision, double recall) -> double;

/// The five metrics from counts alone (zero denominators give 0).
auto metrics_from_counts(const ConfusionCounts& counts) -> MetricsReport;

/// Failed runs (nullopt) and missing ids score as Safe/NA and count as
/// failures.
auto score(const std::map<std::string, std::optional<Assessment>>& predictions, std::span<const Sample> truth)
    -> MetricsReport;

struct TrajectoryStats
{
    std::size_t distinct = 0;
    std::map<std::vector<std::string>, std::size_t> histogram;
};

auto count_trajectories(std::span<const TraceRecord> traces) -> TrajectoryStats;

enum class Pipeline
{
    Agentic,
    Routing,
    ZeroShot,
};

auto to_string(Pipeline pipeline) -> std::string_view;
auto parse_pipeline(std::string_view name) -> std::optional<Pipeline>;

/// Everything a benchmark run needs. `llm` must tolerate concurrent calls
/// when `workers` > 1; the registry carries the ablation.
struct BenchmarkSetup
{
    std::shared_ptr<const Policy> policy;
    const ToolRegistry* registry = nullptr;
    ChatClient* llm = nullptr;
    RunConfig run {};
    ClusterMap clusters = ClusterMap::defaults();
    ModelSettings router { "router", {} };
    ModelSettings assessor { "assessor", {} };
    std::size_t workers = 4;
    bool include_timings = false;
};

/// Runs one sample through `pipeline`. Never throws for run errors: the
/// returned trace carries `error` and no assessment instead.
auto run_sample(const Sample& sample, Pipeline pipeline, const BenchmarkSetup& setup) -> TraceRecord;

struct BenchmarkResult
{
    MetricsReport report;
    std::vector<TraceRecord> traces; // sorted by sample id
    std::filesystem::path trace_log;
    std::filesystem::path report_json;
    std::filesystem::path report_text;
};

/// Verifies every sample with at most `workers` concurrent runs, scores,
/// and writes traces.jsonl, report.json and report.txt into `out_dir`.
/// Throws Error{Config} on an unusable setup.
auto run_benchmark(std::span<const Sample> samples, Pipeline pipeline, const BenchmarkSetup& setup,
                   const std::filesystem::path& out_dir) -> BenchmarkResult;

/// Full-precision report document.
auto report_to_json(const MetricsReport& report, Pipeline pipeline, const std::vector<std::string>& disabled)
    -> nlohmann::json;

/// Fixed-width metrics table with two decimals.
auto render_report_table(const MetricsReport& report, Pipeline pipeline, const std::vector<std::string>& disabled)
    -> std::string;

} // namespace compagent
