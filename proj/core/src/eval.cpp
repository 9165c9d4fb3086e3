// SPDX-License-Identifier: Apache-2.0
#include <compagent/eval.hpp>

#include "text_util.hpp"

#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

namespace compagent
{

// {{{ manifest

namespace
{

auto manifest_error(std::string_view origin, std::size_t line, std::string_view what) -> Error
{
    return Error(ErrorKind::ManifestParse, fmt::format("{}:{}: {}", origin, line, what));
}

auto category_token(std::string_view raw) -> CategoryLabel
{
    auto token = detail::trim(raw.substr(0, std::min(raw.find(':'), raw.size())));
    if (detail::iequals(token, "NA"))
        return CategoryLabel::na();
    return CategoryLabel::of(std::string(token));
}

auto category_key(const std::optional<CategoryLabel>& label) -> std::string
{
    if (!label)
        return "unlabeled";
    return label->is_na() ? "NA" : label->code();
}

} // namespace

auto parse_manifest(std::string_view text, const std::filesystem::path& base_dir, const Policy* policy,
                    std::string_view origin) -> std::vector<Sample>
{
    auto samples = std::vector<Sample> {};
    auto seen = std::set<std::string> {};
    auto stream = std::istringstream(std::string(text));
    auto line_no = std::size_t { 0 };
    for (auto line = std::string {}; std::getline(stream, line);)
    {
        ++line_no;
        if (detail::trim(line).empty())
            continue;

        auto const json = nlohmann::json::parse(line, nullptr, false);
        if (json.is_discarded() || !json.is_object())
            throw manifest_error(origin, line_no, "not a JSON object");

        auto const field = [&](std::string_view name) -> std::string {
            auto const it = json.find(name);
            if (it == json.end() || !it->is_string() || it->get<std::string>().empty())
                throw manifest_error(origin, line_no, fmt::format("field '{}' must be a non-empty string", name));
            return it->get<std::string>();
        };

        auto sample = Sample {};
        sample.id = field("id");
        if (!seen.insert(sample.id).second)
            throw Error(ErrorKind::DuplicateSampleId,
                        fmt::format("{}:{}: duplicate sample id '{}'", origin, line_no, sample.id));

        auto const image_path = std::filesystem::path(field("image"));
        auto const location = is_remote_location(image_path.string()) || image_path.is_absolute()
                                  ? image_path
                                  : base_dir / image_path;
        sample.image = ImageRef { sample.id, location.string(), guess_media_type(image_path), std::nullopt };

        auto const label = detail::to_lower(field("label"));
        if (label == "safe")
            sample.label = Rating::Safe;
        else if (label == "unsafe")
            sample.label = Rating::Unsafe;
        else
            throw manifest_error(origin, line_no, fmt::format("label '{}' is neither safe nor unsafe", label));

        if (auto const it = json.find("category"); it != json.end() && !it->is_null())
        {
            if (!it->is_string())
                throw manifest_error(origin, line_no, "category must be a string or null");
            try
            {
                sample.category = policy ? normalize_category(it->get<std::string>(), *policy)
                                         : category_token(it->get<std::string>());
            }
            catch (const Error& e)
            {
                throw manifest_error(origin, line_no, e.what());
            }
        }
        samples.push_back(std::move(sample));
    }
    return samples;
}

auto load_manifest(const std::filesystem::path& path, const Policy* policy) -> std::vector<Sample>
{
    auto in = std::ifstream(path);
    if (!in)
        throw Error(ErrorKind::Io, fmt::format("cannot open manifest {}", path.string()));
    auto buffer = std::stringstream {};
    buffer << in.rdbuf();
    return parse_manifest(buffer.str(), path.parent_path(), policy, path.string());
}

// }}}

// {{{ metrics

void ConfusionCounts::add(Rating truth, Rating predicted) noexcept
{
    auto const unsafe_truth = truth == Rating::Unsafe;
    auto const unsafe_pred = predicted == Rating::Unsafe;
    if (unsafe_truth && unsafe_pred)
        ++tp;
    else if (unsafe_pred)
        ++fp;
    else if (unsafe_truth)
        ++fn;
    else
        ++tn;
}

namespace
{

auto ratio(std::size_t num, std::size_t den) -> double
{
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

} // namespace

auto f1_score(double precision, double recall) -> double
{
    return precision + recall == 0.0 ? 0.0 : 2.0 * precision * recall / (precision + recall);
}

auto metrics_from_counts(const ConfusionCounts& counts) -> MetricsReport
{
    auto report = MetricsReport {};
    report.counts = counts;
    report.unsafe_precision = ratio(counts.tp, counts.tp + counts.fp);
    report.unsafe_recall = ratio(counts.tp, counts.tp + counts.fn);
    report.unsafe_f1 = f1_score(report.unsafe_precision, report.unsafe_recall);
    report.safe_f1 = f1_score(ratio(counts.tn, counts.tn + counts.fn), ratio(counts.tn, counts.tn + counts.fp));
    report.accuracy = ratio(counts.tp + counts.tn, counts.total());
    report.macro_f1 = (report.unsafe_f1 + report.safe_f1) / 2.0;
    return report;
}

auto score(const std::map<std::string, std::optional<Assessment>>& predictions, std::span<const Sample> truth)
    -> MetricsReport
{
    auto counts = ConfusionCounts {};
    auto per_category = std::map<std::string, ConfusionCounts> {};
    auto failures = std::size_t { 0 };
    for (auto const& sample: truth)
    {
        auto predicted = Rating::Safe;
        auto const it = predictions.find(sample.id);
        if (it == predictions.end() || !it->second)
            ++failures;
        else
            predicted = it->second->rating;
        counts.add(sample.label, predicted);
        per_category[category_key(sample.category)].add(sample.label, predicted);
    }
    auto report = metrics_from_counts(counts);
    report.per_category = std::move(per_category);
    report.failures = failures;
    return report;
}

auto count_trajectories(std::span<const TraceRecord> traces) -> TrajectoryStats
{
    auto stats = TrajectoryStats {};
    for (auto const& trace: traces)
        ++stats.histogram[trace.trajectory];
    stats.distinct = stats.histogram.size();
    return stats;
}

// }}}

// {{{ benchmark

auto to_string(Pipeline pipeline) -> std::string_view
{
    switch (pipeline)
    {
        case Pipeline::Agentic: return "agentic";
        case Pipeline::Routing: return "routing";
        case Pipeline::ZeroShot: return "zero_shot";
    }
    return "agentic";
}

auto parse_pipeline(std::string_view name) -> std::optional<Pipeline>
{
    for (auto const p: { Pipeline::Agentic, Pipeline::Routing, Pipeline::ZeroShot })
        if (to_string(p) == name)
            return p;
    return std::nullopt;
}

auto run_sample(const Sample& sample, Pipeline pipeline, const BenchmarkSetup& setup) -> TraceRecord
{
    try
    {
        switch (pipeline)
        {
            case Pipeline::Agentic:
                return run_verification(sample.image, setup.policy, *setup.registry, *setup.llm, setup.run);
            case Pipeline::Routing:
                return assess_with_routing(sample.image, setup.policy, *setup.registry, setup.clusters, *setup.llm,
                                           setup.router, setup.assessor);
            case Pipeline::ZeroShot: return zero_shot_assess(sample.image, setup.policy, *setup.llm, setup.assessor);
        }
    }
    catch (const RunFailure& e)
    {
        return e.partial_trace();
    }
    catch (const Error& e)
    {
        auto trace = TraceRecord {};
        trace.image_id = sample.id;
        trace.policy_id = setup.policy->id;
        trace.pipeline = std::string(to_string(pipeline));
        trace.error = fmt::format("{}: {}", to_string(e.kind()), e.what());
        return trace;
    }
    throw Error(ErrorKind::Config, "unknown pipeline");
}

auto report_to_json(const MetricsReport& report, Pipeline pipeline, const std::vector<std::string>& disabled)
    -> nlohmann::json
{
    auto const counts_json = [](const ConfusionCounts& c) {
        return nlohmann::json { { "tp", c.tp }, { "fp", c.fp }, { "fn", c.fn }, { "tn", c.tn } };
    };
    auto per_category = nlohmann::json::object();
    for (auto const& [key, counts]: report.per_category)
        per_category[key] = counts_json(counts);

    return nlohmann::json {
        { "pipeline", to_string(pipeline) },
        { "disabled", disabled },
        { "samples", report.counts.total() },
        { "failures", report.failures },
        { "counts", counts_json(report.counts) },
        { "metrics",
          { { "unsafe_f1", report.unsafe_f1 },
            { "unsafe_precision", report.unsafe_precision },
            { "unsafe_recall", report.unsafe_recall },
            { "accuracy", report.accuracy },
            { "macro_f1", report.macro_f1 },
            { "safe_f1", report.safe_f1 } } },
        { "per_category", per_category },
    };
}

auto render_report_table(const MetricsReport& report, Pipeline pipeline, const std::vector<std::string>& disabled)
    -> std::string
{
    auto out = fmt::format("{:<12} {:>9} {:>12} {:>13} {:>6} {:>8}\n", "Pipeline", "Unsafe F1", "Unsafe Prec.",
                           "Unsafe Recall", "Acc.", "Macro F1");
    out += fmt::format("{:<12} {:>9.2f} {:>12.2f} {:>13.2f} {:>6.2f} {:>8.2f}\n", to_string(pipeline), report.unsafe_f1,
                       report.unsafe_precision, report.unsafe_recall, report.accuracy, report.macro_f1);
    out += fmt::format("samples {}  tp {}  fp {}  fn {}  tn {}  failures {}\n", report.counts.total(), report.counts.tp,
                       report.counts.fp, report.counts.fn, report.counts.tn, report.failures);
    if (!disabled.empty())
        out += fmt::format("ablation: disabled {}\n", fmt::join(disabled, ", "));
    return out;
}

auto run_benchmark(std::span<const Sample> samples, Pipeline pipeline, const BenchmarkSetup& setup,
                   const std::filesystem::path& out_dir) -> BenchmarkResult
{
    if (!setup.policy || !setup.registry || !setup.llm)
        throw Error(ErrorKind::Config, "benchmark setup needs a policy, a tool registry and a chat client");
    if (pipeline == Pipeline::Agentic)
        setup.run.validate();
    if (pipeline == Pipeline::Routing)
        setup.clusters.validate(*setup.registry);

    auto traces = std::vector<TraceRecord>(samples.size());
    auto next = std::atomic<std::size_t> { 0 };
    auto const worker = [&] {
        for (auto i = next++; i < samples.size(); i = next++)
            traces[i] = run_sample(samples[i], pipeline, setup);
    };
    {
        auto const count = std::clamp<std::size_t>(setup.workers, 1, std::max<std::size_t>(samples.size(), 1));
        auto pool = std::vector<std::jthread> {};
        for (auto w = std::size_t { 0 }; w < count; ++w)
            pool.emplace_back(worker);
    }

    auto predictions = std::map<std::string, std::optional<Assessment>> {};
    for (auto const& trace: traces)
        predictions[trace.image_id] = trace.assessment;
    std::stable_sort(traces.begin(), traces.end(), [](auto const& a, auto const& b) { return a.image_id < b.image_id; });

    auto const disabled_set = setup.registry->disabled_sets();
    auto const disabled = std::vector<std::string>(disabled_set.begin(), disabled_set.end());

    auto result = BenchmarkResult {};
    result.report = score(predictions, samples);
    std::filesystem::create_directories(out_dir);
    result.trace_log = out_dir / "traces.jsonl";
    result.report_json = out_dir / "report.json";
    result.report_text = out_dir / "report.txt";
    write_trace_log(result.trace_log, traces, setup.include_timings);

    auto json_out = std::ofstream(result.report_json, std::ios::binary);
    json_out << report_to_json(result.report, pipeline, disabled).dump(2, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
    auto text_out = std::ofstream(result.report_text, std::ios::binary);
    text_out << render_report_table(result.report, pipeline, disabled);
    if (!json_out || !text_out)
        throw Error(ErrorKind::Io, fmt::format("cannot write reports into {}", out_dir.string()));

    result.traces = std::move(traces);
    return result;
}

// }}}

} // namespace compagent
