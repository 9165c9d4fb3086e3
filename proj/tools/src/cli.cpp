// SPDX-License-Identifier: Apache-2.0
#include <compagent_cli/cli.hpp>
#include <compagent_cli/engine.hpp>

#include <compagent/bundle.hpp>
#include <compagent/error.hpp>
#include <compagent/eval.hpp>
#include <compagent/image.hpp>
#include <compagent/routing.hpp>
#include <compagent/trace.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include <algorithm>
#include <filesystem>
#include <sstream>

namespace compagent::cli
{

namespace fs = std::filesystem;

namespace
{

struct CommonFlags
{
    std::string config;
    std::string mode;
    std::string pipeline = "agentic";
    std::vector<std::string> disable;
    int max_steps = 0;
    std::string out = "compagent-out";
};

void add_common(CLI::App& cmd, CommonFlags& flags)
{
    cmd.add_option("--config", flags.config, "Engine configuration file")->required();
    cmd.add_option("--mode", flags.mode, "live or replay (overrides the config)")
        ->check(CLI::IsMember({ "live", "replay" }));
    cmd.add_option("--pipeline", flags.pipeline, "agentic, routing or zero_shot")
        ->check(CLI::IsMember({ "agentic", "routing", "zero_shot" }));
    cmd.add_option("--disable", flags.disable, "Tool name, display name or tool category to remove");
    cmd.add_option("--max-steps", flags.max_steps, "Planner step cap (overrides the config)")
        ->check(CLI::PositiveNumber);
    cmd.add_option("--out", flags.out, "Output directory for traces and reports");
}

auto load_config(const CommonFlags& flags) -> EngineConfig
{
    auto config = load_engine_config(flags.config);
    if (!flags.mode.empty())
        config.mode = *parse_mode(flags.mode);
    if (flags.max_steps > 0)
        config.run.max_steps = flags.max_steps;
    config.disable.insert(config.disable.end(), flags.disable.begin(), flags.disable.end());
    return config;
}

auto trajectory_text(const std::vector<std::string>& trajectory) -> std::string
{
    return trajectory.empty() ? std::string("(no tools)") : fmt::format("{}", fmt::join(trajectory, " -> "));
}

auto cmd_verify(const std::string& image_path, const CommonFlags& flags, std::ostream& out, std::ostream& err) -> int
{
    auto const pipeline = *parse_pipeline(flags.pipeline);
    auto engine = build_engine(load_config(flags), pipeline);
    if (!fs::exists(image_path) && !is_remote_location(image_path))
        throw Error(ErrorKind::Config, fmt::format("image {} does not exist", image_path));

    auto const image = image_from_path(image_path);
    auto const sample = Sample { image.id, image, Rating::Safe, std::nullopt };
    auto const trace = run_sample(sample, pipeline, engine.setup);

    fs::create_directories(flags.out);
    auto const trace_path = fs::path(flags.out) / fmt::format("{}.{}.trace.jsonl", image.id, to_string(pipeline));
    write_trace_log(trace_path, { trace }, engine.setup.include_timings);

    if (!trace.assessment)
    {
        err << fmt::format("verification of {} failed: {}\ntrace written to {}\n", image.id, trace.error.value_or("unknown"),
                           trace_path.string());
        return exit_run_error;
    }

    auto doc = nlohmann::json {
        { "image_id", trace.image_id },
        { "pipeline", trace.pipeline },
        { "assessment", to_json(*trace.assessment, *engine.policy) },
        { "trajectory", trace.trajectory },
        { "truncated", trace.truncated },
    };
    if (trace.route)
        doc["route"] = { { "cluster", trace.route->cluster }, { "reasoning", trace.route->reasoning } };
    out << doc.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
    out << "trajectory: " << trajectory_text(trace.trajectory) << '\n';
    return exit_ok;
}

auto cmd_bench(const std::string& manifest_path, const CommonFlags& flags, std::ostream& out) -> int
{
    auto const pipeline = *parse_pipeline(flags.pipeline);
    auto const config = load_config(flags);
    if (!fs::exists(manifest_path))
        throw Error(ErrorKind::Config, fmt::format("manifest {} does not exist", manifest_path));
    auto engine = build_engine(config, pipeline);
    auto const samples = load_manifest(manifest_path, engine.policy.get());

    auto const result = run_benchmark(samples, pipeline, engine.setup, flags.out);
    auto const disabled_set = engine.registry->disabled_sets();
    out << render_report_table(result.report, pipeline, { disabled_set.begin(), disabled_set.end() });
    out << fmt::format("distinct trajectories: {}\n", count_trajectories(result.traces).distinct);
    out << fmt::format("report: {}\ntraces: {}\n", result.report_json.string(), result.trace_log.string());
    return exit_ok;
}

void print_evidence(const Evidence& evidence, std::ostream& out)
{
    auto const args = evidence.args.is_null() || evidence.args.empty() ? std::string {} : " " + evidence.args.dump();
    out << fmt::format("step {}: {}{}\n", evidence.step_index + 1, evidence.tool_name, args);
    if (evidence.error)
    {
        out << fmt::format("    error [{}]: {}\n", to_string(evidence.error->kind), evidence.error->message);
        return;
    }
    auto const digest = fuse_metadata(std::span<const Evidence>(&evidence, 1));
    auto lines = std::istringstream(digest);
    auto first = true;
    for (auto line = std::string {}; std::getline(lines, line);)
    {
        if (std::exchange(first, false))
            continue; // section header repeats the tool name
        out << "    " << line << '\n';
    }
}

void print_trace(const TraceRecord& trace, std::ostream& out)
{
    out << fmt::format("== {} [{}] policy {}\n", trace.image_id, trace.pipeline, trace.policy_id);
    if (trace.truncated)
        out << "TRUNCATED: step cap reached before the planner concluded\n";
    if (trace.route)
        out << fmt::format("route: Cluster {} - {}\n", trace.route->cluster, trace.route->reasoning);
    out << "trajectory: " << trajectory_text(trace.trajectory) << '\n';
    for (auto const& step: trace.steps)
        print_evidence(step.evidence, out);
    if (trace.assessment)
    {
        out << fmt::format("assessment: {} / {}\n", to_string(trace.assessment->rating), trace.category_display);
        out << fmt::format("rationale: {}\n", trace.assessment->rationale);
    }
    if (trace.error)
        out << fmt::format("FAILED: {}\n", *trace.error);
}

auto cmd_replay(const std::string& trace_path, std::ostream& out) -> int
{
    auto const traces = read_trace_log(trace_path);
    for (auto i = std::size_t { 0 }; i < traces.size(); ++i)
    {
        if (i > 0)
            out << '\n';
        print_trace(traces[i], out);
    }
    return exit_ok;
}

auto cmd_validate_bundle(const std::string& root, std::ostream& out) -> int
{
    if (!fs::is_directory(root))
        throw Error(ErrorKind::Config, fmt::format("bundle root {} is not a directory", root));
    auto const findings = validate_bundle(root);
    for (auto const& finding: findings)
        out << fmt::format("{}: {}\n", finding.kind, finding.detail);
    out << fmt::format("{} finding(s)\n", findings.size());
    return findings.empty() ? exit_ok : exit_run_error;
}

auto exit_code_for(ErrorKind kind) -> int
{
    switch (kind)
    {
        case ErrorKind::Config:
        case ErrorKind::Io:
        case ErrorKind::MalformedDocument:
        case ErrorKind::DuplicateCode:
        case ErrorKind::EmptyRuleList:
        case ErrorKind::ManifestParse:
        case ErrorKind::DuplicateSampleId:
        case ErrorKind::TraceParse:
        case ErrorKind::DuplicateScriptKey:
        case ErrorKind::UnknownTool: return exit_usage;
        default: return exit_run_error;
    }
}

} // namespace

auto run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) -> int
{
    auto app = CLI::App { "Agentic visual compliance verification", "compagent" };
    app.require_subcommand(1);

    auto flags = CommonFlags {};
    auto target = std::string {};

    auto* verify = app.add_subcommand("verify", "Verify one image and print its assessment");
    verify->add_option("image", target, "Image file")->required();
    add_common(*verify, flags);

    auto* bench = app.add_subcommand("bench", "Run a pipeline over a manifest and report metrics");
    bench->add_option("manifest", target, "Line-delimited JSON manifest")->required();
    add_common(*bench, flags);

    auto* replay = app.add_subcommand("replay", "Pretty-print a stored trace log");
    replay->add_option("trace", target, "Trace log (JSONL)")->required();

    auto* check = app.add_subcommand("validate-bundle", "Cross-check a fixture bundle");
    check->add_option("root", target, "Bundle directory")->required();

    try
    {
        auto argv = std::vector<std::string>(args.rbegin(), args.rend());
        app.parse(argv);
    }
    catch (const CLI::CallForHelp&)
    {
        out << app.help();
        return exit_ok;
    }
    catch (const CLI::CallForAllHelp&)
    {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    }
    catch (const CLI::ParseError& e)
    {
        err << e.what() << '\n';
        return exit_usage;
    }

    try
    {
        if (verify->parsed())
            return cmd_verify(target, flags, out, err);
        if (bench->parsed())
            return cmd_bench(target, flags, out);
        if (replay->parsed())
            return cmd_replay(target, out);
        return cmd_validate_bundle(target, out);
    }
    catch (const Error& e)
    {
        err << fmt::format("error [{}]: {}\n", to_string(e.kind()), e.what());
        return exit_code_for(e.kind());
    }
    catch (const std::exception& e)
    {
        err << "error: " << e.what() << '\n';
        return exit_run_error;
    }
}

} // namespace compagent::cli
