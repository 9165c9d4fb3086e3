// SPDX-License-Identifier: Apache-2.0
#include "../local_server.hpp"
#include "../support.hpp"

#include <compagent/error.hpp>
#include <compagent/tool_suite.hpp>

#include <gtest/gtest.h>

#include <cstdlib>
#include <set>

using namespace compagent;
using namespace compagent::test;

namespace
{

auto names(const std::vector<ToolDescriptor>& tools) -> std::set<std::string>
{
    auto out = std::set<std::string> {};
    for (auto const& t: tools)
        out.insert(t.name);
    return out;
}

} // namespace

TEST(ToolSuite, BundledDescriptors)
{
    auto const tools = bundled_descriptors();
    ASSERT_EQ(tools.size(), 8u);
    EXPECT_EQ(names(tools),
              (std::set<std::string> { "image_summary", "face_detection", "object_detection", "text_detection",
                                       "content_moderation", "llavaguard_classification", "safe_clip", "icm_assistant" }));
    for (auto const& t: tools)
    {
        EXPECT_FALSE(t.description.empty()) << t.name;
        EXPECT_FALSE(t.display_name.empty()) << t.name;
    }
}

TEST(ToolSuite, DuplicateRegistrationRejected)
{
    auto registry = make_bundled_registry(echo_invoker());
    try
    {
        registry.register_tool(bundled_descriptors().front(), echo_invoker());
        FAIL();
    }
    catch (const Error& e)
    {
        EXPECT_EQ(e.kind(), ErrorKind::DuplicateTool);
    }
}

TEST(ToolSuite, DisableByNameDisplayNameAndCategory)
{
    auto registry = make_bundled_registry(echo_invoker());
    registry.disable("face_detection");
    registry.disable("Safe-CLIP");
    EXPECT_FALSE(registry.is_enabled("face_detection"));
    EXPECT_FALSE(registry.is_enabled("safe_clip"));
    EXPECT_EQ(registry.list_descriptors().size(), 6u);
    EXPECT_EQ(registry.find("face_detection"), nullptr);
    EXPECT_TRUE(registry.contains("face_detection"));
    EXPECT_THROW(registry.disable("teleporter"), Error);

    auto const run = registry.execute_tool("face_detection", test_image(), nlohmann::json::object());
    ASSERT_TRUE(run.error);
    EXPECT_EQ(run.error->kind, ErrorKind::UnknownTool);
}

TEST(ToolSuite, EveryCategorySubsetAblation)
{
    auto const categories = all_tool_categories();
    ASSERT_EQ(categories.size(), 3u);
    auto const all = bundled_descriptors();
    for (auto mask = 0u; mask < 8u; ++mask)
    {
        auto registry = make_bundled_registry(echo_invoker());
        auto removed = std::set<ToolCategory> {};
        for (auto bit = 0u; bit < 3u; ++bit)
            if (mask & (1u << bit))
            {
                registry.disable(to_string(categories[bit]));
                removed.insert(categories[bit]);
            }
        // oracle: filter the full list by category
        auto expected = std::set<std::string> {};
        for (auto const& t: all)
            if (!removed.contains(t.category))
                expected.insert(t.name);
        EXPECT_EQ(names(registry.list_descriptors()), expected) << "mask " << mask;
    }
}

TEST(ToolSuite, ListPreservesRegistrationOrder)
{
    auto registry = make_bundled_registry(echo_invoker());
    registry.disable("object_detection");
    auto listed = std::vector<std::string> {};
    for (auto const& t: registry.list_descriptors())
        listed.push_back(t.name);
    auto expected = std::vector<std::string> {};
    for (auto const& t: bundled_descriptors())
        if (t.name != "object_detection")
            expected.push_back(t.name);
    EXPECT_EQ(listed, expected);
}

TEST(ToolSuite, ValidateArgs)
{
    auto const tools = bundled_descriptors();
    auto const& detect = *std::find_if(tools.begin(), tools.end(), [](auto const& t) { return t.name == "object_detection"; });
    EXPECT_FALSE(validate_args(detect, nlohmann::json::object()));
    EXPECT_FALSE(validate_args(detect, { { "max_labels", 5 } }));
    EXPECT_TRUE(validate_args(detect, { { "max_labels", "ten" } }));
    EXPECT_TRUE(validate_args(detect, { { "max_labels", 2.5 } }));
    EXPECT_TRUE(validate_args(detect, { { "colour", "red" } }));

    auto tool = ToolDescriptor { "t", "T", "desc", { { "q", ArgType::String, true, "" } }, ToolCategory::ContentDetection };
    EXPECT_EQ(validate_args(tool, nlohmann::json::object()), "missing required argument 'q'");
    EXPECT_FALSE(validate_args(tool, { { "q", "x" } }));
}

TEST(ToolSuite, SchemaViolationIsReportedNotThrown)
{
    auto registry = make_bundled_registry(echo_invoker());
    auto const run = registry.execute_tool("object_detection", test_image(), { { "max_labels", "ten" } });
    ASSERT_TRUE(run.error);
    EXPECT_EQ(run.error->kind, ErrorKind::ArgsSchema);
    EXPECT_FALSE(run.output);
}

TEST(ToolSuite, InvokerExceptionsBecomeErrors)
{
    auto registry = ToolRegistry {};
    registry.register_tool(bundled_descriptors().front(),
                           [](auto const&, auto const&, auto const&) -> ToolOutput { throw std::runtime_error("boom"); });
    auto const run = registry.execute_tool("image_summary", test_image(), nlohmann::json::object());
    ASSERT_TRUE(run.error);
    EXPECT_EQ(run.error->kind, ErrorKind::InvokerFailure);
    EXPECT_NE(run.error->message.find("boom"), std::string::npos);

    auto empty = ToolRegistry {};
    empty.register_tool(bundled_descriptors().front(), [](auto const&, auto const&, auto const&) { return ToolOutput {}; });
    auto const blank = empty.execute_tool("image_summary", test_image(), nlohmann::json::object());
    ASSERT_TRUE(blank.error);
    EXPECT_EQ(blank.error->kind, ErrorKind::InvalidToolOutput);
}

TEST(ToolSuite, ScoreNormalization)
{
    auto const json = nlohmann::json {
        { "tool_name", "content_moderation" },
        { "moderation_labels", { { { "label", "Weapons" }, { "score", 91.0 } }, { { "label", "Violence" }, { "score", 0.4 } } } },
    };
    auto const out = tool_output_from_json(json, "content_moderation");
    ASSERT_EQ(out.moderation_labels.size(), 2u);
    EXPECT_DOUBLE_EQ(out.moderation_labels[0].score, 0.91);
    EXPECT_DOUBLE_EQ(out.moderation_labels[1].score, 0.4);

    auto bad = json;
    bad["moderation_labels"][0]["score"] = 140;
    EXPECT_THROW((void) tool_output_from_json(bad, "content_moderation"), Error);
    bad["moderation_labels"][0]["score"] = -0.1;
    EXPECT_THROW((void) tool_output_from_json(bad, "content_moderation"), Error);
}

TEST(ToolSuite, OutputJsonRoundTrip)
{
    auto out = ToolOutput {};
    out.tool_name = "object_detection";
    out.detections.push_back({ "knife", 0.75, BoundingBox { 0.1, 0.2, 0.3, 0.4 }, std::nullopt });
    out.summary = "a knife";
    out.extra["source"] = "fixture";
    EXPECT_EQ(tool_output_from_json(to_json(out), "object_detection"), out);
}

TEST(ToolSuite, FixtureInvoker)
{
    auto dir = TempDir {};
    write_file(dir.path() / "image_summary/ok.json", R"({"summary": "a field"})");
    write_file(dir.path() / "image_summary/broken.json", "{not json");
    write_file(dir.path() / "image_summary/down.json", R"({"error": "HTTP 503"})");
    auto registry = make_bundled_registry(fixture_invoker(dir.path()));

    auto const ok = registry.execute_tool("image_summary", test_image("ok"), nlohmann::json::object());
    ASSERT_TRUE(ok.output);
    EXPECT_EQ(ok.output->summary, "a field");

    auto const expect_error = [&](std::string id, ErrorKind kind) {
        auto const run = registry.execute_tool("image_summary", test_image(id), nlohmann::json::object());
        ASSERT_TRUE(run.error) << id;
        EXPECT_EQ(run.error->kind, kind) << id;
    };
    expect_error("missing", ErrorKind::FixtureMiss);
    expect_error("broken", ErrorKind::FixtureParse);
    expect_error("down", ErrorKind::InvokerFailure);
}

TEST(ToolSuite, RemoteInvoker)
{
    auto seen = nlohmann::json {};
    auto server = LocalServer([&](httplib::Server& s) {
        s.Post("/tool", [&](const httplib::Request& req, httplib::Response& res) {
            seen = nlohmann::json::parse(req.body);
            seen["auth"] = req.get_header_value("Authorization");
            res.set_content(R"({"tool_name": "text_detection", "detections": [{"label": "text", "score": 0.9, "text": "EXIT"}]})",
                            "application/json");
        });
        s.Post("/fail", [](const httplib::Request&, httplib::Response& res) { res.status = 500; });
    });
    ::setenv("COMPAGENT_TEST_TOOL_KEY", "secret", 1);

    auto registry = ToolRegistry {};
    auto const tools = bundled_descriptors();
    auto const& text = *std::find_if(tools.begin(), tools.end(), [](auto const& t) { return t.name == "text_detection"; });
    auto const& faces = *std::find_if(tools.begin(), tools.end(), [](auto const& t) { return t.name == "face_detection"; });
    registry.register_tool(text, remote_invoker({ "text_detection", server.url("/tool"), "COMPAGENT_TEST_TOOL_KEY" }));
    registry.register_tool(faces, remote_invoker({ "face_detection", server.url("/fail"), "" }));

    auto const run = registry.execute_tool("text_detection", test_image("sign"), nlohmann::json::object());
    ASSERT_TRUE(run.output) << run.error->message;
    ASSERT_EQ(run.output->detections.size(), 1u);
    EXPECT_EQ(run.output->detections[0].text, "EXIT");
    EXPECT_EQ(seen["tool"], "text_detection");
    EXPECT_EQ(seen["image"]["id"], "sign");
    EXPECT_EQ(seen["auth"], "Bearer secret");

    auto const failed = registry.execute_tool("face_detection", test_image("sign"), nlohmann::json::object());
    ASSERT_TRUE(failed.error);
    EXPECT_EQ(failed.error->kind, ErrorKind::InvokerFailure);
}
