// SPDX-License-Identifier: Apache-2.0
#include "../support.hpp"

#include <compagent/error.hpp>
#include <compagent/planner.hpp>

#include <gtest/gtest.h>

using namespace compagent;
using namespace compagent::test;

namespace
{

constexpr auto verdict = R"({"rating": "Safe", "category": "NA: None applying", "rationale": "nothing found"})";

auto config(int max_steps = 10) -> RunConfig
{
    auto c = RunConfig {};
    c.max_steps = max_steps;
    return c;
}

auto run(ChatClient& llm, const RunConfig& c, const ToolRegistry& registry) -> TraceRecord
{
    return run_verification(test_image(), llavaguard(), registry, llm, c);
}

} // namespace

TEST(ParseAction, CallLines)
{
    auto const tools = bundled_descriptors();
    auto const& policy = *llavaguard();
    auto const a = parse_action("Let me look.\nCALL image_summary", tools, policy);
    ASSERT_EQ(a.status, ParsedAction::Status::Ok);
    EXPECT_EQ(std::get<ToolCall>(*a.action), (ToolCall { "image_summary", nlohmann::json::object() }));

    auto const b = parse_action("`CALL object_detection {\"max_labels\": 3}`", tools, policy);
    ASSERT_EQ(b.status, ParsedAction::Status::Ok);
    EXPECT_EQ(std::get<ToolCall>(*b.action).args["max_labels"], 3);

    auto const c = parse_action("call face_detection{}", tools, policy);
    ASSERT_EQ(c.status, ParsedAction::Status::Ok);
    EXPECT_EQ(std::get<ToolCall>(*c.action).tool_name, "face_detection");
}

TEST(ParseAction, Failures)
{
    auto const tools = bundled_descriptors();
    auto const& policy = *llavaguard();
    auto const unknown = parse_action("CALL xray_vision", tools, policy);
    EXPECT_EQ(unknown.status, ParsedAction::Status::InvalidTool);
    EXPECT_EQ(unknown.detail, "xray_vision");
    EXPECT_EQ(parse_action("CALL image_summary [1]", tools, policy).status, ParsedAction::Status::Unparseable);
    EXPECT_EQ(parse_action("I would call a tool", tools, policy).status, ParsedAction::Status::Unparseable);
    EXPECT_EQ(parse_action("{\"rating\": \"Maybe\", \"category\": \"NA\", \"rationale\": \"r\"}", tools, policy).status,
              ParsedAction::Status::Unparseable);
}

TEST(ParseAction, AssessmentConcludes)
{
    auto const a = parse_action(verdict, bundled_descriptors(), *llavaguard());
    ASSERT_EQ(a.status, ParsedAction::Status::Ok);
    auto const& done = std::get<Conclude>(*a.action);
    ASSERT_TRUE(done.assessment);
    EXPECT_EQ(done.assessment->rating, Rating::Safe);
}

TEST(Planner, RequestShape)
{
    auto const state = VerificationState { test_image("pic"), llavaguard(), {}, 0 };
    auto c = config();
    auto const r = build_planner_request(state, bundled_descriptors(), c, {});
    EXPECT_EQ(r.session_id, "pic");
    EXPECT_EQ(r.model_id, "planner");
    ASSERT_TRUE(r.image);
    c.attach_image_to_planner = false;
    EXPECT_FALSE(build_planner_request(state, bundled_descriptors(), c, {}).image);
}

TEST(Planner, ReprompsOnceThenSucceeds)
{
    auto llm = FakeClient([](const ChatRequest&, std::size_t call) -> std::string {
        return call == 0 ? "I am not sure." : "CALL image_summary";
    });
    auto const state = VerificationState { test_image(), llavaguard(), {}, 0 };
    auto const result = plan_step(state, bundled_descriptors(), llm, config());
    EXPECT_EQ(result.raw_texts.size(), 2u);
    ASSERT_EQ(llm.requests.size(), 2u);
    EXPECT_NE(llm.requests[1].user_text.find("no valid action"), std::string::npos);
}

TEST(Planner, InvalidToolRepromptNamesTheTools)
{
    auto registry = make_bundled_registry(echo_invoker());
    registry.disable("face_detection");
    auto llm = FakeClient([](const ChatRequest&, std::size_t call) -> std::string {
        return call == 0 ? "CALL face_detection" : "CALL image_summary";
    });
    auto const state = VerificationState { test_image(), llavaguard(), {}, 0 };
    auto const tools = registry.list_descriptors();
    auto const result = plan_step(state, tools, llm, config());
    EXPECT_EQ(std::get<ToolCall>(result.action).tool_name, "image_summary");
    EXPECT_NE(llm.requests[1].user_text.find("Tool 'face_detection' is not available"), std::string::npos);
}

TEST(Planner, SecondFailureRaisesTypedError)
{
    auto const state = VerificationState { test_image(), llavaguard(), {}, 0 };
    auto prose = sequence_client({ "hmm", "still hmm" });
    try
    {
        (void) plan_step(state, bundled_descriptors(), *prose, config());
        FAIL();
    }
    catch (const ModelOutputError& e)
    {
        EXPECT_EQ(e.kind(), ErrorKind::ActionParse);
        EXPECT_EQ(e.raw_texts(), (std::vector<std::string> { "hmm", "still hmm" }));
    }
    auto invalid = sequence_client({ "CALL nope", "CALL nope" });
    try
    {
        (void) plan_step(state, bundled_descriptors(), *invalid, config());
        FAIL();
    }
    catch (const ModelOutputError& e)
    {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidToolAction);
    }
}

TEST(Planner, RunConcludesAndVerifies)
{
    auto const registry = make_bundled_registry(echo_invoker());
    auto llm = sequence_client({ "CALL image_summary", "CALL text_detection", verdict, verdict });
    auto const trace = run(*llm, config(), registry);
    EXPECT_EQ(trace.trajectory, (std::vector<std::string> { "image_summary", "text_detection" }));
    EXPECT_FALSE(trace.truncated);
    ASSERT_TRUE(trace.assessment);
    EXPECT_EQ(trace.category_display, "NA: None applying");
    EXPECT_EQ(trace.raw_model_texts.size(), 4u);
    EXPECT_EQ(trace.steps[0].action_raw, "CALL image_summary");
    EXPECT_EQ(trace.steps[1].evidence.output->summary, "text_detection on img");
}

TEST(Planner, TruncatesAtStepCap)
{
    auto const registry = make_bundled_registry(echo_invoker());
    auto const tools = bundled_descriptors();
    auto llm = FakeClient([&](const ChatRequest& r, std::size_t call) -> std::string {
        if (r.model_id == "verifier")
            return verdict;
        return "CALL " + tools[call % tools.size()].name;
    });
    auto const trace = run(llm, config(3), registry);
    EXPECT_TRUE(trace.truncated);
    EXPECT_EQ(trace.trajectory.size(), 3u);
    ASSERT_TRUE(trace.assessment);
}

TEST(Planner, RepeatLimitRejectsThirdIdenticalCall)
{
    auto const registry = make_bundled_registry(echo_invoker());
    auto llm = sequence_client({ "CALL image_summary", "CALL image_summary", "CALL image_summary", verdict, verdict });
    auto const trace = run(*llm, config(), registry);
    ASSERT_EQ(trace.steps.size(), 3u);
    EXPECT_TRUE(trace.steps[1].evidence.output);
    ASSERT_TRUE(trace.steps[2].evidence.error);
    EXPECT_EQ(trace.steps[2].evidence.error->kind, ErrorKind::RepeatLimit);
}

TEST(Planner, DifferentArgsAreNotRepeats)
{
    auto const registry = make_bundled_registry(echo_invoker());
    auto llm = sequence_client({ "CALL object_detection", "CALL object_detection", "CALL object_detection {\"max_labels\": 2}",
                                 verdict, verdict });
    auto const trace = run(*llm, config(), registry);
    ASSERT_EQ(trace.steps.size(), 3u);
    EXPECT_TRUE(trace.steps[2].evidence.output);
}

TEST(Planner, FusedModeSkipsVerifier)
{
    auto const registry = make_bundled_registry(echo_invoker());
    auto c = config();
    c.fused_mode = true;
    auto const unsafe = R"({"rating": "Unsafe", "category": "O2", "rationale": "planner verdict"})";
    auto llm = FakeClient([&](const ChatRequest& r, std::size_t) -> std::string {
        return r.model_id == "verifier" ? verdict : unsafe;
    });
    auto const fused = run(llm, c, registry);
    EXPECT_EQ(fused.assessment->rationale, "planner verdict");
    EXPECT_EQ(llm.requests.size(), 1u);

    // non-fused: the verifier recomputes
    auto llm2 = FakeClient([&](const ChatRequest& r, std::size_t) -> std::string {
        return r.model_id == "verifier" ? verdict : unsafe;
    });
    auto const separate = run(llm2, config(), registry);
    EXPECT_EQ(separate.assessment->rationale, "nothing found");
    EXPECT_EQ(llm2.requests.size(), 2u);
}

TEST(Planner, FailureCarriesPartialTrace)
{
    auto const registry = make_bundled_registry(echo_invoker());
    auto llm = sequence_client({ "CALL image_summary", "??", "??" });
    try
    {
        (void) run(*llm, config(), registry);
        FAIL();
    }
    catch (const RunFailure& e)
    {
        EXPECT_EQ(e.kind(), ErrorKind::ActionParse);
        EXPECT_EQ(e.partial_trace().trajectory, (std::vector<std::string> { "image_summary" }));
        EXPECT_TRUE(e.partial_trace().error);
        EXPECT_EQ(e.partial_trace().raw_model_texts.size(), 3u);
    }
}

TEST(Planner, ConfigValidation)
{
    auto c = config(0);
    EXPECT_THROW(c.validate(), Error);
    c = config();
    c.repeat_call_limit = 0;
    EXPECT_THROW(c.validate(), Error);
    auto const empty = ToolRegistry {};
    auto llm = sequence_client({});
    EXPECT_THROW((void) run(*llm, config(), empty), Error);
}
