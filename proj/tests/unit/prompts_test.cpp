// SPDX-License-Identifier: Apache-2.0
#include "../support.hpp"

#include <compagent/prompts.hpp>

#include <gtest/gtest.h>

#include <regex>

using namespace compagent;
using namespace compagent::test;

namespace
{

auto has_open_slot(const std::string& text) -> bool
{
    static auto const slot = std::regex(R"(\{[a-z_]+\})");
    return std::regex_search(text, slot);
}

} // namespace

TEST(Prompts, NoUnfilledSlots)
{
    auto const tools = bundled_descriptors();
    auto const notes = std::vector<std::string> { "note one" };
    for (auto const& policy: { llavaguard(), unsafebench() })
    {
        for (auto const& text: {
                 prompts::planner_system(*policy, tools),
                 prompts::planner_user("evidence", notes),
                 prompts::verifier_system(*policy),
                 prompts::verifier_user("evidence"),
                 prompts::routing_system(),
                 prompts::policy_assessment_system(*policy, true),
                 prompts::policy_assessment_system(*policy, false),
                 prompts::policy_assessment_user("meta", "Cluster 1"),
             })
            EXPECT_FALSE(has_open_slot(text)) << text;
    }
}

TEST(Prompts, PolicyTextAndChoicesEmbedded)
{
    auto const& policy = *llavaguard();
    auto const system = prompts::verifier_system(policy);
    EXPECT_NE(system.find(render_policy_text(policy)), std::string::npos);
    EXPECT_NE(system.find(prompts::category_choices(policy)), std::string::npos);
    EXPECT_TRUE(prompts::category_choices(policy).starts_with("\"O1: Hate, Humiliation, Harassment\"|"));
    EXPECT_TRUE(prompts::category_choices(policy).ends_with("|\"NA: None applying\""));
}

TEST(Prompts, PlannerListsOnlyGivenTools)
{
    auto tools = bundled_descriptors();
    tools.erase(tools.begin() + 1); // face_detection
    auto const system = prompts::planner_system(*llavaguard(), tools);
    EXPECT_EQ(system.find("face_detection"), std::string::npos);
    for (auto const& t: tools)
        EXPECT_NE(system.find(t.name), std::string::npos) << t.name;
}

TEST(Prompts, PlannerUserCarriesNotes)
{
    auto const notes = std::vector<std::string> { "Tool 'x' is not available." };
    EXPECT_NE(prompts::planner_user("ev", notes).find(notes[0]), std::string::npos);
}

TEST(Prompts, RoutingListsFiveClusters)
{
    auto const system = prompts::routing_system();
    for (auto i = 1; i <= 5; ++i)
        EXPECT_NE(system.find("Cluster " + std::to_string(i)), std::string::npos);
}

TEST(Prompts, MetadataSlotsOnlyWhenRequested)
{
    auto const& policy = *llavaguard();
    auto const with = prompts::policy_assessment_system(policy, true);
    auto const without = prompts::policy_assessment_system(policy, false);
    EXPECT_NE(with, without);
    auto const user = prompts::policy_assessment_user("META-DATA", "Cluster 3\nbecause");
    EXPECT_NE(user.find("META-DATA"), std::string::npos);
    EXPECT_NE(user.find("Cluster 3"), std::string::npos);
}
