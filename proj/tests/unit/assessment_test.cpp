// SPDX-License-Identifier: Apache-2.0
#include "../support.hpp"

#include <compagent/assessment.hpp>
#include <compagent/error.hpp>

#include <gtest/gtest.h>

using namespace compagent;
using compagent::test::llavaguard;

namespace
{

auto const& policy()
{
    return *llavaguard();
}

auto kind_of(std::string_view text) -> std::optional<ErrorKind>
{
    try
    {
        (void) parse_assessment(text, policy());
        return std::nullopt;
    }
    catch (const Error& e)
    {
        return e.kind();
    }
}

} // namespace

TEST(Assessment, ParseRating)
{
    EXPECT_EQ(parse_rating("Safe"), Rating::Safe);
    EXPECT_EQ(parse_rating(" \"UNSAFE\" "), Rating::Unsafe);
    EXPECT_FALSE(parse_rating("Maybe"));
    EXPECT_FALSE(parse_rating("Safe-ish"));
    EXPECT_FALSE(parse_rating(""));
}

TEST(Assessment, JsonRoundTripForEveryCategory)
{
    for (auto const rating: { Rating::Safe, Rating::Unsafe })
    {
        auto labels = std::vector<CategoryLabel> { CategoryLabel::na() };
        for (auto const& c: policy().categories)
            labels.push_back(CategoryLabel::of(c.code));
        for (auto const& label: labels)
        {
            auto const a = Assessment { rating, label, "because \"quoted\" reasons" };
            EXPECT_EQ(parse_assessment(render_json(a, policy()), policy()), a);
            EXPECT_EQ(parse_assessment(render_tagged(a, policy()), policy()), a);
        }
    }
}

TEST(Assessment, ToleratesNoise)
{
    auto const expected = Assessment { Rating::Unsafe, CategoryLabel::of("O6"), "Weapon shown." };
    for (auto const* text: {
             "```json\n{\"rating\": \"Unsafe\", \"category\": \"O6: Weapons or Substance Abuse\", \"rationale\": \"Weapon shown.\"}\n```",
             "Here you go: {\"rating\": \"unsafe\", \"category\": \"O6\", \"rationale\": \"Weapon shown.\",} thanks",
             "{{\"rating\": \"Unsafe\", \"category\": \"o6: weapons or substance abuse\", \"rationale\": \"Weapon shown.\"}}",
             "{\"note\": {\"x\": 1}} then {\"rating\": \"Unsafe\", \"category\": \"O6\", \"rationale\": \"Weapon shown.\"}",
             "<RATING>Unsafe</RATING><category>O6: Weapons or Substance Abuse</category><rationale>Weapon shown.</rationale>",
             "Reasoning first.\n<rating> \"Unsafe\" </rating>\n<category>\"O6\"</category>\n<rationale>\"Weapon shown.\"</rationale>",
         })
        EXPECT_EQ(parse_assessment(text, policy()), expected) << text;
}

TEST(Assessment, JsonWinsOverTags)
{
    auto const text = "<rating>Safe</rating><category>NA</category><rationale>r</rationale>\n"
                      "{\"rating\": \"Unsafe\", \"category\": \"O1\", \"rationale\": \"j\"}";
    EXPECT_EQ(parse_assessment(text, policy()).rating, Rating::Unsafe);
}

TEST(Assessment, MalformedInputsGiveTypedErrors)
{
    EXPECT_EQ(kind_of(""), ErrorKind::AssessmentParse);
    EXPECT_EQ(kind_of("   \n"), ErrorKind::AssessmentParse);
    EXPECT_EQ(kind_of("I think it is fine."), ErrorKind::AssessmentParse);
    EXPECT_EQ(kind_of("{\"rating\": \"Maybe\", \"category\": \"O1\", \"rationale\": \"r\"}"), ErrorKind::AssessmentParse);
    EXPECT_EQ(kind_of("{\"rating\": \"Safe\", \"category\": \"O1\"}"), ErrorKind::AssessmentParse);
    EXPECT_EQ(kind_of("{\"rating\": \"Safe\", \"category\": \"O1\", \"rationale\": \"\"}"), ErrorKind::AssessmentParse);
    EXPECT_EQ(kind_of("{\"rating\": \"Safe\", \"category\": \"O42\", \"rationale\": \"r\"}"), ErrorKind::UnknownCategory);
    EXPECT_EQ(kind_of("<rating>Safe</rating><category>O1</category>"), ErrorKind::AssessmentParse);
    EXPECT_EQ(kind_of("<rating>Safe<category>O1</category><rationale>r</rationale>"), ErrorKind::AssessmentParse);
    EXPECT_EQ(kind_of("{\"rating\": \"Safe\", \"category\": \"O1\", \"rationale\": \"r\""), ErrorKind::AssessmentParse);
}

TEST(Assessment, ScanJsonObjects)
{
    auto const spans = scan_json_objects(R"(a {"x": "}{"} b {"y": {"z": 1}} c { unbalanced)");
    ASSERT_EQ(spans.size(), 2u);
    EXPECT_EQ(spans[0], R"({"x": "}{"})");
    EXPECT_EQ(spans[1], R"({"y": {"z": 1}})");
    EXPECT_TRUE(scan_json_objects("no braces").empty());
}

TEST(Assessment, ExtractTag)
{
    EXPECT_EQ(extract_tag("<A> x </a>", "a"), "x");
    EXPECT_FALSE(extract_tag("<a> x", "a"));
    EXPECT_FALSE(extract_tag("x", "a"));
}

TEST(Assessment, JsonHasThreeKeys)
{
    auto const json = to_json({ Rating::Safe, CategoryLabel::na(), "ok" }, policy());
    EXPECT_EQ(json, (nlohmann::json { { "rating", "Safe" }, { "category", "NA: None applying" }, { "rationale", "ok" } }));
}
