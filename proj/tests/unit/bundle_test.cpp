// SPDX-License-Identifier: Apache-2.0
#include "../support.hpp"

#include <compagent/bundle.hpp>

#include <gtest/gtest.h>

using namespace compagent;
using namespace compagent::test;

namespace fs = std::filesystem;

namespace
{

auto copy_bundle(const TempDir& dir) -> fs::path
{
    auto const root = dir.path() / "bundle";
    fs::copy(bundle_dir(), root, fs::copy_options::recursive);
    return root;
}

} // namespace

TEST(Bundle, ShippedBundleIsClosed)
{
    EXPECT_TRUE(validate_bundle(bundle_dir()).empty());
}

TEST(Bundle, MissingFixtureIsNamed)
{
    auto dir = TempDir {};
    auto const root = copy_bundle(dir);
    fs::remove(root / "fixtures/face_detection/s04_masked_person_knife.json");
    auto const findings = validate_bundle(root);
    ASSERT_EQ(findings.size(), 1u);
    EXPECT_EQ(findings[0], (BundleFinding { "missing_fixture", "tool face_detection image s04_masked_person_knife" }));
}

TEST(Bundle, UnknownToolInScript)
{
    auto dir = TempDir {};
    auto const root = copy_bundle(dir);
    write_file(root / "scripts/extra.jsonl",
               R"({"session": "s01_knife_threat", "index": 0, "response_text": "CALL xray_vision {}"})"
               "\n");
    auto const findings = validate_bundle(root);
    ASSERT_EQ(findings.size(), 1u);
    EXPECT_EQ(findings[0], (BundleFinding { "unknown_tool", "extra.jsonl: session s01_knife_threat calls xray_vision" }));
}

TEST(Bundle, UnknownSessionAndStrayFixture)
{
    auto dir = TempDir {};
    auto const root = copy_bundle(dir);
    write_file(root / "scripts/extra.jsonl", R"({"session": "ghost", "index": 0, "response_text": "x"})"
                                             "\n");
    write_file(root / "fixtures/image_summary/ghost.json", R"({"summary": "boo"})");
    auto const findings = validate_bundle(root);
    auto kinds = std::vector<std::string> {};
    for (auto const& f: findings)
        kinds.push_back(f.kind);
    EXPECT_EQ(kinds, (std::vector<std::string> { "unknown_image", "unknown_session" }));
}

TEST(Bundle, BrokenManifest)
{
    auto dir = TempDir {};
    auto const root = copy_bundle(dir);
    write_file(root / "manifest.jsonl", "nope\n");
    auto const findings = validate_bundle(root);
    ASSERT_EQ(findings.size(), 1u);
    EXPECT_EQ(findings[0].kind, "invalid");
}
