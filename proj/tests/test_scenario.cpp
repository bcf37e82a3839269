#include "bsn/scenario.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

namespace bsn {
namespace {

const char* kMinimal = R"([scenario]
name = mini
mac = csma
duration_us = 1000000

[node.a]
distance_m = 0.4
)";

ScenarioError parse_error(const std::string& text)
{
    try {
        parse_scenario(text);
    } catch (const ScenarioError& e) {
        return e;
    }
    ADD_FAILURE() << "expected ScenarioError for:\n" << text;
    return ScenarioError(0, "", "none");
}

TEST(Scenario, Table2Loads)
{
    const auto s = load_scenario(test::scenario_path("table2.scn"));
    EXPECT_EQ(s.name, "table2");
    EXPECT_EQ(s.mac, MacKind::Ptdma);
    EXPECT_EQ(s.duration, seconds(9));
    EXPECT_EQ(s.seeds, (std::vector<std::uint64_t>{1, 2, 3, 4, 5}));
    ASSERT_EQ(s.nodes.size(), 3U);
    EXPECT_EQ(s.nodes[0].id, "BP");
    EXPECT_EQ(s.nodes[0].placement, Placement::InBody);
    EXPECT_EQ(s.nodes[0].pattern->to_string(), "011");
    EXPECT_EQ(s.find_node("EMG"), 2U);
    EXPECT_FALSE(s.find_node("coordinator"));
    EXPECT_EQ(s.tdma_params().slots_per_frame, 3U);
    EXPECT_EQ(derive_coordinator_pattern(s.wakeup_table()).to_string(), "111");
    EXPECT_NO_THROW(validate_for(s, MacKind::Ptdma));
}

TEST(Scenario, MinimalDefaults)
{
    const auto s = parse_scenario(kMinimal);
    EXPECT_EQ(s.mac, MacKind::Csma);
    EXPECT_EQ(s.nodes.size(), 1U);
    EXPECT_EQ(s.nodes[0].placement, Placement::OnBody);
    EXPECT_EQ(s.csma, BackoffConfig{});
}

TEST(Scenario, InvertedWindowsNamed)
{
    const std::string text = std::string(kMinimal) + "\n[csma]\nw0_critical = 16\nw0_noncritical = 8\n";
    try {
        parse_scenario(text);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("(W_0^α ≤ W_0^β)"), std::string::npos) << e.what();
    }
}

TEST(Scenario, EmptyFileReportsLineOne)
{
    EXPECT_EQ(parse_error("").line(), 1U);
    EXPECT_EQ(parse_error("# only a comment\n\n").line(), 1U);
}

TEST(Scenario, SyntaxErrorsCarryLine)
{
    EXPECT_EQ(parse_error("[scenario]\nname = x\nthis is not valid\n").line(), 3U);
    EXPECT_EQ(parse_error("name = x\n").line(), 1U);
    EXPECT_EQ(parse_error("[scenario\n").line(), 1U);
}

TEST(Scenario, UnknownKeyAndSectionRejected)
{
    const auto k = parse_error(std::string(kMinimal) + "colour = blue\n");
    EXPECT_EQ(k.line(), 8U);
    EXPECT_NE(std::string(k.what()).find("unknown key 'colour'"), std::string::npos);
    const auto s = parse_error(std::string(kMinimal) + "[mystery]\nx = 1\n");
    EXPECT_EQ(s.section(), "mystery");
}

TEST(Scenario, DuplicateKeyRejected)
{
    EXPECT_EQ(parse_error("[scenario]\nname = a\nname = b\n").line(), 3U);
}

TEST(Scenario, SemanticChecks)
{
    EXPECT_THROW(parse_scenario("[scenario]\nname = x\nduration_us = 10\n"), ScenarioError);
    EXPECT_THROW(parse_scenario(std::string(kMinimal) + "[node.coordinator]\n"), ScenarioError);
    EXPECT_THROW(parse_scenario(std::string(kMinimal) + "[node.b]\nplacement = inbody\ndistance_m = 0.01\ndepth_m = 0.05\n"),
                 ScenarioError);
    EXPECT_THROW(parse_scenario(std::string(kMinimal) + "[traffic]\nrate = 1/frame\n"), ScenarioError);
    EXPECT_THROW(parse_scenario(std::string(kMinimal) + "[phy]\nbitrate_bps = 5000\n"), ScenarioError);
}

TEST(Scenario, UnknownMacRejected)
{
    EXPECT_THROW(parse_mac("tdma9"), ConfigError);
    EXPECT_EQ(parse_mac("csma-prio"), MacKind::CsmaPrio);
    std::string text = kMinimal;
    text.replace(text.find("mac = csma"), 10, "mac = aloha");
    EXPECT_THROW(parse_scenario(text), ConfigError);
}

TEST(Scenario, PtdmaNeedsPatterns)
{
    const auto s = parse_scenario(kMinimal);
    EXPECT_THROW(validate_for(s, MacKind::Ptdma), ConfigError);
    EXPECT_NO_THROW(validate_for(s, MacKind::Smac));
}

TEST(Scenario, SlotOverflowIsCapacityError)
{
    auto s = load_scenario(test::scenario_path("table2.scn"));
    s.ptdma.slots_per_frame = 2;
    try {
        validate_for(s, MacKind::Ptdma);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("capacity exceeded"), std::string::npos) << e.what();
    }
}

class BundledScenario : public ::testing::TestWithParam<const char*> {};

TEST_P(BundledScenario, TextRoundTrip)
{
    const auto s = load_scenario(test::scenario_path(GetParam()));
    const auto text = to_text(s);
    const auto back = parse_scenario(text);
    EXPECT_EQ(back, s);
    EXPECT_EQ(to_text(back), text);
    EXPECT_NO_THROW(validate_for(s, s.mac));
}

INSTANTIATE_TEST_SUITE_P(All, BundledScenario,
                         ::testing::Values("table2.scn", "fig3.scn", "fig5.scn", "fig6.scn", "emergency.scn"));

}  // namespace
}  // namespace bsn
