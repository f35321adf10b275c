#include "leolora/scenario_file.hpp"
#include "leolora/simcore/rng.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace leolora;
using scenario_file::ParseError;

namespace {

scenario_file::ScenarioDocument parse_text(const std::string& text)
{
    std::istringstream in(text);
    return scenario_file::parse(in, "test.ini");
}

} // namespace

TEST(ScenarioFile, EmptyFileGivesReferenceDefaults)
{
    const auto doc = parse_text("# nothing\n\n");
    const netsim::Scenario ref;
    EXPECT_EQ(doc.scenario.n_devices, 100);
    EXPECT_EQ(doc.scenario.sim_time_s, 6000.0);
    EXPECT_EQ(doc.scenario.constellation.total(), 16);
    EXPECT_EQ(doc.scenario.payload_bytes, 20);
    EXPECT_EQ(doc.sweep.sizes, (std::vector<int>{100, 200, 300, 400, 500}));
    EXPECT_EQ(doc.sweep.repetitions, 10);
    EXPECT_EQ(scenario_file::format(doc), scenario_file::format(scenario_file::ScenarioDocument{}));
}

TEST(ScenarioFile, ParsesSectionsListsAndComments)
{
    const auto doc = parse_text(R"(
[network]
n_devices = 250   # inline comment
scheme = baseline
send_interval_s = 100, 200
[constellation]
raan_deg = 0, 90, 180, 270
[lora]
low_data_rate_opt = false
[sweep]
schemes = BU
sizes = 10,20
)");
    EXPECT_EQ(doc.scenario.n_devices, 250);
    EXPECT_EQ(doc.scenario.scheme, mac::Scheme::Baseline);
    EXPECT_EQ(doc.scenario.traffic.min_gap_s, 100.0);
    EXPECT_EQ(doc.scenario.traffic.max_gap_s, 200.0);
    EXPECT_EQ(doc.scenario.constellation.raan_deg, (std::vector<double>{0, 90, 180, 270}));
    EXPECT_EQ(doc.scenario.lora.low_data_rate_opt, std::optional<bool>(false));
    EXPECT_EQ(doc.sweep.schemes, std::vector<mac::Scheme>{mac::Scheme::BU});
    EXPECT_EQ(doc.sweep.sizes, (std::vector<int>{10, 20}));
    EXPECT_EQ(doc.key_lines.at("network.n_devices"), 3);
}

TEST(ScenarioFile, ErrorsCarryLineAndKey)
{
    auto expect_error = [](const std::string& text, int line, const std::string& key) {
        try {
            (void)parse_text(text);
            ADD_FAILURE() << "no error for: " << text;
        } catch (const ParseError& e) {
            EXPECT_EQ(e.line(), line) << e.what();
            EXPECT_EQ(e.key(), key) << e.what();
            EXPECT_NE(std::string(e.what()).find("test.ini:" + std::to_string(line)), std::string::npos);
        }
    };
    expect_error("[network]\nn_devices = many\n", 2, "network.n_devices");
    expect_error("[network]\n\nbogus = 1\n", 3, "network.bogus");
    expect_error("n_devices = 1\n", 1, "n_devices");
    expect_error("[network\n", 1, "[network");
    expect_error("[network]\njust words\n", 2, "just words");
    expect_error("[link]\nsensitivity_dbm = -1, -2\n", 2, "link.sensitivity_dbm");
    expect_error("[lora]\ncrc = maybe\n", 2, "lora.crc");
}

TEST(ScenarioFile, ValidationNamesFieldAndLine)
{
    auto doc = parse_text("[run]\nseed = 3\n[network]\nn_devices = 0\n");
    try {
        scenario_file::validate(doc);
        FAIL();
    } catch (const netsim::ScenarioError& e) {
        EXPECT_EQ(e.field(), "n_devices");
        EXPECT_NE(std::string(e.what()).find("test.ini:4"), std::string::npos) << e.what();
    }
    doc = parse_text("[sweep]\nrepetitions = 0\n");
    EXPECT_THROW(scenario_file::validate(doc), netsim::ScenarioError);
}

TEST(ScenarioFile, OverridesApplyAndReportErrors)
{
    scenario_file::ScenarioDocument doc;
    scenario_file::apply_override(doc, "network.n_devices=42");
    scenario_file::apply_override(doc, "region.center_lat_deg = -33.5");
    EXPECT_EQ(doc.scenario.n_devices, 42);
    EXPECT_EQ(doc.scenario.region_center.latitude_deg, -33.5);
    EXPECT_THROW(scenario_file::apply_override(doc, "network.n_devices"), ParseError);
    EXPECT_THROW(scenario_file::apply_override(doc, "nope.key=1"), ParseError);
}

TEST(ScenarioFile, FormatParseRoundTripOnRandomDocuments)
{
    simcore::RngStream rng(17, 0, "roundtrip");
    for (int i = 0; i < 50; ++i) {
        scenario_file::ScenarioDocument doc;
        auto& s = doc.scenario;
        s.n_devices = 1 + static_cast<int>(rng.uniform(0, 1000));
        s.sim_time_s = rng.uniform(1, 10000);
        s.region_center.latitude_deg = rng.uniform(-89, 89);
        s.region_center.longitude_deg = rng.uniform(-180, 180);
        s.region_radius_km = rng.uniform(10, 3000);
        s.constellation.inter_plane_phase_deg = rng.uniform(0, 90);
        s.constellation.in_plane_phase_deg.clear();
        for (int k = 0; k < s.constellation.total(); ++k) {
            s.constellation.in_plane_phase_deg.push_back(rng.uniform(0, 360));
        }
        s.link.rx_antenna_gain_dbi = rng.uniform(-3, 20);
        s.capture_threshold_db = rng.uniform(0, 12);
        s.scheme = i % 2 ? mac::Scheme::BU : mac::Scheme::Baseline;
        s.lora.low_data_rate_opt = i % 3 == 0 ? std::nullopt : std::optional<bool>(i % 3 == 1);
        s.master_seed = rng.next_u64();
        doc.sweep.times_s = {rng.uniform(1, 100), rng.uniform(100, 1000)};
        doc.sweep.base_seed = rng.next_u64();

        const auto text = scenario_file::format(doc);
        const auto back = parse_text(text);
        EXPECT_EQ(scenario_file::format(back), text);
        EXPECT_NO_THROW(scenario_file::validate(back));
        EXPECT_EQ(back.scenario.region_radius_km, s.region_radius_km);
        EXPECT_EQ(back.scenario.master_seed, s.master_seed);
        EXPECT_EQ(back.scenario.constellation.in_plane_phase_deg, s.constellation.in_plane_phase_deg);
        EXPECT_EQ(back.sweep.times_s, doc.sweep.times_s);
    }
}
