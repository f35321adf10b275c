#include "leolora/report.hpp"
#include "leolora/sweep.hpp"

#include <gtest/gtest.h>

#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace leolora;

namespace {

std::vector<std::string> lines(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string l;
    while (std::getline(in, l)) {
        out.push_back(l);
    }
    return out;
}

// Minimal RFC 4180 reader: returns the fields of one record.
std::vector<std::string> split_record(const std::string& line)
{
    std::vector<std::string> out(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                out.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                out.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.emplace_back();
        } else {
            out.back() += c;
        }
    }
    return out;
}

netsim::Scenario tiny()
{
    netsim::Scenario s;
    s.n_devices = 20;
    return s;
}

sweep::SweepSpec tiny_spec()
{
    sweep::SweepSpec spec;
    spec.sizes = {10, 30};
    spec.times_s = {600, 1200};
    spec.repetitions = 3;
    return spec;
}

} // namespace

TEST(Csv, FieldQuoting)
{
    EXPECT_EQ(report::csv_field("plain"), "plain");
    EXPECT_EQ(report::csv_field(""), "");
    EXPECT_EQ(report::csv_field("a,b"), "\"a,b\"");
    EXPECT_EQ(report::csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(report::csv_field("two\nlines"), "\"two\nlines\"");
    EXPECT_EQ(split_record(report::csv_field("x,\"y\"") + ",z"), (std::vector<std::string>{"x,\"y\"", "z"}));
}

TEST(Sweep, SeedsAreStableAndDistinct)
{
    std::set<std::uint64_t> seen;
    for (auto scheme : {mac::Scheme::BU, mac::Scheme::Baseline}) {
        for (int n : {100, 200}) {
            for (double t : {1200.0, 2400.0}) {
                for (int rep = 0; rep < 10; ++rep) {
                    const auto s = sweep::derive_seed(1, scheme, n, t, rep);
                    EXPECT_EQ(s, sweep::derive_seed(1, scheme, n, t, rep));
                    seen.insert(s);
                }
            }
        }
    }
    EXPECT_EQ(seen.size(), 80u);
    EXPECT_NE(sweep::derive_seed(1, mac::Scheme::BU, 100, 1200, 0), sweep::derive_seed(2, mac::Scheme::BU, 100, 1200, 0));
}

TEST(Sweep, AddingRepetitionsKeepsEarlierRows)
{
    auto spec = tiny_spec();
    const auto a = sweep::run_sweep(tiny(), spec, 1);
    spec.repetitions = 4;
    const auto b = sweep::run_sweep(tiny(), spec, 1);
    ASSERT_EQ(a.cells.size(), b.cells.size());
    for (std::size_t c = 0; c < a.cells.size(); ++c) {
        for (std::size_t r = 0; r < a.cells[c].runs.size(); ++r) {
            EXPECT_EQ(a.cells[c].runs[r].seed, b.cells[c].runs[r].seed);
            EXPECT_EQ(a.cells[c].runs[r].result->metrics, b.cells[c].runs[r].result->metrics);
        }
    }
}

TEST(Sweep, RowCountsOrderingAndColumns)
{
    const auto result = sweep::run_sweep(tiny(), tiny_spec(), 2);
    std::ostringstream out;
    report::write_sweep(out, result);
    const auto ls = lines(out.str());
    // header + 2 schemes * 2 sizes * 2 times * (3 runs + 1 aggregate)
    ASSERT_EQ(ls.size(), 1u + 8u * 4u);
    const auto header = split_record(ls[0]);
    EXPECT_EQ(header.front(), "row_type");
    EXPECT_EQ(header.back(), "status");
    std::size_t runs = 0;
    std::size_t aggs = 0;
    std::vector<std::string> order;
    for (std::size_t i = 1; i < ls.size(); ++i) {
        const auto f = split_record(ls[i]);
        ASSERT_EQ(f.size(), header.size()) << ls[i];
        (f[0] == "run" ? runs : aggs) += 1;
        if (f[0] == "aggregate") {
            order.push_back(f[1] + "/" + f[2] + "/" + f[3]);
            EXPECT_EQ(f[4], "");
        }
        EXPECT_EQ(f.back(), "ok");
    }
    EXPECT_EQ(runs, 24u);
    EXPECT_EQ(aggs, 8u);
    EXPECT_EQ(order, (std::vector<std::string>{"BU/10/600", "BU/10/1200", "BU/30/600", "BU/30/1200",
                                               "Baseline/10/600", "Baseline/10/1200", "Baseline/30/600",
                                               "Baseline/30/1200"}));
}

TEST(Sweep, OutputIndependentOfParallelism)
{
    std::ostringstream one;
    std::ostringstream eight;
    report::write_sweep(one, sweep::run_sweep(tiny(), tiny_spec(), 1));
    report::write_sweep(eight, sweep::run_sweep(tiny(), tiny_spec(), 8));
    EXPECT_EQ(one.str(), eight.str());
}

TEST(Sweep, FailedRunsAreRecordedPerRow)
{
    auto base = tiny();
    base.region_radius_km = -5.0; // every run rejects the scenario
    auto spec = tiny_spec();
    spec.sizes = {10};
    spec.times_s = {600};
    spec.schemes = {mac::Scheme::BU};
    spec.repetitions = 2;
    const auto result = sweep::run_sweep(base, spec, 1);
    EXPECT_TRUE(result.any_failed());
    std::ostringstream out;
    report::write_sweep(out, result);
    const auto ls = lines(out.str());
    ASSERT_EQ(ls.size(), 4u);
    EXPECT_NE(split_record(ls[1]).back().find("error:"), std::string::npos);
    EXPECT_NE(split_record(ls[3]).back().find("error"), std::string::npos);
}

TEST(Sweep, SpecValidation)
{
    sweep::SweepSpec spec;
    spec.sizes.clear();
    EXPECT_THROW(spec.validate(), netsim::ScenarioError);
    spec = {};
    spec.repetitions = 0;
    EXPECT_THROW(spec.validate(), netsim::ScenarioError);
    EXPECT_THROW((void)sweep::run_sweep(tiny(), sweep::SweepSpec{}, 0), std::invalid_argument);
}

TEST(Sweep, DefaultSpecProducesSixHundredRunRows)
{
    netsim::Scenario base;
    base.sim_time_s = 1200; // overridden per cell by the sweep times
    const auto result = sweep::run_sweep(base, sweep::SweepSpec{}, 2);
    std::ostringstream out;
    report::write_sweep(out, result);
    std::size_t runs = 0;
    std::size_t aggs = 0;
    for (const auto& l : lines(out.str())) {
        runs += l.rfind("run,", 0) == 0;
        aggs += l.rfind("aggregate,", 0) == 0;
    }
    EXPECT_EQ(runs, 600u);
    EXPECT_EQ(aggs, 60u);
}
