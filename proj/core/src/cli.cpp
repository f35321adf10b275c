#include "leolora/cli.hpp"

#include "leolora/report.hpp"
#include "leolora/scenario_file.hpp"
#include "leolora/selftest.hpp"
#include "leolora/sweep.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <fstream>
#include <iostream>
#include <sstream>

namespace leolora::cli {

namespace {

std::optional<scenario_file::ScenarioDocument> load_document(const Options& o, std::ostream& err)
{
    try {
        scenario_file::ScenarioDocument doc;
        if (o.scenario_path) {
            doc = scenario_file::load(*o.scenario_path);
        }
        for (const auto& ov : o.overrides) {
            scenario_file::apply_override(doc, ov);
        }
        if (o.seed) {
            doc.scenario.master_seed = *o.seed;
            doc.sweep.base_seed = *o.seed;
        }
        scenario_file::validate(doc);
        return doc;
    } catch (const scenario_file::ParseError& e) {
        err << "error: " << e.what() << '\n';
    } catch (const netsim::ScenarioError& e) {
        err << "error: invalid " << e.what() << '\n';
    }
    return std::nullopt;
}

// Writes `body` to --out (or `out`), returning false on I/O failure.
bool emit(const Options& o, std::ostream& out, std::ostream& err, const std::string& body)
{
    if (!o.out_path) {
        out << body;
        return static_cast<bool>(out);
    }
    std::ofstream f(*o.out_path, std::ios::binary | std::ios::trunc);
    f << body;
    f.close();
    if (!f) {
        err << "error: cannot write " << *o.out_path << '\n';
        return false;
    }
    return true;
}

} // namespace

int cmd_run(const Options& o, std::ostream& out, std::ostream& err)
{
    auto doc = load_document(o, err);
    if (!doc) {
        return kValidationError;
    }
    if (o.print_config) {
        out << scenario_file::format(*doc);
        return kOk;
    }

    std::ofstream trace;
    netsim::RunOptions ro;
    if (o.trace_path) {
        trace.open(*o.trace_path, std::ios::binary | std::ios::trunc);
        if (!trace) {
            err << "error: cannot open trace file " << *o.trace_path << '\n';
            return kRunFailure;
        }
        ro.trace = &trace;
    }

    const auto& sc = doc->scenario;
    sweep::SweepRun row;
    row.cell = {sc.scheme, sc.n_devices, sc.sim_time_s};
    row.seed = sc.master_seed;
    int status = kOk;
    try {
        row.result = netsim::run(sc, sc.master_seed, ro);
    } catch (const std::exception& e) {
        row.error = e.what();
        err << "error: run failed: " << e.what() << '\n';
        status = kRunFailure;
    }

    std::ostringstream csv;
    report::write_header(csv);
    report::write_run_row(csv, row);
    if (!emit(o, out, err, csv.str())) {
        return kRunFailure;
    }
    return status;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err)
{
    auto doc = load_document(o, err);
    if (!doc) {
        return kValidationError;
    }
    if (o.parallel < 1) {
        err << "error: invalid parallel: must be >= 1\n";
        return kValidationError;
    }
    if (o.print_config) {
        out << scenario_file::format(*doc);
        return kOk;
    }

    sweep::SweepResult result;
    try {
        result = sweep::run_sweep(doc->scenario, doc->sweep, o.parallel);
    } catch (const std::exception& e) {
        err << "error: sweep failed: " << e.what() << '\n';
        return kRunFailure;
    }
    std::ostringstream csv;
    report::write_sweep(csv, result);
    if (!emit(o, out, err, csv.str())) {
        return kRunFailure;
    }
    if (result.any_failed()) {
        for (const auto& cell : result.cells) {
            for (const auto& r : cell.runs) {
                if (!r.result) {
                    err << fmt::format("error: {} n={} t={} rep={}: {}\n", mac::to_string(r.cell.scheme),
                                       r.cell.n_devices, r.cell.sim_time_s, r.rep_index, r.error);
                }
            }
        }
        return kRunFailure;
    }
    return kOk;
}

int cmd_selftest(const Options& o, std::ostream& out, std::ostream& err)
{
    selftest::Options so;
    if (o.scenario_path || !o.overrides.empty() || o.seed) {
        auto doc = load_document(o, err);
        if (!doc) {
            return kValidationError;
        }
        so.scenario = doc->scenario;
    }
    if (o.inject_fault) {
        if (*o.inject_fault != "beacon-timing") {
            err << "error: unknown fault '" << *o.inject_fault << "'\n";
            return kValidationError;
        }
        so.perturb_beacon_timing = true;
    }
    const auto report = selftest::run(so);
    for (const auto& c : report.checks) {
        out << fmt::format("{} {} ({:.2f} s): {}\n", c.passed ? "PASS" : "FAIL", c.name, c.elapsed.count(), c.detail);
    }
    if (!report.all_passed()) {
        for (const auto& c : report.checks) {
            if (!c.passed) {
                err << "selftest failed: " << c.name << '\n';
            }
        }
        return kRunFailure;
    }
    return kOk;
}

} // namespace leolora::cli
