#include "leolora/report.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>
#include <ostream>

namespace leolora::report {

namespace {

constexpr std::string_view kHeader =
    "row_type,scheme,n_devices,sim_time_s,rep_index,seed,generated,transmitted,delivered_unique,"
    "collided_frames,collided_receptions,lost_no_coverage,delivery_ratio,max_queue_depth,"
    "generated_sd,transmitted_sd,delivered_unique_sd,collided_frames_sd,collided_receptions_sd,"
    "lost_no_coverage_sd,delivery_ratio_sd,max_queue_depth_sd,status";

std::string fixed(double v)
{
    return fmt::format("{:.6f}", v);
}

std::string cell_prefix(std::string_view row_type, const sweep::CellKey& cell)
{
    return fmt::format("{},{},{},{}", row_type, mac::to_string(cell.scheme), cell.n_devices,
                       fmt::format("{}", cell.sim_time_s));
}

} // namespace

std::string csv_field(std::string_view text)
{
    if (text.find_first_of(",\"\r\n") == std::string_view::npos) {
        return std::string(text);
    }
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

void write_header(std::ostream& out)
{
    out << kHeader << '\n';
}

void write_run_row(std::ostream& out, const sweep::SweepRun& run)
{
    out << cell_prefix("run", run.cell) << ',' << run.rep_index << ',' << run.seed;
    if (!run.result) {
        out << ",,,,,,,,,,,,,,,,," << csv_field("error: " + run.error) << '\n';
        return;
    }
    const netsim::Metrics& m = run.result->metrics;
    out << fmt::format(",{},{},{},{},{},{},{},{}", m.generated, m.transmitted, m.delivered_unique, m.collided_frames,
                       m.collided_receptions, m.lost_no_coverage,
                       run.result->delivery_ratio ? fixed(*run.result->delivery_ratio) : std::string{},
                       m.max_queue_depth);
    out << ",,,,,,,,,ok\n";
}

void write_aggregate_row(std::ostream& out, const sweep::SweepCell& cell)
{
    out << cell_prefix("aggregate", cell.cell) << ",,";
    if (!cell.aggregate) {
        out << ",,,,,,,,,,,,,,,,," << csv_field("error: no successful runs") << '\n';
        return;
    }
    const netsim::Aggregate& a = *cell.aggregate;
    const auto ratio_mean = a.delivery_ratio.count > 0 ? fixed(a.delivery_ratio.mean) : std::string{};
    const auto ratio_sd = a.delivery_ratio.count > 0 ? fixed(a.delivery_ratio.stddev) : std::string{};
    out << fmt::format(",{},{},{},{},{},{},{},{}", fixed(a.generated.mean), fixed(a.transmitted.mean),
                       fixed(a.delivered_unique.mean), fixed(a.collided_frames.mean),
                       fixed(a.collided_receptions.mean), fixed(a.lost_no_coverage.mean), ratio_mean,
                       fixed(a.max_queue_depth.mean));
    out << fmt::format(",{},{},{},{},{},{},{},{}", fixed(a.generated.stddev), fixed(a.transmitted.stddev),
                       fixed(a.delivered_unique.stddev), fixed(a.collided_frames.stddev),
                       fixed(a.collided_receptions.stddev), fixed(a.lost_no_coverage.stddev), ratio_sd,
                       fixed(a.max_queue_depth.stddev));
    const auto failed = std::count_if(cell.runs.begin(), cell.runs.end(), [](const auto& r) { return !r.result; });
    out << ',' << (failed == 0 ? std::string("ok") : fmt::format("partial: {} failed", failed)) << '\n';
}

void write_sweep(std::ostream& out, const sweep::SweepResult& result)
{
    write_header(out);
    for (const auto& cell : result.cells) {
        for (const auto& run : cell.runs) {
            write_run_row(out, run);
        }
        write_aggregate_row(out, cell);
    }
}

} // namespace leolora::report
