#pragma once

#include "leolora/netsim.hpp"
#include "leolora/sweep.hpp"

#include <iosfwd>
#include <string>
#include <string_view>

namespace leolora::report {

/// RFC 4180 field quoting: wraps in double quotes when the field contains a
/// comma, quote, CR or LF, doubling embedded quotes.
std::string csv_field(std::string_view text);

void write_header(std::ostream& out);

/// One per-run row; a failed run carries its error in the status column.
void write_run_row(std::ostream& out, const sweep::SweepRun& run);

/// Mean values in the metric columns, sample standard deviations in the *_sd columns.
void write_aggregate_row(std::ostream& out, const sweep::SweepCell& cell);

/// Header, then for each cell its run rows followed by its aggregate row.
void write_sweep(std::ostream& out, const sweep::SweepResult& result);

} // namespace leolora::report
