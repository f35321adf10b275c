#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace leolora::cli {

enum ExitCode : int { kOk = 0, kValidationError = 1, kRunFailure = 2 };

struct Options {
    std::optional<std::string> scenario_path;
    std::vector<std::string> overrides; // "section.key=value"
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_path; // stdout when empty
    int parallel = 1;
    bool print_config = false;
    std::optional<std::string> trace_path;
    /// Test hook for selftest; only "beacon-timing" is recognised.
    std::optional<std::string> inject_fault;
};

int cmd_run(const Options& options, std::ostream& out, std::ostream& err);
int cmd_sweep(const Options& options, std::ostream& out, std::ostream& err);
int cmd_selftest(const Options& options, std::ostream& out, std::ostream& err);

} // namespace leolora::cli
