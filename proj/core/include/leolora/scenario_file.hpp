#pragma once

#include "leolora/netsim.hpp"
#include "leolora/sweep.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

namespace leolora::scenario_file {

/// Malformed file content: carries the source name, line and key involved.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& source, int line, const std::string& key, const std::string& message);
    int line() const { return line_; }
    const std::string& key() const { return key_; }

private:
    int line_;
    std::string key_;
};

/// A scenario plus the sweep axes, as read from an INI-style file:
///
///     [section]
///     key = value          # comment
///
/// Every key is optional; absent keys keep the reference defaults.
struct ScenarioDocument {
    netsim::Scenario scenario;
    sweep::SweepSpec sweep;
    /// Line of each key as "section.key"; used for diagnostics.
    std::map<std::string, int> key_lines;
    std::string source = "<defaults>";
};

ScenarioDocument parse(std::istream& in, std::string source = "<input>");
ScenarioDocument load(const std::filesystem::path& path);

/// Applies "section.key=value"; throws ParseError naming the override.
void apply_override(ScenarioDocument& doc, std::string_view assignment);

/// Fully resolved configuration in the same format parse() accepts.
std::string format(const ScenarioDocument& doc);

/// Validates scenario and sweep; rethrows ScenarioError with the file/line prefix when known.
void validate(const ScenarioDocument& doc);

} // namespace leolora::scenario_file
