// SPDX-License-Identifier: MIT
#pragma once

// Flat "section.key = value" configuration text. '#' starts a comment; blank
// lines are ignored; lists are comma separated. Keys left out keep their
// defaults. Unknown or repeated keys are errors.

#include "rfflab/experiments.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rfflab {

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string source, std::size_t line, std::string key, const std::string& message);

    const std::string& source() const { return source_; }
    std::size_t line() const { return line_; }  // 0 when not tied to one line
    const std::string& key() const { return key_; }

private:
    std::string source_;
    std::size_t line_;
    std::string key_;
};

// Throws ConfigError with line and field on malformed, unknown or invalid
// entries (including values that fail ExperimentConfig::validate).
ExperimentConfig parse_config(std::istream& in, std::string_view source_name = "<config>");
ExperimentConfig parse_config_text(std::string_view text, std::string_view source_name = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

// Every key with a comment; parse_config(emit_config(c)) reproduces c.
std::string emit_config(const ExperimentConfig& cfg);

// Shortest text that parses back to the same double.
std::string format_shortest(double value);

}  // namespace rfflab
