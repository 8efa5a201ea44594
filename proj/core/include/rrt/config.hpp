#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace rrt {

/// Flat key/value view of a config file.
///
/// Keys under a [section] header are stored as "section.key". Values keep
/// their text form: quotes are stripped from strings and arrays become
/// comma-separated lists without brackets.
using ConfigMap = std::map<std::string, std::string>;

// Parses the TOML subset used by experiment files: comments, [section]
// headers, and key = value lines holding strings, numbers, booleans or flat
// arrays. Throws ConfigError naming the offending line.
ConfigMap parse_config(std::string_view text);

// Throws IoError if the file cannot be read.
ConfigMap load_config_file(const std::filesystem::path& path);

// Parses "key=value" and stores it, overriding any earlier value.
void apply_override(ConfigMap& config, std::string_view assignment);

// Typed readers. All throw ConfigError on malformed text.
double parse_real(std::string_view text, std::string_view key);
std::uint64_t parse_count(std::string_view text, std::string_view key);
bool parse_bool(std::string_view text, std::string_view key);
std::vector<std::string> split_list(std::string_view text);

}  // namespace rrt
