#pragma once

// Key/value configuration documents (INI grammar, see docs/file-formats.md).

#include <boost/property_tree/ptree.hpp>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace attrdesc {

using ConfigTree = boost::property_tree::ptree;

ConfigTree read_config_file(const std::filesystem::path& path);
ConfigTree parse_config_text(const std::string& text, const std::string& source);

double parse_number(std::string_view text, std::string_view what);
std::uint64_t parse_unsigned(std::string_view text, std::string_view what);
bool parse_bool(std::string_view text, std::string_view what);
/// Comma- or whitespace-separated numbers.
std::vector<double> parse_number_list(std::string_view text, std::string_view what);
std::vector<std::string> parse_string_list(std::string_view text);

std::string trim(std::string_view text);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// Looks up `section.key` (sections may contain spaces); nullopt when absent.
std::optional<std::string> config_value(const ConfigTree& tree, const std::string& section,
                                        const std::string& key);

}  // namespace attrdesc
