#include "attrdesc/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "attrdesc/error.hpp"

namespace attrdesc {

ConfigTree read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

ConfigTree parse_config_text(const std::string& text, const std::string& source) {
  ConfigTree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(source + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  return tree;
}

std::string trim(std::string_view text) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  return std::string(text.substr(b, e - b));
}

double parse_number(std::string_view text, std::string_view what) {
  const std::string t = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw ConfigError(std::string(what) + ": not a number: '" + t + "'");
  return v;
}

std::uint64_t parse_unsigned(std::string_view text, std::string_view what) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw ConfigError(std::string(what) + ": not an unsigned integer: '" + t + "'");
  return v;
}

bool parse_bool(std::string_view text, std::string_view what) {
  const std::string t = trim(text);
  if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
  if (t == "false" || t == "no" || t == "off" || t == "0") return false;
  throw ConfigError(std::string(what) + ": expected true/false, got '" + t + "'");
}

std::vector<std::string> parse_string_list(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (char c : text) {
    if (c == ',') {
      if (auto t = trim(current); !t.empty()) out.push_back(t);
      current.clear();
    } else {
      current += c;
    }
  }
  if (auto t = trim(current); !t.empty()) out.push_back(t);
  return out;
}

std::vector<double> parse_number_list(std::string_view text, std::string_view what) {
  std::string normalized(text);
  for (char& c : normalized)
    if (std::isspace(static_cast<unsigned char>(c))) c = ',';
  std::vector<double> out;
  for (const auto& item : parse_string_list(normalized)) out.push_back(parse_number(item, what));
  return out;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::optional<std::string> config_value(const ConfigTree& tree, const std::string& section,
                                        const std::string& key) {
  const ConfigTree* node = &tree;
  if (!section.empty()) {
    auto it = tree.find(section);
    if (it == tree.not_found()) return std::nullopt;
    node = &it->second;
  }
  auto it = node->find(key);
  if (it == node->not_found()) return std::nullopt;
  return trim(it->second.data());
}

}  // namespace attrdesc
