#include "attrdesc/schema_file.hpp"

#include <cmath>

#include "attrdesc/error.hpp"

namespace attrdesc {
namespace {

constexpr std::string_view kSectionPrefix = "attribute ";

std::pair<double, double> parse_domain(std::string_view text, const std::string& where) {
  std::string t(text);
  for (char& c : t)
    if (c == ':') c = ',';
  const auto v = parse_number_list(t, where + " domain");
  if (v.size() != 2) throw ConfigError(where + ": domain must be 'lo:hi'");
  return {v[0], v[1]};
}

}  // namespace

std::vector<double> parse_grid(std::string_view text, const AttributeDecl& decl) {
  const std::string t = trim(text);
  const std::string where = "attribute '" + decl.name + "' grid";
  if (t.rfind("segments:", 0) == 0) {
    const auto n = parse_unsigned(std::string_view(t).substr(9), where);
    if (n == 0) throw ConfigError(where + ": segments must be >= 1");
    std::vector<double> grid;
    // A circular domain would repeat its first point at 360, so it gets n points instead of n + 1.
    const std::size_t points = decl.kind == AttributeKind::circular ? n : n + 1;
    for (std::size_t k = 0; k < points; ++k)
      grid.push_back(k == n ? decl.hi : decl.lo + decl.width() * static_cast<double>(k) / static_cast<double>(n));
    return grid;
  }
  if (t.find(':') != std::string::npos) {
    std::string range = t;
    for (char& c : range)
      if (c == ':') c = ',';
    const auto v = parse_number_list(range, where);
    if (v.size() != 3) throw ConfigError(where + ": range must be 'lo:hi:step'");
    const double lo = v[0], hi = v[1], step = v[2];
    if (!(step > 0.0) || hi < lo) throw ConfigError(where + ": bad range '" + t + "'");
    std::vector<double> grid;
    const double tol = 1e-9 * std::max(1.0, std::abs(hi - lo));
    for (std::size_t k = 0;; ++k) {
      const double value = lo + step * static_cast<double>(k);
      if (value > hi + tol) break;
      grid.push_back(std::min(value, hi));
    }
    return grid;
  }
  return parse_number_list(t, where);
}

AttributeSchema schema_from_config(const ConfigTree& tree, const std::string& source) {
  AttributeSchema schema;
  schema.source = source;
  if (auto v = config_value(tree, "", "version"))
    schema.version = static_cast<int>(parse_unsigned(*v, "version"));
  for (const auto& [section, body] : tree) {
    if (body.empty()) continue;  // top-level key
    if (section.rfind(kSectionPrefix, 0) != 0) continue;
    AttributeDecl decl;
    decl.name = trim(std::string_view(section).substr(kSectionPrefix.size()));
    const std::string where = "attribute '" + decl.name + "'";
    const auto get = [&](const char* key) { return config_value(tree, section, key); };

    const auto kind = get("kind");
    if (!kind) throw ConfigError(where + ": missing kind");
    if (*kind == "circular") {
      decl.kind = AttributeKind::circular;
      decl.lo = 0.0;
      decl.hi = kFullTurn;
    } else if (*kind == "linear") {
      decl.kind = AttributeKind::linear;
    } else {
      throw ConfigError(where + ": kind must be circular or linear");
    }
    if (auto d = get("domain")) {
      std::tie(decl.lo, decl.hi) = parse_domain(*d, where);
    } else if (decl.kind == AttributeKind::linear) {
      throw ConfigError(where + ": missing domain");
    }
    if (auto c = get("components")) decl.components = parse_unsigned(*c, where + " components");
    if (auto s = get("sigma")) {
      // "5%" means five percent of the domain width.
      if (!s->empty() && s->back() == '%')
        decl.fixed_sigma = parse_number(s->substr(0, s->size() - 1), where + " sigma") / 100.0 * decl.width();
      else
        decl.fixed_sigma = parse_number(*s, where + " sigma");
    } else {
      throw ConfigError(where + ": missing sigma");
    }
    const auto grid = get("grid");
    if (!grid) throw ConfigError(where + ": missing grid");
    decl.grid = parse_grid(*grid, decl);
    schema.attributes.push_back(std::move(decl));
  }
  return schema;
}

AttributeSchema parse_schema_text(const std::string& text, const std::string& source) {
  return validate_schema(schema_from_config(parse_config_text(text, source), source));
}

AttributeSchema load_schema(const std::filesystem::path& path) {
  return validate_schema(schema_from_config(read_config_file(path), path.string()));
}

}  // namespace attrdesc
