#include "attrdesc/attribute_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "attrdesc/error.hpp"
#include "attrdesc/rng.hpp"

namespace attrdesc {
namespace {

constexpr double kWeightTolerance = 1e-12;

std::string num(double v) {
  std::string s = std::to_string(v);
  s.erase(s.find_last_not_of('0') + 1);
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

double grid_tolerance(const AttributeDecl& decl) {
  return 1e-9 * std::max(1.0, std::abs(decl.width()));
}

std::size_t pick_component(const std::vector<double>& weights, double u) {
  double cumulative = 0.0;
  for (std::size_t c = 0; c + 1 < weights.size(); ++c) {
    cumulative += weights[c];
    if (u < cumulative) return c;
  }
  return weights.size() - 1;
}

}  // namespace

std::size_t AttributeSchema::coordinate_count() const {
  std::size_t m = 0;
  for (const auto& a : attributes) m += a.components;
  return m;
}

AttributeSchema validate_schema(const AttributeSchema& schema) {
  if (schema.attributes.empty()) throw SchemaError("schema declares no attributes");
  std::set<std::string> names;
  for (const auto& a : schema.attributes) {
    if (a.name.empty()) throw SchemaError("attribute name empty");
    if (!names.insert(a.name).second) throw SchemaError("duplicate name '" + a.name + "'");
    const std::string where = "attribute '" + a.name + "': ";
    if (a.kind == AttributeKind::circular && (a.lo != 0.0 || a.hi != kFullTurn))
      throw SchemaError(where + "circular domain must be [0, 360)");
    if (!(a.lo < a.hi)) throw SchemaError(where + "lo >= hi");
    if (a.components < 1) throw SchemaError(where + "components must be >= 1");
    if (!(a.fixed_sigma >= 0.0) || !std::isfinite(a.fixed_sigma))
      throw SchemaError(where + "fixed_sigma must be >= 0");
    if (a.grid.empty()) throw SchemaError(where + "empty grid");
    for (std::size_t g = 0; g < a.grid.size(); ++g) {
      const double v = a.grid[g];
      const bool inside = a.kind == AttributeKind::circular ? (v >= 0.0 && v < kFullTurn)
                                                            : (v >= a.lo && v <= a.hi);
      if (!inside) throw SchemaError(where + "grid value outside domain (" + num(v) + ")");
      if (g > 0 && !(v > a.grid[g - 1])) throw SchemaError(where + "non-increasing grid");
    }
  }
  return schema;
}

std::vector<Coordinate> coordinate_list(const AttributeSchema& schema) {
  std::vector<Coordinate> coords;
  coords.reserve(schema.coordinate_count());
  for (std::size_t a = 0; a < schema.attributes.size(); ++a)
    for (std::size_t c = 0; c < schema.attributes[a].components; ++c) coords.push_back({a, c});
  return coords;
}

std::string coordinate_label(const AttributeSchema& schema, const Coordinate& coord) {
  const auto& decl = schema.attributes.at(coord.attribute);
  if (decl.components == 1) return decl.name;
  return decl.name + "." + std::to_string(coord.component);
}

DistributionParams default_params(const AttributeSchema& schema) {
  std::vector<double> means;
  for (const auto& coord : coordinate_list(schema))
    means.push_back(schema.attributes[coord.attribute].grid.front());
  return params_from_means(schema, std::move(means));
}

DistributionParams params_from_means(const AttributeSchema& schema, std::vector<double> means) {
  DistributionParams p;
  p.means = std::move(means);
  for (const auto& a : schema.attributes)
    p.component_weights.emplace_back(a.components, 1.0 / static_cast<double>(a.components));
  return p;
}

void validate_params(const AttributeSchema& schema, const DistributionParams& params) {
  const auto coords = coordinate_list(schema);
  if (params.means.size() != coords.size())
    throw SchemaError("params/schema mismatch: " + std::to_string(params.means.size()) +
                      " means for " + std::to_string(coords.size()) + " coordinates");
  if (params.component_weights.size() != schema.attributes.size())
    throw SchemaError("params/schema mismatch: component weight lists");
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const auto& decl = schema.attributes[coords[i].attribute];
    const double m = params.means[i];
    const bool inside = decl.kind == AttributeKind::circular ? (m >= 0.0 && m < kFullTurn)
                                                             : (m >= decl.lo && m <= decl.hi);
    if (!inside)
      throw SchemaError("mean " + num(m) + " outside domain of " + coordinate_label(schema, coords[i]));
  }
  for (std::size_t a = 0; a < schema.attributes.size(); ++a) {
    const auto& w = params.component_weights[a];
    if (w.size() != schema.attributes[a].components)
      throw SchemaError("params/schema mismatch: weights for '" + schema.attributes[a].name + "'");
    if (std::any_of(w.begin(), w.end(), [](double x) { return !(x >= 0.0); }))
      throw SchemaError("negative component weight for '" + schema.attributes[a].name + "'");
    const double sum = std::accumulate(w.begin(), w.end(), 0.0);
    if (std::abs(sum - 1.0) > kWeightTolerance)
      throw SchemaError("component weights for '" + schema.attributes[a].name + "' do not sum to 1");
  }
}

std::size_t grid_index(const AttributeDecl& decl, double value) {
  const double tol = grid_tolerance(decl);
  for (std::size_t g = 0; g < decl.grid.size(); ++g)
    if (std::abs(decl.grid[g] - value) <= tol) return g;
  return static_cast<std::size_t>(-1);
}

double wrap_degrees(double value) {
  double w = std::fmod(value, kFullTurn);
  if (w < 0.0) w += kFullTurn;
  // fmod of a tiny negative number plus 360 can round up to exactly 360.
  if (w >= kFullTurn) w = 0.0;
  return w + 0.0;  // normalizes -0.0
}

double fold_into_domain(const AttributeDecl& decl, double value) {
  if (decl.kind == AttributeKind::circular) return wrap_degrees(value);
  return std::clamp(value, decl.lo, decl.hi);
}

double domain_distance(const AttributeDecl& decl, double a, double b) {
  if (decl.kind == AttributeKind::circular) {
    const double d = wrap_degrees(a - b);
    return std::min(d, kFullTurn - d);
  }
  return std::abs(a - b);
}

SampleBatch sample_batch(const AttributeSchema& schema, const DistributionParams& params,
                         std::size_t count, std::uint64_t seed) {
  if (count == 0) throw SchemaError("sample count K must be positive");
  validate_params(schema, params);
  const std::size_t n = schema.attributes.size();
  SampleBatch batch{Matrix(count, n), seed};
  for (std::size_t k = 0; k < count; ++k) {
    Rng rng(derive_seed(seed, {k}));
    std::size_t offset = 0;
    for (std::size_t a = 0; a < n; ++a) {
      const auto& decl = schema.attributes[a];
      std::size_t component = 0;
      // Draw the selector even for C = 1 so every row consumes the same stream layout.
      const double u = rng.uniform();
      if (decl.components > 1) component = pick_component(params.component_weights[a], u);
      const double mean = params.means[offset + component];
      const double value = mean + decl.fixed_sigma * rng.normal();
      batch.samples(k, a) = fold_into_domain(decl, value);
      offset += decl.components;
    }
  }
  return batch;
}

SampleBatch uniform_batch(const AttributeSchema& schema, std::size_t count, std::uint64_t seed) {
  if (count == 0) throw SchemaError("sample count K must be positive");
  const std::size_t n = schema.attributes.size();
  SampleBatch batch{Matrix(count, n), seed};
  for (std::size_t k = 0; k < count; ++k) {
    Rng rng(derive_seed(seed, {k}));
    for (std::size_t a = 0; a < n; ++a) {
      const auto& decl = schema.attributes[a];
      if (decl.kind == AttributeKind::circular)
        batch.samples(k, a) = wrap_degrees(rng.uniform(0.0, kFullTurn));
      else
        batch.samples(k, a) = decl.hi > decl.lo ? std::min(rng.uniform(decl.lo, decl.hi), decl.hi)
                                                : decl.lo;
    }
  }
  return batch;
}

}  // namespace attrdesc
