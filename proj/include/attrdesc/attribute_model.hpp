#pragma once

// Attribute declarations, the flattened coordinate space of optimizable means,
// and the sampler that draws concrete attribute lists from those means.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "attrdesc/matrix.hpp"

namespace attrdesc {

enum class AttributeKind { circular, linear };

inline constexpr double kFullTurn = 360.0;

struct AttributeDecl {
  std::string name;
  AttributeKind kind = AttributeKind::linear;
  double lo = 0.0;  // circular attributes always use [0, 360)
  double hi = 1.0;
  std::size_t components = 1;
  double fixed_sigma = 0.0;
  std::vector<double> grid;  // candidate means, strictly increasing

  double width() const { return hi - lo; }
};

struct AttributeSchema {
  std::vector<AttributeDecl> attributes;
  int version = 1;
  std::string source;  // file or profile the schema came from; echoed in results

  std::size_t attribute_count() const { return attributes.size(); }
  /// M: one coordinate per Gaussian component mean.
  std::size_t coordinate_count() const;
};

struct Coordinate {
  std::size_t attribute = 0;
  std::size_t component = 0;
  friend bool operator==(const Coordinate&, const Coordinate&) = default;
};

struct DistributionParams {
  std::vector<double> means;                           // length M, coordinate_list order
  std::vector<std::vector<double>> component_weights;  // one list per attribute, sums to 1
  friend bool operator==(const DistributionParams&, const DistributionParams&) = default;
};

/// K rows x N columns; row k is one attribute list.
struct SampleBatch {
  Matrix samples;
  std::uint64_t seed = 0;

  std::size_t size() const { return samples.rows(); }
};

/// Throws SchemaError naming the first violated invariant.
AttributeSchema validate_schema(const AttributeSchema& schema);

/// Attributes in declaration order, components ascending.
std::vector<Coordinate> coordinate_list(const AttributeSchema& schema);

/// Human-readable coordinate label, e.g. "orientation.3" or "camera_height".
std::string coordinate_label(const AttributeSchema& schema, const Coordinate& coord);

/// Each coordinate at its first grid value, uniform component weights.
DistributionParams default_params(const AttributeSchema& schema);
DistributionParams params_from_means(const AttributeSchema& schema, std::vector<double> means);
void validate_params(const AttributeSchema& schema, const DistributionParams& params);

/// Position of value in the attribute's grid, or npos.
std::size_t grid_index(const AttributeDecl& decl, double value);

double wrap_degrees(double value);
/// Wraps circular values into [0, 360), clamps linear values to [lo, hi].
double fold_into_domain(const AttributeDecl& decl, double value);
/// Shortest angular distance for circular attributes, |a - b| otherwise.
double domain_distance(const AttributeDecl& decl, double a, double b);

/// Draws K attribute lists from the parameterized distributions. Row k uses
/// its own stream derived from (seed, k), so rows are independent of one another.
SampleBatch sample_batch(const AttributeSchema& schema, const DistributionParams& params,
                         std::size_t count, std::uint64_t seed);

/// Every attribute uniform over its domain.
SampleBatch uniform_batch(const AttributeSchema& schema, std::size_t count, std::uint64_t seed);

}  // namespace attrdesc
