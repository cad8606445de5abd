#pragma once

#include <cstddef>
#include <cstdint>

#include "attrdesc/attribute_model.hpp"
#include "attrdesc/fid.hpp"

namespace attrdesc {

/// Maps attribute lists to feature vectors, one output row per batch row.
class Renderer {
 public:
  virtual ~Renderer() = default;
  virtual std::size_t feature_dim() const = 0;
  /// `seed` drives any renderer-side randomness; external peers may ignore it.
  virtual FeatureMatrix render(const SampleBatch& batch, std::uint64_t seed) = 0;
};

}  // namespace attrdesc
