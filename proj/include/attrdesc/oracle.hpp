#pragma once

// Synthetic stand-in for a rendering engine plus feature extractor. Each
// attribute list is embedded as phi (circular -> (cos, sin), linear -> (a - lo)
// / (hi - lo)), then mapped to features = W phi + b + noise with W column-
// orthonormal. The FID objective therefore has its minimum at the planted means.

#include <cstdint>
#include <optional>

#include "attrdesc/config.hpp"
#include "attrdesc/renderer.hpp"

namespace attrdesc {

enum class MixingKind {
  dense,      // W from a random Gaussian matrix, columns orthonormalized
  separable,  // block-diagonal W: each attribute owns its own feature dimensions
};

struct OracleConfig {
  AttributeSchema schema;
  std::size_t feature_dim = 8;
  std::uint64_t mixing_seed = 0;
  double noise_sigma = 0.05;
  MixingKind mixing = MixingKind::dense;
  DistributionParams planted;  // may be empty when only rendering is needed
};

/// 2 per circular attribute plus 1 per linear attribute.
std::size_t embedding_dim(const AttributeSchema& schema);
void validate_oracle_config(const OracleConfig& config);

class OracleRenderer final : public Renderer {
 public:
  explicit OracleRenderer(OracleConfig config);

  std::size_t feature_dim() const override { return config_.feature_dim; }
  FeatureMatrix render(const SampleBatch& batch, std::uint64_t seed) override;

  /// Noise-free embedding of each row.
  Matrix embed(const SampleBatch& batch) const;

  const OracleConfig& config() const { return config_; }
  const Matrix& mixing() const { return mixing_; }  // D x dim(phi)
  const std::vector<double>& offset() const { return offset_; }

 private:
  OracleConfig config_;
  Matrix mixing_;
  std::vector<double> offset_;
};

FeatureMatrix oracle_render(const OracleConfig& config, const SampleBatch& batch, std::uint64_t seed);

/// Renders `count` samples from the planted means; plays the role of the real target set.
FeatureStats oracle_target_stats(const OracleConfig& config, std::size_t count, std::uint64_t seed);

/// Reads the [oracle] section: schema, feature_dim, mixing, mixing_seed, noise_sigma, planted.
/// Relative schema paths resolve against `base_dir`.
OracleConfig oracle_config_from(const ConfigTree& tree, const std::filesystem::path& base_dir);
OracleConfig load_oracle_config(const std::filesystem::path& path);

}  // namespace attrdesc
