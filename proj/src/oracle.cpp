#include "attrdesc/oracle.hpp"

#include <cmath>
#include <numbers>

#include "attrdesc/error.hpp"
#include "attrdesc/rng.hpp"
#include "attrdesc/schema_file.hpp"

namespace attrdesc {
namespace {

// Modified Gram-Schmidt over the columns of a (rows x cols) matrix.
void orthonormalize_columns(Matrix& w) {
  for (std::size_t c = 0; c < w.cols(); ++c) {
    for (std::size_t prev = 0; prev < c; ++prev) {
      double proj = 0.0;
      for (std::size_t r = 0; r < w.rows(); ++r) proj += w(r, prev) * w(r, c);
      for (std::size_t r = 0; r < w.rows(); ++r) w(r, c) -= proj * w(r, prev);
    }
    double norm = 0.0;
    for (std::size_t r = 0; r < w.rows(); ++r) norm += w(r, c) * w(r, c);
    norm = std::sqrt(norm);
    if (norm < 1e-12) throw RendererError("degenerate mixing matrix");
    for (std::size_t r = 0; r < w.rows(); ++r) w(r, c) /= norm;
  }
}

Matrix build_mixing(const OracleConfig& cfg) {
  const std::size_t p = embedding_dim(cfg.schema);
  Matrix w(cfg.feature_dim, p);
  Rng rng(derive_seed(cfg.mixing_seed, {0}));
  if (cfg.mixing == MixingKind::dense) {
    for (std::size_t r = 0; r < w.rows(); ++r)
      for (std::size_t c = 0; c < p; ++c) w(r, c) = rng.normal();
    orthonormalize_columns(w);
    return w;
  }
  // Separable: embedding column j feeds feature j only, except that a circular
  // attribute's (cos, sin) pair is rotated within its own 2x2 block.
  std::size_t col = 0;
  for (const auto& decl : cfg.schema.attributes) {
    if (decl.kind == AttributeKind::circular) {
      const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
      w(col, col) = std::cos(angle);
      w(col, col + 1) = -std::sin(angle);
      w(col + 1, col) = std::sin(angle);
      w(col + 1, col + 1) = std::cos(angle);
      col += 2;
    } else {
      w(col, col) = rng.uniform() < 0.5 ? -1.0 : 1.0;
      col += 1;
    }
  }
  return w;
}

}  // namespace

std::size_t embedding_dim(const AttributeSchema& schema) {
  std::size_t p = 0;
  for (const auto& a : schema.attributes) p += a.kind == AttributeKind::circular ? 2 : 1;
  return p;
}

void validate_oracle_config(const OracleConfig& config) {
  if (config.schema.attributes.empty()) throw ConfigError("oracle: schema has no attributes");
  if (config.feature_dim < embedding_dim(config.schema))
    throw ConfigError("oracle: feature_dim " + std::to_string(config.feature_dim) +
                      " smaller than embedding dimension " + std::to_string(embedding_dim(config.schema)));
  if (!(config.noise_sigma >= 0.0) || !std::isfinite(config.noise_sigma))
    throw ConfigError("oracle: noise_sigma must be >= 0");
  if (!config.planted.means.empty()) validate_params(config.schema, config.planted);
}

OracleRenderer::OracleRenderer(OracleConfig config) : config_(std::move(config)) {
  validate_oracle_config(config_);
  mixing_ = build_mixing(config_);
  Rng rng(derive_seed(config_.mixing_seed, {1}));
  offset_.resize(config_.feature_dim);
  for (double& b : offset_) b = rng.normal();
}

Matrix OracleRenderer::embed(const SampleBatch& batch) const {
  const auto& attrs = config_.schema.attributes;
  if (batch.samples.cols() != attrs.size())
    throw RendererError("schema mismatch: batch has " + std::to_string(batch.samples.cols()) +
                        " attributes, schema " + std::to_string(attrs.size()));
  Matrix phi(batch.size(), embedding_dim(config_.schema));
  for (std::size_t k = 0; k < batch.size(); ++k) {
    std::size_t col = 0;
    for (std::size_t a = 0; a < attrs.size(); ++a) {
      const double v = batch.samples(k, a);
      if (!std::isfinite(v)) throw RendererError("schema mismatch: non-finite attribute value");
      if (attrs[a].kind == AttributeKind::circular) {
        const double rad = wrap_degrees(v) * std::numbers::pi / 180.0;
        phi(k, col++) = std::cos(rad);
        phi(k, col++) = std::sin(rad);
      } else {
        if (v < attrs[a].lo || v > attrs[a].hi)
          throw RendererError("schema mismatch: value outside domain of '" + attrs[a].name + "'");
        const double w = attrs[a].width();
        phi(k, col++) = w > 0.0 ? (v - attrs[a].lo) / w : 0.0;
      }
    }
  }
  return phi;
}

FeatureMatrix OracleRenderer::render(const SampleBatch& batch, std::uint64_t seed) {
  FeatureMatrix features = multiply_transposed(embed(batch), mixing_);
  for (std::size_t k = 0; k < features.rows(); ++k) {
    auto row = features.row(k);
    Rng rng(derive_seed(seed, {k}));
    for (std::size_t d = 0; d < row.size(); ++d) row[d] += offset_[d] + config_.noise_sigma * rng.normal();
  }
  return features;
}

FeatureMatrix oracle_render(const OracleConfig& config, const SampleBatch& batch, std::uint64_t seed) {
  return OracleRenderer(config).render(batch, seed);
}

FeatureStats oracle_target_stats(const OracleConfig& config, std::size_t count, std::uint64_t seed) {
  if (count < 2) throw StatsError("count < 2");
  if (config.planted.means.empty()) throw ConfigError("oracle: planted means required for a target");
  OracleRenderer renderer(config);
  const SampleBatch batch = sample_batch(config.schema, config.planted, count, derive_seed(seed, {1}));
  return accumulate_stats(renderer.render(batch, derive_seed(seed, {2})));
}

OracleConfig oracle_config_from(const ConfigTree& tree, const std::filesystem::path& base_dir) {
  OracleConfig cfg;
  const auto get = [&](const char* key) { return config_value(tree, "oracle", key); };
  const auto schema_path = get("schema");
  if (!schema_path) throw ConfigError("oracle: missing schema");
  std::filesystem::path sp(*schema_path);
  if (sp.is_relative()) sp = base_dir / sp;
  cfg.schema = load_schema(sp);
  if (auto v = get("feature_dim")) cfg.feature_dim = parse_unsigned(*v, "oracle feature_dim");
  if (auto v = get("mixing_seed")) cfg.mixing_seed = parse_unsigned(*v, "oracle mixing_seed");
  if (auto v = get("noise_sigma")) cfg.noise_sigma = parse_number(*v, "oracle noise_sigma");
  if (auto v = get("mixing")) {
    if (*v == "dense")
      cfg.mixing = MixingKind::dense;
    else if (*v == "separable")
      cfg.mixing = MixingKind::separable;
    else
      throw ConfigError("oracle: mixing must be dense or separable");
  }
  if (auto v = get("planted")) {
    try {
      cfg.planted = params_from_means(cfg.schema, parse_number_list(*v, "oracle planted"));
      validate_params(cfg.schema, cfg.planted);
    } catch (const SchemaError& e) {
      throw ConfigError(std::string("oracle planted: ") + e.what());
    }
  }
  validate_oracle_config(cfg);
  return cfg;
}

OracleConfig load_oracle_config(const std::filesystem::path& path) {
  return oracle_config_from(read_config_file(path), path.parent_path());
}

}  // namespace attrdesc
