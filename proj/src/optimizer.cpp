#include "attrdesc/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "attrdesc/rng.hpp"

namespace attrdesc {
namespace {

// Stream tags keep the seed families of different methods disjoint.
constexpr std::uint64_t kDescentTag = 0xde5c;
constexpr std::uint64_t kRandomSearchTag = 0x5ea7c;
constexpr std::uint64_t kReinforceTag = 0x7e1f;
constexpr std::uint64_t kRandomAttributesTag = 0x7a2d;

class TraceRecorder {
 public:
  explicit TraceRecorder(bool record_time) : record_time_(record_time), start_(Clock::now()) {}

  double run(const Objective& objective, const DistributionParams& params, std::uint64_t seed,
             std::size_t epoch, std::int64_t coordinate, double candidate) {
    double fid;
    try {
      fid = objective(params, seed);
    } catch (const std::exception& e) {
      throw OptimizationAborted(e.what(), trace_);
    }
    TraceRecord rec;
    rec.eval = trace_.records.size();
    rec.epoch = epoch;
    rec.coordinate = coordinate;
    rec.candidate = candidate;
    rec.fid = fid;
    if (fid < best_fid_) {
      best_fid_ = fid;
      best_params_ = params;
    }
    rec.best_fid = best_fid_;
    if (record_time_)
      rec.millis = std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
    trace_.records.push_back(rec);
    return fid;
  }

  OptimResult finish(std::string method) && {
    OptimResult r;
    r.method = std::move(method);
    r.best_params = std::move(best_params_);
    r.best_fid = best_fid_;
    r.final_params = r.best_params;
    r.final_fid = best_fid_;
    r.trace = std::move(trace_);
    return r;
  }

 private:
  using Clock = std::chrono::steady_clock;
  bool record_time_;
  Clock::time_point start_;
  OptimizationTrace trace_;
  double best_fid_ = std::numeric_limits<double>::infinity();
  DistributionParams best_params_;
};

// Maps a coordinate mean into [0, 1] units of its attribute's domain and back.
double to_unit(const AttributeDecl& decl, double mean) { return (mean - decl.lo) / decl.width(); }

double from_unit(const AttributeDecl& decl, double unit) {
  if (decl.kind == AttributeKind::circular) return wrap_degrees(unit * kFullTurn);
  return std::clamp(decl.lo + unit * decl.width(), decl.lo, decl.hi);
}

double fold_unit(const AttributeDecl& decl, double unit) {
  if (decl.kind == AttributeKind::circular) {
    double w = unit - std::floor(unit);
    return w >= 1.0 ? 0.0 : w;
  }
  return std::clamp(unit, 0.0, 1.0);
}

// Sweep body shared by sweep_coordinate and attribute_descent so the latter can trace each evaluation.
template <typename Eval>
SweepResult sweep_with(const AttributeSchema& schema, DistributionParams& params, std::size_t coordinate,
                       Eval&& eval) {
  const auto coords = coordinate_list(schema);
  const auto& decl = schema.attributes[coords.at(coordinate).attribute];
  SweepResult sweep;
  sweep.coordinate = coordinate;
  sweep.incumbent = grid_index(decl, params.means[coordinate]);
  if (sweep.incumbent == static_cast<std::size_t>(-1))
    throw SchemaError("coordinate " + coordinate_label(schema, coords[coordinate]) + " is off-grid");
  DistributionParams trial = params;
  for (std::size_t g = 0; g < decl.grid.size(); ++g) {
    trial.means[coordinate] = decl.grid[g];
    sweep.fids.push_back(eval(trial, g));
    if (sweep.fids[g] < sweep.fids[sweep.chosen]) sweep.chosen = g;
  }
  params.means[coordinate] = decl.grid[sweep.chosen];
  return sweep;
}

void check_budget(std::size_t budget) {
  if (budget < 1) throw ConfigError("budget must be >= 1");
}

}  // namespace

void validate_eval_config(const EvalConfig& cfg) {
  if (cfg.samples_per_eval < 2) throw ConfigError("samples_per_eval must be >= 2");
  if (cfg.epochs < 1) throw ConfigError("epochs must be >= 1");
}

SamplingDirective random_attributes(const AttributeSchema&) { return SamplingDirective::uniform; }

double evaluate(const AttributeSchema& schema, const DistributionParams& params, Renderer& renderer,
                const FeatureStats& target, const EvalConfig& cfg, std::uint64_t eval_seed,
                SamplingDirective sampling) {
  if (renderer.feature_dim() != target.dim())
    throw StatsError("dimension mismatch " + std::to_string(renderer.feature_dim()) + " vs " +
                     std::to_string(target.dim()));
  const SampleBatch batch = sampling == SamplingDirective::uniform
                                ? uniform_batch(schema, cfg.samples_per_eval, eval_seed)
                                : sample_batch(schema, params, cfg.samples_per_eval, eval_seed);
  const FeatureMatrix features = renderer.render(batch, derive_seed(eval_seed, {1}));
  if (features.rows() != batch.size() || features.cols() != renderer.feature_dim())
    throw RendererError("renderer returned " + std::to_string(features.rows()) + "x" +
                        std::to_string(features.cols()) + " features for " + std::to_string(batch.size()) +
                        " samples");
  return frechet_distance(accumulate_stats(features), target);
}

Objective fid_objective(const AttributeSchema& schema, Renderer& renderer, const FeatureStats& target,
                        const EvalConfig& cfg, SamplingDirective sampling) {
  return [&schema, &renderer, &target, cfg, sampling](const DistributionParams& params, std::uint64_t seed) {
    return evaluate(schema, params, renderer, target, cfg, seed, sampling);
  };
}

SweepResult sweep_coordinate(const AttributeSchema& schema, DistributionParams& params, std::size_t coordinate,
                             const Objective& objective, std::uint64_t sweep_seed, bool common_random_numbers) {
  return sweep_with(schema, params, coordinate, [&](const DistributionParams& trial, std::size_t g) {
    return objective(trial, common_random_numbers ? sweep_seed : derive_seed(sweep_seed, {g}));
  });
}

std::uint64_t descent_sweep_seed(std::uint64_t base_seed, std::size_t epoch, std::size_t position) {
  return derive_seed(base_seed, {kDescentTag, epoch, position});
}

OptimResult attribute_descent(const AttributeSchema& schema, const DistributionParams& init,
                              const Objective& objective, const EvalConfig& cfg) {
  validate_eval_config(cfg);
  validate_params(schema, init);
  const auto coords = coordinate_list(schema);
  for (std::size_t i = 0; i < coords.size(); ++i)
    if (grid_index(schema.attributes[coords[i].attribute], init.means[i]) == static_cast<std::size_t>(-1))
      throw SchemaError("init off-grid at " + coordinate_label(schema, coords[i]));

  TraceRecorder recorder(cfg.record_time);
  DistributionParams current = init;
  double current_fid = 0.0;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    for (std::size_t i = 0; i < coords.size(); ++i) {
      const std::uint64_t sweep_seed = descent_sweep_seed(cfg.base_seed, epoch, i);
      const auto& grid = schema.attributes[coords[i].attribute].grid;
      const SweepResult sweep = sweep_with(schema, current, i, [&](const DistributionParams& trial, std::size_t g) {
        const std::uint64_t seed = cfg.common_random_numbers ? sweep_seed : derive_seed(sweep_seed, {g});
        return recorder.run(objective, trial, seed, epoch, static_cast<std::int64_t>(i), grid[g]);
      });
      current_fid = sweep.fids[sweep.chosen];
    }
  }
  OptimResult result = std::move(recorder).finish("descent");
  result.final_params = current;
  result.final_fid = current_fid;
  return result;
}

OptimResult attribute_descent(const AttributeSchema& schema, const DistributionParams& init, Renderer& renderer,
                              const FeatureStats& target, const EvalConfig& cfg) {
  return attribute_descent(schema, init, fid_objective(schema, renderer, target, cfg), cfg);
}

OptimResult random_search(const AttributeSchema& schema, const Objective& objective, const EvalConfig& cfg,
                          std::size_t budget) {
  validate_eval_config(cfg);
  check_budget(budget);
  const auto coords = coordinate_list(schema);
  TraceRecorder recorder(cfg.record_time);
  const std::uint64_t shared_seed = derive_seed(cfg.base_seed, {kRandomSearchTag, 0});
  for (std::size_t b = 0; b < budget; ++b) {
    Rng rng(derive_seed(cfg.base_seed, {kRandomSearchTag, 1, b}));
    std::vector<double> means;
    means.reserve(coords.size());
    for (const auto& c : coords) {
      const auto& decl = schema.attributes[c.attribute];
      means.push_back(fold_into_domain(decl, rng.uniform(decl.lo, decl.hi)));
    }
    const auto params = params_from_means(schema, std::move(means));
    const std::uint64_t seed =
        cfg.common_random_numbers ? shared_seed : derive_seed(cfg.base_seed, {kRandomSearchTag, 2, b});
    recorder.run(objective, params, seed, 1, -1, static_cast<double>(b));
  }
  return std::move(recorder).finish("random_search");
}

OptimResult random_search(const AttributeSchema& schema, Renderer& renderer, const FeatureStats& target,
                          const EvalConfig& cfg, std::size_t budget) {
  return random_search(schema, fid_objective(schema, renderer, target, cfg), cfg, budget);
}

void validate_reinforce_hyper(const ReinforceHyper& hyper, std::size_t budget) {
  if (hyper.population < 2) throw ConfigError("population must be >= 2");
  if (budget < hyper.population) throw ConfigError("budget must be >= population");
  if (!(hyper.policy_sigma > 0.0) || !std::isfinite(hyper.policy_sigma))
    throw ConfigError("policy_sigma must be > 0");
  if (!(hyper.step_size >= 0.0) || !std::isfinite(hyper.step_size)) throw ConfigError("step_size must be >= 0");
}

OptimResult reinforce_search(const AttributeSchema& schema, const DistributionParams& init,
                             const Objective& objective, const EvalConfig& cfg, std::size_t budget,
                             const ReinforceHyper& hyper) {
  validate_eval_config(cfg);
  validate_reinforce_hyper(hyper, budget);
  validate_params(schema, init);
  const auto coords = coordinate_list(schema);
  const std::size_t m = coords.size();
  const std::size_t pop = hyper.population;
  const double var = hyper.policy_sigma * hyper.policy_sigma;

  std::vector<double> theta(m);
  for (std::size_t i = 0; i < m; ++i) theta[i] = to_unit(schema.attributes[coords[i].attribute], init.means[i]);

  TraceRecorder recorder(cfg.record_time);
  std::vector<std::vector<double>> eps(pop, std::vector<double>(m));
  std::vector<double> fids(pop);
  double mean_fid = 0.0;
  const std::size_t iterations = budget / pop;
  for (std::size_t t = 0; t < iterations; ++t) {
    const std::uint64_t iter_seed = derive_seed(cfg.base_seed, {kReinforceTag, 0, t});
    for (std::size_t p = 0; p < pop; ++p) {
      Rng rng(derive_seed(cfg.base_seed, {kReinforceTag, 1, t, p}));
      std::vector<double> means(m);
      for (std::size_t i = 0; i < m; ++i) {
        const auto& decl = schema.attributes[coords[i].attribute];
        eps[p][i] = hyper.policy_sigma * rng.normal();
        means[i] = from_unit(decl, fold_unit(decl, theta[i] + eps[p][i]));
      }
      const std::uint64_t seed = cfg.common_random_numbers ? iter_seed : derive_seed(iter_seed, {p});
      fids[p] = recorder.run(objective, params_from_means(schema, std::move(means)), seed, t + 1, -1,
                             static_cast<double>(p));
    }
    mean_fid = 0.0;
    for (double f : fids) mean_fid += f;
    mean_fid /= static_cast<double>(pop);
    // Score of the unclamped Gaussian draw: (x - theta) / sigma^2 = eps / sigma^2.
    // A zero step leaves theta alone even when sigma is small enough to overflow the score.
    if (hyper.step_size == 0.0) continue;
    for (std::size_t i = 0; i < m; ++i) {
      double grad = 0.0;
      for (std::size_t p = 0; p < pop; ++p) grad += -(fids[p] - mean_fid) * eps[p][i] / var;
      grad /= static_cast<double>(pop);
      theta[i] = fold_unit(schema.attributes[coords[i].attribute], theta[i] + hyper.step_size * grad);
    }
  }
  OptimResult result = std::move(recorder).finish("reinforce");
  std::vector<double> means(m);
  for (std::size_t i = 0; i < m; ++i) means[i] = from_unit(schema.attributes[coords[i].attribute], theta[i]);
  result.final_params = params_from_means(schema, std::move(means));
  result.final_fid = mean_fid;
  return result;
}

OptimResult reinforce_search(const AttributeSchema& schema, Renderer& renderer, const FeatureStats& target,
                             const EvalConfig& cfg, std::size_t budget, const ReinforceHyper& hyper) {
  return reinforce_search(schema, default_params(schema), fid_objective(schema, renderer, target, cfg), cfg, budget,
                          hyper);
}

OptimResult run_random_attributes(const AttributeSchema& schema, Renderer& renderer, const FeatureStats& target,
                                  const EvalConfig& cfg) {
  validate_eval_config(cfg);
  const Objective objective = fid_objective(schema, renderer, target, cfg, random_attributes(schema));
  TraceRecorder recorder(cfg.record_time);
  recorder.run(objective, default_params(schema), derive_seed(cfg.base_seed, {kRandomAttributesTag}), 1, -1, 0.0);
  return std::move(recorder).finish("random_attributes");
}

}  // namespace attrdesc
