#pragma once

// Attribute descent and its comparison baselines. Every method works on an
// Objective (params, eval seed) -> FID; the renderer-backed objective samples
// K attribute lists, renders them, and measures the Frechet distance to the
// target statistics.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "attrdesc/attribute_model.hpp"
#include "attrdesc/error.hpp"
#include "attrdesc/fid.hpp"
#include "attrdesc/renderer.hpp"

namespace attrdesc {

struct EvalConfig {
  std::size_t samples_per_eval = 500;  // K
  std::uint64_t base_seed = 0;
  bool common_random_numbers = true;
  std::size_t epochs = 2;  // J
  bool record_time = true;
};
void validate_eval_config(const EvalConfig& cfg);

enum class SamplingDirective {
  parametric,  // sample_batch from the distribution means
  uniform,     // uniform_batch over attribute domains
};

/// The no-learning baseline: evaluate with attributes drawn uniformly.
SamplingDirective random_attributes(const AttributeSchema& schema);

struct TraceRecord {
  std::size_t eval = 0;
  std::size_t epoch = 0;         // descent epoch, REINFORCE iteration; 1 otherwise
  std::int64_t coordinate = -1;  // -1 when every coordinate varies at once
  double candidate = 0.0;        // grid value for descent, candidate index otherwise
  double fid = 0.0;
  double best_fid = 0.0;
  double millis = 0.0;  // elapsed since the run started
};

struct OptimizationTrace {
  std::vector<TraceRecord> records;
  std::size_t total_evaluations() const { return records.size(); }
};

struct OptimResult {
  std::string method;
  DistributionParams best_params;  // params of the lowest-fid evaluation in the trace
  double best_fid = 0.0;           // minimum fid in the trace
  // Where the method ends. Descent: the coordinate state after the last sweep
  // and the fid it won that sweep with. REINFORCE: the policy mean and the mean
  // fid of the last population. Other methods end at their best.
  DistributionParams final_params;
  double final_fid = 0.0;
  OptimizationTrace trace;
};

/// Raised when an objective evaluation fails; carries the trace recorded so far.
class OptimizationAborted : public Error {
 public:
  OptimizationAborted(const std::string& what, OptimizationTrace partial)
      : Error(what), trace_(std::move(partial)) {}
  const OptimizationTrace& trace() const { return trace_; }

 private:
  OptimizationTrace trace_;
};

using Objective = std::function<double(const DistributionParams& params, std::uint64_t eval_seed)>;

double evaluate(const AttributeSchema& schema, const DistributionParams& params, Renderer& renderer,
                const FeatureStats& target, const EvalConfig& cfg, std::uint64_t eval_seed,
                SamplingDirective sampling = SamplingDirective::parametric);

/// Binds evaluate() to a renderer and target. The references must outlive the objective.
Objective fid_objective(const AttributeSchema& schema, Renderer& renderer, const FeatureStats& target,
                        const EvalConfig& cfg, SamplingDirective sampling = SamplingDirective::parametric);

struct SweepResult {
  std::size_t coordinate = 0;
  std::vector<double> fids;  // one per grid candidate, grid order
  std::size_t incumbent = 0;  // grid index held before the sweep
  std::size_t chosen = 0;     // argmin, smallest index on ties
};

/// Evaluates every grid value of one coordinate with the rest held fixed and
/// moves the coordinate to the argmin. With CRN every candidate uses sweep_seed.
SweepResult sweep_coordinate(const AttributeSchema& schema, DistributionParams& params, std::size_t coordinate,
                             const Objective& objective, std::uint64_t sweep_seed, bool common_random_numbers);

/// Seed shared by the candidates of sweep `position` (0-based within the epoch) in `epoch` (1-based).
std::uint64_t descent_sweep_seed(std::uint64_t base_seed, std::size_t epoch, std::size_t position);

/// J epochs of greedy per-coordinate grid search in coordinate_list order.
/// Performs exactly J * sum_i |S_i| evaluations.
OptimResult attribute_descent(const AttributeSchema& schema, const DistributionParams& init,
                              const Objective& objective, const EvalConfig& cfg);
OptimResult attribute_descent(const AttributeSchema& schema, const DistributionParams& init, Renderer& renderer,
                              const FeatureStats& target, const EvalConfig& cfg);

/// `budget` parameter vectors, each coordinate uniform over its domain.
OptimResult random_search(const AttributeSchema& schema, const Objective& objective, const EvalConfig& cfg,
                          std::size_t budget);
OptimResult random_search(const AttributeSchema& schema, Renderer& renderer, const FeatureStats& target,
                          const EvalConfig& cfg, std::size_t budget);

struct ReinforceHyper {
  std::size_t population = 8;  // P
  double step_size = 0.25;     // alpha
  double policy_sigma = 0.05;  // sigma_p, in units of domain width
};
void validate_reinforce_hyper(const ReinforceHyper& hyper, std::size_t budget);

/// Score-function ascent on a Gaussian policy over the means, in coordinates
/// normalized by domain width. Runs floor(budget / P) iterations of P evaluations.
OptimResult reinforce_search(const AttributeSchema& schema, const DistributionParams& init,
                             const Objective& objective, const EvalConfig& cfg, std::size_t budget,
                             const ReinforceHyper& hyper = {});
OptimResult reinforce_search(const AttributeSchema& schema, Renderer& renderer, const FeatureStats& target,
                             const EvalConfig& cfg, std::size_t budget, const ReinforceHyper& hyper = {});

/// One evaluation of the uniform-attribute baseline.
OptimResult run_random_attributes(const AttributeSchema& schema, Renderer& renderer, const FeatureStats& target,
                                  const EvalConfig& cfg);

}  // namespace attrdesc
