#include "attrdesc/cli/commands.hpp"

#include <CLI11.hpp>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <json.hpp>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "attrdesc/external_renderer.hpp"
#include "attrdesc/run_io.hpp"
#include "attrdesc/schema_file.hpp"
#include "attrdesc/simd/kernels.hpp"
#include "attrdesc/stats_io.hpp"

namespace attrdesc::cli {
namespace fs = std::filesystem;

namespace {

fs::path resolve(const fs::path& base_dir, const std::string& value) {
  fs::path p(value);
  return p.is_relative() ? base_dir / p : p;
}

std::string stem_of(const fs::path& target) {
  std::string name = target.filename().string();
  const auto dot = name.find('.');
  return dot == std::string::npos || dot == 0 ? name : name.substr(0, dot);
}

std::unique_ptr<Renderer> make_renderer(const RunConfig& config) {
  if (config.renderer == "oracle") return std::make_unique<OracleRenderer>(*config.oracle);
  ExternalOptions opts;
  opts.timeout = config.timeout;
  return std::make_unique<ExternalRenderer>(ExternalSession::open(config.renderer, config.schema, opts));
}

OptimResult run_method(const RunConfig& config, Renderer& renderer, const FeatureStats& target) {
  const auto& schema = config.schema;
  switch (config.method) {
    case Method::descent:
      return attribute_descent(schema, default_params(schema), renderer, target, config.eval);
    case Method::random_search:
      return random_search(schema, renderer, target, config.eval, *config.budget);
    case Method::reinforce:
      return reinforce_search(schema, renderer, target, config.eval, *config.budget, config.reinforce);
    case Method::random_attributes:
      return run_random_attributes(schema, renderer, target, config.eval);
  }
  throw ConfigError("unknown method");
}

struct TargetOutcome {
  std::string stem;
  fs::path path;
  bool ok = false;
  std::string message;
  std::optional<double> final_fid;
  std::size_t evaluations = 0;
};

TargetOutcome optimize_target(const RunConfig& config, const fs::path& target_path) {
  TargetOutcome outcome;
  outcome.path = target_path;
  outcome.stem = stem_of(target_path);
  const fs::path trace_path = config.output_dir / (outcome.stem + ".trace.csv");
  const fs::path result_path = config.output_dir / (outcome.stem + ".result.txt");
  try {
    const FeatureStats target = read_stats_or_features(target_path);
    auto renderer = make_renderer(config);
    OptimResult result = run_method(config, *renderer, target);
    write_trace_csv(result.trace, trace_path);
    ResultInfo info{config.schema_ref, target_path.string(), effective_budget(config), config.eval.base_seed};
    write_file_bytes(result_path, format_result(config.schema, result, info));
    outcome.ok = true;
    outcome.final_fid = result.final_fid;
    outcome.evaluations = result.trace.total_evaluations();
  } catch (const OptimizationAborted& e) {
    write_trace_csv(e.trace(), trace_path);
    outcome.message = e.what();
    outcome.evaluations = e.trace().total_evaluations();
  } catch (const std::exception& e) {
    outcome.message = e.what();
  }
  return outcome;
}

nlohmann::json manifest_json(const RunConfig& config, const std::vector<TargetOutcome>& outcomes) {
  nlohmann::json m;
  m["tool"] = "attrdesc";
  m["version"] = ATTRDESC_VERSION;
  m["simd"] = simd::active().name;
#ifdef __VERSION__
  m["compiler"] = __VERSION__;
#endif
  m["config_path"] = config.config_path.string();
  m["config_text"] = config.config_text;
  m["schema"] = config.schema_ref;
  m["renderer"] = config.renderer;
  m["method"] = method_name(config.method);
  m["seed"] = config.eval.base_seed;
  m["seed_source"] = config.seed_source;
  m["samples_per_eval"] = config.eval.samples_per_eval;
  m["epochs"] = config.eval.epochs;
  m["common_random_numbers"] = config.eval.common_random_numbers;
  m["budget"] = effective_budget(config);
  if (config.method == Method::reinforce) {
    m["population"] = config.reinforce.population;
    m["step_size"] = config.reinforce.step_size;
    m["policy_sigma"] = config.reinforce.policy_sigma;
  }
  if (config.oracle) {
    m["oracle"] = {{"feature_dim", config.oracle->feature_dim},
                   {"mixing_seed", config.oracle->mixing_seed},
                   {"noise_sigma", config.oracle->noise_sigma},
                   {"mixing", config.oracle->mixing == MixingKind::dense ? "dense" : "separable"}};
  }
  auto& targets = m["targets"] = nlohmann::json::array();
  for (const auto& o : outcomes) {
    nlohmann::json t{{"path", o.path.string()}, {"stem", o.stem}, {"ok", o.ok}, {"evaluations", o.evaluations}};
    if (o.final_fid) t["final_fid"] = *o.final_fid;
    if (!o.ok) t["error"] = o.message;
    targets.push_back(std::move(t));
  }
  return m;
}

int cmd_optimize(const std::string& config_path, const std::vector<std::string>& extra_targets,
                 const std::optional<std::string>& method, const std::optional<std::string>& out_dir,
                 std::optional<std::size_t> jobs, std::ostream& out, std::ostream& err) {
  RunConfig config = load_run_config(config_path);
  if (!extra_targets.empty()) {
    config.targets.clear();
    for (const auto& t : extra_targets) config.targets.emplace_back(t);
  }
  if (method) {
    auto m = parse_method(*method);
    if (!m) throw ConfigError("unknown method '" + *method + "'");
    config.method = *m;
    if ((*m == Method::random_search || *m == Method::reinforce) && !config.budget)
      throw ConfigError("method " + *method + " requires a budget");
  }
  if (out_dir) config.output_dir = *out_dir;
  if (jobs) config.jobs = std::max<std::size_t>(*jobs, 1);
  if (config.targets.empty()) throw ConfigError("no targets given");
  for (const auto& t : config.targets)
    if (!fs::is_regular_file(t)) throw ConfigError("target not readable: " + t.string());
  fs::create_directories(config.output_dir);

  std::vector<TargetOutcome> outcomes(config.targets.size());
  std::atomic<std::size_t> next{0};
  std::mutex print_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < config.targets.size(); i = next++) {
      outcomes[i] = optimize_target(config, config.targets[i]);
      std::lock_guard lock(print_mutex);
      if (outcomes[i].ok) {
        char fid[64];
        std::snprintf(fid, sizeof fid, "%.6f", *outcomes[i].final_fid);
        out << outcomes[i].stem << ": " << method_name(config.method) << " final_fid=" << fid
            << " evaluations=" << outcomes[i].evaluations << "\n";
      } else {
        err << "error: " << outcomes[i].stem << ": " << outcomes[i].message << "\n";
      }
    }
  };
  const std::size_t threads = std::min(config.jobs, config.targets.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  write_file_bytes(config.output_dir / "manifest.json", manifest_json(config, outcomes).dump(2) + "\n");
  const bool all_ok = std::all_of(outcomes.begin(), outcomes.end(), [](const auto& o) { return o.ok; });
  return all_ok ? kExitOk : kExitComputation;
}

int cmd_fid(const std::string& a, const std::string& b, std::ostream& out) {
  const FeatureStats sa = read_stats_or_features(a);
  const FeatureStats sb = read_stats_or_features(b);
  const double fid = frechet_distance(sa, sb);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", fid);
  out << buf << "\n";
  return kExitOk;
}

int cmd_make_oracle_target(const std::string& oracle_path, std::size_t count, std::uint64_t seed,
                           const std::string& out_path, std::ostream& out) {
  const OracleConfig config = load_oracle_config(oracle_path);
  if (config.planted.means.empty()) throw ConfigError("oracle config has no planted means");
  const FeatureStats stats = oracle_target_stats(config, count, seed);
  const fs::path target(out_path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  write_stats(stats, target);

  const fs::path planted = target.parent_path() / (stem_of(target) + ".planted.txt");
  std::string text = "schema = " + config.schema.source + "\nseed = " + std::to_string(seed) +
                     "\ncount = " + std::to_string(count) + "\n\n[planted_means]\n";
  const auto coords = coordinate_list(config.schema);
  for (std::size_t i = 0; i < coords.size(); ++i)
    text += coordinate_label(config.schema, coords[i]) + " = " + format_double(config.planted.means[i]) + "\n";
  write_file_bytes(planted, text);
  out << "wrote " << target.string() << " (dim " << stats.dim() << ", count " << stats.count << ")\n";
  return kExitOk;
}

int cmd_plot(const std::vector<std::string>& traces, const std::string& out_path, std::ostream& out) {
  std::vector<PlotSeries> series;
  for (const auto& path : traces) {
    OptimizationTrace trace;
    try {
      trace = read_trace_csv(path);
    } catch (const FormatError& e) {
      throw FormatError(path + ": " + e.what());
    }
    PlotSeries s;
    s.label = stem_of(path);
    for (const auto& r : trace.records) s.values.push_back(r.best_fid);
    series.push_back(std::move(s));
  }
  write_file_bytes(out_path, render_svg_plot(series));
  out << "wrote " << out_path << " (" << series.size() << " series)\n";
  return kExitOk;
}

}  // namespace

std::string_view method_name(Method m) {
  switch (m) {
    case Method::descent: return "descent";
    case Method::random_search: return "random_search";
    case Method::reinforce: return "reinforce";
    case Method::random_attributes: return "random_attributes";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view name) {
  if (name == "descent") return Method::descent;
  if (name == "random_search") return Method::random_search;
  if (name == "reinforce") return Method::reinforce;
  if (name == "random_attributes") return Method::random_attributes;
  return std::nullopt;
}

RunConfig load_run_config(const fs::path& path) {
  RunConfig config;
  config.config_path = path;
  config.config_text = read_file_bytes(path);
  const ConfigTree tree = parse_config_text(config.config_text, path.string());
  const fs::path base = path.parent_path();
  const auto get = [&](const char* key) { return config_value(tree, "run", key); };

  if (tree.find("oracle") != tree.not_found()) config.oracle = oracle_config_from(tree, base);
  if (auto v = get("oracle")) config.oracle = load_oracle_config(resolve(base, *v));
  if (auto v = get("renderer")) config.renderer = *v;
  if (config.renderer == "oracle" && !config.oracle)
    throw ConfigError("renderer = oracle needs an [oracle] section or an oracle = <file> key");

  if (auto v = get("schema")) {
    const fs::path sp = resolve(base, *v);
    config.schema = load_schema(sp);
    config.schema_ref = sp.string();
  } else if (config.oracle) {
    config.schema = config.oracle->schema;
    config.schema_ref = config.schema.source;
  } else {
    throw ConfigError("[run] needs a schema");
  }
  if (config.oracle && config.renderer == "oracle" &&
      config.oracle->schema.attribute_count() != config.schema.attribute_count())
    throw ConfigError("run schema and oracle schema disagree on the attribute count");
  // The oracle renders run-schema batches, so it must embed them with the same domains.
  if (config.oracle && config.renderer == "oracle") {
    config.oracle->schema = config.schema;
    validate_oracle_config(*config.oracle);
  }

  if (auto v = get("targets"))
    for (const auto& t : parse_string_list(*v)) config.targets.push_back(resolve(base, t));
  if (auto v = get("method")) {
    auto m = parse_method(*v);
    if (!m) throw ConfigError("unknown method '" + *v + "'");
    config.method = *m;
  }
  if (auto v = get("samples_per_eval")) config.eval.samples_per_eval = parse_unsigned(*v, "samples_per_eval");
  if (auto v = get("epochs")) config.eval.epochs = parse_unsigned(*v, "epochs");
  if (auto v = get("common_random_numbers")) config.eval.common_random_numbers = parse_bool(*v, "common_random_numbers");
  if (auto v = get("record_time")) config.eval.record_time = parse_bool(*v, "record_time");
  if (auto v = get("budget")) config.budget = parse_unsigned(*v, "budget");
  if (auto v = get("seed")) {
    config.eval.base_seed = parse_unsigned(*v, "seed");
    config.seed_source = "config";
  }
  if (const char* env = std::getenv("ATTRDESC_SEED"); env && *env) {
    config.eval.base_seed = parse_unsigned(env, "ATTRDESC_SEED");
    config.seed_source = "env";
  }
  if (auto v = get("output")) config.output_dir = resolve(base, *v);
  if (auto v = get("jobs")) config.jobs = std::max<std::uint64_t>(parse_unsigned(*v, "jobs"), 1);
  if (auto v = get("timeout")) config.timeout = std::chrono::milliseconds(
      static_cast<std::int64_t>(parse_number(*v, "timeout") * 1000.0));
  if (auto v = get("population")) config.reinforce.population = parse_unsigned(*v, "population");
  if (auto v = get("step_size")) config.reinforce.step_size = parse_number(*v, "step_size");
  if (auto v = get("policy_sigma")) config.reinforce.policy_sigma = parse_number(*v, "policy_sigma");

  validate_eval_config(config.eval);
  if ((config.method == Method::random_search || config.method == Method::reinforce) && !config.budget)
    throw ConfigError(std::string("method ") + std::string(method_name(config.method)) + " requires a budget");
  if (config.method == Method::reinforce) validate_reinforce_hyper(config.reinforce, *config.budget);
  return config;
}

std::size_t effective_budget(const RunConfig& config) {
  switch (config.method) {
    case Method::descent: {
      std::size_t per_epoch = 0;
      for (const auto& c : coordinate_list(config.schema)) per_epoch += config.schema.attributes[c.attribute].grid.size();
      return config.eval.epochs * per_epoch;
    }
    case Method::random_search:
      return *config.budget;
    case Method::reinforce:
      return (*config.budget / config.reinforce.population) * config.reinforce.population;
    case Method::random_attributes:
      return 1;
  }
  return 0;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Attribute-distribution optimization against FID targets", "attrdesc"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ATTRDESC_VERSION);
  std::string simd_choice;
  app.add_option("--simd", simd_choice, "Kernel variant: scalar, avx2 or auto");

  std::string config_path;
  std::vector<std::string> targets;
  std::optional<std::string> method, out_dir;
  std::optional<std::size_t> jobs;
  auto* optimize = app.add_subcommand("optimize", "Optimize attribute distributions for one or more targets");
  optimize->add_option("-c,--config", config_path, "Run configuration file")->required();
  optimize->add_option("-t,--target", targets, "Target statistics or feature files (overrides [run] targets)");
  optimize->add_option("-m,--method", method, "descent | random_search | reinforce | random_attributes");
  optimize->add_option("-o,--out", out_dir, "Output directory");
  optimize->add_option("-j,--jobs", jobs, "Targets optimized in parallel");

  std::vector<std::string> fid_files;
  auto* fid = app.add_subcommand("fid", "Frechet distance between two statistics or feature files");
  fid->add_option("files", fid_files, "Two FSTAT1 or FMATX1 files")->required()->expected(2);

  std::string oracle_path, target_out;
  std::size_t count = 2000;
  std::uint64_t seed = 0;
  auto* make = app.add_subcommand("make-oracle-target", "Write target statistics from the oracle's planted means");
  make->add_option("--oracle", oracle_path, "Oracle configuration file")->required();
  make->add_option("--count", count, "Samples to render")->capture_default_str();
  make->add_option("--seed", seed, "Sampling seed")->capture_default_str();
  make->add_option("--out", target_out, "Output FSTAT1 path")->required();

  std::vector<std::string> trace_files;
  std::string plot_out;
  auto* plot = app.add_subcommand("plot", "Plot best-FID-so-far curves from trace files");
  plot->add_option("traces", trace_files, "Trace CSV files")->required();
  plot->add_option("-o,--out", plot_out, "Output SVG path")->required();

  std::vector<std::string> argv_storage{"attrdesc"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_storage) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << ATTRDESC_VERSION << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    if (!e.get_name().empty() && e.get_name() != "RequiredError") err << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (!simd_choice.empty() && simd_choice != "auto") {
      auto isa = simd::parse_isa(simd_choice);
      if (!isa) throw ConfigError("unknown --simd value '" + simd_choice + "'");
      simd::select(*isa);
    }
    if (*optimize) return cmd_optimize(config_path, targets, method, out_dir, jobs, out, err);
    if (*fid) return cmd_fid(fid_files[0], fid_files[1], out);
    if (*make) return cmd_make_oracle_target(oracle_path, count, seed, target_out, out);
    if (*plot) return cmd_plot(trace_files, plot_out, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitComputation;
  }
  return kExitUsage;
}

}  // namespace attrdesc::cli
