// repmon CLI: group enumeration, stream replay, trial simulation, null
// calibration, harm inference, and advisory stopping-time bounds.
//
// Every subcommand reads one JSON config (--config, else $REPMON_CONFIG,
// else built-in defaults); command-line flags override config fields. All
// outputs are deterministic functions of (config, input files, seed).

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "repmon/betting.hpp"
#include "repmon/config.hpp"
#include "repmon/csv.hpp"
#include "repmon/errors.hpp"
#include "repmon/groups.hpp"
#include "repmon/harm.hpp"
#include "repmon/monitor.hpp"
#include "repmon/sim.hpp"
#include "repmon/ztest.hpp"

namespace {

using namespace repmon;
using ojson = nlohmann::ordered_json;

// --- config resolution -----------------------------------------------------

struct CommonFlags {
  std::string config_path;
  std::optional<double> alpha;
  std::vector<double> betas;
  std::optional<std::string> algorithm;
  std::optional<std::uint64_t> min_t;
  std::optional<double> lil_constant;
  std::optional<std::size_t> depth;
  std::optional<double> min_preponderance;
  std::optional<std::string> joint_reference;
  std::optional<std::string> reports;
  std::optional<std::string> population;
  std::optional<std::string> bucket;
  std::optional<std::string> output;
  std::optional<std::size_t> n_trials;
  std::optional<std::uint64_t> horizon;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<double> b;
  std::optional<double> gamma_tr;
  std::optional<double> gamma_fr;
  CLI::Option* stop_at_first = nullptr;
  bool stop_at_first_value = false;
  CLI::Option* order_by_timestamp = nullptr;
  bool order_by_timestamp_value = false;
  CLI::Option* impute_product = nullptr;
  bool impute_product_value = false;
};

void add_common_flags(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--config", f.config_path,
                  "JSON config file (default: $REPMON_CONFIG if set)");
  sub->add_option("--alpha", f.alpha, "family-wise error level");
  sub->add_option("--beta", f.betas, "overrepresentation factor; repeat for a grid");
  sub->add_option("--algorithm", f.algorithm, "finite-z | asymptotic-z | betting");
  sub->add_option("--min-t", f.min_t, "suppress flags before this many reports");
  sub->add_option("--lil-constant", f.lil_constant, "boundary constant for the counting tests");
  sub->add_option("--depth", f.depth, "max covariates per subgroup conjunction");
  sub->add_option("--min-preponderance", f.min_preponderance,
                  "drop groups with reference preponderance below this");
  sub->add_option("--joint-reference", f.joint_reference, "joint reference table CSV");
  sub->add_option("--reports", f.reports, "report stream CSV (replay)");
  sub->add_option("--population", f.population, "labeled population CSV (simulation)");
  sub->add_option("--bucket", f.bucket, "bucket map JSON for raw column values");
  sub->add_option("--output", f.output, "output path (default stdout)");
  sub->add_option("--trials", f.n_trials, "number of trials");
  sub->add_option("--horizon", f.horizon, "reports per trial before censoring");
  sub->add_option("--seed", f.seed, "base seed; trial k uses seed+k");
  sub->add_option("--threads", f.threads, "worker threads for trials");
  sub->add_option("--b", f.b, "assumed max within-group reporting inflation (>= 1)");
  sub->add_option("--gamma-tr", f.gamma_tr, "assumed true-report rate factor");
  sub->add_option("--gamma-fr", f.gamma_fr, "assumed false-report rate factor");
  f.stop_at_first = sub->add_flag("--stop-at-first,!--no-stop-at-first",
                                  f.stop_at_first_value, "stop at the first flag");
  f.order_by_timestamp = sub->add_flag("--order-by-timestamp,!--no-order-by-timestamp",
                                       f.order_by_timestamp_value,
                                       "stable-sort reports by their timestamp column");
  f.impute_product = sub->add_flag("--impute-product,!--no-impute-product",
                                   f.impute_product_value,
                                   "impute joint reference cells as marginal products");
}

RunConfig resolve_config(const CommonFlags& f) {
  std::string path = f.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("REPMON_CONFIG")) path = env;
  }
  RunConfig cfg = path.empty() ? RunConfig{} : RunConfig::from_json_file(path);
  if (f.alpha) cfg.alpha = *f.alpha;
  if (!f.betas.empty()) cfg.betas = f.betas;
  if (f.algorithm) cfg.algorithm = *f.algorithm;
  if (f.min_t) cfg.min_t = *f.min_t;
  if (f.lil_constant) cfg.lil_constant = *f.lil_constant;
  if (f.depth) cfg.depth = *f.depth;
  if (f.min_preponderance) cfg.min_preponderance = *f.min_preponderance;
  if (f.joint_reference) {
    cfg.joint_reference = *f.joint_reference;
    cfg.marginal_reference.clear();
  }
  if (f.reports) cfg.reports = *f.reports;
  if (f.population) cfg.population = *f.population;
  if (f.bucket) cfg.bucket = *f.bucket;
  if (f.output) cfg.output = *f.output;
  if (f.n_trials) cfg.n_trials = *f.n_trials;
  if (f.horizon) cfg.horizon = *f.horizon;
  if (f.seed) cfg.seed = *f.seed;
  if (f.threads) cfg.threads = *f.threads;
  if (f.b) cfg.assumptions.b = *f.b;
  if (f.gamma_tr) cfg.assumptions.gamma_tr = *f.gamma_tr;
  if (f.gamma_fr) cfg.assumptions.gamma_fr = *f.gamma_fr;
  if (f.stop_at_first->count()) cfg.stop_at_first = f.stop_at_first_value;
  if (f.order_by_timestamp->count()) cfg.order_by_timestamp = f.order_by_timestamp_value;
  if (f.impute_product->count()) cfg.impute_product = f.impute_product_value;
  return cfg;
}

// --- shared plumbing ---------------------------------------------------------

struct OutputTarget {
  std::ofstream file;
  std::ostream* os = nullptr;

  explicit OutputTarget(const std::string& path) {
    if (path.empty()) {
      os = &std::cout;
    } else {
      file.open(path, std::ios::binary);
      if (!file) throw DataError("cannot open output file " + path);
      os = &file;
    }
  }
  std::ostream& out() { return *os; }
};

std::optional<BucketMap> load_buckets(const RunConfig& cfg) {
  if (cfg.bucket.empty()) return std::nullopt;
  return BucketMap::load(cfg.bucket);
}

GroupSet load_group_set(const RunConfig& cfg,
                        const std::shared_ptr<const CovariateSchema>& schema,
                        const BucketMap* buckets) {
  ReferenceTable table = [&] {
    if (!cfg.joint_reference.empty()) {
      return parse_joint_reference(read_csv_file(cfg.joint_reference), schema, buckets);
    }
    if (!cfg.marginal_reference.empty()) {
      std::vector<CsvTable> tables;
      for (std::size_t i = 0; i < schema->size(); ++i) {
        const std::string& name = schema->covariate(i).name;
        auto it = cfg.marginal_reference.find(name);
        if (it == cfg.marginal_reference.end()) {
          throw ConfigError("reference.marginals is missing covariate " + name);
        }
        tables.push_back(read_csv_file(it->second));
      }
      return parse_marginal_reference(tables, schema);
    }
    throw ConfigError("a reference table is required: set reference.joint or "
                      "reference.marginals in the config, or pass --joint-reference");
  }();
  GroupSet gs = make_group_set(schema, cfg.depth, table, cfg.impute_product);
  if (cfg.min_preponderance > 0.0) gs = gs.filtered(cfg.min_preponderance);
  return gs;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

std::string format_double(double v) { return ojson(v).dump(); }

// --- subcommands -------------------------------------------------------------

int cmd_enumerate_groups(const RunConfig& cfg) {
  auto schema = cfg.make_schema();
  auto buckets = load_buckets(cfg);
  GroupSet gs = load_group_set(cfg, schema, buckets ? &*buckets : nullptr);
  OutputTarget target(cfg.output);
  for (std::size_t i = 0; i < gs.size(); ++i) {
    ojson j;
    j["group"] = gs.groups[i].to_string(*schema);
    j["mu0"] = gs.base_preponderances[i];
    target.out() << j.dump() << "\n";
  }
  std::cerr << gs.size() << " groups\n";
  return 0;
}

int cmd_run(const RunConfig& cfg, const std::string& snapshot_in,
            const std::string& snapshot_out) {
  auto buckets = load_buckets(cfg);
  std::optional<Monitor> monitor;
  std::shared_ptr<const CovariateSchema> schema;
  if (!snapshot_in.empty()) {
    monitor.emplace(Monitor::restore(slurp(snapshot_in)));
    schema = monitor->group_set().schema;
  } else {
    schema = cfg.make_schema();
    GroupSet gs = load_group_set(cfg, schema, buckets ? &*buckets : nullptr);
    monitor.emplace(std::move(gs), cfg.monitor_config());
  }
  print_warnings(monitor->warnings());

  if (cfg.reports.empty()) throw ConfigError("run needs a report stream: set reports");
  std::vector<Assignment> stream = parse_reports(read_csv_file(cfg.reports), *schema,
                                                 buckets ? &*buckets : nullptr,
                                                 cfg.order_by_timestamp);

  OutputTarget target(cfg.output);
  bool stopped_at_entry = monitor->stopped();
  for (const Assignment& x : stream) {
    if (!stopped_at_entry && monitor->stopped()) break;
    for (const FlagEvent& e : monitor->ingest(x)) {
      target.out() << monitor->event_json_line(e) << "\n";
    }
  }
  if (!snapshot_out.empty()) {
    std::ofstream snap(snapshot_out, std::ios::binary);
    if (!snap) throw DataError("cannot open snapshot file " + snapshot_out);
    snap << monitor->snapshot();
  }
  std::cerr << monitor->events().size() << " flags after " << monitor->t() << " reports\n";
  return 0;
}

int cmd_simulate(const RunConfig& cfg, const std::string& summary_path) {
  auto schema = cfg.make_schema();
  auto buckets = load_buckets(cfg);
  if (cfg.population.empty()) throw ConfigError("simulate needs a population CSV: set population");
  if (!cfg.model) throw ConfigError("simulate needs a reporting model: set model");
  Population pop = parse_population(read_csv_file(cfg.population), schema,
                                    buckets ? &*buckets : nullptr);
  ReportingModel model = make_reporting_model(pop, cfg.model->name, cfg.model->probabilities);
  GroupSet gs = load_group_set(cfg, schema, buckets ? &*buckets : nullptr);

  TrialPlan plan;
  plan.population = &pop;
  plan.model = &model;
  plan.n_trials = cfg.n_trials;
  plan.horizon = cfg.horizon;
  plan.seed = cfg.seed;
  plan.n_threads = cfg.threads;
  std::vector<TrialOutcome> outcomes = run_permutation_trials(plan, gs, cfg.monitor_config());

  OutputTarget target(cfg.output);
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    const TrialOutcome& o = outcomes[k];
    ojson j;
    j["trial"] = k;
    j["seed"] = o.seed;
    j["stopping_time"] = o.stopping_time ? ojson(*o.stopping_time) : ojson(nullptr);
    j["first_group"] =
        o.first_group ? ojson(gs.groups[*o.first_group].to_string(*schema)) : ojson(nullptr);
    j["first_group_rr"] = o.first_group_rr ? ojson(*o.first_group_rr) : ojson(nullptr);
    target.out() << j.dump() << "\n";
  }

  SummaryStats st = summarize_trials(outcomes);
  OutputTarget summary(summary_path);
  summary.out() << "n_trials,n_stopped,stop_fraction,mean_stopping_time,"
                   "median_stopping_time,mean_first_group_rr\n";
  summary.out() << st.n_trials << "," << st.n_stopped << "," << format_double(st.stop_fraction)
                << "," << (st.mean_stopping_time ? format_double(*st.mean_stopping_time) : "")
                << ","
                << (st.median_stopping_time ? format_double(*st.median_stopping_time) : "")
                << ","
                << (st.mean_first_group_rr ? format_double(*st.mean_first_group_rr) : "")
                << "\n";
  return 0;
}

int cmd_calibrate(const RunConfig& cfg, double fraction) {
  auto schema = cfg.make_schema();
  auto buckets = load_buckets(cfg);
  GroupSet gs = load_group_set(cfg, schema, buckets ? &*buckets : nullptr);
  MonitorConfig mcfg = cfg.monitor_config();
  if (mcfg.betas.size() != 1) {
    throw ConfigError("calibrate needs exactly one beta; got " +
                      std::to_string(mcfg.betas.size()));
  }
  NullCalibrationResult r = null_calibration(gs, mcfg.betas.front(), mcfg, cfg.n_trials,
                                             cfg.horizon, cfg.seed, fraction);
  ojson j;
  j["n_trials"] = r.n_trials;
  j["n_false_alarms"] = r.n_false_alarms;
  j["false_alarm_rate"] = r.false_alarm_rate;
  j["alpha"] = mcfg.alpha;
  OutputTarget target(cfg.output);
  target.out() << j.dump() << "\n";
  return 0;
}

int cmd_infer(const RunConfig& cfg, const std::string& flags_path) {
  cfg.assumptions.validate();
  std::string text = slurp(flags_path);
  OutputTarget target(cfg.output);
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ojson flag;
    try {
      flag = ojson::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw DataError(flags_path + ":" + std::to_string(line_no) + ": not a JSON object: " +
                      e.what());
    }
    if (!flag.is_object() || !flag.contains("beta") || !flag.at("beta").is_number()) {
      throw DataError(flags_path + ":" + std::to_string(line_no) +
                      ": flag record needs a numeric \"beta\"");
    }
    double beta = flag.at("beta").get<double>();
    IrBound ir = ir_lower_bound(beta, cfg.assumptions);
    ojson j;
    if (flag.contains("group")) j["group"] = flag.at("group");
    if (flag.contains("t")) j["t"] = flag.at("t");
    j["beta"] = beta;
    j["rr_lower_bound"] = rr_lower_bound(beta, cfg.assumptions.b);
    j["ir_lower_bound"] = ir.value;
    j["ir_raw"] = ir.raw;
    j["ir_gap_lower_bound"] =
        ir_gap_bound(beta, cfg.assumptions.gamma_tr, cfg.assumptions.gamma_fr);
    if (ir.clamped()) {
      std::cerr << "warning: " << flags_path << ":" << line_no
                << ": incidence-rate bound clamped from " << format_double(ir.raw) << "\n";
    }
    target.out() << j.dump() << "\n";
  }
  return 0;
}

int cmd_bounds(const RunConfig& cfg, const std::string& kind, double gap,
               std::uint64_t n_groups, std::optional<double> delta,
               std::optional<double> beta_mu0) {
  ojson j;
  j["kind"] = kind;
  j["gap"] = gap;
  j["n_groups"] = n_groups;
  j["alpha"] = cfg.alpha;
  if (kind == "ztest") {
    double d = delta ? *delta : cfg.alpha / static_cast<double>(n_groups);
    j["delta"] = d;
    j["bound"] = zt_power_bound(gap, n_groups, cfg.alpha, d);
  } else {  // betting
    if (!beta_mu0) throw ConfigError("bounds --kind betting needs --beta-mu0");
    j["beta_mu0"] = *beta_mu0;
    j["bound"] = bet_stopping_bound(gap, *beta_mu0, n_groups, cfg.alpha);
  }
  OutputTarget target(cfg.output);
  target.out() << j.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"anytime-valid monitoring of subgroup overrepresentation in report streams"};
  app.require_subcommand(1);

  CommonFlags f_enum, f_run, f_sim, f_cal, f_infer, f_bounds;

  CLI::App* sub_enum =
      app.add_subcommand("enumerate-groups", "list monitored subgroups with reference rates");
  add_common_flags(sub_enum, f_enum);

  CLI::App* sub_run =
      app.add_subcommand("run", "replay a report stream and emit flag events as JSON lines");
  add_common_flags(sub_run, f_run);
  std::string snapshot_in, snapshot_out;
  sub_run->add_option("--snapshot-in", snapshot_in, "resume from a monitor snapshot");
  sub_run->add_option("--snapshot-out", snapshot_out, "write the final monitor snapshot");

  CLI::App* sub_sim = app.add_subcommand(
      "simulate", "run seeded reporting-model trials over a labeled population");
  add_common_flags(sub_sim, f_sim);
  std::string summary_path;
  sub_sim->add_option("--summary", summary_path, "summary CSV path (default stdout)");

  CLI::App* sub_cal =
      app.add_subcommand("calibrate", "measure the family-wise false-alarm rate under the null");
  add_common_flags(sub_cal, f_cal);
  double fraction = 1.0;
  sub_cal->add_option("--fraction", fraction,
                      "group frequencies as a fraction of the null boundary");

  CLI::App* sub_infer =
      app.add_subcommand("infer", "turn a flag log into harm lower bounds per flag");
  add_common_flags(sub_infer, f_infer);
  std::string flags_path;
  sub_infer->add_option("--flags", flags_path, "flag log (JSON lines from `run`)")->required();

  CLI::App* sub_bounds =
      app.add_subcommand("bounds", "advisory worst-case detection-time bounds");
  add_common_flags(sub_bounds, f_bounds);
  std::string kind;
  double gap = 0.0;
  std::uint64_t n_groups = 0;
  std::optional<double> delta, beta_mu0;
  sub_bounds->add_option("--kind", kind, "ztest | betting")
      ->required()
      ->check(CLI::IsMember({"ztest", "betting"}));
  sub_bounds->add_option("--gap", gap, "overrepresentation margin (ztest) or optimal one-step "
                                       "expected log-wealth (betting)")
      ->required();
  sub_bounds->add_option("--groups", n_groups, "number of monitored groups")->required();
  sub_bounds->add_option("--delta", delta, "failure probability (ztest; default alpha/groups)");
  sub_bounds->add_option("--beta-mu0", beta_mu0,
                         "scaled reference rate of the best group (betting)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sub_enum->parsed()) return cmd_enumerate_groups(resolve_config(f_enum));
    if (sub_run->parsed()) return cmd_run(resolve_config(f_run), snapshot_in, snapshot_out);
    if (sub_sim->parsed()) return cmd_simulate(resolve_config(f_sim), summary_path);
    if (sub_cal->parsed()) return cmd_calibrate(resolve_config(f_cal), fraction);
    if (sub_infer->parsed()) return cmd_infer(resolve_config(f_infer), flags_path);
    if (sub_bounds->parsed()) {
      return cmd_bounds(resolve_config(f_bounds), kind, gap, n_groups, delta, beta_mu0);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const StateError& e) {
    std::cerr << "state error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
