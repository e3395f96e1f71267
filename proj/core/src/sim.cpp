#include "repmon/sim.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "repmon/errors.hpp"

namespace repmon {

void ReportingModel::validate(const Population& pop) const {
  if (prob_by_stratum.size() != pop.strata.size()) {
    throw ConfigError("reporting model must cover every stratum (" + name + ")");
  }
  for (double p : prob_by_stratum) {
    if (!(p >= 0.0) || p > 1.0) {
      throw ConfigError("report probability out of [0,1] in model " + name);
    }
  }
}

ReportingModel make_reporting_model(const Population& pop, std::string name,
                                    const std::map<std::string, double>& prob_by_label) {
  ReportingModel m;
  m.name = std::move(name);
  m.prob_by_stratum.reserve(pop.strata.size());
  for (const auto& label : pop.strata) {
    auto it = prob_by_label.find(label);
    if (it == prob_by_label.end()) {
      throw ConfigError("reporting model " + m.name + " missing stratum " + label);
    }
    m.prob_by_stratum.push_back(it->second);
  }
  m.validate(pop);
  return m;
}

std::vector<Assignment> apply_reporting_model(const Population& pop, const ReportingModel& model,
                                              SplitMix64& rng) {
  model.validate(pop);
  std::vector<Assignment> stream;
  for (const auto& rec : pop.records) {
    if (rng.bernoulli(model.prob_by_stratum[rec.stratum])) stream.push_back(rec.x);
  }
  return stream;
}

std::vector<Assignment> apply_reporting_model(const Population& pop, const ReportingModel& model,
                                              std::uint64_t seed) {
  SplitMix64 rng(seed);
  return apply_reporting_model(pop, model, rng);
}

double ground_truth_rr(const Population& pop, const GroupSpec& g) {
  std::size_t n = pop.records.size();
  std::size_t in_group = 0, harmed_in_group = 0, harmed = 0;
  for (const auto& rec : pop.records) {
    if (rec.harmed) ++harmed;
    if (g.contains(rec.x)) {
      ++in_group;
      if (rec.harmed) ++harmed_in_group;
    }
  }
  if (n == 0 || in_group == 0) throw DataError("relative risk undefined: empty group");
  if (harmed == 0) throw DataError("relative risk undefined: no harmed records");
  double rate_g = static_cast<double>(harmed_in_group) / static_cast<double>(in_group);
  double rate = static_cast<double>(harmed) / static_cast<double>(n);
  return rate_g / rate;
}

RirDiagnostics rir_ratios(const Population& pop, const ReportingModel& model,
                          const GroupSet& gs) {
  model.validate(pop);
  if (pop.records.empty()) throw DataError("empty population");

  double report_sum = 0.0;
  std::size_t harmed = 0;
  for (const auto& rec : pop.records) {
    report_sum += model.prob_by_stratum[rec.stratum];
    if (rec.harmed) ++harmed;
  }
  if (harmed == 0) throw DataError("report-to-incidence ratio undefined: no harmed records");
  // rho = E[report] / Pr[harmed]; the shared 1/n cancels in counts.
  const double rho = report_sum / static_cast<double>(harmed);

  RirDiagnostics out;
  out.ratios.resize(gs.size());
  std::vector<double> defined;
  for (std::size_t i = 0; i < gs.size(); ++i) {
    const GroupSpec& g = gs.groups[i];
    double g_report_sum = 0.0;
    std::size_t g_n = 0, g_harmed = 0;
    for (const auto& rec : pop.records) {
      if (!g.contains(rec.x)) continue;
      ++g_n;
      g_report_sum += model.prob_by_stratum[rec.stratum];
      if (rec.harmed) ++g_harmed;
    }
    if (g_n == 0 || g_harmed == 0) {
      out.warnings.push_back("skipping group " + g.to_string(*gs.schema) +
                             (g_n == 0 ? ": no members" : ": no harmed members"));
      continue;
    }
    double rho_g = g_report_sum / static_cast<double>(g_harmed);
    out.ratios[i] = rho_g / rho;
    defined.push_back(*out.ratios[i]);
  }
  if (defined.empty()) throw DataError("no group has a defined report-to-incidence ratio");
  std::sort(defined.begin(), defined.end());
  out.max = defined.back();
  // Nearest-rank: smallest value with at least 95% of ratios at or below it.
  std::size_t rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(defined.size())));
  if (rank == 0) rank = 1;
  out.p95 = defined[rank - 1];
  return out;
}

namespace {

TrialOutcome run_one_trial(const TrialPlan& plan, const GroupSet& gs, const MonitorConfig& cfg,
                           std::uint64_t trial_seed) {
  SplitMix64 rng(trial_seed);
  std::vector<Assignment> stream;
  if (plan.population != nullptr) {
    stream = apply_reporting_model(*plan.population, *plan.model, rng);
  } else {
    stream = *plan.fixed_stream;
  }
  rng.shuffle(stream);

  MonitorConfig trial_cfg = cfg;
  trial_cfg.stop_at_first = true;
  Monitor monitor(gs, trial_cfg);

  TrialOutcome out;
  out.seed = trial_seed;
  std::uint64_t limit = std::min<std::uint64_t>(plan.horizon, stream.size());
  for (std::uint64_t i = 0; i < limit; ++i) {
    auto events = monitor.ingest(stream[i]);
    if (!events.empty()) {
      out.stopping_time = monitor.t();
      out.first_group = events.front().group_index;
      if (plan.population != nullptr) {
        out.first_group_rr =
            ground_truth_rr(*plan.population, gs.groups[*out.first_group]);
      }
      break;
    }
  }
  return out;
}

}  // namespace

std::vector<TrialOutcome> run_permutation_trials(const TrialPlan& plan, const GroupSet& gs,
                                                 const MonitorConfig& cfg) {
  if (plan.n_trials < 1) throw ConfigError("need at least one trial");
  if (plan.horizon < 1) throw ConfigError("horizon must be at least 1");
  const bool has_stream = plan.fixed_stream.has_value();
  const bool has_pop = plan.population != nullptr;
  if (has_stream == has_pop) {
    throw ConfigError("provide exactly one of: fixed stream, population with model");
  }
  if (has_pop && plan.model == nullptr) {
    throw ConfigError("population simulation needs a reporting model");
  }
  cfg.validate();

  std::vector<TrialOutcome> outcomes(plan.n_trials);
  unsigned n_threads = std::max(1u, plan.n_threads);
  n_threads = static_cast<unsigned>(
      std::min<std::size_t>(n_threads, plan.n_trials));
  if (n_threads == 1) {
    for (std::size_t k = 0; k < plan.n_trials; ++k) {
      outcomes[k] = run_one_trial(plan, gs, cfg, plan.seed + k);
    }
  } else {
    // Each trial is fully determined by its own seed, so any partition of the
    // trial indices yields identical results.
    std::vector<std::thread> workers;
    workers.reserve(n_threads);
    for (unsigned w = 0; w < n_threads; ++w) {
      workers.emplace_back([&, w] {
        for (std::size_t k = w; k < plan.n_trials; k += n_threads) {
          outcomes[k] = run_one_trial(plan, gs, cfg, plan.seed + k);
        }
      });
    }
    for (auto& th : workers) th.join();
  }
  return outcomes;
}

SummaryStats summarize_trials(const std::vector<TrialOutcome>& outcomes) {
  SummaryStats s;
  s.n_trials = outcomes.size();
  std::vector<double> times;
  double rr_sum = 0.0;
  std::size_t rr_n = 0;
  for (const auto& o : outcomes) {
    if (!o.stopping_time) continue;
    times.push_back(static_cast<double>(*o.stopping_time));
    if (o.first_group_rr) {
      rr_sum += *o.first_group_rr;
      ++rr_n;
    }
  }
  s.n_stopped = times.size();
  s.stop_fraction =
      s.n_trials == 0 ? 0.0 : static_cast<double>(s.n_stopped) / static_cast<double>(s.n_trials);
  if (!times.empty()) {
    double sum = 0.0;
    for (double v : times) sum += v;
    s.mean_stopping_time = sum / static_cast<double>(times.size());
    std::nth_element(times.begin(), times.begin() + (times.size() - 1) / 2, times.end());
    s.median_stopping_time = times[(times.size() - 1) / 2];
  }
  if (rr_n > 0) s.mean_first_group_rr = rr_sum / static_cast<double>(rr_n);
  return s;
}

NullCalibrationResult null_calibration(const GroupSet& gs, double beta, const MonitorConfig& cfg,
                                       std::size_t n_trials, std::uint64_t horizon,
                                       std::uint64_t seed, double fraction) {
  if (n_trials < 1) throw ConfigError("need at least one trial");
  if (horizon < 1) throw ConfigError("horizon must be at least 1");
  if (!(beta > 1.0)) throw ConfigError("beta must exceed 1");
  if (!(fraction >= 0.0) || fraction > 1.0) throw ConfigError("fraction must be in [0,1]");

  // The groups must partition cleanly: one constraint each, all on the same
  // covariate, distinct categories, and a spare category for the remainder.
  const CovariateSchema& schema = *gs.schema;
  std::size_t cov = schema.size();
  std::vector<std::size_t> group_cat(gs.size());
  for (std::size_t i = 0; i < gs.size(); ++i) {
    const auto& cons = gs.groups[i].constraints();
    if (cons.size() != 1) {
      throw ConfigError("null calibration needs single-constraint groups");
    }
    if (cov == schema.size()) {
      cov = cons[0].first;
    } else if (cons[0].first != cov) {
      throw ConfigError("null calibration groups must constrain one shared covariate");
    }
    group_cat[i] = cons[0].second;
  }
  std::vector<char> used(schema.covariate(cov).categories.size(), 0);
  for (std::size_t c : group_cat) {
    if (used[c]) throw ConfigError("null calibration groups must be disjoint");
    used[c] = 1;
  }
  std::size_t spare = used.size();
  for (std::size_t c = 0; c < used.size(); ++c) {
    if (!used[c]) {
      spare = c;
      break;
    }
  }
  if (spare == used.size()) {
    throw ConfigError("null calibration needs an unused category for the remaining mass");
  }

  std::vector<double> mu(gs.size());
  double total = 0.0;
  for (std::size_t i = 0; i < gs.size(); ++i) {
    mu[i] = fraction * beta * gs.base_preponderances[i];
    total += mu[i];
  }
  if (total > 1.0) {
    throw ConfigError("null frequencies sum past 1; the construction is infeasible");
  }

  MonitorConfig trial_cfg = cfg;
  trial_cfg.betas = {beta};
  trial_cfg.stop_at_first = true;

  NullCalibrationResult out;
  out.n_trials = n_trials;
  std::vector<std::size_t> base(schema.size(), 0);
  for (std::size_t k = 0; k < n_trials; ++k) {
    SplitMix64 rng(seed + k);
    Monitor monitor(gs, trial_cfg);
    for (std::uint64_t t = 0; t < horizon && !monitor.stopped(); ++t) {
      double u = rng.next_double();
      std::size_t cat = spare;
      double acc = 0.0;
      for (std::size_t i = 0; i < mu.size(); ++i) {
        acc += mu[i];
        if (u < acc) {
          cat = group_cat[i];
          break;
        }
      }
      base[cov] = cat;
      monitor.ingest(Assignment(schema, base));
    }
    if (!monitor.events().empty()) ++out.n_false_alarms;
  }
  out.false_alarm_rate =
      static_cast<double>(out.n_false_alarms) / static_cast<double>(out.n_trials);
  return out;
}

}  // namespace repmon
