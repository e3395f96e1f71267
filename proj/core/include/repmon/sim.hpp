#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "repmon/groups.hpp"
#include "repmon/monitor.hpp"
#include "repmon/rng.hpp"

namespace repmon {

struct PopulationRecord {
  Assignment x;
  bool harmed = false;
  std::size_t stratum = 0;  // index into Population::strata
};

struct Population {
  std::shared_ptr<const CovariateSchema> schema;
  std::vector<std::string> strata;  // declared finite set of stratum labels
  std::vector<PopulationRecord> records;
};

// Per-stratum report probability. Records are included independently.
struct ReportingModel {
  std::string name;
  std::vector<double> prob_by_stratum;  // aligned with Population::strata

  void validate(const Population& pop) const;  // throws ConfigError
};

ReportingModel make_reporting_model(const Population& pop, std::string name,
                                    const std::map<std::string, double>& prob_by_label);

// Independent per-record inclusion draws; output keeps population order
// (shuffling is a separate step).
std::vector<Assignment> apply_reporting_model(const Population& pop, const ReportingModel& model,
                                              SplitMix64& rng);
std::vector<Assignment> apply_reporting_model(const Population& pop, const ReportingModel& model,
                                              std::uint64_t seed);

// (fraction harmed within g) / (fraction harmed overall), on the full
// population. Throws DataError when undefined (empty group, no harm).
double ground_truth_rr(const Population& pop, const GroupSpec& g);

// Analytic report-to-incidence ratios relative to the population:
// ratio_G = (E[report|G]/Pr[harmed|G]) / (E[report]/Pr[harmed]).
// Groups with no members or no harmed members are skipped with a warning.
struct RirDiagnostics {
  std::vector<std::optional<double>> ratios;  // aligned with the group set
  double max = 0.0;
  double p95 = 0.0;  // nearest-rank percentile over defined ratios
  std::vector<std::string> warnings;
};
RirDiagnostics rir_ratios(const Population& pop, const ReportingModel& model,
                          const GroupSet& gs);

struct TrialOutcome {
  std::optional<std::uint64_t> stopping_time;  // none = censored at horizon
  std::optional<std::size_t> first_group;      // index into the group set
  std::optional<double> first_group_rr;        // ground truth, when a population is given
  std::uint64_t seed = 0;
};

// One experiment: either a fixed stream re-shuffled per trial, or a
// population whose reporting draws and order are re-sampled per trial.
struct TrialPlan {
  std::optional<std::vector<Assignment>> fixed_stream;
  const Population* population = nullptr;  // with `model`, mutually exclusive with fixed_stream
  const ReportingModel* model = nullptr;
  std::size_t n_trials = 1;
  std::uint64_t horizon = 1;  // reports per trial before censoring
  std::uint64_t seed = 0;     // trial k derives its generator from seed + k
  unsigned n_threads = 1;
};

// Runs a fresh stop-at-first-flag monitor per trial. Outcomes are in trial
// order and depend only on (plan, gs, cfg), not on thread count.
std::vector<TrialOutcome> run_permutation_trials(const TrialPlan& plan, const GroupSet& gs,
                                                 const MonitorConfig& cfg);

struct SummaryStats {
  std::size_t n_trials = 0;
  std::size_t n_stopped = 0;
  double stop_fraction = 0.0;
  std::optional<double> mean_stopping_time;    // over stopped trials only
  std::optional<double> median_stopping_time;  // lower median over stopped trials
  std::optional<double> mean_first_group_rr;
};
SummaryStats summarize_trials(const std::vector<TrialOutcome>& outcomes);

struct NullCalibrationResult {
  std::size_t n_trials = 0;
  std::size_t n_false_alarms = 0;  // trials with at least one flag
  double false_alarm_rate = 0.0;
};

// Empirical family-wise false-alarm probe. Requires pairwise-disjoint groups:
// every group one constraint on the same covariate, distinct categories, and
// at least one category of that covariate left unused to absorb the rest of
// the mass. Reports are drawn i.i.d. with each group's frequency pinned at
// fraction * beta * mu0 (fraction <= 1 keeps the run inside the null).
NullCalibrationResult null_calibration(const GroupSet& gs, double beta,
                                       const MonitorConfig& cfg, std::size_t n_trials,
                                       std::uint64_t horizon, std::uint64_t seed,
                                       double fraction = 1.0);

}  // namespace repmon
