#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "repmon/betting.hpp"
#include "repmon/groups.hpp"
#include "repmon/ztest.hpp"

namespace repmon {

enum class Algorithm {
  kFiniteZ,      // counting test, finite-sample correction
  kAsymptoticZ,  // counting test, CLT-scaled correction
  kBetting,      // e-process with adaptive bets
};

std::string_view algorithm_name(Algorithm a);
Algorithm parse_algorithm(std::string_view name);  // throws ConfigError

struct MonitorConfig {
  double alpha = 0.1;
  std::vector<double> betas;  // strictly increasing, each > 1
  Algorithm algorithm = Algorithm::kFiniteZ;
  // Reports before min_t never produce flags. Defaults to 25 for the
  // asymptotic counting test (which is unreliable at small samples), else 0.
  std::optional<std::uint64_t> min_t;
  bool stop_at_first = false;
  double lil_constant = 2.07;

  void validate() const;
  std::uint64_t effective_min_t() const;
};

struct FlagEvent {
  std::uint64_t t = 0;         // arrival index of the triggering report
  std::size_t group_index = 0;  // into the monitor's group set
  double beta = 0.0;
  double statistic = 0.0;  // in-group count (counting tests) or log-wealth
  double threshold = 0.0;

  friend bool operator==(const FlagEvent&, const FlagEvent&) = default;
};

// Runs one sequential test per (group, beta) pair over a single report
// stream. Each beta layer is Bonferroni-corrected on its own: the per-test
// level is alpha divided by the number of valid pairs in that layer.
// Pairs whose scaled preponderance beta*mu0 reaches 1 are excluded (vacuous
// alternative), as is the unconstrained whole-population group; exclusions
// are recorded as warnings and shrink the layer's correction denominator.
// Flagged pairs freeze; flags are never retracted.
//
// Single-writer: ingest calls must be externally serialized.
class Monitor {
 public:
  Monitor(GroupSet gs, MonitorConfig cfg);

  // Feeds one report. Returns the pairs newly flagged by this report,
  // ordered by (group index, beta). With stop_at_first, the first flagging
  // report stops the monitor and later ingests throw StateError.
  std::vector<FlagEvent> ingest(const Assignment& x);

  std::uint64_t t() const { return t_; }
  bool stopped() const { return stopped_; }
  const GroupSet& group_set() const { return gs_; }
  const MonitorConfig& config() const { return cfg_; }
  const std::vector<FlagEvent>& events() const { return events_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  std::size_t n_layers() const { return layers_.size(); }
  // Valid pairs in the layer = that layer's correction denominator.
  std::size_t layer_size(std::size_t beta_index) const;
  bool flagged(std::size_t group_index, std::size_t beta_index) const;

  // One JSON object (single line, no trailing newline) per event:
  // {"t":..., "group":"cov=cat&...", "beta":..., "statistic":...,
  //  "threshold":..., "algorithm":"..."}.
  std::string event_json_line(const FlagEvent& e) const;

  // Versioned JSON state dump; restore(snapshot()) continues bit-for-bit.
  std::string snapshot() const;
  static Monitor restore(const std::string& text);  // throws DataError

 private:
  struct Pair {
    std::size_t group = 0;
    bool flagged = false;
    ZTestState z;
    BetState bet;
  };
  struct Layer {
    double beta = 0.0;
    double alpha_eff = 0.0;    // alpha / pairs.size()
    double bet_threshold = 0.0;
    std::vector<Pair> pairs;
    std::vector<double> beta_mu0;  // aligned with pairs
    std::vector<double> z_scale;   // aligned with pairs: correction scale C
  };

  const std::vector<char>& memberships(const Assignment& x);

  GroupSet gs_;
  MonitorConfig cfg_;
  std::uint64_t min_t_ = 0;
  std::uint64_t t_ = 0;
  bool stopped_ = false;
  std::vector<Layer> layers_;
  std::vector<FlagEvent> events_;
  std::vector<std::string> warnings_;
  std::vector<std::vector<char>> member_cache_;  // by assignment flat index
  std::vector<char> member_scratch_;
};

}  // namespace repmon
