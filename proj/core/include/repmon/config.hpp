#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "repmon/groups.hpp"
#include "repmon/harm.hpp"
#include "repmon/monitor.hpp"

namespace repmon {

struct ModelSpec {
  std::string name;
  std::map<std::string, double> probabilities;  // stratum label -> probability
};

// One JSON document drives a run; command-line flags override fields.
struct RunConfig {
  std::vector<Covariate> schema;
  std::size_t depth = 1;
  std::string joint_reference;  // CSV path; "" if marginals are used
  std::map<std::string, std::string> marginal_reference;  // covariate -> CSV path
  bool impute_product = false;
  double min_preponderance = 0.0;

  double alpha = 0.1;
  std::vector<double> betas;
  std::string algorithm = "finite-z";
  std::optional<std::uint64_t> min_t;
  bool stop_at_first = false;
  double lil_constant = 2.07;

  std::string reports;  // replay CSV path
  bool order_by_timestamp = false;
  std::string population;  // simulation population CSV path
  std::optional<ModelSpec> model;
  std::size_t n_trials = 100;
  std::uint64_t horizon = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 1;

  std::string bucket;  // bucket map JSON path; "" = none
  std::string output;  // output path; "" = stdout

  ReportingAssumptions assumptions;  // harm-inference inputs

  static RunConfig from_json_text(const std::string& text);  // throws ConfigError
  static RunConfig from_json_file(const std::string& path);

  std::shared_ptr<const CovariateSchema> make_schema() const;
  MonitorConfig monitor_config() const;
};

}  // namespace repmon
