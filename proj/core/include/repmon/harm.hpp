#pragma once

#include <vector>

namespace repmon {

// Assumed relationship between a group's reporting behavior and the
// population's. b bounds the group-to-population ratio of report-to-incidence
// ratios; gamma_tr / gamma_fr are the group's true- and false-report rates
// relative to the population average. The population rate itself cancels out
// of every bound and is never stored.
struct ReportingAssumptions {
  double b = 1.0;         // >= 1
  double gamma_tr = 1.0;  // > 0
  double gamma_fr = 0.0;  // >= 0, < gamma_tr

  void validate() const;  // throws ConfigError
};

// Relative risk implied by an overrepresentation factor beta: beta / b.
double rr_lower_bound(double beta, double b);

struct IrBound {
  double value = 0.0;  // clamped to [0,1]
  double raw = 0.0;    // unclamped formula value
  bool clamped() const { return value != raw; }
};

// Incidence-rate bound (beta - gamma_fr)/(gamma_tr - gamma_fr), clamped to
// [0,1]; raw value kept so inconsistent assumptions stay visible.
IrBound ir_lower_bound(double beta, const ReportingAssumptions& a);

// Lower bound on the incidence-rate gap between the flagged group and any
// other: (beta - 1)/(gamma_tr - gamma_fr).
double ir_gap_bound(double beta, double gamma_tr, double gamma_fr);

// Smallest overrepresentation factor that certifies incidence rate at least
// ir_threshold under every group's assumptions:
// max over groups of (gamma_tr - gamma_fr)*ir_threshold + gamma_fr.
double choose_beta(double ir_threshold, const std::vector<ReportingAssumptions>& groups);

// Overrepresentation factor certifying relative risk rr_threshold: rr * b.
double choose_beta_rr(double rr_threshold, double b);

}  // namespace repmon
