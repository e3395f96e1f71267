#include "repmon/harm.hpp"

#include <algorithm>

#include "repmon/errors.hpp"

namespace repmon {

void ReportingAssumptions::validate() const {
  if (!(b >= 1.0)) throw ConfigError("reporting deviation bound b must be >= 1");
  if (!(gamma_tr > 0.0)) throw ConfigError("relative true-report rate must be positive");
  if (gamma_fr < 0.0) throw ConfigError("relative false-report rate must be nonnegative");
  if (!(gamma_tr > gamma_fr)) {
    throw ConfigError("true-report rate must exceed false-report rate");
  }
}

double rr_lower_bound(double beta, double b) {
  if (!(beta > 0.0) || !(b > 0.0)) throw ConfigError("beta and b must be positive");
  return beta / b;
}

IrBound ir_lower_bound(double beta, const ReportingAssumptions& a) {
  a.validate();
  IrBound out;
  out.raw = (beta - a.gamma_fr) / (a.gamma_tr - a.gamma_fr);
  out.value = std::clamp(out.raw, 0.0, 1.0);
  return out;
}

double ir_gap_bound(double beta, double gamma_tr, double gamma_fr) {
  if (!(gamma_tr > gamma_fr)) {
    throw ConfigError("true-report rate must exceed false-report rate");
  }
  if (beta < 1.0) throw ConfigError("gap bound needs beta >= 1");
  return (beta - 1.0) / (gamma_tr - gamma_fr);
}

double choose_beta(double ir_threshold, const std::vector<ReportingAssumptions>& groups) {
  if (groups.empty()) throw ConfigError("need assumptions for at least one group");
  if (ir_threshold < 0.0 || ir_threshold > 1.0) {
    throw ConfigError("incidence threshold must be in [0,1]");
  }
  double best = 0.0;
  bool first = true;
  for (const auto& a : groups) {
    a.validate();
    double beta = (a.gamma_tr - a.gamma_fr) * ir_threshold + a.gamma_fr;
    if (first || beta > best) {
      best = beta;
      first = false;
    }
  }
  return best;
}

double choose_beta_rr(double rr_threshold, double b) {
  if (!(rr_threshold > 0.0) || !(b > 0.0)) {
    throw ConfigError("risk threshold and b must be positive");
  }
  return rr_threshold * b;
}

}  // namespace repmon
