#pragma once

#include <cstdint>

namespace repmon {

enum class ZVariant {
  kFiniteSample,  // correction scale 1/2, valid at every sample size
  kAsymptotic,    // correction scale sqrt(beta_mu0*(1-beta_mu0)), CLT regime
};

struct ZTestParams {
  double beta_mu0 = 0.0;   // scaled base preponderance, in (0,1)
  double alpha_eff = 0.0;  // per-group test level (overall level / group count)
  ZVariant variant = ZVariant::kFiniteSample;
  std::uint64_t min_t = 0;      // decisions before this many reports are "continue"
  double lil_constant = 2.07;   // iterated-logarithm constant in the correction

  void validate() const;  // throws ConfigError on out-of-range values
};

// Counting statistic: omega = number of in-group reports among the first t.
struct ZTestState {
  std::uint64_t t = 0;
  std::uint64_t omega = 0;

  void update(bool in_group) {
    ++t;
    if (in_group) ++omega;
  }
};

// Time-uniform rejection boundary
//   t*beta_mu0 + C*sqrt(lil_constant * t * ln((2+log2 t)^2 / alpha_eff)),
// strictly increasing in t. Requires t >= 1.
double zt_threshold(std::uint64_t t, const ZTestParams& p);

// Reject iff omega >= zt_threshold(t) and t >= min_t.
bool zt_reject(const ZTestState& s, const ZTestParams& p);

// Advisory worst-case detection-time bound: smallest t with
//   t / (1 + ln((2+log2 t)^2)) >= 4*C1*ln(max(n_groups/alpha, 1/delta)) / delta_max^2,
// where C1 = (1/2)*sqrt(2.06) and delta_max is the overrepresentation margin
// mu - beta*mu0 of the most overrepresented group.
std::uint64_t zt_power_bound(double delta_max, std::uint64_t n_groups, double alpha,
                             double delta);

}  // namespace repmon
