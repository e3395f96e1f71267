#include "repmon/ztest.hpp"

#include <cmath>

#include "repmon/errors.hpp"

namespace repmon {

void ZTestParams::validate() const {
  if (!(beta_mu0 > 0.0) || beta_mu0 >= 1.0) {
    throw ConfigError("scaled preponderance must be in (0,1); the alternative is vacuous at 1");
  }
  if (!(alpha_eff > 0.0) || alpha_eff >= 1.0) {
    throw ConfigError("per-group level must be in (0,1)");
  }
  if (!(lil_constant > 0.0)) throw ConfigError("iterated-logarithm constant must be positive");
}

double zt_threshold(std::uint64_t t, const ZTestParams& p) {
  p.validate();
  if (t < 1) throw ConfigError("threshold undefined before the first report");
  double td = static_cast<double>(t);
  double lg = 2.0 + std::log2(td);
  double c = p.variant == ZVariant::kFiniteSample
                 ? 0.5
                 : std::sqrt(p.beta_mu0 * (1.0 - p.beta_mu0));
  return td * p.beta_mu0 + c * std::sqrt(p.lil_constant * td * std::log(lg * lg / p.alpha_eff));
}

bool zt_reject(const ZTestState& s, const ZTestParams& p) {
  if (s.t < 1) return false;
  if (s.t < p.min_t) return false;
  return static_cast<double>(s.omega) >= zt_threshold(s.t, p);
}

std::uint64_t zt_power_bound(double delta_max, std::uint64_t n_groups, double alpha,
                             double delta) {
  if (!(delta_max > 0.0) || delta_max >= 1.0) {
    throw ConfigError("overrepresentation margin must be in (0,1) for a finite bound");
  }
  if (n_groups < 1) throw ConfigError("need at least one group");
  if (!(alpha > 0.0) || alpha >= 1.0) throw ConfigError("level must be in (0,1)");
  if (!(delta > 0.0) || delta >= 1.0) throw ConfigError("confidence must be in (0,1)");
  const double c1 = 0.5 * std::sqrt(2.06);
  const double rhs = 4.0 * c1 *
                     std::log(std::max(static_cast<double>(n_groups) / alpha, 1.0 / delta)) /
                     (delta_max * delta_max);
  auto lhs = [](std::uint64_t t) {
    double lg = 2.0 + std::log2(static_cast<double>(t));
    return static_cast<double>(t) / (1.0 + std::log(lg * lg));
  };
  std::uint64_t hi = 1;
  while (lhs(hi) < rhs) hi *= 2;
  std::uint64_t lo = hi / 2;  // lhs(lo) < rhs or lo == 0
  while (lo + 1 < hi) {
    std::uint64_t mid = lo + (hi - lo) / 2;
    if (lhs(mid) < rhs) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

}  // namespace repmon
