#include "repmon/betting.hpp"

#include <algorithm>
#include <cmath>

#include "repmon/errors.hpp"

namespace repmon {

double ons_gain() {
  static const double g = 2.0 / (2.0 - std::log(3.0));
  return g;
}

void BetState::step(bool in_group, double beta_mu0) {
  if (!(beta_mu0 > 0.0) || beta_mu0 >= 1.0) {
    throw ConfigError("scaled preponderance must be in (0,1)");
  }
  const double centered = (in_group ? 1.0 : 0.0) - beta_mu0;
  // Wealth moves with the current (predictable) bet; only then is the bet
  // revised for the next report.
  const double factor = lambda * centered;
  log_wealth += std::log1p(factor);
  const double z = centered / (1.0 + factor);
  z_sq_sum += z * z;
  lambda = std::clamp(lambda + ons_gain() * z / (1.0 + z_sq_sum), 0.0, 1.0);
  ++t;
}

double bet_threshold(std::uint64_t n_groups, double alpha) {
  if (n_groups < 1) throw ConfigError("need at least one group");
  if (!(alpha > 0.0) || alpha > 1.0) throw ConfigError("level must be in (0,1]");
  return std::log(static_cast<double>(n_groups) / alpha);
}

double lambda_star(double mu, double beta_mu0) {
  if (!(beta_mu0 > 0.0) || beta_mu0 >= 1.0) {
    throw ConfigError("scaled preponderance must be in (0,1)");
  }
  if (mu < 0.0 || mu > 1.0) throw ConfigError("group frequency must be in [0,1]");
  return std::clamp((mu - beta_mu0) / (beta_mu0 * (1.0 - beta_mu0)), 0.0, 1.0);
}

double expected_log_wealth(double mu, double beta_mu0, double lambda, double t) {
  return t * (mu * std::log1p(lambda * (1.0 - beta_mu0)) +
              (1.0 - mu) * std::log1p(-lambda * beta_mu0));
}

OmegaStar omega_star(const std::vector<std::pair<double, double>>& group_params) {
  if (group_params.empty()) throw ConfigError("need at least one group");
  OmegaStar best;
  bool first = true;
  for (std::size_t i = 0; i < group_params.size(); ++i) {
    auto [mu, bm] = group_params[i];
    double v = expected_log_wealth(mu, bm, lambda_star(mu, bm), 1.0);
    if (first || v > best.value) {
      best.value = v;
      best.argmax = i;
      first = false;
    }
  }
  return best;
}

double bet_stopping_bound(double omega_star_value, double beta_mu0_argmax,
                          std::uint64_t n_groups, double alpha) {
  if (!(omega_star_value > 0.0)) {
    throw ConfigError("no finite stopping bound without positive optimal growth");
  }
  const double w2 = omega_star_value * omega_star_value;
  const double main_term =
      std::max(16.0 / w2, 4.0 * bet_threshold(n_groups, alpha) / omega_star_value);
  const double slack = 1.0 - beta_mu0_argmax;
  return main_term + 2.0 / (slack * slack * w2);
}

}  // namespace repmon
