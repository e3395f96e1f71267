#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace repmon {

// Online Newton Step gain 2/(2 - ln 3), computed at full precision.
double ons_gain();

// Betting e-process over one group's indicator stream. Wealth lives in log
// space; the bet lambda is predictable (updated after the wealth step) and
// projected onto [0,1], which keeps every log argument positive whenever
// beta_mu0 < 1.
struct BetState {
  std::uint64_t t = 0;
  double log_wealth = 0.0;
  double lambda = 0.0;
  double z_sq_sum = 0.0;

  void step(bool in_group, double beta_mu0);
};

// Constant rejection threshold ln(n_groups / alpha).
double bet_threshold(std::uint64_t n_groups, double alpha);

// Bet maximizing one-step expected log-wealth:
// clamp_[0,1]((mu - beta_mu0) / (beta_mu0 * (1 - beta_mu0))).
double lambda_star(double mu, double beta_mu0);

// T * [mu*ln(1 + lambda*(1-beta_mu0)) + (1-mu)*ln(1 - lambda*beta_mu0)].
double expected_log_wealth(double mu, double beta_mu0, double lambda, double t);

// Max over groups of the optimal one-step expected log-wealth; also reports
// which group attains it.
struct OmegaStar {
  double value = 0.0;
  std::size_t argmax = 0;
};
OmegaStar omega_star(const std::vector<std::pair<double, double>>& group_params);

// Advisory expected-stopping-time bound
//   max{16/w^2, 4*ln(n_groups/alpha)/w} + 2/((1-beta_mu0_argmax)^2 * w^2)
// where w is the omega_star value and beta_mu0_argmax belongs to the group
// attaining it.
double bet_stopping_bound(double omega_star_value, double beta_mu0_argmax,
                          std::uint64_t n_groups, double alpha);

}  // namespace repmon
