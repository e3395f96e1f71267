#include "repmon/monitor.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "repmon/errors.hpp"

namespace repmon {

using ordered_json = nlohmann::ordered_json;

namespace {
constexpr int kSnapshotVersion = 1;
// Membership rows are cached per distinct assignment up to this many cells.
constexpr std::size_t kMemberCacheLimit = 1u << 16;
}  // namespace

std::string_view algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::kFiniteZ:
      return "finite-z";
    case Algorithm::kAsymptoticZ:
      return "asymptotic-z";
    case Algorithm::kBetting:
      return "betting";
  }
  throw ConfigError("unknown algorithm");
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "finite-z") return Algorithm::kFiniteZ;
  if (name == "asymptotic-z") return Algorithm::kAsymptoticZ;
  if (name == "betting") return Algorithm::kBetting;
  throw ConfigError("unknown algorithm: " + std::string(name) +
                    " (expected finite-z, asymptotic-z, or betting)");
}

void MonitorConfig::validate() const {
  if (!(alpha > 0.0) || alpha >= 1.0) throw ConfigError("alpha must be in (0,1)");
  if (betas.empty()) throw ConfigError("need at least one beta");
  for (std::size_t i = 0; i < betas.size(); ++i) {
    if (!(betas[i] > 1.0)) throw ConfigError("every beta must exceed 1");
    if (i > 0 && !(betas[i] > betas[i - 1])) {
      throw ConfigError("betas must be strictly increasing");
    }
  }
  if (!(lil_constant > 0.0)) throw ConfigError("iterated-logarithm constant must be positive");
}

std::uint64_t MonitorConfig::effective_min_t() const {
  if (min_t) return *min_t;
  return algorithm == Algorithm::kAsymptoticZ ? 25 : 0;
}

Monitor::Monitor(GroupSet gs, MonitorConfig cfg) : gs_(std::move(gs)), cfg_(std::move(cfg)) {
  cfg_.validate();
  if (gs_.groups.empty()) throw ConfigError("group set must be non-empty");
  min_t_ = cfg_.effective_min_t();

  std::vector<char> unconstrained_warned(gs_.groups.size(), 0);
  std::size_t total_pairs = 0;
  layers_.reserve(cfg_.betas.size());
  for (double beta : cfg_.betas) {
    Layer layer;
    layer.beta = beta;
    for (std::size_t i = 0; i < gs_.groups.size(); ++i) {
      if (gs_.groups[i].unconstrained()) {
        if (!unconstrained_warned[i]) {
          unconstrained_warned[i] = 1;
          warnings_.push_back("excluding whole-population group: the test is vacuous");
        }
        continue;
      }
      double bm = beta * gs_.base_preponderances[i];
      if (bm >= 1.0) {
        warnings_.push_back("excluding group " + gs_.groups[i].to_string(*gs_.schema) +
                            " at beta " + std::to_string(beta) +
                            ": scaled preponderance reaches 1, alternative is vacuous");
        continue;
      }
      layer.pairs.push_back(Pair{i, false, {}, {}});
      layer.beta_mu0.push_back(bm);
      layer.z_scale.push_back(cfg_.algorithm == Algorithm::kAsymptoticZ
                                  ? std::sqrt(bm * (1.0 - bm))
                                  : 0.5);
    }
    if (!layer.pairs.empty()) {
      layer.alpha_eff = cfg_.alpha / static_cast<double>(layer.pairs.size());
      layer.bet_threshold = bet_threshold(layer.pairs.size(), cfg_.alpha);
    }
    total_pairs += layer.pairs.size();
    layers_.push_back(std::move(layer));
  }
  if (total_pairs == 0) throw ConfigError("no testable (group, beta) pair");

  if (gs_.schema->n_assignments() <= kMemberCacheLimit) {
    member_cache_.resize(gs_.schema->n_assignments());
  }
}

const std::vector<char>& Monitor::memberships(const Assignment& x) {
  auto fill = [&](std::vector<char>& row) {
    row.resize(gs_.groups.size());
    for (std::size_t i = 0; i < gs_.groups.size(); ++i) {
      row[i] = gs_.groups[i].contains(x) ? 1 : 0;
    }
  };
  if (member_cache_.empty()) {
    fill(member_scratch_);
    return member_scratch_;
  }
  auto& row = member_cache_[x.flat_index()];
  if (row.empty() && !gs_.groups.empty()) fill(row);
  return row;
}

std::vector<FlagEvent> Monitor::ingest(const Assignment& x) {
  if (stopped_) throw StateError("monitor is stopped; no further reports accepted");
  if (x.categories().size() != gs_.schema->size()) {
    throw SchemaError("report does not match the monitor's schema");
  }
  for (std::size_t i = 0; i < x.categories().size(); ++i) {
    if (x.category(i) >= gs_.schema->covariate(i).categories.size()) {
      throw SchemaError("report category out of range for covariate " +
                        gs_.schema->covariate(i).name);
    }
  }
  const std::vector<char>& member = memberships(x);
  ++t_;
  const double td = static_cast<double>(t_);
  const bool decide = t_ >= min_t_;
  const double lg = 2.0 + std::log2(td);

  std::vector<FlagEvent> fresh;
  for (auto& layer : layers_) {
    if (layer.pairs.empty()) continue;
    // Correction radius shared by the layer (same level, same t).
    double radius = 0.0;
    if (cfg_.algorithm != Algorithm::kBetting && decide) {
      radius = std::sqrt(cfg_.lil_constant * td * std::log(lg * lg / layer.alpha_eff));
    }
    for (std::size_t pi = 0; pi < layer.pairs.size(); ++pi) {
      Pair& pair = layer.pairs[pi];
      if (pair.flagged) continue;
      const bool in_group = member[pair.group] != 0;
      if (cfg_.algorithm == Algorithm::kBetting) {
        pair.bet.step(in_group, layer.beta_mu0[pi]);
        if (decide && pair.bet.log_wealth >= layer.bet_threshold) {
          pair.flagged = true;
          fresh.push_back(
              FlagEvent{t_, pair.group, layer.beta, pair.bet.log_wealth, layer.bet_threshold});
        }
      } else {
        pair.z.update(in_group);
        if (decide) {
          const double threshold = td * layer.beta_mu0[pi] + layer.z_scale[pi] * radius;
          if (static_cast<double>(pair.z.omega) >= threshold) {
            pair.flagged = true;
            fresh.push_back(FlagEvent{t_, pair.group, layer.beta,
                                      static_cast<double>(pair.z.omega), threshold});
          }
        }
      }
    }
  }
  std::sort(fresh.begin(), fresh.end(), [](const FlagEvent& a, const FlagEvent& b) {
    if (a.group_index != b.group_index) return a.group_index < b.group_index;
    return a.beta < b.beta;
  });
  events_.insert(events_.end(), fresh.begin(), fresh.end());
  if (cfg_.stop_at_first && !fresh.empty()) stopped_ = true;
  return fresh;
}

std::size_t Monitor::layer_size(std::size_t beta_index) const {
  return layers_.at(beta_index).pairs.size();
}

bool Monitor::flagged(std::size_t group_index, std::size_t beta_index) const {
  const Layer& layer = layers_.at(beta_index);
  for (const Pair& p : layer.pairs) {
    if (p.group == group_index) return p.flagged;
  }
  return false;
}

std::string Monitor::event_json_line(const FlagEvent& e) const {
  ordered_json j;
  j["t"] = e.t;
  j["group"] = gs_.groups.at(e.group_index).to_string(*gs_.schema);
  j["beta"] = e.beta;
  j["statistic"] = e.statistic;
  j["threshold"] = e.threshold;
  j["algorithm"] = algorithm_name(cfg_.algorithm);
  return j.dump();
}

std::string Monitor::snapshot() const {
  ordered_json j;
  j["version"] = kSnapshotVersion;
  j["kind"] = "monitor-snapshot";
  ordered_json schema = ordered_json::array();
  for (const auto& cov : gs_.schema->covariates()) {
    schema.push_back({{"name", cov.name}, {"categories", cov.categories}});
  }
  j["schema"] = std::move(schema);
  ordered_json groups = ordered_json::array();
  for (const auto& g : gs_.groups) groups.push_back(g.to_string(*gs_.schema));
  j["groups"] = std::move(groups);
  j["base_preponderances"] = gs_.base_preponderances;
  ordered_json cfg;
  cfg["alpha"] = cfg_.alpha;
  cfg["betas"] = cfg_.betas;
  cfg["algorithm"] = algorithm_name(cfg_.algorithm);
  cfg["min_t"] = min_t_;
  cfg["stop_at_first"] = cfg_.stop_at_first;
  cfg["lil_constant"] = cfg_.lil_constant;
  j["config"] = std::move(cfg);
  j["t"] = t_;
  j["stopped"] = stopped_;
  ordered_json events = ordered_json::array();
  for (const auto& e : events_) {
    events.push_back({{"t", e.t},
                      {"group", e.group_index},
                      {"beta", e.beta},
                      {"statistic", e.statistic},
                      {"threshold", e.threshold}});
  }
  j["events"] = std::move(events);
  ordered_json layers = ordered_json::array();
  for (const auto& layer : layers_) {
    ordered_json pairs = ordered_json::array();
    for (const auto& p : layer.pairs) {
      ordered_json pj;
      pj["group"] = p.group;
      pj["flagged"] = p.flagged;
      if (cfg_.algorithm == Algorithm::kBetting) {
        pj["state"] = {{"t", p.bet.t},
                       {"log_wealth", p.bet.log_wealth},
                       {"lambda", p.bet.lambda},
                       {"z_sq_sum", p.bet.z_sq_sum}};
      } else {
        pj["state"] = {{"t", p.z.t}, {"omega", p.z.omega}};
      }
      pairs.push_back(std::move(pj));
    }
    layers.push_back({{"beta", layer.beta}, {"pairs", std::move(pairs)}});
  }
  j["layers"] = std::move(layers);
  return j.dump();
}

Monitor Monitor::restore(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed snapshot: ") + e.what());
  }
  try {
    if (!j.is_object() || j.value("kind", "") != "monitor-snapshot") {
      throw DataError("not a monitor snapshot");
    }
    if (j.at("version").get<int>() != kSnapshotVersion) {
      throw DataError("unsupported snapshot version");
    }
    std::vector<Covariate> covs;
    for (const auto& cj : j.at("schema")) {
      covs.push_back(Covariate{cj.at("name").get<std::string>(),
                               cj.at("categories").get<std::vector<std::string>>()});
    }
    auto schema = std::make_shared<const CovariateSchema>(std::move(covs));
    std::vector<GroupSpec> groups;
    for (const auto& gj : j.at("groups")) {
      groups.push_back(GroupSpec::parse(*schema, gj.get<std::string>()));
    }
    auto mu0 = j.at("base_preponderances").get<std::vector<double>>();
    GroupSet gs = make_group_set(schema, std::move(groups), std::move(mu0));

    const auto& cj = j.at("config");
    MonitorConfig cfg;
    cfg.alpha = cj.at("alpha").get<double>();
    cfg.betas = cj.at("betas").get<std::vector<double>>();
    cfg.algorithm = parse_algorithm(cj.at("algorithm").get<std::string>());
    cfg.min_t = cj.at("min_t").get<std::uint64_t>();
    cfg.stop_at_first = cj.at("stop_at_first").get<bool>();
    cfg.lil_constant = cj.at("lil_constant").get<double>();

    Monitor m(std::move(gs), std::move(cfg));
    m.t_ = j.at("t").get<std::uint64_t>();
    m.stopped_ = j.at("stopped").get<bool>();
    for (const auto& ej : j.at("events")) {
      FlagEvent e;
      e.t = ej.at("t").get<std::uint64_t>();
      e.group_index = ej.at("group").get<std::size_t>();
      if (e.group_index >= m.gs_.groups.size()) throw DataError("event group out of range");
      e.beta = ej.at("beta").get<double>();
      e.statistic = ej.at("statistic").get<double>();
      e.threshold = ej.at("threshold").get<double>();
      m.events_.push_back(e);
    }
    const auto& layers = j.at("layers");
    if (layers.size() != m.layers_.size()) throw DataError("snapshot layer count mismatch");
    for (std::size_t li = 0; li < m.layers_.size(); ++li) {
      Layer& layer = m.layers_[li];
      const auto& lj = layers[li];
      if (lj.at("beta").get<double>() != layer.beta) {
        throw DataError("snapshot beta mismatch");
      }
      const auto& pairs = lj.at("pairs");
      if (pairs.size() != layer.pairs.size()) {
        throw DataError("snapshot pair count mismatch: excluded pairs must match");
      }
      for (std::size_t pi = 0; pi < layer.pairs.size(); ++pi) {
        Pair& p = layer.pairs[pi];
        const auto& pj = pairs[pi];
        if (pj.at("group").get<std::size_t>() != p.group) {
          throw DataError("snapshot pair order mismatch");
        }
        p.flagged = pj.at("flagged").get<bool>();
        const auto& sj = pj.at("state");
        if (m.cfg_.algorithm == Algorithm::kBetting) {
          p.bet.t = sj.at("t").get<std::uint64_t>();
          p.bet.log_wealth = sj.at("log_wealth").get<double>();
          p.bet.lambda = sj.at("lambda").get<double>();
          p.bet.z_sq_sum = sj.at("z_sq_sum").get<double>();
        } else {
          p.z.t = sj.at("t").get<std::uint64_t>();
          p.z.omega = sj.at("omega").get<std::uint64_t>();
          if (p.z.omega > p.z.t) throw DataError("snapshot state count exceeds time");
        }
      }
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed snapshot: ") + e.what());
  }
}

}  // namespace repmon
