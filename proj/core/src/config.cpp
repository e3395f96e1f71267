#include "repmon/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "repmon/errors.hpp"

namespace repmon {

RunConfig RunConfig::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  RunConfig c;
  try {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    if (j.contains("schema")) {
      for (const auto& cj : j.at("schema")) {
        c.schema.push_back(Covariate{cj.at("name").get<std::string>(),
                                     cj.at("categories").get<std::vector<std::string>>()});
      }
    }
    c.depth = j.value("depth", c.depth);
    if (j.contains("reference")) {
      const auto& r = j.at("reference");
      if (r.contains("joint")) c.joint_reference = r.at("joint").get<std::string>();
      if (r.contains("marginals")) {
        for (auto it = r.at("marginals").begin(); it != r.at("marginals").end(); ++it) {
          c.marginal_reference[it.key()] = it.value().get<std::string>();
        }
      }
      if (!c.joint_reference.empty() && !c.marginal_reference.empty()) {
        throw ConfigError("reference: give either joint or marginals, not both");
      }
    }
    c.impute_product = j.value("impute_product", c.impute_product);
    c.min_preponderance = j.value("min_preponderance", c.min_preponderance);
    c.alpha = j.value("alpha", c.alpha);
    if (j.contains("betas")) c.betas = j.at("betas").get<std::vector<double>>();
    c.algorithm = j.value("algorithm", c.algorithm);
    if (j.contains("min_t") && !j.at("min_t").is_null()) {
      c.min_t = j.at("min_t").get<std::uint64_t>();
    }
    c.stop_at_first = j.value("stop_at_first", c.stop_at_first);
    c.lil_constant = j.value("lil_constant", c.lil_constant);
    c.reports = j.value("reports", c.reports);
    c.order_by_timestamp = j.value("order_by_timestamp", c.order_by_timestamp);
    c.population = j.value("population", c.population);
    if (j.contains("model")) {
      ModelSpec m;
      m.name = j.at("model").value("name", "model");
      for (auto it = j.at("model").at("probabilities").begin();
           it != j.at("model").at("probabilities").end(); ++it) {
        m.probabilities[it.key()] = it.value().get<double>();
      }
      c.model = std::move(m);
    }
    c.n_trials = j.value("n_trials", c.n_trials);
    c.horizon = j.value("horizon", c.horizon);
    c.seed = j.value("seed", c.seed);
    c.threads = j.value("threads", c.threads);
    c.bucket = j.value("bucket", c.bucket);
    c.output = j.value("output", c.output);
    if (j.contains("assumptions")) {
      const auto& a = j.at("assumptions");
      c.assumptions.b = a.value("b", c.assumptions.b);
      c.assumptions.gamma_tr = a.value("gamma_tr", c.assumptions.gamma_tr);
      c.assumptions.gamma_fr = a.value("gamma_fr", c.assumptions.gamma_fr);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  return c;
}

RunConfig RunConfig::from_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return from_json_text(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::shared_ptr<const CovariateSchema> RunConfig::make_schema() const {
  if (schema.empty()) throw ConfigError("config declares no schema");
  return std::make_shared<const CovariateSchema>(schema);
}

MonitorConfig RunConfig::monitor_config() const {
  MonitorConfig mc;
  mc.alpha = alpha;
  mc.betas = betas;
  mc.algorithm = parse_algorithm(algorithm);
  mc.min_t = min_t;
  mc.stop_at_first = stop_at_first;
  mc.lil_constant = lil_constant;
  mc.validate();
  return mc;
}

}  // namespace repmon
