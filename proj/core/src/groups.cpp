#include "repmon/groups.hpp"

#include <algorithm>
#include <sstream>

#include "repmon/errors.hpp"

namespace repmon {

CovariateSchema::CovariateSchema(std::vector<Covariate> covariates)
    : covariates_(std::move(covariates)) {
  if (covariates_.empty()) throw ConfigError("schema needs at least one covariate");
  cat_index_.resize(covariates_.size());
  n_assignments_ = 1;
  for (std::size_t i = 0; i < covariates_.size(); ++i) {
    const auto& cov = covariates_[i];
    if (cov.name.empty()) throw ConfigError("covariate name must be non-empty");
    if (!cov_index_.emplace(cov.name, i).second) {
      throw ConfigError("duplicate covariate name: " + cov.name);
    }
    if (cov.categories.empty()) {
      throw ConfigError("covariate " + cov.name + " has no categories");
    }
    for (std::size_t c = 0; c < cov.categories.size(); ++c) {
      if (!cat_index_[i].emplace(cov.categories[c], c).second) {
        throw ConfigError("duplicate category " + cov.categories[c] + " in covariate " +
                          cov.name);
      }
    }
    n_assignments_ *= cov.categories.size();
  }
}

std::size_t CovariateSchema::covariate_index(std::string_view name) const {
  auto it = cov_index_.find(std::string(name));
  if (it == cov_index_.end()) throw SchemaError("unknown covariate: " + std::string(name));
  return it->second;
}

std::size_t CovariateSchema::category_index(std::size_t cov, std::string_view category) const {
  const auto& idx = cat_index_.at(cov);
  auto it = idx.find(std::string(category));
  if (it == idx.end()) {
    throw SchemaError("unknown category " + std::string(category) + " for covariate " +
                      covariates_[cov].name);
  }
  return it->second;
}

bool CovariateSchema::has_covariate(std::string_view name) const {
  return cov_index_.count(std::string(name)) != 0;
}

Assignment::Assignment(const CovariateSchema& schema, std::vector<std::size_t> categories)
    : categories_(std::move(categories)) {
  if (categories_.size() != schema.size()) {
    throw SchemaError("assignment must cover every covariate");
  }
  flat_ = 0;
  for (std::size_t i = 0; i < categories_.size(); ++i) {
    std::size_t n = schema.covariate(i).categories.size();
    if (categories_[i] >= n) throw SchemaError("category index out of range");
    flat_ = flat_ * n + categories_[i];
  }
}

GroupSpec::GroupSpec(const CovariateSchema& schema,
                     std::vector<std::pair<std::size_t, std::size_t>> constraints)
    : constraints_(std::move(constraints)) {
  std::sort(constraints_.begin(), constraints_.end());
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    auto [cov, cat] = constraints_[i];
    if (cov >= schema.size()) throw SchemaError("constraint covariate out of range");
    if (cat >= schema.covariate(cov).categories.size()) {
      throw SchemaError("constraint category out of range for covariate " +
                        schema.covariate(cov).name);
    }
    if (i > 0 && constraints_[i - 1].first == cov) {
      throw SchemaError("duplicate constraint on covariate " + schema.covariate(cov).name);
    }
  }
}

std::string GroupSpec::to_string(const CovariateSchema& schema) const {
  std::vector<std::pair<std::string, std::string>> named;
  named.reserve(constraints_.size());
  for (auto [cov, cat] : constraints_) {
    named.emplace_back(schema.covariate(cov).name, schema.covariate(cov).categories[cat]);
  }
  std::sort(named.begin(), named.end());
  std::string out;
  for (std::size_t i = 0; i < named.size(); ++i) {
    if (i) out += '&';
    out += named[i].first;
    out += '=';
    out += named[i].second;
  }
  return out;
}

GroupSpec GroupSpec::parse(const CovariateSchema& schema, std::string_view text) {
  std::vector<std::pair<std::size_t, std::size_t>> constraints;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t amp = text.find('&', pos);
    if (amp == std::string_view::npos) amp = text.size();
    std::string_view piece = text.substr(pos, amp - pos);
    std::size_t eq = piece.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw DataError("malformed group constraint: " + std::string(piece));
    }
    std::size_t cov = schema.covariate_index(piece.substr(0, eq));
    std::size_t cat = schema.category_index(cov, piece.substr(eq + 1));
    constraints.emplace_back(cov, cat);
    pos = amp + 1;
  }
  return GroupSpec(schema, std::move(constraints));
}

ReferenceTable ReferenceTable::joint(std::shared_ptr<const CovariateSchema> schema,
                                     const std::vector<std::pair<Assignment, double>>& rows) {
  ReferenceTable t;
  t.schema_ = std::move(schema);
  t.joint_.assign(t.schema_->n_assignments(), 0.0);
  for (const auto& [x, count] : rows) {
    if (count < 0) throw DataError("negative reference count");
    t.joint_[x.flat_index()] += count;
    t.joint_total_ += count;
  }
  if (t.joint_total_ <= 0) throw DataError("reference table has zero total count");
  // Marginalize once so product imputation works off the same table.
  t.marginal_.resize(t.schema_->size());
  t.marginal_total_.assign(t.schema_->size(), t.joint_total_);
  for (std::size_t cov = 0; cov < t.schema_->size(); ++cov) {
    t.marginal_[cov].assign(t.schema_->covariate(cov).categories.size(), 0.0);
  }
  std::size_t flat = 0;
  std::vector<std::size_t> digits(t.schema_->size(), 0);
  for (; flat < t.joint_.size(); ++flat) {
    for (std::size_t cov = 0; cov < t.schema_->size(); ++cov) {
      t.marginal_[cov][digits[cov]] += t.joint_[flat];
    }
    for (std::size_t cov = t.schema_->size(); cov-- > 0;) {
      if (++digits[cov] < t.schema_->covariate(cov).categories.size()) break;
      digits[cov] = 0;
    }
  }
  return t;
}

ReferenceTable ReferenceTable::marginals(std::shared_ptr<const CovariateSchema> schema,
                                         std::vector<std::vector<double>> counts_per_covariate) {
  ReferenceTable t;
  t.schema_ = std::move(schema);
  if (counts_per_covariate.size() != t.schema_->size()) {
    throw DataError("need one marginal table per covariate");
  }
  t.marginal_ = std::move(counts_per_covariate);
  t.marginal_total_.resize(t.schema_->size());
  for (std::size_t cov = 0; cov < t.schema_->size(); ++cov) {
    if (t.marginal_[cov].size() != t.schema_->covariate(cov).categories.size()) {
      throw DataError("marginal table size mismatch for covariate " +
                      t.schema_->covariate(cov).name);
    }
    double total = 0.0;
    for (double c : t.marginal_[cov]) {
      if (c < 0) throw DataError("negative reference count");
      total += c;
    }
    if (total <= 0) {
      throw DataError("marginal table for covariate " + t.schema_->covariate(cov).name +
                      " has zero total count");
    }
    t.marginal_total_[cov] = total;
  }
  return t;
}

double ReferenceTable::preponderance_or_zero(const GroupSpec& g, bool impute_product) const {
  if (impute_product) {
    double p = 1.0;
    for (auto [cov, cat] : g.constraints()) {
      p *= marginal_[cov][cat] / marginal_total_[cov];
    }
    return p;
  }
  if (!has_joint()) {
    throw ConfigError("joint reference table required unless product imputation is enabled");
  }
  if (g.unconstrained()) return 1.0;
  double count = 0.0;
  std::vector<std::size_t> digits(schema_->size(), 0);
  for (std::size_t flat = 0; flat < joint_.size(); ++flat) {
    bool match = true;
    for (auto [cov, cat] : g.constraints()) {
      if (digits[cov] != cat) {
        match = false;
        break;
      }
    }
    if (match) count += joint_[flat];
    for (std::size_t cov = schema_->size(); cov-- > 0;) {
      if (++digits[cov] < schema_->covariate(cov).categories.size()) break;
      digits[cov] = 0;
    }
  }
  return count / joint_total_;
}

double ReferenceTable::preponderance(const GroupSpec& g, bool impute_product) const {
  double p = preponderance_or_zero(g, impute_product);
  if (p == 0.0) {
    throw DataError("degenerate group (zero base preponderance): " + g.to_string(*schema_));
  }
  return p;
}

namespace {

void categories_row_major(const CovariateSchema& schema, const std::vector<std::size_t>& covs,
                          std::vector<GroupSpec>& out) {
  std::vector<std::size_t> cats(covs.size(), 0);
  for (;;) {
    std::vector<std::pair<std::size_t, std::size_t>> constraints;
    constraints.reserve(covs.size());
    for (std::size_t i = 0; i < covs.size(); ++i) constraints.emplace_back(covs[i], cats[i]);
    out.emplace_back(schema, std::move(constraints));
    std::size_t i = covs.size();
    for (; i-- > 0;) {
      if (++cats[i] < schema.covariate(covs[i]).categories.size()) break;
      cats[i] = 0;
      if (i == 0) return;
    }
  }
}

void covariate_subsets(const CovariateSchema& schema, std::size_t k, std::size_t start,
                       std::vector<std::size_t>& prefix, std::vector<GroupSpec>& out) {
  if (prefix.size() == k) {
    categories_row_major(schema, prefix, out);
    return;
  }
  for (std::size_t c = start; c < schema.size(); ++c) {
    prefix.push_back(c);
    covariate_subsets(schema, k, c + 1, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<GroupSpec> enumerate_groups(const CovariateSchema& schema, std::size_t depth) {
  if (depth < 1 || depth > schema.size()) {
    throw ConfigError("enumeration depth must be in [1, number of covariates]");
  }
  std::vector<GroupSpec> out;
  std::vector<std::size_t> prefix;
  for (std::size_t k = 1; k <= depth; ++k) covariate_subsets(schema, k, 0, prefix, out);
  return out;
}

GroupSet GroupSet::filtered(double min_preponderance) const {
  if (min_preponderance < 0 || min_preponderance >= 1) {
    throw ConfigError("min preponderance must be in [0, 1)");
  }
  GroupSet out;
  out.schema = schema;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (base_preponderances[i] >= min_preponderance) {
      out.groups.push_back(groups[i]);
      out.base_preponderances.push_back(base_preponderances[i]);
    }
  }
  if (out.groups.empty()) throw ConfigError("no groups survive the preponderance filter");
  return out;
}

GroupSet make_group_set(std::shared_ptr<const CovariateSchema> schema, std::size_t depth,
                        const ReferenceTable& table, bool impute_product) {
  GroupSet gs;
  gs.schema = std::move(schema);
  for (auto& g : enumerate_groups(*gs.schema, depth)) {
    double mu0 = table.preponderance_or_zero(g, impute_product);
    if (mu0 == 0.0) continue;  // degenerate: no reference mass
    gs.groups.push_back(std::move(g));
    gs.base_preponderances.push_back(mu0);
  }
  if (gs.groups.empty()) throw ConfigError("every enumerated group has zero preponderance");
  return gs;
}

GroupSet make_group_set(std::shared_ptr<const CovariateSchema> schema,
                        std::vector<GroupSpec> groups, std::vector<double> base_preponderances) {
  if (groups.size() != base_preponderances.size()) {
    throw ConfigError("groups and preponderances must align");
  }
  if (groups.empty()) throw ConfigError("group set must be non-empty");
  for (double m : base_preponderances) {
    if (!(m > 0.0) || m > 1.0) throw ConfigError("base preponderance must be in (0, 1]");
  }
  GroupSet gs;
  gs.schema = std::move(schema);
  gs.groups = std::move(groups);
  gs.base_preponderances = std::move(base_preponderances);
  return gs;
}

}  // namespace repmon
