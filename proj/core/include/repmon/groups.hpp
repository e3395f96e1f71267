#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace repmon {

struct Covariate {
  std::string name;
  std::vector<std::string> categories;
};

// Ordered categorical feature space. Immutable after construction; shared
// read-only across threads.
class CovariateSchema {
 public:
  explicit CovariateSchema(std::vector<Covariate> covariates);

  std::size_t size() const { return covariates_.size(); }
  const Covariate& covariate(std::size_t i) const { return covariates_[i]; }
  const std::vector<Covariate>& covariates() const { return covariates_; }

  // Throw SchemaError on unknown names.
  std::size_t covariate_index(std::string_view name) const;
  std::size_t category_index(std::size_t cov, std::string_view category) const;

  bool has_covariate(std::string_view name) const;

  // Number of distinct full assignments (product of category counts).
  std::size_t n_assignments() const { return n_assignments_; }

 private:
  std::vector<Covariate> covariates_;
  std::unordered_map<std::string, std::size_t> cov_index_;
  std::vector<std::unordered_map<std::string, std::size_t>> cat_index_;
  std::size_t n_assignments_;
};

// A full assignment of one category to every covariate, stored as indices.
class Assignment {
 public:
  Assignment(const CovariateSchema& schema, std::vector<std::size_t> categories);

  std::size_t category(std::size_t cov) const { return categories_[cov]; }
  const std::vector<std::size_t>& categories() const { return categories_; }

  // Row-major index in [0, schema.n_assignments()); cheap cache key.
  std::size_t flat_index() const { return flat_; }

 private:
  std::vector<std::size_t> categories_;
  std::size_t flat_;
};

// Conjunction of categorical equality constraints. Empty constraint list
// denotes the whole population.
class GroupSpec {
 public:
  GroupSpec() = default;
  // Pairs of (covariate index, category index); validated and kept sorted by
  // covariate index, one constraint per covariate.
  GroupSpec(const CovariateSchema& schema,
            std::vector<std::pair<std::size_t, std::size_t>> constraints);

  const std::vector<std::pair<std::size_t, std::size_t>>& constraints() const {
    return constraints_;
  }
  bool unconstrained() const { return constraints_.empty(); }

  bool contains(const Assignment& x) const {
    for (auto [cov, cat] : constraints_) {
      if (x.category(cov) != cat) return false;
    }
    return true;
  }

  // "cov1=cat1&cov2=cat2", sorted by covariate name; "" for the whole
  // population.
  std::string to_string(const CovariateSchema& schema) const;
  static GroupSpec parse(const CovariateSchema& schema, std::string_view text);

  friend bool operator==(const GroupSpec& a, const GroupSpec& b) {
    return a.constraints_ == b.constraints_;
  }

 private:
  std::vector<std::pair<std::size_t, std::size_t>> constraints_;
};

// Reference-population counts: either a joint table over full assignments or
// per-covariate marginal tables (product imputation only).
class ReferenceTable {
 public:
  static ReferenceTable joint(std::shared_ptr<const CovariateSchema> schema,
                              const std::vector<std::pair<Assignment, double>>& rows);
  static ReferenceTable marginals(std::shared_ptr<const CovariateSchema> schema,
                                  std::vector<std::vector<double>> counts_per_covariate);

  const CovariateSchema& schema() const { return *schema_; }
  std::shared_ptr<const CovariateSchema> schema_ptr() const { return schema_; }
  bool has_joint() const { return !joint_.empty(); }

  // Fraction of the reference population in g. impute_product multiplies the
  // marginal fractions of the constrained categories instead of counting
  // joint rows. Exactly-zero preponderance throws DataError: such a group is
  // degenerate and must be dropped before testing.
  double preponderance(const GroupSpec& g, bool impute_product) const;
  double preponderance_or_zero(const GroupSpec& g, bool impute_product) const;

 private:
  ReferenceTable() = default;

  std::shared_ptr<const CovariateSchema> schema_;
  std::vector<double> joint_;  // by flat index; empty in marginal mode
  double joint_total_ = 0.0;
  std::vector<std::vector<double>> marginal_;  // per covariate, per category
  std::vector<double> marginal_total_;
};

// Every conjunction of 1..depth constraints, one category per constrained
// covariate, excluding the empty conjunction. Deterministic order: constraint
// count ascending, covariate subsets lexicographic by schema index, categories
// row-major.
std::vector<GroupSpec> enumerate_groups(const CovariateSchema& schema, std::size_t depth);

struct GroupSet {
  std::shared_ptr<const CovariateSchema> schema;
  std::vector<GroupSpec> groups;
  std::vector<double> base_preponderances;  // each in (0,1]

  std::size_t size() const { return groups.size(); }

  // Retains groups with preponderance >= min_preponderance, order preserved.
  GroupSet filtered(double min_preponderance) const;
};

// Enumerate to `depth`, compute preponderances, and drop zero-population
// groups (they never enter the multiplicity count).
GroupSet make_group_set(std::shared_ptr<const CovariateSchema> schema, std::size_t depth,
                        const ReferenceTable& table, bool impute_product);

// Group set from explicit specs and preponderances (validated).
GroupSet make_group_set(std::shared_ptr<const CovariateSchema> schema,
                        std::vector<GroupSpec> groups, std::vector<double> base_preponderances);

}  // namespace repmon
