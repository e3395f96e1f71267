#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "repmon/groups.hpp"
#include "repmon/sim.hpp"

namespace repmon {

// Minimal RFC 4180 CSV: header row required, quoted fields may contain
// commas, quotes ("" escape) and newlines; UTF-8 passed through untouched.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> row_lines;  // 1-based starting line of each row
  std::string source;                  // for error messages
};

CsvTable read_csv(std::istream& in, const std::string& source_name);
CsvTable read_csv_file(const std::string& path);

// Optional preprocessing of raw CSV values into schema categories: numeric
// bucketing by edges (value < edges[i] picks labels[i], else the last label)
// or a literal value -> category map.
class BucketMap {
 public:
  static BucketMap parse(const std::string& json_text);  // throws ConfigError
  static BucketMap load(const std::string& path);

  bool has(const std::string& covariate) const;
  // Throws DataError on unmapped or non-numeric raw values.
  std::string apply(const std::string& covariate, const std::string& raw) const;

 private:
  struct Rule {
    bool numeric = false;
    std::vector<double> edges;        // ascending; labels.size() = edges+1
    std::vector<std::string> labels;
    std::map<std::string, std::string> literal;
  };
  std::map<std::string, Rule> rules_;
};

// Reports CSV: one column per schema covariate (all required), optional
// `timestamp` column. Row order is kept unless order_by_timestamp, which
// stably sorts by timestamp (numerically when every value parses as a
// number, else lexicographically). Errors carry file and line.
std::vector<Assignment> parse_reports(const CsvTable& table, const CovariateSchema& schema,
                                      const BucketMap* buckets = nullptr,
                                      bool order_by_timestamp = false);

// Population CSV: schema covariate columns plus `harmed` (0/1/true/false)
// and `stratum` (free-form label; the declared set is collected in order of
// first appearance).
Population parse_population(const CsvTable& table,
                            std::shared_ptr<const CovariateSchema> schema,
                            const BucketMap* buckets = nullptr);

// Joint reference table CSV: covariate columns plus nonnegative `count`.
ReferenceTable parse_joint_reference(const CsvTable& table,
                                     std::shared_ptr<const CovariateSchema> schema,
                                     const BucketMap* buckets = nullptr);

// Marginal reference tables, one CSV per covariate (`category,count`),
// given in schema order. Missing categories count as zero; duplicates sum.
ReferenceTable parse_marginal_reference(const std::vector<CsvTable>& tables,
                                        std::shared_ptr<const CovariateSchema> schema);

}  // namespace repmon
