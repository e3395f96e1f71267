#include "repmon/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "repmon/errors.hpp"

namespace repmon {

namespace {

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line);
}

bool parse_double(const std::string& s, double& out) {
  const char* begin = s.data();
  const char* end = begin + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

CsvTable read_csv(std::istream& in, const std::string& source_name) {
  CsvTable table;
  table.source = source_name;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  bool any_char = false;  // current record has content (field chars or separators)
  std::size_t line = 1;
  std::size_t record_line = 1;

  auto end_field = [&]() {
    record.push_back(field);
    field.clear();
    field_was_quoted = false;
  };
  auto end_record = [&]() {
    end_field();
    if (table.header.empty()) {
      table.header = std::move(record);
      if (table.header.empty() || (table.header.size() == 1 && table.header[0].empty())) {
        throw DataError(where(source_name, record_line) + ": empty header");
      }
    } else {
      if (record.size() != table.header.size()) {
        throw DataError(where(source_name, record_line) + ": expected " +
                        std::to_string(table.header.size()) + " fields, got " +
                        std::to_string(record.size()));
      }
      table.rows.push_back(std::move(record));
      table.row_lines.push_back(record_line);
    }
    record.clear();
    any_char = false;
    record_line = line;
  };

  char c;
  while (in.get(c)) {
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field += '"';
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty() || field_was_quoted) {
          throw DataError(where(source_name, line) + ": stray quote inside unquoted field");
        }
        in_quotes = true;
        field_was_quoted = true;
        any_char = true;
        break;
      case ',':
        end_field();
        any_char = true;
        break;
      case '\r':
        break;  // swallowed; \r\n and bare \r both terminate via \n handling below
      case '\n':
        ++line;
        if (any_char || !field.empty() || !record.empty()) end_record();
        record_line = line;
        break;
      default:
        field += c;
        any_char = true;
        break;
    }
  }
  if (in_quotes) {
    throw DataError(where(source_name, record_line) + ": unterminated quoted field");
  }
  if (any_char || !field.empty() || !record.empty()) end_record();
  if (table.header.empty()) throw DataError(source_name + ": missing header row");
  return table;
}

CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  return read_csv(in, path);
}

BucketMap BucketMap::parse(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed bucket map: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("bucket map must be a JSON object");
  BucketMap out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& spec = it.value();
    Rule rule;
    if (spec.contains("edges")) {
      rule.numeric = true;
      for (const auto& e : spec.at("edges")) rule.edges.push_back(e.get<double>());
      if (!std::is_sorted(rule.edges.begin(), rule.edges.end())) {
        throw ConfigError("bucket edges for " + it.key() + " must be ascending");
      }
      for (const auto& l : spec.at("labels")) rule.labels.push_back(l.get<std::string>());
      if (rule.labels.size() != rule.edges.size() + 1) {
        throw ConfigError("bucket map for " + it.key() + " needs one more label than edges");
      }
    } else if (spec.contains("map")) {
      for (auto m = spec.at("map").begin(); m != spec.at("map").end(); ++m) {
        rule.literal[m.key()] = m.value().get<std::string>();
      }
      if (rule.literal.empty()) throw ConfigError("empty value map for " + it.key());
    } else {
      throw ConfigError("bucket map for " + it.key() + " needs either edges+labels or map");
    }
    out.rules_[it.key()] = std::move(rule);
  }
  return out;
}

BucketMap BucketMap::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open bucket map " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

bool BucketMap::has(const std::string& covariate) const {
  return rules_.count(covariate) != 0;
}

std::string BucketMap::apply(const std::string& covariate, const std::string& raw) const {
  auto it = rules_.find(covariate);
  if (it == rules_.end()) return raw;
  const Rule& rule = it->second;
  if (rule.numeric) {
    double v = 0.0;
    if (!parse_double(raw, v)) {
      throw DataError("value '" + raw + "' for " + covariate + " is not numeric");
    }
    for (std::size_t i = 0; i < rule.edges.size(); ++i) {
      if (v < rule.edges[i]) return rule.labels[i];
    }
    return rule.labels.back();
  }
  auto lit = rule.literal.find(raw);
  if (lit == rule.literal.end()) {
    throw DataError("value '" + raw + "' for " + covariate + " has no bucket mapping");
  }
  return lit->second;
}

namespace {

// Maps each schema covariate to its CSV column; enforces that every other
// header column is in `extra` (returning its position or npos).
std::vector<std::size_t> covariate_columns(const CsvTable& table, const CovariateSchema& schema,
                                           const std::vector<std::string>& extra,
                                           std::vector<std::size_t>& extra_cols) {
  std::vector<std::size_t> cols(schema.size(), table.header.size());
  extra_cols.assign(extra.size(), table.header.size());
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    const std::string& name = table.header[c];
    bool known = false;
    if (schema.has_covariate(name)) {
      std::size_t idx = schema.covariate_index(name);
      if (cols[idx] != table.header.size()) {
        throw DataError(table.source + ": duplicate column " + name);
      }
      cols[idx] = c;
      known = true;
    }
    for (std::size_t e = 0; e < extra.size(); ++e) {
      if (name == extra[e]) {
        if (extra_cols[e] != table.header.size()) {
          throw DataError(table.source + ": duplicate column " + name);
        }
        extra_cols[e] = c;
        known = true;
      }
    }
    if (!known) throw DataError(table.source + ": unexpected column " + name);
  }
  for (std::size_t i = 0; i < schema.size(); ++i) {
    if (cols[i] == table.header.size()) {
      throw DataError(table.source + ": missing column " + schema.covariate(i).name);
    }
  }
  return cols;
}

Assignment row_assignment(const CsvTable& table, std::size_t row, const CovariateSchema& schema,
                          const std::vector<std::size_t>& cols, const BucketMap* buckets) {
  std::vector<std::size_t> cats(schema.size());
  for (std::size_t i = 0; i < schema.size(); ++i) {
    const std::string& raw = table.rows[row][cols[i]];
    const std::string& name = schema.covariate(i).name;
    try {
      std::string value = buckets ? buckets->apply(name, raw) : raw;
      cats[i] = schema.category_index(i, value);
    } catch (const std::runtime_error& e) {
      throw DataError(where(table.source, table.row_lines[row]) + ": column " + name + ": " +
                      e.what());
    }
  }
  return Assignment(schema, std::move(cats));
}

}  // namespace

std::vector<Assignment> parse_reports(const CsvTable& table, const CovariateSchema& schema,
                                      const BucketMap* buckets, bool order_by_timestamp) {
  std::vector<std::size_t> extra_cols;
  auto cols = covariate_columns(table, schema, {"timestamp"}, extra_cols);
  const std::size_t ts_col = extra_cols[0];
  if (order_by_timestamp && ts_col == table.header.size()) {
    throw DataError(table.source + ": timestamp ordering requested but no timestamp column");
  }

  std::vector<std::size_t> order(table.rows.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  if (order_by_timestamp) {
    bool all_numeric = true;
    std::vector<double> numeric(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size() && all_numeric; ++i) {
      all_numeric = parse_double(table.rows[i][ts_col], numeric[i]);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (all_numeric) return numeric[a] < numeric[b];
      return table.rows[a][ts_col] < table.rows[b][ts_col];
    });
  }

  std::vector<Assignment> out;
  out.reserve(table.rows.size());
  for (std::size_t i : order) out.push_back(row_assignment(table, i, schema, cols, buckets));
  return out;
}

Population parse_population(const CsvTable& table, std::shared_ptr<const CovariateSchema> schema,
                            const BucketMap* buckets) {
  std::vector<std::size_t> extra_cols;
  auto cols = covariate_columns(table, *schema, {"harmed", "stratum"}, extra_cols);
  for (std::size_t e = 0; e < 2; ++e) {
    if (extra_cols[e] == table.header.size()) {
      throw DataError(table.source + ": missing column " + (e == 0 ? "harmed" : "stratum"));
    }
  }
  Population pop;
  pop.schema = schema;
  std::map<std::string, std::size_t> stratum_index;
  pop.records.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const std::string& h = table.rows[i][extra_cols[0]];
    bool harmed;
    if (h == "1" || h == "true") {
      harmed = true;
    } else if (h == "0" || h == "false") {
      harmed = false;
    } else {
      throw DataError(where(table.source, table.row_lines[i]) +
                      ": column harmed: expected 0/1/true/false, got '" + h + "'");
    }
    const std::string& label = table.rows[i][extra_cols[1]];
    auto [it, inserted] = stratum_index.emplace(label, pop.strata.size());
    if (inserted) pop.strata.push_back(label);
    pop.records.push_back(
        PopulationRecord{row_assignment(table, i, *schema, cols, buckets), harmed, it->second});
  }
  if (pop.records.empty()) throw DataError(table.source + ": empty population");
  return pop;
}

ReferenceTable parse_joint_reference(const CsvTable& table,
                                     std::shared_ptr<const CovariateSchema> schema,
                                     const BucketMap* buckets) {
  std::vector<std::size_t> extra_cols;
  auto cols = covariate_columns(table, *schema, {"count"}, extra_cols);
  if (extra_cols[0] == table.header.size()) {
    throw DataError(table.source + ": missing column count");
  }
  std::vector<std::pair<Assignment, double>> rows;
  rows.reserve(table.rows.size());
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    double count = 0.0;
    if (!parse_double(table.rows[i][extra_cols[0]], count) || count < 0) {
      throw DataError(where(table.source, table.row_lines[i]) +
                      ": column count: expected a nonnegative number");
    }
    rows.emplace_back(row_assignment(table, i, *schema, cols, buckets), count);
  }
  try {
    return ReferenceTable::joint(schema, rows);
  } catch (const DataError& e) {
    throw DataError(table.source + ": " + e.what());
  }
}

ReferenceTable parse_marginal_reference(const std::vector<CsvTable>& tables,
                                        std::shared_ptr<const CovariateSchema> schema) {
  if (tables.size() != schema->size()) {
    throw DataError("need one marginal table per covariate, in schema order");
  }
  std::vector<std::vector<double>> counts(schema->size());
  for (std::size_t cov = 0; cov < schema->size(); ++cov) {
    const CsvTable& table = tables[cov];
    if (table.header.size() != 2 || table.header[0] != "category" ||
        table.header[1] != "count") {
      throw DataError(table.source + ": expected header category,count");
    }
    counts[cov].assign(schema->covariate(cov).categories.size(), 0.0);
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      std::size_t cat;
      try {
        cat = schema->category_index(cov, table.rows[i][0]);
      } catch (const SchemaError& e) {
        throw DataError(where(table.source, table.row_lines[i]) + ": " + e.what());
      }
      double count = 0.0;
      if (!parse_double(table.rows[i][1], count) || count < 0) {
        throw DataError(where(table.source, table.row_lines[i]) +
                        ": column count: expected a nonnegative number");
      }
      counts[cov][cat] += count;
    }
  }
  try {
    return ReferenceTable::marginals(schema, std::move(counts));
  } catch (const DataError& e) {
    throw DataError(std::string("marginal tables: ") + e.what());
  }
}

}  // namespace repmon
