#include "causal_cues/dataset.hpp"

#include "causal_cues/error.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace causal_cues {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool is_integer_cell(const std::string& s) {
  return !s.empty() && s.size() <= 9 &&
         std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

bool is_token_cell(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-' || c == '.';
  });
}

bool is_metadata_column(const std::string& name) { return lower(name) == "spoof_type"; }

std::string cell_location(const std::string& column, std::size_t data_row) {
  return "column '" + column + "', row " + std::to_string(data_row);
}

}  // namespace

Dataset::Dataset(std::vector<std::string> column_names, std::vector<std::size_t> cardinalities,
                 std::vector<std::vector<std::uint32_t>> columns,
                 std::optional<std::string> outcome_column)
    : names_(std::move(column_names)),
      cards_(std::move(cardinalities)),
      columns_(std::move(columns)),
      codebooks_(names_.size()),
      outcome_(std::move(outcome_column)) {
  if (names_.empty()) throw CausalError(ErrorCode::kInvalidArgument, "dataset needs at least one column");
  if (cards_.size() != names_.size() || columns_.size() != names_.size()) {
    throw CausalError(ErrorCode::kInvalidArgument, "column names, cardinalities and data disagree in size");
  }
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (!seen.insert(n).second) throw CausalError(ErrorCode::kDuplicateColumn, n);
  }
  n_rows_ = columns_.front().size();
  if (n_rows_ == 0) throw CausalError(ErrorCode::kInvalidArgument, "dataset needs at least one row");
  for (std::size_t j = 0; j < names_.size(); ++j) {
    if (columns_[j].size() != n_rows_) throw CausalError(ErrorCode::kRaggedRow, "column '" + names_[j] + "' length differs");
    if (cards_[j] == 0) throw CausalError(ErrorCode::kInvalidArgument, "zero cardinality for '" + names_[j] + "'");
    for (std::size_t i = 0; i < n_rows_; ++i) {
      if (columns_[j][i] >= cards_[j]) {
        throw CausalError(ErrorCode::kCardinalityViolation,
                          cell_location(names_[j], i) + ": value " + std::to_string(columns_[j][i]) +
                              " >= cardinality " + std::to_string(cards_[j]));
      }
    }
  }
  if (outcome_ && !seen.contains(*outcome_)) throw CausalError(ErrorCode::kUnknownColumn, *outcome_);
}

std::size_t Dataset::column_index(const std::string& name) const {
  const auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw CausalError(ErrorCode::kUnknownColumn, name);
  return static_cast<std::size_t>(it - names_.begin());
}

std::vector<std::size_t> Dataset::column_indices(const std::vector<std::string>& names) const {
  std::vector<std::size_t> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(column_index(n));
  return out;
}

bool Dataset::has_column(const std::string& name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

void Dataset::set_codebook(std::size_t col, std::vector<std::string> tokens) {
  if (!tokens.empty() && tokens.size() > cards_.at(col)) {
    throw CausalError(ErrorCode::kCardinalityViolation, "codebook larger than cardinality for '" + names_[col] + "'");
  }
  codebooks_.at(col) = std::move(tokens);
}

void Dataset::set_metadata(std::string name, std::vector<std::string> values) {
  if (values.size() != n_rows_) throw CausalError(ErrorCode::kRaggedRow, "metadata column '" + name + "' length differs");
  metadata_[std::move(name)] = std::move(values);
}

Dataset Dataset::select(const std::vector<std::string>& names) const {
  std::vector<std::size_t> cards;
  std::vector<std::vector<std::uint32_t>> cols;
  std::vector<std::size_t> idx = column_indices(names);
  for (std::size_t j : idx) {
    cards.push_back(cards_[j]);
    cols.push_back(columns_[j]);
  }
  std::optional<std::string> outcome;
  if (outcome_ && std::find(names.begin(), names.end(), *outcome_) != names.end()) outcome = outcome_;
  Dataset out(names, std::move(cards), std::move(cols), outcome);
  for (std::size_t k = 0; k < idx.size(); ++k) out.codebooks_[k] = codebooks_[idx[k]];
  out.metadata_ = metadata_;
  return out;
}

Dataset Dataset::drop(const std::vector<std::string>& names) const {
  std::set<std::string> dropped;
  for (const auto& n : names) {
    column_index(n);
    dropped.insert(n);
  }
  std::vector<std::string> keep;
  for (const auto& n : names_) {
    if (!dropped.contains(n)) keep.push_back(n);
  }
  return select(keep);
}

CsvSchema Dataset::schema() const {
  CsvSchema s;
  for (std::size_t j = 0; j < names_.size(); ++j) {
    s.cardinalities[names_[j]] = cards_[j];
    if (!codebooks_[j].empty()) s.levels[names_[j]] = codebooks_[j];
  }
  return s;
}

Dataset read_csv(std::istream& in, const LoadOptions& options) {
  std::string line;
  if (!std::getline(in, line)) throw CausalError(ErrorCode::kRaggedRow, "missing header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const std::vector<std::string> header = split_row(line);
  {
    std::set<std::string> seen;
    for (const auto& h : header) {
      if (h.empty()) throw CausalError(ErrorCode::kUnparseableCell, "empty column name in header");
      if (!seen.insert(h).second) throw CausalError(ErrorCode::kDuplicateColumn, h);
    }
  }
  const std::size_t p = header.size();

  std::vector<std::vector<std::string>> raw(p);
  std::size_t data_row = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    auto cells = split_row(line);
    if (cells.size() != p) {
      throw CausalError(ErrorCode::kRaggedRow, "row " + std::to_string(data_row) + " has " +
                                                   std::to_string(cells.size()) + " cells, header has " +
                                                   std::to_string(p));
    }
    for (std::size_t j = 0; j < p; ++j) raw[j].push_back(std::move(cells[j]));
    ++data_row;
  }
  if (data_row == 0) throw CausalError(ErrorCode::kInvalidArgument, "no data rows");

  std::vector<std::string> names;
  std::vector<std::size_t> cards;
  std::vector<std::vector<std::uint32_t>> columns;
  std::vector<std::vector<std::string>> codebooks;
  std::map<std::string, std::vector<std::string>> metadata;

  for (std::size_t j = 0; j < p; ++j) {
    const std::string& col = header[j];
    if (is_metadata_column(col) && !options.include_metadata_columns) {
      metadata[col] = raw[j];
      continue;
    }
    std::vector<std::uint32_t> codes(data_row);
    std::vector<std::string> codebook;
    std::optional<std::size_t> declared;
    if (auto it = options.schema.cardinalities.find(col); it != options.schema.cardinalities.end()) {
      declared = it->second;
    } else if (options.schema.default_cardinality) {
      declared = options.schema.default_cardinality;
    }

    if (auto lv = options.schema.levels.find(col); lv != options.schema.levels.end()) {
      codebook = lv->second;
      for (std::size_t i = 0; i < data_row; ++i) {
        const auto pos = std::find(codebook.begin(), codebook.end(), raw[j][i]);
        if (pos == codebook.end()) {
          throw CausalError(ErrorCode::kUnparseableCell,
                            cell_location(col, i) + ": undeclared token '" + raw[j][i] + "'");
        }
        codes[i] = static_cast<std::uint32_t>(pos - codebook.begin());
      }
      if (!declared) declared = codebook.size();
    } else {
      bool any_token = false;
      bool any_int = false;
      for (std::size_t i = 0; i < data_row; ++i) {
        const std::string& c = raw[j][i];
        if (c.empty()) throw CausalError(ErrorCode::kUnparseableCell, cell_location(col, i) + ": missing value");
        if (is_integer_cell(c)) {
          any_int = true;
        } else if (is_token_cell(c)) {
          any_token = true;
        } else {
          throw CausalError(ErrorCode::kUnparseableCell, cell_location(col, i) + ": '" + c + "'");
        }
        if (any_int && any_token) {
          throw CausalError(ErrorCode::kUnparseableCell,
                            cell_location(col, i) + ": column mixes integer codes and tokens");
        }
      }
      if (any_token) {
        std::set<std::string> distinct(raw[j].begin(), raw[j].end());
        codebook.assign(distinct.begin(), distinct.end());
        for (std::size_t i = 0; i < data_row; ++i) {
          codes[i] = static_cast<std::uint32_t>(
              std::lower_bound(codebook.begin(), codebook.end(), raw[j][i]) - codebook.begin());
        }
      } else {
        for (std::size_t i = 0; i < data_row; ++i) codes[i] = static_cast<std::uint32_t>(std::stoul(raw[j][i]));
      }
    }

    std::uint32_t max_code = 0;
    for (std::size_t i = 0; i < data_row; ++i) max_code = std::max(max_code, codes[i]);
    std::size_t card = std::max<std::size_t>(max_code + 1, codebook.size());
    if (declared) {
      for (std::size_t i = 0; i < data_row; ++i) {
        if (codes[i] >= *declared) {
          throw CausalError(ErrorCode::kCardinalityViolation,
                            cell_location(col, i) + ": value " + std::to_string(codes[i]) +
                                " >= declared cardinality " + std::to_string(*declared));
        }
      }
      card = *declared;
    }
    names.push_back(col);
    cards.push_back(card);
    columns.push_back(std::move(codes));
    codebooks.push_back(std::move(codebook));
  }

  std::optional<std::string> outcome;
  for (const auto& n : names) {
    if (lower(n) == "label") outcome = n;
  }
  Dataset ds(std::move(names), std::move(cards), std::move(columns), outcome);
  for (std::size_t j = 0; j < codebooks.size(); ++j) {
    if (!codebooks[j].empty()) ds.set_codebook(j, std::move(codebooks[j]));
  }
  for (auto& [k, v] : metadata) ds.set_metadata(k, std::move(v));
  return ds;
}

Dataset load_csv(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw CausalError(ErrorCode::kMissingFile, path);
  return read_csv(in, options);
}

void write_csv(const Dataset& ds, std::ostream& out) {
  const auto& meta = ds.metadata();
  bool first = true;
  for (const auto& n : ds.column_names()) {
    out << (first ? "" : ",") << n;
    first = false;
  }
  for (const auto& [k, v] : meta) out << ',' << k;
  out << '\n';
  for (std::size_t i = 0; i < ds.n_rows(); ++i) {
    for (std::size_t j = 0; j < ds.n_cols(); ++j) {
      if (j) out << ',';
      const auto& book = ds.codebook(j);
      if (book.empty()) {
        out << ds.value(i, j);
      } else {
        out << book[ds.value(i, j)];
      }
    }
    for (const auto& [k, v] : meta) out << ',' << v[i];
    out << '\n';
  }
}

void write_csv(const Dataset& ds, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CausalError(ErrorCode::kMissingFile, "cannot write " + path);
  write_csv(ds, out);
}

std::size_t ContingencyTable::index(std::span<const std::uint32_t> assignment) const {
  std::size_t idx = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) idx = idx * dims[k] + assignment[k];
  return idx;
}

ContingencyTable ContingencyTable::marginalize(const std::string& variable) const {
  const auto it = std::find(variables.begin(), variables.end(), variable);
  if (it == variables.end()) throw CausalError(ErrorCode::kUnknownColumn, variable);
  const std::size_t drop = static_cast<std::size_t>(it - variables.begin());

  ContingencyTable out;
  for (std::size_t k = 0; k < variables.size(); ++k) {
    if (k == drop) continue;
    out.variables.push_back(variables[k]);
    out.dims.push_back(dims[k]);
  }
  std::size_t size = 1;
  for (auto d : out.dims) size *= d;
  out.counts.assign(size, 0);
  out.total = total;

  std::size_t inner = 1;
  for (std::size_t k = drop + 1; k < dims.size(); ++k) inner *= dims[k];
  for (std::size_t cell = 0; cell < counts.size(); ++cell) {
    const std::size_t outer = cell / (inner * dims[drop]);
    const std::size_t rest = cell % inner;
    out.counts[outer * inner + rest] += counts[cell];
  }
  return out;
}

ContingencyTable contingency(const Dataset& ds, std::span<const std::size_t> columns) {
  if (columns.empty()) throw CausalError(ErrorCode::kInvalidArgument, "contingency needs at least one variable");
  std::set<std::size_t> seen;
  ContingencyTable t;
  std::size_t size = 1;
  for (std::size_t c : columns) {
    if (c >= ds.n_cols()) throw CausalError(ErrorCode::kUnknownColumn, "index " + std::to_string(c));
    if (!seen.insert(c).second) throw CausalError(ErrorCode::kDuplicateColumn, ds.name(c));
    t.variables.push_back(ds.name(c));
    t.dims.push_back(ds.cardinality(c));
    size *= ds.cardinality(c);
  }
  t.counts.assign(size, 0);
  for (std::size_t i = 0; i < ds.n_rows(); ++i) {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < columns.size(); ++k) idx = idx * t.dims[k] + ds.value(i, columns[k]);
    ++t.counts[idx];
  }
  t.total = ds.n_rows();
  return t;
}

ContingencyTable contingency(const Dataset& ds, const std::vector<std::string>& variables) {
  std::set<std::string> seen;
  for (const auto& v : variables) {
    if (!seen.insert(v).second) throw CausalError(ErrorCode::kDuplicateColumn, v);
  }
  const auto idx = ds.column_indices(variables);
  return contingency(ds, std::span<const std::size_t>(idx));
}

DatasetSummary summarize(const Dataset& ds) {
  DatasetSummary s;
  s.n_rows = ds.n_rows();
  const double n = static_cast<double>(ds.n_rows());
  for (std::size_t j = 0; j < ds.n_cols(); ++j) {
    ColumnMarginal m{ds.name(j), std::vector<double>(ds.cardinality(j), 0.0)};
    std::vector<std::uint64_t> counts(ds.cardinality(j), 0);
    for (auto v : ds.column(j)) ++counts[v];
    for (std::size_t k = 0; k < counts.size(); ++k) m.frequencies[k] = static_cast<double>(counts[k]) / n;
    s.per_column_marginals.push_back(std::move(m));
  }
  if (const auto& outcome = ds.outcome_column()) {
    const std::size_t j = ds.column_index(*outcome);
    std::uint64_t ones = 0;
    for (auto v : ds.column(j)) ones += (v == 1);
    s.class_balance = static_cast<double>(ones) / n;
  }
  return s;
}

nlohmann::json to_json(const DatasetSummary& summary) {
  nlohmann::json j;
  j["n_rows"] = summary.n_rows;
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& m : summary.per_column_marginals) {
    cols.push_back({{"name", m.name}, {"frequencies", m.frequencies}});
  }
  j["columns"] = std::move(cols);
  j["class_balance"] = summary.class_balance ? nlohmann::json(*summary.class_balance) : nlohmann::json(nullptr);
  return j;
}

}  // namespace causal_cues
