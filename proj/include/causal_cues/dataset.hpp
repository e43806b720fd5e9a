#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace causal_cues {

/// Declared category structure for CSV ingestion. Any column not mentioned
/// falls back to default_cardinality, or to inference (max code + 1).
struct CsvSchema {
  std::map<std::string, std::size_t> cardinalities;
  /// Declared token levels; the code of a token is its position in the list.
  std::map<std::string, std::vector<std::string>> levels;
  std::optional<std::size_t> default_cardinality;
};

struct LoadOptions {
  CsvSchema schema;
  /// Keep "spoof_type" as an analytic column instead of metadata.
  bool include_metadata_columns = false;
};

/// Immutable table of categorical columns. Cells are 0-based category codes,
/// stored column-major.
class Dataset {
 public:
  Dataset(std::vector<std::string> column_names, std::vector<std::size_t> cardinalities,
          std::vector<std::vector<std::uint32_t>> columns,
          std::optional<std::string> outcome_column = std::nullopt);

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return names_.size(); }
  const std::vector<std::string>& column_names() const { return names_; }
  const std::string& name(std::size_t col) const { return names_.at(col); }
  const std::vector<std::size_t>& cardinalities() const { return cards_; }
  std::size_t cardinality(std::size_t col) const { return cards_.at(col); }
  std::uint32_t value(std::size_t row, std::size_t col) const { return columns_[col][row]; }
  std::span<const std::uint32_t> column(std::size_t col) const { return columns_.at(col); }

  /// Throws UnknownColumn.
  std::size_t column_index(const std::string& name) const;
  std::vector<std::size_t> column_indices(const std::vector<std::string>& names) const;
  bool has_column(const std::string& name) const;

  const std::optional<std::string>& outcome_column() const { return outcome_; }

  /// Token codebook of a column (empty for integer-coded columns).
  const std::vector<std::string>& codebook(std::size_t col) const { return codebooks_.at(col); }
  void set_codebook(std::size_t col, std::vector<std::string> tokens);

  /// Non-analytic string columns carried alongside the data.
  const std::map<std::string, std::vector<std::string>>& metadata() const { return metadata_; }
  void set_metadata(std::string name, std::vector<std::string> values);

  /// Columns in the given order; outcome kept if selected.
  Dataset select(const std::vector<std::string>& names) const;
  /// All columns except the named ones (unknown names throw UnknownColumn).
  Dataset drop(const std::vector<std::string>& names) const;

  /// Schema that reproduces this dataset's cardinalities and codebooks.
  CsvSchema schema() const;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<std::size_t> cards_;
  std::vector<std::vector<std::uint32_t>> columns_;
  std::vector<std::vector<std::string>> codebooks_;
  std::map<std::string, std::vector<std::string>> metadata_;
  std::optional<std::string> outcome_;
  std::size_t n_rows_ = 0;
};

Dataset load_csv(const std::string& path, const LoadOptions& options = {});
Dataset read_csv(std::istream& in, const LoadOptions& options = {});
void write_csv(const Dataset& ds, std::ostream& out);
void write_csv(const Dataset& ds, const std::string& path);

/// Joint counts over an ordered variable list, row-major (last variable
/// varies fastest).
struct ContingencyTable {
  std::vector<std::string> variables;
  std::vector<std::size_t> dims;
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;

  std::size_t index(std::span<const std::uint32_t> assignment) const;
  /// Sums out one variable.
  ContingencyTable marginalize(const std::string& variable) const;
};

ContingencyTable contingency(const Dataset& ds, const std::vector<std::string>& variables);
ContingencyTable contingency(const Dataset& ds, std::span<const std::size_t> columns);

struct ColumnMarginal {
  std::string name;
  std::vector<double> frequencies;
};

struct DatasetSummary {
  std::size_t n_rows = 0;
  std::vector<ColumnMarginal> per_column_marginals;
  std::optional<double> class_balance;
};

DatasetSummary summarize(const Dataset& ds);
nlohmann::json to_json(const DatasetSummary& summary);

}  // namespace causal_cues
