#pragma once

// Schema-checked CSV tables for every emitted data file.

#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

namespace rydmem {

struct CsvColumn {
  std::string name;
  bool numeric = true;
  bool nullable = false;  // numeric column may hold NaN
};

struct CsvSchema {
  std::string name;
  std::vector<CsvColumn> columns;

  static CsvSchema numeric(std::string name, std::initializer_list<const char*> cols);
};

namespace schemas {
const CsvSchema& pulses();
const CsvSchema& trajectory3();
const CsvSchema& trajectory6();
const CsvSchema& storage_output();
const CsvSchema& storage_populations3();
const CsvSchema& storage_populations6();
const CsvSchema& dsp_trace();
const CsvSchema& snapshot();
const CsvSchema& ensemble_records();
const CsvSchema& ensemble_mean();
const CsvSchema& sweep();
}  // namespace schemas

class CsvTable {
 public:
  explicit CsvTable(CsvSchema schema) : schema_(std::move(schema)) {}

  void add_row(std::vector<double> values);
  /// Mixed row; numeric cells are formatted with round-trip precision.
  void add_row_text(std::vector<std::string> cells);

  std::size_t rows() const { return rows_.size(); }
  const CsvSchema& schema() const { return schema_; }

  /// Throws std::runtime_error describing the first schema violation.
  void validate() const;
  std::string to_string() const;
  /// Validates, then writes atomically (temp file + rename). Throws IoError.
  void write(const std::filesystem::path& path) const;

 private:
  CsvSchema schema_;
  std::vector<std::vector<std::string>> rows_;
};

std::string format_number(double v);

/// Parses a CSV produced by CsvTable (no quoting).
struct CsvData {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<double> column(const std::string& name) const;
};
CsvData read_csv(const std::filesystem::path& path);

}  // namespace rydmem
