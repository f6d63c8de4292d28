#include "rydmem/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rydmem/errors.hpp"

namespace rydmem {

CsvSchema CsvSchema::numeric(std::string name, std::initializer_list<const char*> cols) {
  CsvSchema s{std::move(name), {}};
  for (const char* c : cols) s.columns.push_back({c, true, false});
  return s;
}

namespace schemas {

const CsvSchema& pulses() {
  static const CsvSchema s = CsvSchema::numeric("pulses", {"t_ns", "omega_p", "omega_c", "omega_cd"});
  return s;
}
const CsvSchema& trajectory3() {
  static const CsvSchema s = [] {
    CsvSchema x = CsvSchema::numeric("trajectory3", {"t_ns", "P_G", "P_E", "P_R", "fidelity_dark"});
    x.columns.back().nullable = true;
    return x;
  }();
  return s;
}
const CsvSchema& trajectory6() {
  static const CsvSchema s = [] {
    CsvSchema x = CsvSchema::numeric(
        "trajectory6", {"t_ns", "P_G", "P_E", "P_R", "fidelity_dark", "P_RE", "P_RR", "P_EE"});
    x.columns[4].nullable = true;
    return x;
  }();
  return s;
}
const CsvSchema& storage_output() {
  static const CsvSchema s = CsvSchema::numeric(
      "storage_output", {"t_ns", "omega_in_re", "omega_in_im", "omega_out_re", "omega_out_im"});
  return s;
}
const CsvSchema& storage_populations3() {
  static const CsvSchema s =
      CsvSchema::numeric("storage_populations3", {"t_ns", "P_G", "P_E", "P_R", "omega_c", "omega_cd"});
  return s;
}
const CsvSchema& storage_populations6() {
  static const CsvSchema s = CsvSchema::numeric(
      "storage_populations6",
      {"t_ns", "P_G", "P_E", "P_R", "omega_c", "omega_cd", "P_RE", "P_RR", "P_EE"});
  return s;
}
const CsvSchema& dsp_trace() {
  static const CsvSchema s =
      CsvSchema::numeric("dsp_trace", {"t_ns", "abs_psi_sq", "abs_photonic", "abs_matter"});
  return s;
}
const CsvSchema& snapshot() {
  static const CsvSchema s =
      CsvSchema::numeric("snapshot", {"z_um", "P_R", "abs_rho_rg", "abs_omega_p"});
  return s;
}
const CsvSchema& ensemble_records() {
  static const CsvSchema s = [] {
    CsvSchema x = CsvSchema::numeric(
        "ensemble_records", {"realization", "seed", "eta", "final_P_G", "final_P_E", "final_P_R",
                             "final_rydberg", "min_fidelity", "efficiency"});
    x.columns[7].nullable = true;
    x.columns[8].nullable = true;
    return x;
  }();
  return s;
}
const CsvSchema& ensemble_mean() {
  static const CsvSchema s = [] {
    CsvSchema x =
        CsvSchema::numeric("ensemble_mean", {"t_ns", "P_G", "P_E", "P_R", "fidelity_dark"});
    x.columns.back().nullable = true;
    return x;
  }();
  return s;
}
const CsvSchema& sweep() {
  static const CsvSchema s = [] {
    CsvSchema x{"sweep",
                {{"value", false, false},
                 {"status", false, false},
                 {"efficiency", true, true},
                 {"final_P_G", true, true},
                 {"final_P_E", true, true},
                 {"final_P_R", true, true},
                 {"final_P_RE", true, true},
                 {"final_P_RR", true, true},
                 {"min_fidelity", true, true}}};
    return x;
  }();
  return s;
}

}  // namespace schemas

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void CsvTable::add_row(std::vector<double> values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_number(v));
  rows_.push_back(std::move(cells));
}

void CsvTable::add_row_text(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }

void CsvTable::validate() const {
  const auto& cols = schema_.columns;
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const auto& row = rows_[r];
    if (row.size() != cols.size())
      throw std::runtime_error(schema_.name + ": row " + std::to_string(r) + " has " +
                               std::to_string(row.size()) + " cells, expected " +
                               std::to_string(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const std::string& cell = row[c];
      if (cell.find_first_of(",\n\"") != std::string::npos)
        throw std::runtime_error(schema_.name + ": cell '" + cell + "' needs quoting");
      if (!cols[c].numeric) continue;
      if (cell == "nan") {
        if (!cols[c].nullable)
          throw std::runtime_error(schema_.name + ": NaN in column " + cols[c].name + " row " +
                                   std::to_string(r));
        continue;
      }
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v))
        throw std::runtime_error(schema_.name + ": non-finite or non-numeric '" + cell +
                                 "' in column " + cols[c].name + " row " + std::to_string(r));
    }
  }
}

std::string CsvTable::to_string() const {
  std::ostringstream os;
  for (std::size_t c = 0; c < schema_.columns.size(); ++c)
    os << (c ? "," : "") << schema_.columns[c].name;
  os << '\n';
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << row[c];
    os << '\n';
  }
  return os.str();
}

void CsvTable::write(const std::filesystem::path& path) const {
  try {
    validate();
  } catch (const std::runtime_error& e) {
    throw IoError(std::string("schema check failed for ") + path.string() + ": " + e.what());
  }
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << to_string();
    if (!out) throw IoError("write failed for " + path.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp + ": " + ec.message());
}

std::vector<double> CsvData::column(const std::string& name) const {
  std::size_t idx = header.size();
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) idx = i;
  if (idx == header.size()) throw std::out_of_range("no column " + name);
  std::vector<double> out;
  for (const auto& r : rows) {
    double v = std::nan("");
    std::from_chars(r[idx].data(), r[idx].data() + r[idx].size(), v);
    out.push_back(v);
  }
  return out;
}

CsvData read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  CsvData d;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
  };
  if (std::getline(in, line)) d.header = split(line);
  while (std::getline(in, line))
    if (!line.empty()) d.rows.push_back(split(line));
  return d;
}

}  // namespace rydmem
