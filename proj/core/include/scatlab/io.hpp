#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace scatlab {

// Numeric table with a header row. Values print with %.12g so reruns are
// byte-identical.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  explicit CsvTable(std::vector<std::string> cols = {}) : columns(std::move(cols)) {}
  void add_row(std::vector<double> row);  // throws on width mismatch
  std::string to_string() const;
};

// Writes to a temporary next to `path`, then renames over it. Creates parent
// directories. Throws std::runtime_error on failure.
void write_atomic(const std::filesystem::path& path, const std::string& content);

struct PlotSpec {
  std::string title;
  std::string data_file;  // CSV path relative to the script
  int x_column = 1;       // 1-based, gnuplot convention
  int y_column = 2;
  std::string x_label = "x";
  std::string y_label = "y";
  bool loglog = true;
  // Optional reference line prefactor * x^-exponent.
  double ref_exponent = 0.0;
  double ref_prefactor = 0.0;
};

// Self-contained gnuplot script (pngcairo output next to the script).
std::string gnuplot_script(const PlotSpec& spec, const std::string& output_png);

}  // namespace scatlab
