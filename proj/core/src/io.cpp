#include "scatlab/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

#include "scatlab/errors.hpp"

namespace scatlab {

void CsvTable::add_row(std::vector<double> row) {
  if (row.size() != columns.size())
    throw InvalidArgument("CsvTable: row has " + std::to_string(row.size()) + " values, expected " +
                          std::to_string(columns.size()));
  rows.push_back(std::move(row));
}

std::string CsvTable::to_string() const {
  std::string out;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out += ',';
    out += columns[c];
  }
  out += '\n';
  char buf[64];
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      std::snprintf(buf, sizeof buf, "%.12g", row[c]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    os << content;
    os.flush();
    if (!os) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("rename to " + path.string() + " failed: " + ec.message());
  }
}

std::string gnuplot_script(const PlotSpec& spec, const std::string& output_png) {
  std::ostringstream os;
  os.precision(12);
  os << "set terminal pngcairo size 800,600\n";
  os << "set output '" << output_png << "'\n";
  os << "set datafile separator ','\n";
  os << "set key top right\n";
  os << "set title '" << spec.title << "'\n";
  os << "set xlabel '" << spec.x_label << "'\n";
  os << "set ylabel '" << spec.y_label << "'\n";
  if (spec.loglog) os << "set logscale xy\n";
  os << "plot '" << spec.data_file << "' every ::1 using " << spec.x_column << ':' << spec.y_column
     << " with linespoints title '" << spec.y_label << "'";
  if (spec.ref_prefactor != 0.0)
    os << ", " << spec.ref_prefactor << " * x**(-" << spec.ref_exponent << ") with lines dt 2 title 'x^-"
       << spec.ref_exponent << "'";
  os << '\n';
  return os.str();
}

}  // namespace scatlab
