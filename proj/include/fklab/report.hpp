#pragma once

#include <string>
#include <vector>

#include "fklab/common.hpp"

namespace fklab {

/// Deterministic CSV writer: fixed column order, shortest round-trip number
/// formatting, LF line endings.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  ~CsvWriter();

  void header(const std::vector<std::string>& cols);
  void row(const std::vector<std::string>& cells);
  void row_numeric(const std::vector<double>& cells);

 private:
  struct Impl;
  Impl* impl_;
};

struct SvgSeries {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

/// Minimal polyline SVG plot; no external plotting dependency. Byte-stable
/// for identical inputs.
void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<SvgSeries>& series, bool log_x = false,
                    bool log_y = false);

}  // namespace fklab
