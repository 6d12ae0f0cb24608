#include "fklab/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace fklab {

struct CsvWriter::Impl {
  std::ofstream os;
};

CsvWriter::CsvWriter(const std::string& path) : impl_(new Impl) {
  impl_->os.open(path, std::ios::binary);
  require(bool(impl_->os), "CsvWriter: cannot open " + path);
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::header(const std::vector<std::string>& cols) { row(cols); }

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i)
    impl_->os << (i ? "," : "") << cells[i];
  impl_->os << "\n";
}

void CsvWriter::row_numeric(const std::vector<double>& cells) {
  std::vector<std::string> s;
  s.reserve(cells.size());
  for (double v : cells) s.push_back(format_double(v));
  row(s);
}

namespace {

std::string fmt6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

void write_svg_plot(const std::string& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<SvgSeries>& series, bool log_x, bool log_y) {
  const double W = 720, H = 480;
  const double ml = 70, mr = 20, mt = 40, mb = 50;

  auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
  auto ty = [&](double v) { return log_y ? std::log10(v) : v; };

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const SvgSeries& s : series)
    for (auto& [x, y] : s.points) {
      if (log_x && x <= 0) continue;
      if (log_y && y <= 0) continue;
      xmin = std::min(xmin, tx(x));
      xmax = std::max(xmax, tx(x));
      ymin = std::min(ymin, ty(y));
      ymax = std::max(ymax, ty(y));
    }
  if (!(xmin < xmax)) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (!(ymin < ymax)) {
    ymin -= 0.5;
    ymax += 0.5;
  }

  auto px = [&](double v) { return ml + (tx(v) - xmin) / (xmax - xmin) * (W - ml - mr); };
  auto py = [&](double v) { return H - mb - (ty(v) - ymin) / (ymax - ymin) * (H - mt - mb); };

  static const char* colors[] = {"#1f6fb2", "#c23b22", "#2e8540", "#8031a7",
                                 "#b58900", "#268bd2", "#d33682", "#586e75"};

  std::ofstream os(path, std::ios::binary);
  require(bool(os), "write_svg_plot: cannot open " + path);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
     << H << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">"
     << title << "</text>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 12
     << "\" text-anchor=\"middle\" font-size=\"12\">" << xlabel
     << (log_x ? " (log10)" : "") << "</text>\n";
  os << "<text x=\"16\" y=\"" << H / 2
     << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
     << H / 2 << ")\">" << ylabel << (log_y ? " (log10)" : "") << "</text>\n";
  // frame
  os << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << W - ml - mr
     << "\" height=\"" << H - mt - mb
     << "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
  // axis range labels
  os << "<text x=\"" << ml << "\" y=\"" << H - mb + 16 << "\" font-size=\"10\">"
     << fmt6(log_x ? std::pow(10.0, xmin) : xmin) << "</text>\n";
  os << "<text x=\"" << W - mr << "\" y=\"" << H - mb + 16
     << "\" text-anchor=\"end\" font-size=\"10\">"
     << fmt6(log_x ? std::pow(10.0, xmax) : xmax) << "</text>\n";
  os << "<text x=\"" << ml - 4 << "\" y=\"" << H - mb
     << "\" text-anchor=\"end\" font-size=\"10\">"
     << fmt6(log_y ? std::pow(10.0, ymin) : ymin) << "</text>\n";
  os << "<text x=\"" << ml - 4 << "\" y=\"" << mt + 4
     << "\" text-anchor=\"end\" font-size=\"10\">"
     << fmt6(log_y ? std::pow(10.0, ymax) : ymax) << "</text>\n";

  int ci = 0;
  double legend_y = mt + 14;
  for (const SvgSeries& s : series) {
    const char* color = colors[ci % 8];
    std::ostringstream pts;
    for (auto& [x, y] : s.points) {
      if (log_x && x <= 0) continue;
      if (log_y && y <= 0) continue;
      pts << fmt6(px(x)) << "," << fmt6(py(y)) << " ";
    }
    os << "<polyline fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.5\" points=\"" << pts.str() << "\"/>\n";
    os << "<text x=\"" << W - mr - 6 << "\" y=\"" << legend_y
       << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << color << "\">" << s.name
       << "</text>\n";
    legend_y += 14;
    ++ci;
  }
  os << "</svg>\n";
}

}  // namespace fklab
