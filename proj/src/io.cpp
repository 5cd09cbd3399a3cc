#include "mirrorstate/io.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace mirrorstate {

std::string format_sig(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

CsvBuilder::CsvBuilder(const std::vector<std::string>& header) : cols_(header.size()) {
  for (size_t i = 0; i < header.size(); ++i) {
    if (i) text_ += ',';
    text_ += header[i];
  }
  text_ += '\n';
}

void CsvBuilder::row(const std::vector<double>& values) {
  if (values.size() != cols_) throw std::invalid_argument("csv row width mismatch");
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) text_ += ',';
    text_ += format_sig(values[i]);
  }
  text_ += '\n';
}

void CsvBuilder::raw_row(const std::vector<std::string>& cells) {
  if (cells.size() != cols_) throw std::invalid_argument("csv row width mismatch");
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i) text_ += ',';
    text_ += cells[i];
  }
  text_ += '\n';
}

std::string wigner_svg(const std::vector<LabeledEllipse>& curves,
                       const std::string& xlabel, const std::string& ylabel) {
  double extent = std::sqrt(2.0) * 1.15;
  for (const auto& c : curves)
    for (size_t i = 0; i < c.ellipse.x.size(); ++i) {
      extent = std::max(extent, std::abs(c.ellipse.x[i]) * 1.15);
      extent = std::max(extent, std::abs(c.ellipse.y[i]) * 1.15);
    }
  const int W = 560, H = 560;
  const double sc = (W / 2 - 40) / extent;
  auto X = [&](double x) { return W / 2.0 + sc * x; };
  auto Y = [&](double y) { return H / 2.0 - sc * y; };

  std::string svg;
  char buf[256];
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"560\" height=\"560\" "
         "viewBox=\"0 0 560 560\">\n";
  svg += "<rect width=\"560\" height=\"560\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf,
                "<line x1=\"0\" y1=\"%g\" x2=\"560\" y2=\"%g\" stroke=\"#bbb\"/>\n",
                Y(0), Y(0));
  svg += buf;
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%g\" y1=\"0\" x2=\"%g\" y2=\"560\" stroke=\"#bbb\"/>\n",
                X(0), X(0));
  svg += buf;

  // vacuum reference circle, radius sqrt(2)
  std::snprintf(buf, sizeof buf,
                "<circle cx=\"%g\" cy=\"%g\" r=\"%g\" fill=\"none\" stroke=\"black\" "
                "stroke-dasharray=\"6 4\"/>\n",
                X(0), Y(0), sc * std::sqrt(2.0));
  svg += buf;

  double ly = 24;
  for (const auto& c : curves) {
    std::string pts;
    for (size_t i = 0; i < c.ellipse.x.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", X(c.ellipse.x[i]), Y(c.ellipse.y[i]));
      pts += buf;
    }
    std::snprintf(buf, sizeof buf,
                  "<polyline points=\"%s\" fill=\"none\" stroke=\"%s\"%s/>\n",
                  pts.c_str(), c.color.c_str(),
                  c.dashed ? " stroke-dasharray=\"4 3\"" : "");
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"14\" y=\"%g\" fill=\"%s\" font-size=\"14\">%s</text>\n", ly,
                  c.color.c_str(), c.label.c_str());
    svg += buf;
    ly += 18;
  }
  std::snprintf(buf, sizeof buf,
                "<text x=\"530\" y=\"%g\" font-size=\"14\" text-anchor=\"end\">%s</text>\n",
                Y(0) - 8, xlabel.c_str());
  svg += buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"%g\" y=\"18\" font-size=\"14\">%s</text>\n", X(0) + 8,
                ylabel.c_str());
  svg += buf;
  svg += "</svg>\n";
  return svg;
}

}  // namespace mirrorstate
