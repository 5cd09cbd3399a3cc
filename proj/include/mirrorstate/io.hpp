#pragma once

#include <string>
#include <vector>

#include "mirrorstate/analysis.hpp"

namespace mirrorstate {

// 12 significant digits, period decimal; deterministic across runs.
std::string format_sig(double v);

class CsvBuilder {
 public:
  explicit CsvBuilder(const std::vector<std::string>& header);
  void row(const std::vector<double>& values);
  void raw_row(const std::vector<std::string>& cells);
  const std::string& str() const { return text_; }

 private:
  std::string text_;
  size_t cols_;
};

struct LabeledEllipse {
  WignerEllipse ellipse;
  std::string label;
  std::string color;
  bool dashed = false;
};

// Minimal static SVG chart: the given ellipses plus a dashed vacuum circle
// of radius sqrt(2).
std::string wigner_svg(const std::vector<LabeledEllipse>& curves,
                       const std::string& xlabel, const std::string& ylabel);

}  // namespace mirrorstate
