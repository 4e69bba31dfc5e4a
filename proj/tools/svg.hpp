#pragma once

#include <string>
#include <vector>

namespace hdclust::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color;
};

struct RefLine {
  std::string label;
  double y = 0.0;
  std::string color;
};

struct Panel {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = true;
  std::vector<Series> series;
  std::vector<RefLine> ref_lines;
};

// Panels laid out left to right. Output depends only on the inputs; numbers
// are printed with fixed precision so files are byte-stable.
std::string render(const std::vector<Panel>& panels);

}  // namespace hdclust::svg
