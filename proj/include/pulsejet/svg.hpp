#pragma once

#include <string>
#include <vector>

namespace pulsejet::svg {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f77b4";
};

// Static line chart with axes, tick labels and a legend.
std::string line_plot(const std::vector<Series>& series, const std::string& title, const std::string& x_label,
                      const std::string& y_label, int width = 800, int height = 400);

}  // namespace pulsejet::svg
