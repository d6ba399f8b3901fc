#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace taxiflow {

// Minimal static chart output; presentational only, never read back.
struct SvgSeries {
  std::string label;
  std::string color;
  std::vector<std::optional<double>> values;  // one slot per x label, gaps allowed
};

std::string render_line_chart(const std::string& title, std::span<const std::string> x_labels,
                              std::span<const SvgSeries> series);

}  // namespace taxiflow
