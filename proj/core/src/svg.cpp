#include "taxiflow/svg.hpp"

#include <algorithm>
#include <cmath>

#include "taxiflow/csv.hpp"

namespace taxiflow {

namespace {

constexpr double kWidth = 760.0, kHeight = 420.0;
constexpr double kLeft = 60.0, kRight = 20.0, kTop = 40.0, kBottom = 50.0;

void append_num(std::string& out, double v) {
  append_double(out, std::round(v * 100.0) / 100.0);
}

}  // namespace

std::string render_line_chart(const std::string& title, std::span<const std::string> x_labels,
                              std::span<const SvgSeries> series) {
  double lo = 0.0, hi = 1.0;
  bool any = false;
  for (const SvgSeries& s : series)
    for (const auto& v : s.values)
      if (v) {
        if (!any) {
          lo = hi = *v;
          any = true;
        } else {
          lo = std::min(lo, *v);
          hi = std::max(hi, *v);
        }
      }
  if (!any) hi = 1.0;
  if (hi == lo) hi = lo + 1.0;
  lo = std::min(lo, 0.0);

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const std::size_t n = x_labels.size();
  auto x_at = [&](std::size_t i) {
    return kLeft + (n <= 1 ? plot_w / 2 : plot_w * static_cast<double>(i) / static_cast<double>(n - 1));
  };
  auto y_at = [&](double v) { return kTop + plot_h * (1.0 - (v - lo) / (hi - lo)); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"760\" height=\"420\" "
         "font-family=\"sans-serif\" font-size=\"11\">\n";
  svg += "<rect width=\"760\" height=\"420\" fill=\"white\"/>\n";
  svg += "<text x=\"380\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + title + "</text>\n";

  for (int tick = 0; tick <= 4; ++tick) {
    double v = lo + (hi - lo) * tick / 4.0;
    double y = y_at(v);
    svg += "<line x1=\"";
    append_num(svg, kLeft);
    svg += "\" y1=\"";
    append_num(svg, y);
    svg += "\" x2=\"";
    append_num(svg, kWidth - kRight);
    svg += "\" y2=\"";
    append_num(svg, y);
    svg += "\" stroke=\"#ddd\"/>\n<text x=\"";
    append_num(svg, kLeft - 8.0);
    svg += "\" y=\"";
    append_num(svg, y + 4.0);
    svg += "\" text-anchor=\"end\">";
    append_num(svg, v);
    svg += "</text>\n";
  }
  for (std::size_t i = 0; i < n; ++i) {
    svg += "<text x=\"";
    append_num(svg, x_at(i));
    svg += "\" y=\"";
    append_num(svg, kHeight - kBottom + 18.0);
    svg += "\" text-anchor=\"middle\">" + x_labels[i] + "</text>\n";
  }

  double legend_x = kLeft + 6.0;
  for (const SvgSeries& s : series) {
    std::string points;
    bool open = false;
    for (std::size_t i = 0; i < s.values.size() && i < n; ++i) {
      if (!s.values[i]) {
        if (open) {
          svg += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"2\" points=\"" +
                 points + "\"/>\n";
          points.clear();
          open = false;
        }
        continue;
      }
      append_num(points, x_at(i));
      points += ',';
      append_num(points, y_at(*s.values[i]));
      points += ' ';
      open = true;
    }
    if (open)
      svg += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"2\" points=\"" +
             points + "\"/>\n";
    svg += "<rect x=\"";
    append_num(svg, legend_x);
    svg += "\" y=\"30\" width=\"10\" height=\"10\" fill=\"" + s.color + "\"/>\n<text x=\"";
    append_num(svg, legend_x + 14.0);
    svg += "\" y=\"39\">" + s.label + "</text>\n";
    legend_x += 14.0 + 7.0 * static_cast<double>(s.label.size()) + 24.0;
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace taxiflow
