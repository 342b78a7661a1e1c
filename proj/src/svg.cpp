#include "delaygp/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace delaygp {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

// Fixed two-decimal pixel coordinates keep the output stable across
// platforms.
std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string render_line_svg(const Table& table, const SvgStyle& style) {
  if (table.columns.size() < 2)
    throw ConfigError("svg: need an x column and at least one y column");
  const int w = style.width, h = style.height;
  const double ml = 70, mr = 20, mt = style.title.empty() ? 20 : 40, mb = 45;

  const auto transform_y = [&](double y) {
    if (!style.log_y) return y;
    return y > 0.0 ? std::log10(y) : std::numeric_limits<double>::quiet_NaN();
  };

  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = x_min, y_max = -x_min;
  for (const auto& row : table.rows) {
    if (!std::isfinite(row[0])) continue;
    x_min = std::min(x_min, row[0]);
    x_max = std::max(x_max, row[0]);
    for (std::size_t c = 1; c < row.size(); ++c) {
      const double y = transform_y(row[c]);
      if (!std::isfinite(y)) continue;
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  }
  if (!std::isfinite(x_min) || !std::isfinite(y_min))
    throw NumericalError("svg: no finite data to plot");
  if (x_max == x_min) {
    x_min -= 1.0;
    x_max += 1.0;
  }
  if (y_max == y_min) {
    y_min -= 1.0;
    y_max += 1.0;
  }

  const auto sx = [&](double x) {
    return ml + (x - x_min) / (x_max - x_min) * (w - ml - mr);
  };
  const auto sy = [&](double y) {
    return h - mb - (y - y_min) / (y_max - y_min) * (h - mt - mb);
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << ' ' << h
      << "\">\n";
  out << "<rect width=\"" << w << "\" height=\"" << h
      << "\" fill=\"white\"/>\n";
  if (!style.title.empty())
    out << "<text x=\"" << w / 2
        << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"15\">"
        << style.title << "</text>\n";

  // Axes with five ticks per side.
  out << "<g stroke=\"black\" fill=\"none\"><path d=\"M" << px(ml) << ' '
      << px(mt) << " L" << px(ml) << ' ' << px(h - mb) << " L" << px(w - mr)
      << ' ' << px(h - mb) << "\"/></g>\n";
  out << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"black\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = x_min + (x_max - x_min) * i / 4.0;
    const double fy = y_min + (y_max - y_min) * i / 4.0;
    out << "<line x1=\"" << px(sx(fx)) << "\" y1=\"" << px(h - mb)
        << "\" x2=\"" << px(sx(fx)) << "\" y2=\"" << px(h - mb + 5)
        << "\" stroke=\"black\"/>";
    out << "<text x=\"" << px(sx(fx)) << "\" y=\"" << px(h - mb + 18)
        << "\" text-anchor=\"middle\">" << tick_label(fx) << "</text>\n";
    out << "<line x1=\"" << px(ml - 5) << "\" y1=\"" << px(sy(fy))
        << "\" x2=\"" << px(ml) << "\" y2=\"" << px(sy(fy))
        << "\" stroke=\"black\"/>";
    out << "<text x=\"" << px(ml - 8) << "\" y=\"" << px(sy(fy) + 4)
        << "\" text-anchor=\"end\">"
        << tick_label(style.log_y ? std::pow(10.0, fy) : fy) << "</text>\n";
  }
  out << "<text x=\"" << px((ml + w - mr) / 2) << "\" y=\"" << px(h - 8)
      << "\" text-anchor=\"middle\">" << table.columns[0] << "</text>\n";
  out << "</g>\n";

  for (std::size_t c = 1; c < table.columns.size(); ++c) {
    const char* colour = kPalette[(c - 1) % 8];
    std::ostringstream path;
    bool in_segment = false;
    int points_drawn = 0;
    double last_x = 0, last_y = 0;
    for (const auto& row : table.rows) {
      const double y = transform_y(row[c]);
      if (!std::isfinite(row[0]) || !std::isfinite(y)) {
        in_segment = false;
        continue;
      }
      path << (in_segment ? " L" : " M") << px(sx(row[0])) << ' '
           << px(sy(y));
      in_segment = true;
      ++points_drawn;
      last_x = sx(row[0]);
      last_y = sy(y);
    }
    if (points_drawn == 1) {
      // Degenerate single point: draw a marker instead of a path.
      out << "<circle cx=\"" << px(last_x) << "\" cy=\"" << px(last_y)
          << "\" r=\"3\" fill=\"" << colour << "\"/>\n";
    } else if (points_drawn > 1) {
      out << "<path d=\"" << path.str() << "\" fill=\"none\" stroke=\""
          << colour << "\" stroke-width=\"1.2\"/>\n";
    }
    // Legend entry.
    const double ly = mt + 16.0 * (c - 1);
    out << "<line x1=\"" << px(w - mr - 120) << "\" y1=\"" << px(ly)
        << "\" x2=\"" << px(w - mr - 100) << "\" y2=\"" << px(ly)
        << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>"
        << "<text x=\"" << px(w - mr - 95) << "\" y=\"" << px(ly + 4)
        << "\" font-family=\"sans-serif\" font-size=\"11\">"
        << table.columns[c] << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

void write_svg(const std::filesystem::path& file, const Table& table,
               const SvgStyle& style) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write " + file.string());
  out << render_line_svg(table, style);
  if (!out) throw IoError("write failed for " + file.string());
}

}  // namespace delaygp
