#ifndef DELAYGP_SVG_HPP
#define DELAYGP_SVG_HPP

#include <string>

#include "delaygp/csv.hpp"

namespace delaygp {

struct SvgStyle {
  int width = 900;
  int height = 560;
  std::string title;
  bool log_y = false;  // plot log10 of positive y values
};

// Deterministic line plot of a table: column 0 on x, every further column a
// polyline.  Fixed canvas, no timestamps; identical input yields identical
// bytes.  Non-finite values break the polyline into segments.
std::string render_line_svg(const Table& table, const SvgStyle& style);

void write_svg(const std::filesystem::path& file, const Table& table,
                const SvgStyle& style);

}  // namespace delaygp

#endif
