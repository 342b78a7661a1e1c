#ifndef DELAYGP_CSV_HPP
#define DELAYGP_CSV_HPP

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "delaygp/types.hpp"

namespace delaygp {

// All CSV output is locale-independent: '.' decimal separator, '\n' line
// endings, shortest round-trip double formatting.
std::string format_double(double v);

struct LightCurve {
  std::vector<double> times;
  std::vector<double> mags;
};

// Header `time_days,magnitude`; an optional third `magnitude_err` column is
// accepted and ignored.  Throws ParseError with the offending line number.
LightCurve read_light_curve_csv(const std::filesystem::path& file);

void write_light_curve_csv(const std::filesystem::path& file,
                           std::span<const double> times,
                           std::span<const double> mags);

LightCurvePair make_pair_from_curves(const LightCurve& a, const LightCurve& b);

// Generic numeric table with a header row.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

Table read_table_csv(const std::filesystem::path& file);
void write_table_csv(const std::filesystem::path& file, const Table& table);
std::string table_to_string(const Table& table);

}  // namespace delaygp

#endif
