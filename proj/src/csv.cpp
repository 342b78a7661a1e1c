#include "delaygp/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace delaygp {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  for (char c : line) {
    if (c == ',') {
      out.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  out.push_back(field);
  return out;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t");
  std::size_t b = s.find_last_not_of(" \t");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& file, long line_no,
                    const std::string& field) {
  const std::string t = trim(field);
  if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
  if (t == "-inf") return -std::numeric_limits<double>::infinity();
  if (t == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size())
    throw ParseError(file, line_no, "not a number: '" + t + "'");
  return v;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

LightCurve read_light_curve_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open light curve file " + file.string());
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line))
    throw ParseError(file.string(), 1, "empty file");
  ++line_no;
  const std::vector<std::string> header = split_fields(line);
  if (header.size() < 2 || trim(header[0]) != "time_days" ||
      trim(header[1]) != "magnitude")
    throw ParseError(file.string(), 1,
                     "expected header 'time_days,magnitude'");
  if (header.size() > 3 ||
      (header.size() == 3 && trim(header[2]) != "magnitude_err"))
    throw ParseError(file.string(), 1,
                     "unexpected extra column (only magnitude_err is allowed)");
  LightCurve curve;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != header.size())
      throw ParseError(file.string(), line_no, "wrong number of columns");
    curve.times.push_back(parse_double(file.string(), line_no, fields[0]));
    curve.mags.push_back(parse_double(file.string(), line_no, fields[1]));
    // magnitude_err, when present, is ignored: the toy model's sigma is a
    // hyperparameter.
  }
  if (curve.times.empty())
    throw ParseError(file.string(), line_no, "no data rows");
  return curve;
}

void write_light_curve_csv(const std::filesystem::path& file,
                           std::span<const double> times,
                           std::span<const double> mags) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write " + file.string());
  out << "time_days,magnitude\n";
  for (std::size_t i = 0; i < times.size(); ++i)
    out << format_double(times[i]) << ',' << format_double(mags[i]) << '\n';
  if (!out) throw IoError("write failed for " + file.string());
}

LightCurvePair make_pair_from_curves(const LightCurve& a,
                                     const LightCurve& b) {
  if (a.times.size() != b.times.size())
    throw ConfigError("light curves have different lengths");
  for (std::size_t i = 0; i < a.times.size(); ++i)
    if (a.times[i] != b.times[i])
      throw ConfigError("light curves are not on a common time grid");
  Eigen::VectorXd t = Eigen::Map<const Eigen::VectorXd>(
      a.times.data(), static_cast<Eigen::Index>(a.times.size()));
  Eigen::VectorXd y1 = Eigen::Map<const Eigen::VectorXd>(
      a.mags.data(), static_cast<Eigen::Index>(a.mags.size()));
  Eigen::VectorXd y2 = Eigen::Map<const Eigen::VectorXd>(
      b.mags.data(), static_cast<Eigen::Index>(b.mags.size()));
  return LightCurvePair(std::move(y1), std::move(y2),
                        ObservationGrid(std::move(t)));
}

Table read_table_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());
  Table table;
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line))
    throw ParseError(file.string(), 1, "empty file");
  ++line_no;
  for (std::string& c : split_fields(line)) table.columns.push_back(trim(c));
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != table.columns.size())
      throw ParseError(file.string(), line_no, "wrong number of columns");
    std::vector<double> row;
    row.reserve(fields.size());
    for (const std::string& f : fields)
      row.push_back(parse_double(file.string(), line_no, f));
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string table_to_string(const Table& table) {
  std::ostringstream out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out << ',';
    out << table.columns[i];
  }
  out << '\n';
  for (const std::vector<double>& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << format_double(row[i]);
    }
    out << '\n';
  }
  return out.str();
}

void write_table_csv(const std::filesystem::path& file, const Table& table) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write " + file.string());
  out << table_to_string(table);
  if (!out) throw IoError("write failed for " + file.string());
}

}  // namespace delaygp
