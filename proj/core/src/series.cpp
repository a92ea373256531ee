#include "entrydyn/series.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "entrydyn/errors.hpp"

namespace entrydyn {

void ObservableSeries::push_back(const ObservableRecord& rec) {
  if (!records_.empty() && !(rec.t > records_.back().t)) {
    throw ParameterError("series times must be strictly increasing");
  }
  records_.push_back(rec);
}

bool ObservableSeries::has_m_frac() const {
  if (records_.empty()) return false;
  for (const auto& r : records_) {
    if (!r.m_frac) return false;
  }
  return true;
}

bool ObservableSeries::has_stderr() const {
  if (records_.empty()) return false;
  for (const auto& r : records_) {
    if (!r.stderr_a || !r.stderr_b) return false;
  }
  return true;
}

std::vector<double> ObservableSeries::times() const {
  std::vector<double> out;
  out.reserve(records_.size());
  for (const auto& r : records_) out.push_back(r.t);
  return out;
}

std::vector<double> ObservableSeries::field_a() const {
  std::vector<double> out;
  out.reserve(records_.size());
  for (const auto& r : records_) out.push_back(r.a);
  return out;
}

std::vector<double> ObservableSeries::field_b() const {
  std::vector<double> out;
  out.reserve(records_.size());
  for (const auto& r : records_) out.push_back(r.b);
  return out;
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last) {
    throw ParameterError("malformed number '" + text + "'");
  }
  return value;
}

void write_series_csv(std::ostream& os, const ObservableSeries& series) {
  const bool with_m = series.has_m_frac();
  const bool with_se = series.has_stderr();
  os << "t,a,b";
  if (with_m) os << ",m_frac";
  if (with_se) os << ",stderr_a,stderr_b";
  os << '\n';
  for (const auto& r : series.records()) {
    os << format_double(r.t) << ',' << format_double(r.a) << ',' << format_double(r.b);
    if (with_m) os << ',' << format_double(*r.m_frac);
    if (with_se) os << ',' << format_double(*r.stderr_a) << ',' << format_double(*r.stderr_b);
    os << '\n';
  }
}

namespace {

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

ObservableSeries read_series_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ParameterError("series csv is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_commas(line);
  int col_t = -1, col_a = -1, col_b = -1, col_m = -1, col_sa = -1, col_sb = -1;
  for (int i = 0; i < static_cast<int>(header.size()); ++i) {
    const auto& h = header[static_cast<std::size_t>(i)];
    if (h == "t") col_t = i;
    else if (h == "a") col_a = i;
    else if (h == "b") col_b = i;
    else if (h == "m_frac") col_m = i;
    else if (h == "stderr_a") col_sa = i;
    else if (h == "stderr_b") col_sb = i;
    else throw ParameterError("unknown series column '" + h + "'");
  }
  if (col_t != 0 || col_a != 1 || col_b != 2) {
    throw ParameterError("series csv must start with columns t,a,b");
  }
  if ((col_sa < 0) != (col_sb < 0)) throw ParameterError("stderr_a and stderr_b come together");

  ObservableSeries series;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_commas(line);
    if (cells.size() != header.size()) {
      throw ParameterError("series csv line " + std::to_string(lineno) + " has " +
                           std::to_string(cells.size()) + " fields, expected " +
                           std::to_string(header.size()));
    }
    ObservableRecord rec;
    rec.t = parse_double(cells[0]);
    rec.a = parse_double(cells[1]);
    rec.b = parse_double(cells[2]);
    if (col_m >= 0) rec.m_frac = parse_double(cells[static_cast<std::size_t>(col_m)]);
    if (col_sa >= 0) {
      rec.stderr_a = parse_double(cells[static_cast<std::size_t>(col_sa)]);
      rec.stderr_b = parse_double(cells[static_cast<std::size_t>(col_sb)]);
    }
    series.push_back(rec);
  }
  return series;
}

void write_series_csv_file(const std::string& path, const ObservableSeries& series) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_series_csv(os, series);
}

ObservableSeries read_series_csv_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_series_csv(is);
}

}  // namespace entrydyn
