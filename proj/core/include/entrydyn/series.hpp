#ifndef ENTRYDYN_SERIES_HPP
#define ENTRYDYN_SERIES_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace entrydyn {

struct ObservableRecord {
  double t = 0.0;
  double a = 0.0;  // mean entry probability
  double b = 0.0;  // coefficient of sorting, mean p(1-p)
  std::optional<double> m_frac;
  std::optional<double> stderr_a;
  std::optional<double> stderr_b;
};

/// Time series of observables with strictly increasing times.
class ObservableSeries {
 public:
  ObservableSeries() = default;

  /// Appends a record; throws ParameterError if t does not increase.
  void push_back(const ObservableRecord& rec);

  const std::vector<ObservableRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const ObservableRecord& operator[](std::size_t i) const { return records_[i]; }
  const ObservableRecord& front() const { return records_.front(); }
  const ObservableRecord& back() const { return records_.back(); }

  bool has_m_frac() const;
  bool has_stderr() const;

  std::vector<double> times() const;
  std::vector<double> field_a() const;
  std::vector<double> field_b() const;

 private:
  std::vector<ObservableRecord> records_;
};

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);
/// Strict full-string parse; throws ParameterError on trailing garbage.
double parse_double(const std::string& text);

/// Header `t,a,b[,m_frac][,stderr_a,stderr_b]`, columns present when every
/// record carries them.
void write_series_csv(std::ostream& os, const ObservableSeries& series);
ObservableSeries read_series_csv(std::istream& is);

void write_series_csv_file(const std::string& path, const ObservableSeries& series);
ObservableSeries read_series_csv_file(const std::string& path);

}  // namespace entrydyn

#endif  // ENTRYDYN_SERIES_HPP
