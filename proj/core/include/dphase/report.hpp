#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <iosfwd>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace dphase {

/// One machine-readable pass/fail line of a report.
struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;      // measured quantity
  double threshold = 0.0;  // bound it is compared against
  double slack = 0.0;      // discretization slack granted to the comparison
  std::string detail;
};

struct PlotSpec {
  std::string x;               // column plotted on the horizontal axis
  std::vector<std::string> y;  // one series per column
  bool log_log = false;
  std::string title;
};

/// Tabular experiment record. Cells are numbers; `status` is a per-row tag
/// ("ok", "nonconverged", ...).
class ExperimentReport {
 public:
  explicit ExperimentReport(std::string name, std::vector<std::string> columns);

  void add_row(std::vector<double> values, std::string status = "ok");
  void add_check(Check check);
  void add_summary(std::string key, std::string value);
  void set_plot(PlotSpec plot) { plot_ = std::move(plot); }

  const std::string& name() const { return name_; }
  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t rows() const { return values_.size(); }
  double at(std::size_t row, const std::string& column) const;
  std::vector<double> column(const std::string& column) const;
  const std::string& status(std::size_t row) const { return status_[row]; }
  const std::vector<Check>& checks() const { return checks_; }
  const std::vector<std::pair<std::string, std::string>>& summary() const { return summary_; }
  bool all_passed() const;

  /// `# schema=1`, `# experiment=<name>`, header, rows with 17 significant
  /// digits and a trailing status column.
  void write_csv(std::ostream& out) const;
  /// `# schema=1`, then check,passed,value,threshold,slack,detail.
  void write_checks_csv(std::ostream& out) const;
  void write_svg(std::ostream& out) const;
  std::string summary_text() const;

  /// <dir>/<name>.csv, <name>_checks.csv, <name>.svg, <name>_summary.txt.
  std::vector<std::string> write_all(const std::string& dir) const;

 private:
  std::size_t index_of(const std::string& column) const;

  std::string name_;
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> values_;
  std::vector<std::string> status_;
  std::vector<Check> checks_;
  std::vector<std::pair<std::string, std::string>> summary_;
  PlotSpec plot_;
};

/// Runs job(i) for i in [0, count) on up to `threads` workers pulling from a
/// shared counter. The first exception thrown by any job is rethrown after all
/// workers finish. Callers write results into slot i, so the assembled output
/// does not depend on scheduling.
template <class Job>
void parallel_for(std::size_t count, unsigned threads, Job&& job) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex guard;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        job(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(guard);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

/// Least-squares slope of y against x.
double fitted_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace dphase
