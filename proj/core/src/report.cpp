#include "dphase/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "dphase/errors.hpp"

namespace dphase {

ExperimentReport::ExperimentReport(std::string name, std::vector<std::string> columns)
    : name_(std::move(name)), columns_(std::move(columns)) {}

void ExperimentReport::add_row(std::vector<double> values, std::string status) {
  if (values.size() != columns_.size()) {
    throw ShapeError(fmt::format("report '{}' row has {} values for {} columns", name_, values.size(),
                                 columns_.size()));
  }
  values_.push_back(std::move(values));
  status_.push_back(std::move(status));
}

void ExperimentReport::add_check(Check check) { checks_.push_back(std::move(check)); }

void ExperimentReport::add_summary(std::string key, std::string value) {
  summary_.emplace_back(std::move(key), std::move(value));
}

std::size_t ExperimentReport::index_of(const std::string& column) const {
  const auto it = std::find(columns_.begin(), columns_.end(), column);
  if (it == columns_.end()) throw ShapeError(fmt::format("report '{}' has no column '{}'", name_, column));
  return static_cast<std::size_t>(it - columns_.begin());
}

double ExperimentReport::at(std::size_t row, const std::string& column) const {
  return values_.at(row)[index_of(column)];
}

std::vector<double> ExperimentReport::column(const std::string& column) const {
  const std::size_t k = index_of(column);
  std::vector<double> out;
  out.reserve(values_.size());
  for (const auto& r : values_) out.push_back(r[k]);
  return out;
}

bool ExperimentReport::all_passed() const {
  return std::all_of(checks_.begin(), checks_.end(), [](const Check& c) { return c.passed; });
}

void ExperimentReport::write_csv(std::ostream& out) const {
  fmt::print(out, "# schema=1\n# experiment={}\n", name_);
  for (const auto& c : columns_) fmt::print(out, "{},", c);
  out << "status\n";
  for (std::size_t r = 0; r < values_.size(); ++r) {
    for (double v : values_[r]) fmt::print(out, "{:.17g},", v);
    out << status_[r] << '\n';
  }
}

void ExperimentReport::write_checks_csv(std::ostream& out) const {
  fmt::print(out, "# schema=1\n# experiment={}\ncheck,passed,value,threshold,slack,detail\n", name_);
  for (const auto& c : checks_) {
    fmt::print(out, "{},{},{:.17g},{:.17g},{:.17g},\"{}\"\n", c.name, c.passed ? "pass" : "fail", c.value,
               c.threshold, c.slack, c.detail);
  }
}

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;
constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(hi > lo)) {
      const double d = lo == 0.0 ? 1.0 : std::abs(lo) * 0.05;
      lo -= d;
      hi += d;
    }
  }
};

}  // namespace

void ExperimentReport::write_svg(std::ostream& out) const {
  const PlotSpec& plot = plot_;
  const bool log = plot.log_log;
  auto tr = [&](double v) { return log ? std::log10(v) : v; };
  auto usable = [&](double v) { return std::isfinite(v) && (!log || v > 0.0); };

  std::vector<double> xs;
  if (!plot.x.empty()) xs = column(plot.x);
  Range rx, ry;
  for (const auto& series : plot.y) {
    const auto ys = column(series);
    for (std::size_t i = 0; i < ys.size(); ++i) {
      if (usable(xs[i]) && usable(ys[i])) {
        rx.add(tr(xs[i]));
        ry.add(tr(ys[i]));
      }
    }
  }
  if (!std::isfinite(rx.lo)) rx = Range{0.0, 1.0};
  if (!std::isfinite(ry.lo)) ry = Range{0.0, 1.0};
  rx.pad();
  ry.pad();
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
  auto py = [&](double v) { return kTop + ph - (v - ry.lo) / (ry.hi - ry.lo) * ph; };
  auto label = [&](double v) { return log ? fmt::format("{:.3g}", std::pow(10.0, v)) : fmt::format("{:.4g}", v); };

  fmt::print(out,
             "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
             "font-family=\"sans-serif\" font-size=\"11\">\n",
             kWidth, kHeight);
  fmt::print(out, "<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", kWidth, kHeight);
  fmt::print(out, "<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n", kWidth / 2,
             plot.title.empty() ? name_ : plot.title);
  fmt::print(out, "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>\n", kLeft, kTop,
             pw, ph);
  for (int k = 0; k <= 4; ++k) {
    const double vx = rx.lo + (rx.hi - rx.lo) * k / 4.0;
    const double vy = ry.lo + (ry.hi - ry.lo) * k / 4.0;
    fmt::print(out, "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{}</text>\n", px(vx), kTop + ph + 16,
               label(vx));
    fmt::print(out, "<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{}</text>\n", kLeft - 6, py(vy) + 4,
               label(vy));
  }
  fmt::print(out, "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}{}</text>\n", kLeft + pw / 2, kHeight - 12,
             plot.x, log ? " (log)" : "");

  std::size_t color = 0;
  for (const auto& series : plot.y) {
    const auto ys = column(series);
    const char* stroke = kColors[color++ % std::size(kColors)];
    std::string points;
    for (std::size_t i = 0; i < ys.size(); ++i) {
      if (!usable(xs[i]) || !usable(ys[i])) continue;
      points += fmt::format("{:.2f},{:.2f} ", px(tr(xs[i])), py(tr(ys[i])));
    }
    if (!points.empty()) points.pop_back();
    fmt::print(out, "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", stroke, points);
    for (std::size_t i = 0; i < ys.size(); ++i) {
      if (!usable(xs[i]) || !usable(ys[i])) continue;
      fmt::print(out, "<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" fill=\"{}\"/>\n", px(tr(xs[i])), py(tr(ys[i])),
                 stroke);
    }
    const double ly = kTop + 14.0 * static_cast<double>(color);
    fmt::print(out, "<text x=\"{}\" y=\"{:.2f}\" fill=\"{}\">{}</text>\n", kLeft + 8, ly, stroke, series);
  }
  out << "</svg>\n";
}

std::string ExperimentReport::summary_text() const {
  std::ostringstream out;
  fmt::print(out, "experiment: {}\nrows: {}\n", name_, values_.size());
  for (const auto& [k, v] : summary_) fmt::print(out, "{}: {}\n", k, v);
  std::size_t passed = 0;
  for (const auto& c : checks_) {
    if (c.passed) ++passed;
    fmt::print(out, "[{}] {}: value={:.6g} threshold={:.6g} slack={:.3g}{}{}\n", c.passed ? "pass" : "FAIL", c.name,
               c.value, c.threshold, c.slack, c.detail.empty() ? "" : " ", c.detail);
  }
  fmt::print(out, "checks: {}/{} passed\n", passed, checks_.size());
  return out.str();
}

std::vector<std::string> ExperimentReport::write_all(const std::string& dir) const {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path base(dir);
  std::vector<std::string> written;
  auto emit = [&](const std::string& file, auto&& writer) {
    const std::string path = (base / file).string();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError(fmt::format("cannot write '{}'", path));
    writer(out);
    written.push_back(path);
  };
  emit(name_ + ".csv", [&](std::ostream& o) { write_csv(o); });
  emit(name_ + "_checks.csv", [&](std::ostream& o) { write_checks_csv(o); });
  emit(name_ + ".svg", [&](std::ostream& o) { write_svg(o); });
  emit(name_ + "_summary.txt", [&](std::ostream& o) { o << summary_text(); });
  return written;
}

double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("slope fit needs two or more points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw DomainError("slope fit needs distinct abscissae");
  return sxy / sxx;
}

}  // namespace dphase
