#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dphase/errors.hpp"
#include "dphase/report.hpp"

using namespace dphase;

namespace {

ExperimentReport sample() {
  ExperimentReport r("demo", {"h", "lambda"});
  r.add_row({1, 2.5});
  r.add_row({2, 0.1}, "nonconverged");
  r.add_check({"gap", true, 0.5, 1.0, 0.0, "fine"});
  r.add_check({"trend", false, 3.0, 2.0, 0.1, ""});
  r.add_summary("lambda_limit", "2.4");
  r.set_plot({"h", {"lambda"}, true, "demo plot"});
  return r;
}

}  // namespace

TEST_CASE("report tables") {
  const auto r = sample();
  CHECK(r.rows() == 2);
  CHECK(r.at(1, "lambda") == 0.1);
  CHECK(r.column("h") == std::vector<double>{1, 2});
  CHECK(r.status(1) == "nonconverged");
  CHECK_FALSE(r.all_passed());
  CHECK_THROWS_AS(r.at(0, "missing"), ShapeError);
  ExperimentReport bad("x", {"a"});
  CHECK_THROWS_AS(bad.add_row({1, 2}), ShapeError);

  std::ostringstream csv;
  r.write_csv(csv);
  CHECK(csv.str() == "# schema=1\n# experiment=demo\nh,lambda,status\n1,2.5,ok\n2,0.10000000000000001,nonconverged\n");
  std::ostringstream checks;
  r.write_checks_csv(checks);
  CHECK(checks.str() ==
        "# schema=1\n# experiment=demo\ncheck,passed,value,threshold,slack,detail\n"
        "gap,pass,0.5,1,0,\"fine\"\ntrend,fail,3,2,0.10000000000000001,\"\"\n");
  const std::string text = r.summary_text();
  CHECK(text.find("lambda_limit: 2.4") != std::string::npos);
  CHECK(text.find("[FAIL] trend") != std::string::npos);
  CHECK(text.find("checks: 1/2 passed") != std::string::npos);
}

TEST_CASE("svg output") {
  std::ostringstream svg;
  sample().write_svg(svg);
  const std::string s = svg.str();
  CHECK(s.rfind("<svg", 0) == 0);
  CHECK(s.find("</svg>") != std::string::npos);
  CHECK(s.find("polyline") != std::string::npos);
  CHECK(s.find("demo plot") != std::string::npos);
}

TEST_CASE("write_all emits four files") {
  const auto dir = std::filesystem::temp_directory_path() / "dphase_report_test";
  std::filesystem::remove_all(dir);
  const auto files = sample().write_all(dir.string());
  REQUIRE(files.size() == 4);
  for (const auto& f : files) CHECK(std::filesystem::file_size(f) > 0);
  CHECK(std::filesystem::exists(dir / "demo_checks.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("parallel_for") {
  for (unsigned threads : {0u, 1u, 3u, 16u}) {
    std::vector<int> out(100, 0);
    parallel_for(out.size(), threads, [&](std::size_t i) { out[i] = static_cast<int>(i * i); });
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == static_cast<int>(i * i));
  }
  std::atomic<int> ran{0};
  CHECK_THROWS_AS(parallel_for(20, 4,
                               [&](std::size_t i) {
                                 ++ran;
                                 if (i == 7) throw std::runtime_error("job failed");
                               }),
                  std::runtime_error);
  CHECK(ran == 20);
  parallel_for(0, 4, [](std::size_t) { FAIL("no jobs expected"); });
}

TEST_CASE("fitted slope") {
  CHECK(fitted_slope({1, 2, 3, 4}, {3, 5, 7, 9}) == doctest::Approx(2.0));
  CHECK(fitted_slope({0, 1, 2}, {1, 0, 1}) == doctest::Approx(0.0));
  CHECK_THROWS_AS(fitted_slope({1}, {1}), DomainError);
  CHECK_THROWS_AS(fitted_slope({1, 1}, {1, 2}), DomainError);
}
