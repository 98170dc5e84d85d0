#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "fracdim/series.hpp"
#include "oracles.hpp"

using fracdim::BinaryImage;
using fracdim::CurvatureSeries;
using fracdim::SeriesEntry;

namespace {
CurvatureSeries series_from(std::vector<SeriesEntry> entries) {
  CurvatureSeries s;
  s.entries = std::move(entries);
  return s;
}
}  // namespace

TEST_CASE("all-black image measures the full canvas at every radius") {
  BinaryImage img(24, 16);
  for (auto& b : img.bits) b = 1;
  const auto sched = fracdim::explicit_schedule({8.0, 4.0, 2.0});
  const CurvatureSeries s = fracdim::measure_series(img, sched);
  const double w = 24, h = 16;
  // Crofton value for the full rectangle; the edge-count perimeter would be
  // exactly 2(w+h)
  const double crofton_c1 =
      (fracdim::kPi / 16.0) * (2.0 * (w + h) + 2.0 * std::sqrt(2.0) * (w + h - 1.0));
  for (const auto& e : s.entries) {
    REQUIRE(e.c0 == 1);
    REQUIRE(e.c2 == w * h);
    REQUIRE(e.c1 == Catch::Approx(crofton_c1).epsilon(1e-12));
  }
  REQUIRE(fracdim::perimeter_edgecount(img) == std::int64_t(2 * (w + h)));
  // y2 = log(eps^-2 w h) exactly for every radius
  const auto data = fracdim::to_regression(fracdim::validate_signs(s), {2});
  for (int j = 0; j < data.n(); ++j)
    REQUIRE(data.y[2][size_t(j)] ==
            Catch::Approx(std::log(w * h) + 2.0 * data.x[size_t(j)]).margin(1e-12));
}

TEST_CASE("single point series matches lattice disk counts") {
  BinaryImage img(128, 128);
  img.set(64, 64, 1);
  const auto sched = fracdim::explicit_schedule({40.0, 20.0, 10.0});
  const CurvatureSeries s = fracdim::measure_series(img, sched);
  REQUIRE(s.entries[0].c2 == double(oracle::lattice_disk_count(40.0)));
  REQUIRE(s.entries[1].c2 == double(oracle::lattice_disk_count(20.0)));
  REQUIRE(s.entries[2].c2 == double(oracle::lattice_disk_count(10.0)));
  REQUIRE(s.entries[2].c2 == 317.0);
  REQUIRE(s.entries[1].c2 == 1257.0);
  REQUIRE(s.entries[0].c2 == 5025.0);
  // successive area ratios near 4
  REQUIRE(s.entries[1].c2 / s.entries[2].c2 == Catch::Approx(4.0).margin(0.1));
  REQUIRE(s.entries[0].c2 / s.entries[1].c2 == Catch::Approx(4.0).margin(0.1));
}

TEST_CASE("area is nondecreasing along the schedule (dilation monotonicity)") {
  const BinaryImage img = oracle::random_image(96, 96, 0.02, 3);
  const auto sched = fracdim::log_range_schedule(3.0, 0.5, 0.25);
  const CurvatureSeries s = fracdim::measure_series(img, sched);
  for (size_t j = 1; j < s.entries.size(); ++j)
    REQUIRE(s.entries[j].c2 <= s.entries[j - 1].c2);  // entries ordered by decreasing eps
}

TEST_CASE("border contact raises the measurement warning") {
  BinaryImage img(32, 32);
  img.set(16, 16, 1);
  fracdim::MeasureWarnings warn;
  fracdim::measure_series(img, fracdim::explicit_schedule({20.0, 2.0}), &warn);
  REQUIRE(warn.border_contact);
  fracdim::MeasureWarnings ok;
  fracdim::measure_series(img, fracdim::explicit_schedule({4.0, 2.0}), &ok);
  REQUIRE_FALSE(ok.border_contact);
}

TEST_CASE("sign validation keeps consistent signs and drops zeros") {
  auto s = series_from({{8.0, -3, 5.0, 10.0},
                        {4.0, -5, 6.0, 11.0},
                        {2.0, 0, 7.0, 12.0},
                        {1.0, -9, 8.0, 13.0}});
  const CurvatureSeries v = fracdim::validate_signs(s);
  REQUIRE(v.validated);
  REQUIRE(v.sign[0] == -1);
  REQUIRE(v.sign[1] == +1);
  REQUIRE(v.sign[2] == +1);
  // one zero among four samples exceeds the 10% threshold -> k = 0 excluded
  REQUIRE(v.excluded[0]);
  REQUIRE_FALSE(v.excluded[1]);
  REQUIRE(v.is_dropped(0, 2));
}

TEST_CASE("mixed signs exclude the index under the strict rule") {
  auto s = series_from({{8.0, 3, 1.0, 1.0}, {4.0, -3, 1.0, 1.0}, {2.0, 3, 1.0, 1.0},
                        {1.0, 3, 1.0, 1.0}});
  const CurvatureSeries strict = fracdim::validate_signs(s);
  REQUIRE(strict.excluded[0]);
  REQUIRE(strict.sign[0] == 0);
  const CurvatureSeries majority = fracdim::validate_signs(s, 0.10, true);
  REQUIRE_FALSE(majority.excluded[0]);
  REQUIRE(majority.sign[0] == +1);
  REQUIRE(majority.is_dropped(0, 1));
}

TEST_CASE("validation is idempotent") {
  auto s = series_from({{8.0, -3, 5.0, 10.0}, {4.0, -5, 6.0, 11.0}, {2.0, -1, 7.0, 12.0}});
  const CurvatureSeries once = fracdim::validate_signs(s);
  const CurvatureSeries twice = fracdim::validate_signs(once);
  REQUIRE(once.sign == twice.sign);
  REQUIRE(once.excluded == twice.excluded);
  REQUIRE(once.dropped == twice.dropped);
}

TEST_CASE("regression transform computes y = log(eps^-k |C_k|)") {
  auto s = series_from({{std::exp(1.0), -5, 2.0, std::exp(2.0)},
                        {1.0, -5, 2.0, 3.0},
                        {0.5, -5, 2.0, 1.0}});
  const auto v = fracdim::validate_signs(s);
  const auto data = fracdim::to_regression(v, {0, 2});
  // entry eps = e, c2 = e^2, k = 2: y = log(e^{-2} e^2) = 0 at x = -1
  REQUIRE(data.x[0] == Catch::Approx(-1.0));
  REQUIRE(data.y[2][0] == Catch::Approx(0.0).margin(1e-12));
  // entry eps = 1, c0 = -5: y0 = log 5, sigma0 = -1
  REQUIRE(data.y[0][1] == Catch::Approx(std::log(5.0)));
  REQUIRE(data.sigma[0] == -1);
}

TEST_CASE("regression transform refuses excluded or short indices") {
  auto s = series_from({{8.0, 1, 1.0, 1.0}, {4.0, -1, 1.0, 1.0}, {2.0, 1, 1.0, 1.0}});
  const auto v = fracdim::validate_signs(s);
  REQUIRE_THROWS_AS(fracdim::to_regression(v, {0}), fracdim::DataError);
  REQUIRE_THROWS_AS(fracdim::to_regression(v, std::vector<int>{}), fracdim::DataError);
  auto s2 = series_from({{8.0, 1, 1.0, 1.0}, {4.0, 1, 1.0, 1.0}});
  REQUIRE_THROWS_AS(fracdim::to_regression(fracdim::validate_signs(s2), {0}),
                    fracdim::DataError);
}

TEST_CASE("series CSV round-trips the numbers exactly") {
  BinaryImage img(64, 64);
  img.set(32, 32, 1);
  img.set(20, 40, 1);
  const auto sched = fracdim::explicit_schedule({9.0, 5.0, 3.0, 2.0});
  const CurvatureSeries s = fracdim::measure_series(img, sched);
  std::stringstream buf;
  fracdim::write_series_csv(s, buf);
  const CurvatureSeries back = fracdim::read_series_csv(buf);
  REQUIRE(back.entries.size() == s.entries.size());
  for (size_t j = 0; j < s.entries.size(); ++j) {
    REQUIRE(back.entries[j].eps == s.entries[j].eps);  // bit-exact through %.17g
    REQUIRE(back.entries[j].c0 == s.entries[j].c0);
    REQUIRE(back.entries[j].c1 == s.entries[j].c1);
    REQUIRE(back.entries[j].c2 == s.entries[j].c2);
  }
}

TEST_CASE("series CSV rejects malformed content") {
  std::stringstream bad1("nope\n");
  REQUIRE_THROWS_AS(fracdim::read_series_csv(bad1), fracdim::DataError);
  std::stringstream bad2("eps,x,c0,c1,c2,y0,y1,y2\n2.0,-0.69,one,1,1,,,\n");
  REQUIRE_THROWS_AS(fracdim::read_series_csv(bad2), fracdim::DataError);
  std::stringstream bad3("eps,x,c0,c1,c2,y0,y1,y2\n2.0,-0.69,1,1,1,nan,nan,nan\n4.0,-1.4,1,1,1,nan,nan,nan\n");
  REQUIRE_THROWS_AS(fracdim::read_series_csv(bad3), fracdim::DataError);  // eps increasing
}
