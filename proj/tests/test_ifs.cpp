#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "fracdim/ifs.hpp"
#include "fracdim/lab.hpp"

using fracdim::IfsSystem;
using fracdim::Similarity;

namespace {
IfsSystem uniform_system(int n, double ratio) {
  IfsSystem sys;
  sys.name = "uniform";
  for (int i = 0; i < n; ++i) sys.maps.push_back({ratio, 0.0, false, 0.0, 0.0});
  return sys;
}
}  // namespace

TEST_CASE("similarity dimension of the classic systems") {
  const double s3 = fracdim::similarity_dimension(uniform_system(3, 0.5));
  REQUIRE(s3 == Catch::Approx(std::log(3.0) / std::log(2.0)).epsilon(1e-10));
  double sum = 0;
  for (int i = 0; i < 3; ++i) sum += std::pow(0.5, s3);
  REQUIRE(std::abs(sum - 1.0) < 1e-12);

  REQUIRE(fracdim::similarity_dimension(uniform_system(1, 0.37)) == 0.0);

  const double s8 = fracdim::similarity_dimension(uniform_system(8, 1.0 / 3.0));
  REQUIRE(s8 == Catch::Approx(std::log(8.0) / std::log(3.0)).epsilon(1e-10));  // 1.89279
}

TEST_CASE("similarity dimension is monotone in the number of maps") {
  fracdim::rng::SplitMix64 g(5);
  for (int it = 0; it < 15; ++it) {
    IfsSystem sys;
    const int n = 1 + int(g.next() % 5);
    for (int i = 0; i < n; ++i) sys.maps.push_back({0.1 + 0.5 * g.uniform(), 0, false, 0, 0});
    const double before = fracdim::similarity_dimension(sys);
    sys.maps.push_back({0.1 + 0.5 * g.uniform(), 0, false, 0, 0});
    REQUIRE(fracdim::similarity_dimension(sys) > before);
  }
}

TEST_CASE("preset dimensions") {
  auto dim = [](const char* name) {
    return fracdim::similarity_dimension(fracdim::preset_ifs(name));
  };
  REQUIRE(dim("gasket") == Catch::Approx(1.5849625).epsilon(1e-6));
  REQUIRE(dim("carpet") == Catch::Approx(1.8927893).epsilon(1e-6));
  REQUIRE(dim("modcarpet") == Catch::Approx(1.8927893).epsilon(1e-6));
  REQUIRE(dim("supergasket") == Catch::Approx(1.893).margin(2e-3));
  REQUIRE(dim("fullsquare") == Catch::Approx(2.0).epsilon(1e-10));
  REQUIRE_THROWS_AS(fracdim::preset_ifs("nosuch"), fracdim::DataError);
}

TEST_CASE("gasket is log-2 arithmetic") {
  const auto cls = fracdim::classify_arithmeticity(fracdim::preset_ifs("gasket"), 1e-9);
  REQUIRE(cls.arithmetic());
  REQUIRE(cls.h == Catch::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("carpet is log-3 arithmetic") {
  const auto cls = fracdim::classify_arithmeticity(fracdim::preset_ifs("carpet"), 1e-9);
  REQUIRE(cls.arithmetic());
  REQUIRE(cls.h == Catch::Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("single map with ratio 1/e is 1-arithmetic") {
  const auto cls = fracdim::classify_arithmeticity(uniform_system(1, std::exp(-1.0)), 1e-9);
  REQUIRE(cls.arithmetic());
  REQUIRE(cls.h == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ratios 1/2 and 1/3 are non-arithmetic") {
  IfsSystem sys;
  sys.maps.push_back({0.5, 0, false, 0, 0});
  sys.maps.push_back({1.0 / 3.0, 0, false, 0, 0});
  REQUIRE_FALSE(fracdim::classify_arithmeticity(sys, 1e-9).arithmetic());
}

TEST_CASE("ratios 1/4 and 1/8 share h = log 2") {
  IfsSystem sys;
  sys.maps.push_back({0.25, 0, false, 0, 0});
  sys.maps.push_back({0.125, 0, false, 0, 0});
  const auto cls = fracdim::classify_arithmeticity(sys, 1e-9);
  REQUIRE(cls.arithmetic());
  REQUIRE(cls.h == Catch::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("triangle, cross and supergasket presets are non-arithmetic") {
  for (const char* name : {"triangle", "cross", "supergasket"})
    REQUIRE_FALSE(fracdim::classify_arithmeticity(fracdim::preset_ifs(name)).arithmetic());
}

TEST_CASE("IFS config text parses and validates") {
  std::stringstream cfg(
      "# three corner maps\n"
      "0.5 0 0 0.0 0.0\n"
      "0.5 0 0 0.5 0.0\n"
      "0.5 90 1 0.25 0.433\n");
  const IfsSystem sys = fracdim::parse_ifs_config(cfg, "custom");
  REQUIRE(sys.maps.size() == 3);
  REQUIRE(sys.maps[2].reflection);
  REQUIRE(sys.maps[2].rotation == Catch::Approx(fracdim::kPi / 2.0));

  std::stringstream bad("0.5 0 maybe 0 0\n");
  REQUIRE_THROWS_AS(fracdim::parse_ifs_config(bad, "bad"), fracdim::DataError);
  std::stringstream worse("1.5 0 0 0 0\n");
  REQUIRE_THROWS_AS(fracdim::parse_ifs_config(worse, "worse"), fracdim::DataError);
}
