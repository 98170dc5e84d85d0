#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fracdim/estimators.hpp"
#include "fracdim/schedule.hpp"
#include "oracles.hpp"

using fracdim::RegressionData;

namespace {

RegressionData synthetic_data(const std::vector<double>& x,
                              const std::array<double, 3>& beta, double s,
                              const std::function<double(int, double)>& extra = {}) {
  RegressionData data;
  data.x = x;
  data.J = {0, 1, 2};
  for (int k = 0; k < 3; ++k) {
    data.sigma[size_t(k)] = 1;
    data.keep[size_t(k)].assign(x.size(), 1);
    data.y[size_t(k)].resize(x.size());
    for (size_t j = 0; j < x.size(); ++j)
      data.y[size_t(k)][j] =
          beta[size_t(k)] + s * x[j] + (extra ? extra(k, x[j]) : 0.0);
  }
  return data;
}

}  // namespace

TEST_CASE("noiseless linear data is recovered to machine precision") {
  const auto sched = fracdim::default_schedule();
  const std::array<double, 3> beta = {-1.0, 0.5, 2.0};
  const auto data = synthetic_data(sched.x, beta, 1.7);
  const auto fit = fracdim::lre_fit(data);
  REQUIRE(fit.s_hat == Catch::Approx(1.7).margin(1e-12));
  for (int k = 0; k < 3; ++k)
    REQUIRE(fit.beta[size_t(k)] == Catch::Approx(beta[size_t(k)]).margin(1e-12));
  REQUIRE(fit.residual < 1e-24);
  // curvature sign restored from sigma
  REQUIRE(fit.curvature[0] == Catch::Approx(std::exp(-1.0)).margin(1e-10));
}

TEST_CASE("LRE matches a brute-force normal-equations oracle") {
  fracdim::rng::SplitMix64 g(17);
  const std::vector<double> x = {0.3, 0.9, 1.1, 2.0, 2.7};
  for (int rep = 0; rep < 10; ++rep) {
    RegressionData data;
    data.x = x;
    data.J = {0, 1, 2};
    for (int k = 0; k < 3; ++k) {
      data.sigma[size_t(k)] = 1;
      data.keep[size_t(k)].assign(x.size(), 1);
      data.y[size_t(k)].resize(x.size());
      for (auto& v : data.y[size_t(k)]) v = 4.0 * g.uniform() - 2.0;
    }
    const auto fit = fracdim::lre_fit(data);
    // solve (X^T X) b = X^T y for the pooled design by Gaussian elimination
    fracdim::Matrix xtx = oracle::pooled_xtx(x);
    std::vector<double> xty(4, 0.0);
    for (int k = 0; k < 3; ++k)
      for (size_t j = 0; j < x.size(); ++j) {
        xty[size_t(k)] += data.y[size_t(k)][j];
        xty[3] += x[j] * data.y[size_t(k)][j];
      }
    const auto ref = fracdim::solve_square(xtx, xty);
    REQUIRE(fit.beta[0] == Catch::Approx(ref[0]).margin(1e-10));
    REQUIRE(fit.beta[1] == Catch::Approx(ref[1]).margin(1e-10));
    REQUIRE(fit.beta[2] == Catch::Approx(ref[2]).margin(1e-10));
    REQUIRE(fit.s_hat == Catch::Approx(ref[3]).margin(1e-10));
  }
}

TEST_CASE("LRE objective is locally optimal") {
  const auto sched = fracdim::power_schedule(1.0, 0.4, 40);
  fracdim::rng::SplitMix64 g(23);
  RegressionData data = synthetic_data(sched.x, {0.1, 0.2, 0.3}, 1.3);
  for (int k = 0; k < 3; ++k)
    for (auto& v : data.y[size_t(k)]) v += 0.3 * g.gaussian();
  const auto fit = fracdim::lre_fit(data);
  auto objective = [&](double s, const std::array<double, 3>& beta) {
    double acc = 0;
    for (int k = 0; k < 3; ++k)
      for (size_t j = 0; j < data.x.size(); ++j) {
        const double r = data.y[size_t(k)][j] - beta[size_t(k)] - s * data.x[j];
        acc += r * r;
      }
    return acc;
  };
  const double at_fit = objective(fit.s_hat, fit.beta);
  for (int it = 0; it < 1000; ++it) {
    std::array<double, 3> beta = fit.beta;
    double s = fit.s_hat + 0.02 * g.gaussian();
    for (auto& b : beta) b += 0.02 * g.gaussian();
    REQUIRE(objective(s, beta) >= at_fit - 1e-12);
  }
}

TEST_CASE("scale equivariance: scaling C2 shifts beta2 only") {
  const auto sched = fracdim::default_schedule();
  fracdim::rng::SplitMix64 g(29);
  RegressionData data = synthetic_data(sched.x, {0.4, 0.6, 0.8}, 1.5);
  for (int k = 0; k < 3; ++k)
    for (auto& v : data.y[size_t(k)]) v += 0.2 * g.gaussian();
  const auto base = fracdim::lre_fit(data);
  const double lambda = 3.7;
  RegressionData scaled = data;
  for (auto& v : scaled.y[2]) v += std::log(lambda);
  const auto fit = fracdim::lre_fit(scaled);
  REQUIRE(fit.s_hat == Catch::Approx(base.s_hat).margin(1e-12));
  REQUIRE(fit.beta[0] == Catch::Approx(base.beta[0]).margin(1e-12));
  REQUIRE(fit.beta[1] == Catch::Approx(base.beta[1]).margin(1e-12));
  REQUIRE(fit.beta[2] == Catch::Approx(base.beta[2] + std::log(lambda)).margin(1e-12));
}

TEST_CASE("degenerate designs are rejected") {
  RegressionData flat = synthetic_data({1.0, 1.0, 1.0}, {0, 0, 0}, 1.0);
  REQUIRE_THROWS_AS(fracdim::lre_fit(flat), fracdim::DataError);
}

TEST_CASE("fixed-slope fit returns beta = ybar - s xbar") {
  const auto sched = fracdim::power_schedule(0.5, 0.7, 20);
  const auto data = synthetic_data(sched.x, {1.0, -2.0, 0.5}, 1.9);
  const auto fit = fracdim::lre_fit(data, 1.9);
  REQUIRE(fit.s_fixed);
  for (int k = 0; k < 3; ++k)
    REQUIRE(fit.beta[size_t(k)] ==
            Catch::Approx(std::array<double, 3>{1.0, -2.0, 0.5}[size_t(k)]).margin(1e-12));
}

TEST_CASE("NRE with m = 0 reproduces the LRE exactly") {
  const auto sched = fracdim::default_schedule();
  fracdim::rng::SplitMix64 g(31);
  RegressionData data = synthetic_data(sched.x, {0.3, 0.5, 0.7}, 1.58);
  for (int k = 0; k < 3; ++k)
    for (auto& v : data.y[size_t(k)]) v += 0.1 * g.gaussian();
  const auto lre = fracdim::lre_fit(data);
  const auto nre = fracdim::nre_fit(data, std::log(2.0), 0);
  REQUIRE(nre.s_hat == Catch::Approx(lre.s_hat).margin(1e-12));
  for (int k = 0; k < 3; ++k) {
    REQUIRE(nre.beta[size_t(k)] == Catch::Approx(lre.beta[size_t(k)]).margin(1e-12));
    // with f = 0 the curvature integral degenerates to exp(beta)
    REQUIRE(nre.curvature[size_t(k)] ==
            Catch::Approx(lre.curvature[size_t(k)]).margin(1e-10));
  }
}

TEST_CASE("NRE on data without a seasonal part matches LRE and zeroes b") {
  const auto sched = fracdim::default_schedule();
  fracdim::rng::SplitMix64 g(37);
  RegressionData data = synthetic_data(sched.x, {0.2, 0.4, 0.6}, 1.44);
  for (int k = 0; k < 3; ++k)
    for (auto& v : data.y[size_t(k)]) v += 1e-6 * g.gaussian();
  const auto lre = fracdim::lre_fit(data);
  const auto nre = fracdim::nre_fit(data, std::log(2.0), 1);
  REQUIRE(nre.s_hat == Catch::Approx(lre.s_hat).margin(1e-10));
  for (int k = 0; k < 3; ++k) {
    REQUIRE(nre.beta[size_t(k)] == Catch::Approx(lre.beta[size_t(k)]).margin(1e-10));
    REQUIRE(std::abs(nre.b[size_t(k)][0]) < 1e-5);
  }
}

TEST_CASE("NRE recovers a noiseless seasonal model") {
  const auto sched = fracdim::default_schedule();
  const double h0 = std::log(2.0);
  const double mu1 = 2.0 * fracdim::kPi / h0;
  auto seasonal = [&](int, double x) { return 0.1 * std::cos(mu1 * x + 0.7); };
  const auto data = synthetic_data(sched.x, {0.3, 0.3, 0.3}, 1.5, seasonal);
  for (int m : {1, 4}) {
    const auto fit = fracdim::nre_fit(data, h0, m);
    REQUIRE(fit.s_hat == Catch::Approx(1.5).margin(1e-8));
    for (int k = 0; k < 3; ++k) {
      REQUIRE(fit.beta[size_t(k)] == Catch::Approx(0.3).margin(1e-8));
      REQUIRE(fit.b[size_t(k)][0] == Catch::Approx(0.1).margin(1e-8));
      REQUIRE(fit.phi[size_t(k)][0] == Catch::Approx(0.7).margin(1e-8));
      for (int j = 1; j < m; ++j) REQUIRE(std::abs(fit.b[size_t(k)][size_t(j)]) < 1e-8);
    }
  }
  // separate mode recovers the same truth
  const auto sep = fracdim::nre_fit(data, h0, 1, fracdim::NreMode::Separate);
  REQUIRE(sep.s_hat == Catch::Approx(1.5).margin(1e-8));
  REQUIRE(sep.s_per_k.size() == 3);
}

TEST_CASE("NRE curvature integral for a known seasonal part") {
  // single harmonic with amplitude b: |C| = e^beta I0-like integral; compare
  // against a direct Riemann evaluation
  const auto sched = fracdim::default_schedule();
  const double h0 = std::log(2.0);
  const double mu1 = 2.0 * fracdim::kPi / h0;
  auto seasonal = [&](int, double x) { return 0.25 * std::cos(mu1 * x + 0.2); };
  const auto data = synthetic_data(sched.x, {0.5, 0.5, 0.5}, 1.6, seasonal);
  const auto fit = fracdim::nre_fit(data, h0, 1);
  double riemann = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double x = h0 * (double(i) + 0.5) / double(n);
    riemann += std::exp(0.25 * std::cos(mu1 * x + 0.2));
  }
  riemann = std::exp(0.5) / h0 * (riemann * h0 / double(n));
  REQUIRE(fit.curvature[2] == Catch::Approx(riemann).epsilon(1e-6));
}

TEST_CASE("NRE rejects resonant schedules and tiny sample counts") {
  // a*j/h0 integral: x step 0.5 with h0 = 1 resonates at j = 2
  const auto sched = fracdim::log_arithmetic_schedule(0.0, 0.5, 40);
  const auto data = synthetic_data(sched.x, {0, 0, 0}, 1.0);
  REQUIRE_THROWS_AS(fracdim::nre_fit(data, 1.0, 1), fracdim::NumericError);
  const auto tiny = synthetic_data({0.1, 0.2, 0.3}, {0, 0, 0}, 1.0);
  REQUIRE_THROWS_AS(fracdim::nre_fit(tiny, std::log(2.0), 1), fracdim::DataError);
}

TEST_CASE("box counting of an all-black image is exactly two") {
  fracdim::BinaryImage img(256, 256);
  for (auto& b : img.bits) b = 1;
  const double slope = fracdim::box_count_dimension(img, {1, 2, 4, 8, 16});
  REQUIRE(slope == Catch::Approx(2.0).margin(1e-9));
}

TEST_CASE("box counting of a single pixel is zero") {
  fracdim::BinaryImage img(64, 64);
  img.set(10, 50, 1);
  REQUIRE(fracdim::box_count_dimension(img, {2, 4, 8}) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("box counting rejects bad inputs") {
  fracdim::BinaryImage img(64, 64);
  REQUIRE_THROWS_AS(fracdim::box_count_dimension(img, {2, 4, 8}), fracdim::DataError);
  img.set(1, 1, 1);
  REQUIRE_THROWS_AS(fracdim::box_count_dimension(img, {2, 4}), fracdim::DataError);
}

TEST_CASE("half-dimension relation on the published constants") {
  // gasket: (2 - 1.58496)/2 * 564100 = 117061.6 vs 117230
  const double g = fracdim::check_halfdim_relation(std::log(3.0) / std::log(2.0), 117230.0,
                                                   564100.0);
  REQUIRE(g == Catch::Approx(0.0014).margin(4e-4));
  const double c = fracdim::check_halfdim_relation(std::log(8.0) / std::log(3.0), 262770.0,
                                                   4900200.0);
  REQUIRE(c == Catch::Approx(0.0005).margin(4e-4));
  // s = 2 predicts C1 = 0, discrepancy 1
  REQUIRE(fracdim::check_halfdim_relation(2.0, 500.0, 123.0) == Catch::Approx(1.0));
  REQUIRE_THROWS_AS(fracdim::check_halfdim_relation(1.5, 0.0, 1.0), fracdim::DataError);
}

TEST_CASE("eigenvalue diagnostics reproduce the worked example") {
  const auto d = fracdim::design_eigen_diagnostics({1.0, 2.0, 3.0}, 1.0, 0.1);
  REQUIRE(d.lambda0 == 3.0);
  REQUIRE(d.lambda1 == Catch::Approx(44.5964).margin(1e-3));
  REQUIRE(d.lambda2 == Catch::Approx(0.40362).margin(1e-4));
  // product of the quadratic roots equals n^2 (d+1) S~^2
  REQUIRE(d.lambda1 * d.lambda2 == Catch::Approx(9.0 * 3.0 * (2.0 / 3.0)).epsilon(1e-9));
}

TEST_CASE("small eigenvalue obeys the arithmetic-schedule bound chain") {
  for (int n : {50, 100, 200}) {
    std::vector<double> x(static_cast<size_t>(n));
    for (int j = 1; j <= n; ++j) x[size_t(j) - 1] = double(j);
    const auto d = fracdim::design_eigen_diagnostics(x, 1.0, 0.05);
    double sumsq = 0, xbar = 0;
    for (double v : x) {
      sumsq += v * v;
      xbar += v;
    }
    xbar /= n;
    double st2 = 0;
    for (double v : x) st2 += (v - xbar) * (v - xbar);
    st2 /= n;
    const double vn = 3.0 * sumsq;
    REQUIRE(d.lambda2 / double(n) <= 2.0 + 1e-12);
    REQUIRE(d.lambda2 >= 3.0 * double(n) * st2 / (1.0 + vn / double(n)) - 1e-9);
  }
}

TEST_CASE("closed-form eigenvalues match the Jacobi oracle on random schedules") {
  fracdim::rng::SplitMix64 g(41);
  for (int rep = 0; rep < 30; ++rep) {
    const int n = 3 + int(g.next() % 60);
    std::vector<double> x(static_cast<size_t>(n));
    double acc = 0.1 + 2.0 * g.uniform();
    for (auto& v : x) {
      v = acc;
      acc += 0.05 + g.uniform();
    }
    const auto diag = fracdim::design_eigen_diagnostics(x, 1.0, 0.05);
    auto ev = oracle::jacobi_eigenvalues(oracle::pooled_xtx(x));
    std::sort(ev.begin(), ev.end());
    std::vector<double> closed = {diag.lambda0, diag.lambda0, diag.lambda1, diag.lambda2};
    std::sort(closed.begin(), closed.end());
    const double scale = std::abs(ev.back()) + 1.0;
    for (int i = 0; i < 4; ++i)
      REQUIRE(std::abs(ev[size_t(i)] - closed[size_t(i)]) <= 1e-9 * scale);
    REQUIRE(diag.lambda_min <= diag.lambda0 + 1e-12);
  }
}
