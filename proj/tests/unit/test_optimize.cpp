#include <cmath>
#include <limits>

#include "doctest.h"
#include "winreg/errors.hpp"
#include "winreg/optimize.hpp"

using namespace winreg;
using Eigen::Index;

TEST_CASE("scalar search finds an interior minimum in log alpha") {
  const SearchConfig cfg;
  const double target = 0.0123;
  const ScalarResult r = minimize_scalar(
      [&](double a) { return std::pow(std::log(a / target), 2) + 3.0; }, cfg);
  CHECK(std::abs(std::log(r.alpha / target)) < cfg.tol);
  CHECK(r.value == doctest::Approx(3.0));
  CHECK_FALSE(r.at_boundary);
  CHECK(r.trace.size() > static_cast<std::size_t>(cfg.grid_points));
}

TEST_CASE("scalar search reports boundary minima exactly") {
  SearchConfig cfg;
  cfg.alpha_min = 1e-4;
  cfg.alpha_max = 2.0;
  const ScalarResult down = minimize_scalar([](double a) { return -a; }, cfg);
  CHECK(down.alpha == 2.0);
  CHECK(down.at_boundary);
  const ScalarResult up = minimize_scalar([](double a) { return a; }, cfg);
  CHECK(up.alpha == 1e-4);
  CHECK(up.at_boundary);
}

TEST_CASE("grid ties resolve to the smallest alpha") {
  const SearchConfig cfg;
  const ScalarResult flat = minimize_scalar([](double) { return 1.0; }, cfg);
  CHECK(flat.alpha == cfg.alpha_min);
  const ScalarResult steps = minimize_scalar([](double a) { return a < 0.01 ? 2.0 : (a < 1.0 ? 1.0 : 1.0); }, cfg);
  CHECK(steps.alpha >= 0.01);
  CHECK(steps.alpha < 0.02);
}

TEST_CASE("infeasible evaluations are skipped") {
  const SearchConfig cfg;
  const ScalarResult r = minimize_scalar(
      [](double a) {
        if (a < 0.5) throw DomainError("too small");
        return a;
      },
      cfg);
  CHECK(r.alpha >= 0.5);
  CHECK(r.alpha < 0.5 * 1.3);
  const ScalarResult nan = minimize_scalar(
      [](double a) { return a > 1.0 ? std::numeric_limits<double>::quiet_NaN() : -a; }, cfg);
  CHECK(nan.alpha <= 1.0);
  CHECK(nan.alpha > 0.8);
  CHECK_THROWS_AS(minimize_scalar([](double) -> double { throw SaturatedTraceError("x"); }, cfg), InfeasibleError);
  CHECK_THROWS_AS(minimize_scalar([](double) { return std::numeric_limits<double>::infinity(); }, cfg),
                  InfeasibleError);
}

TEST_CASE("search configuration is validated") {
  SearchConfig cfg;
  cfg.alpha_min = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SearchConfig{};
  cfg.alpha_max = 1e-7;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = SearchConfig{};
  cfg.grid_points = 3;
  CHECK_THROWS_AS(minimize_scalar([](double a) { return a; }, cfg), ConfigError);
  cfg = SearchConfig{};
  cfg.tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK(near_bound(SearchConfig{}.alpha_max * (1 - 1e-7), SearchConfig{}));
  CHECK_FALSE(near_bound(1.0, SearchConfig{}));
}

TEST_CASE("simplex search on a separable log-quadratic") {
  const SearchConfig cfg;
  Eigen::VectorXd target(3);
  target << 1e-3, 0.05, 2.0;
  auto f = [&](const Eigen::VectorXd& a) {
    double s = 0.0;
    for (Index i = 0; i < 3; ++i) s += (1.0 + i) * std::pow(std::log(a[i] / target[i]), 2);
    return s;
  };
  const VectorResult cold = minimize_vector(f, 3, cfg);
  for (Index i = 0; i < 3; ++i) CHECK(std::abs(std::log(cold.alphas[i] / target[i])) < 1e-3);
  CHECK_FALSE(cold.any_boundary());

  Eigen::VectorXd warm(3);
  warm << 0.01, 0.01, 0.01;
  const VectorResult hot = minimize_vector(f, 3, cfg, warm);
  CHECK((hot.trace.front().alphas - warm).norm() == 0.0);
  for (Index i = 0; i < 3; ++i) CHECK(std::abs(std::log(hot.alphas[i] / target[i])) < 1e-3);
  CHECK(hot.evaluations == static_cast<int>(hot.trace.size()));
}

TEST_CASE("simplex search respects bounds") {
  SearchConfig cfg;
  cfg.alpha_max = 1.0;
  auto f = [](const Eigen::VectorXd& a) { return std::pow(std::log(a[0] / 5.0), 2) + std::pow(std::log(a[1] / 0.1), 2); };
  const VectorResult r = minimize_vector(f, 2, cfg);
  CHECK(r.alphas[0] == 1.0);
  CHECK(r.at_boundary[0]);
  CHECK_FALSE(r.at_boundary[1]);
  CHECK(std::abs(std::log(r.alphas[1] / 0.1)) < 1e-3);
}

TEST_CASE("simplex search input errors") {
  const SearchConfig cfg;
  auto f = [](const Eigen::VectorXd& a) { return a.sum(); };
  CHECK_THROWS_AS(minimize_vector(f, 2, cfg, Eigen::VectorXd::Ones(3)), DimensionError);
  CHECK_THROWS_AS(minimize_vector(f, 2, cfg, Eigen::VectorXd::Zero(2)), DomainError);
  CHECK_THROWS_AS(minimize_vector(f, 0, cfg), DomainError);
  auto wall = [](const Eigen::VectorXd& a) { return a[0] > 0.5 ? a.sum() : std::numeric_limits<double>::infinity(); };
  CHECK_THROWS_AS(minimize_vector(wall, 2, cfg, Eigen::VectorXd::Constant(2, 0.1)), InfeasibleError);
}
