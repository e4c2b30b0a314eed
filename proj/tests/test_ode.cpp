// Copyright 2026 The guidedsr Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "guidedsr/ode.hpp"
#include "guidedsr/rates.hpp"
#include "support/matchers.hpp"

using namespace guidedsr;
using Catch::Approx;

TEST_CASE("integrator reproduces a scalar exponential to requested accuracy") {
  Eigen::VectorXcd y(1);
  y(0) = 1.0;
  std::vector<double> grid;
  for (int k = 0; k <= 20; ++k) grid.push_back(0.25 * k);

  std::vector<double> seen_t;
  std::vector<std::complex<double>> seen_y;
  const auto deriv = [](double, const Eigen::VectorXcd& in,
                        Eigen::VectorXcd& out) { out = -in; };
  const IntegrationStats stats = integrate_dopri5(
      deriv, y, 1e-10, 1e-12, std::numeric_limits<double>::infinity(), grid,
      [&](std::size_t k, double t, const Eigen::VectorXcd& state) {
        seen_t.push_back(t);
        seen_y.push_back(state(0));
        CHECK(t == grid[k]);
      });

  REQUIRE(seen_t.size() == grid.size());
  CHECK(stats.accepted > 0);
  for (std::size_t k = 0; k < grid.size(); ++k)
    CHECK(std::abs(seen_y[k] - std::exp(-grid[k])) < 1e-9);
}

TEST_CASE("integrator preserves the norm of a rotating phase") {
  const std::complex<double> i_unit(0.0, 1.0);
  Eigen::VectorXcd y(1);
  y(0) = 1.0;
  const std::vector<double> grid = {0.0, 5.0, 10.0};
  std::vector<std::complex<double>> seen;
  integrate_dopri5(
      [&](double, const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
        out = i_unit * 3.0 * in;
      },
      y, 1e-10, 1e-12, std::numeric_limits<double>::infinity(), grid,
      [&](std::size_t, double, const Eigen::VectorXcd& state) {
        seen.push_back(state(0));
      });
  for (std::size_t k = 0; k < grid.size(); ++k) {
    CHECK(std::abs(seen[k]) == Approx(1.0).epsilon(1e-8));
    CHECK(std::abs(seen[k] - std::exp(i_unit * 3.0 * grid[k])) < 1e-7);
  }
}

TEST_CASE("integrator lands on every sample time exactly") {
  Eigen::VectorXcd y(2);
  y << 1.0, 0.5;
  std::vector<double> grid;
  for (int k = 0; k <= 7; ++k) grid.push_back(k * 0.3137);
  std::vector<double> seen;
  integrate_dopri5(
      [](double, const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
        out(0) = -2.0 * in(0);
        out(1) = in(0) - in(1);
      },
      y, 1e-8, 1e-10, std::numeric_limits<double>::infinity(), grid,
      [&](std::size_t, double t, const Eigen::VectorXcd&) {
        seen.push_back(t);
      });
  REQUIRE(seen.size() == grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) CHECK(seen[k] == grid[k]);
}

TEST_CASE("unreachable tolerances raise a tolerance failure") {
  Eigen::VectorXcd y(1);
  y(0) = 1.0;
  const std::vector<double> grid = {0.0, 1.0};
  CHECK_THROWS_MATCHES(
      integrate_dopri5(
          [](double, const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
            out = -in;
          },
          y, 1e-300, 1e-300, std::numeric_limits<double>::infinity(), grid,
          [](std::size_t, double, const Eigen::VectorXcd&) {}),
      Error, ErrorCodeIs(Errc::tolerance_failure));
}

TEST_CASE("a derivative that turns non-finite raises instead of looping") {
  Eigen::VectorXcd y(1);
  y(0) = 1.0;
  const std::vector<double> grid = {0.0, 2.0};
  CHECK_THROWS_MATCHES(
      integrate_dopri5(
          [](double t, const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
            if (t > 1.0) {
              out = in * std::numeric_limits<double>::quiet_NaN();
            } else {
              out = -in;
            }
          },
          y, 1e-8, 1e-10, std::numeric_limits<double>::infinity(), grid,
          [](std::size_t, double, const Eigen::VectorXcd&) {}),
      Error, ErrorCodeIs(Errc::tolerance_failure));
}

TEST_CASE("integrator config validates tolerances and grid shape") {
  IntegratorConfig config;
  config.t_final = 1.0;
  CHECK_NOTHROW(config.validate());

  IntegratorConfig bad = config;
  bad.rel_tol = 0.0;
  CHECK_THROWS_MATCHES(bad.validate(), Error,
                       ErrorCodeIs(Errc::invalid_config));
  bad = config;
  bad.sample_count = 1;
  CHECK_THROWS_MATCHES(bad.validate(), Error,
                       ErrorCodeIs(Errc::invalid_config));
  bad = config;
  bad.t_final = -1.0;
  CHECK_THROWS_MATCHES(bad.validate(), Error,
                       ErrorCodeIs(Errc::invalid_config));

  const std::vector<double> grid = config.sample_grid();
  REQUIRE(grid.size() == static_cast<std::size_t>(config.sample_count));
  CHECK(grid.front() == 0.0);
  CHECK(grid.back() == 1.0);
}

TEST_CASE("default time horizon is eight collective lifetimes") {
  const DecayRates rates = make_rates(0.26, 1.06);
  CHECK(default_t_final(100, rates) == Approx(8.0 / 27.06).epsilon(1e-12));
  CHECK(default_t_final(1, rates) == Approx(8.0 / 1.32).epsilon(1e-12));
}
