// Copyright 2026 The guidedsr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "guidedsr/errors.hpp"
#include "guidedsr/rates.hpp"

namespace guidedsr {

/// Adaptive-step configuration shared by all solvers. Times in tau0 units.
struct IntegratorConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double max_step = std::numeric_limits<double>::infinity();
  double t_final = 0.0;
  int sample_count = 801;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
      fail(Errc::invalid_config, "integrator tolerances must be positive");
    }
    if (!(max_step > 0.0)) {
      fail(Errc::invalid_config, "max_step must be positive");
    }
    if (!std::isfinite(t_final) || !(t_final > 0.0)) {
      fail(Errc::invalid_config, "t_final must be positive and finite, got " +
                                     std::to_string(t_final));
    }
    if (sample_count < 2) {
      fail(Errc::invalid_config,
           "sample_count must be >= 2, got " + std::to_string(sample_count));
    }
  }

  /// Uniform output grid [0, t_final] with sample_count points.
  std::vector<double> sample_grid() const {
    validate();
    std::vector<double> t(static_cast<std::size_t>(sample_count));
    for (int k = 0; k < sample_count; ++k) {
      t[static_cast<std::size_t>(k)] =
          t_final * static_cast<double>(k) / static_cast<double>(sample_count - 1);
    }
    t.back() = t_final;
    return t;
  }
};

/// Default integration horizon: 8 collective lifetimes, leaving roughly
/// e^-8 ~ 3e-4 of the initial energy unsampled for the symmetric state.
inline double default_t_final(int n, const DecayRates& rates) {
  if (n < 1) {
    fail(Errc::invalid_atom_count, "atom count must be >= 1, got " + std::to_string(n));
  }
  const double big_gamma = rates.gamma_rad() + static_cast<double>(n) * rates.gamma_guided();
  if (!(big_gamma > 0.0)) {
    fail(Errc::negative_rate, "collective rate must be positive");
  }
  return 8.0 / big_gamma;
}

struct IntegrationStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

namespace detail {

template <class Vec>
double scaled_error_norm(const Vec& err, const Vec& y0, const Vec& y1, double abs_tol,
                         double rel_tol) {
  const Eigen::Index n = err.size();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sc = abs_tol + rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double e = std::abs(err[i]) / sc;
    acc += e * e;
  }
  return std::sqrt(acc / static_cast<double>(n));
}

}  // namespace detail

/// Dormand-Prince 5(4) embedded Runge-Kutta with FSAL and a standard
/// step-size controller (safety 0.9, growth clamped to [0.2, 5]). Steps are
/// clipped so every entry of sample_times is hit exactly; on_sample(k, t, y)
/// fires at each grid point, including the initial one. sample_times must be
/// strictly increasing; integration starts at sample_times.front().
template <class Vec, class Deriv, class SampleFn>
IntegrationStats integrate_dopri5(Deriv&& f, Vec& y, double rel_tol, double abs_tol,
                                  double max_step, std::span<const double> sample_times,
                                  SampleFn&& on_sample) {
  if (sample_times.empty()) return {};
  for (std::size_t k = 1; k < sample_times.size(); ++k) {
    if (!(sample_times[k] > sample_times[k - 1])) {
      fail(Errc::non_monotonic_times, "sample times must be strictly increasing");
    }
  }

  // Butcher tableau (nodes, stage weights, 5th-order solution, 5th-4th error).
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  IntegrationStats stats;
  double t = sample_times.front();
  std::size_t idx = 0;
  on_sample(idx, t, y);
  ++idx;
  if (idx == sample_times.size()) return stats;

  const double span_total = sample_times.back() - t;
  const double h_min = 1e-14 * std::max(1.0, std::abs(sample_times.back()));
  double h = std::min(max_step, span_total / 100.0);

  Vec k1 = y, k2 = y, k3 = y, k4 = y, k5 = y, k6 = y, k7 = y, ytmp = y, ynew = y, yerr = y;
  f(t, y, k1);

  for (; idx < sample_times.size(); ++idx) {
    const double t_target = sample_times[idx];
    while (t < t_target) {
      double h_try = std::min({h, max_step, t_target - t});
      bool accepted = false;
      double err_norm = 0.0;
      while (!accepted) {
        if (h_try < h_min) {
          fail(Errc::tolerance_failure,
               "step size underflow at t = " + std::to_string(t) +
                   "; requested tolerances cannot be met");
        }
        ytmp = y + h_try * (a21 * k1);
        f(t + c2 * h_try, ytmp, k2);
        ytmp = y + h_try * (a31 * k1 + a32 * k2);
        f(t + c3 * h_try, ytmp, k3);
        ytmp = y + h_try * (a41 * k1 + a42 * k2 + a43 * k3);
        f(t + c4 * h_try, ytmp, k4);
        ytmp = y + h_try * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        f(t + c5 * h_try, ytmp, k5);
        ytmp = y + h_try * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        f(t + h_try, ytmp, k6);
        ynew = y + h_try * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        f(t + h_try, ynew, k7);
        yerr = h_try * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        err_norm = detail::scaled_error_norm(yerr, y, ynew, abs_tol, rel_tol);
        if (std::isfinite(err_norm) && err_norm <= 1.0) {
          accepted = true;
        } else {
          const double factor =
              std::isfinite(err_norm) ? std::max(0.1, 0.9 * std::pow(err_norm, -0.2)) : 0.1;
          h_try *= std::min(factor, 0.9);
          ++stats.rejected;
        }
      }
      // h_try only ever shrinks below its initial clip, so >= means the step
      // landed exactly on the requested grid point.
      t = (h_try >= t_target - t) ? t_target : t + h_try;
      y.swap(ynew);
      k1.swap(k7);  // first-same-as-last: k7 was evaluated at the accepted point
      ++stats.accepted;
      const double grow =
          err_norm > 0.0 ? std::clamp(0.9 * std::pow(err_norm, -0.2), 0.2, 5.0) : 5.0;
      h = std::min(h_try * grow, max_step);
    }
    on_sample(idx, t_target, y);
  }
  return stats;
}

}  // namespace guidedsr
