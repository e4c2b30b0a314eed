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

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "guidedsr/errors.hpp"
#include "guidedsr/ode.hpp"
#include "guidedsr/rates.hpp"

namespace guidedsr {

/// Collective decay rate of the symmetric one-excitation state:
/// Gamma = gamma_rad + n * gamma_guided, in gamma0 units.
inline double collective_rate(int n, const DecayRates& rates) {
  if (n < 1) {
    fail(Errc::invalid_atom_count, "atom count must be >= 1, got " + std::to_string(n));
  }
  return rates.gamma_rad() + static_cast<double>(n) * rates.gamma_guided();
}

/// Closed-form observables of the symmetric one-excitation state at time t.
struct SymmetricSample {
  double population = 0.0;
  double i_guided = 0.0;
  double i_rad = 0.0;
};

inline SymmetricSample symmetric_solution(int n, const DecayRates& rates, double t) {
  if (!(t >= 0.0)) {
    fail(Errc::negative_time, "time must be >= 0, got " + std::to_string(t));
  }
  const double decay = std::exp(-collective_rate(n, rates) * t);
  SymmetricSample s;
  s.population = decay;
  s.i_guided = static_cast<double>(n) * rates.gamma_guided() * decay;
  s.i_rad = rates.gamma_rad() * decay;
  return s;
}

/// Channeling fraction of the symmetric one-excitation state:
/// f = n gamma_guided / (gamma_rad + n gamma_guided).
inline double symmetric_fraction(int n, const DecayRates& rates) {
  const double big_gamma = collective_rate(n, rates);
  return static_cast<double>(n) * rates.gamma_guided() / big_gamma;
}

/// Equivalent form in terms of the cooperativity parameter: n eta / (1 + n eta).
inline double symmetric_fraction_from_eta(int n, double eta) {
  if (n < 1) {
    fail(Errc::invalid_atom_count, "atom count must be >= 1, got " + std::to_string(n));
  }
  if (!std::isfinite(eta) || eta < 0.0) {
    fail(Errc::negative_rate, "eta must be a nonnegative finite number");
  }
  const double ne = static_cast<double>(n) * eta;
  return ne / (1.0 + ne);
}

/// Parameters of the mean-field (factorized-correlation) decay solution.
struct MeanFieldParams {
  int n = 0;
  DecayRates rates = make_rates_without_eta(0.0, 1.0);
  double p0 = 0.0;
  double kappa = 0.0;      // (n-1) gamma_guided / gamma_total
  double big_gamma = 0.0;  // gamma_total (kappa + 1) = gamma_rad + n gamma_guided
  double tau = 0.0;        // 1 / big_gamma
  double t_a = 0.0;        // time shift: tau ln[(kappa+1)(n/p0) - kappa]
};

inline MeanFieldParams meanfield_params(int n, const DecayRates& rates, double p0) {
  if (n < 1) {
    fail(Errc::invalid_atom_count, "atom count must be >= 1, got " + std::to_string(n));
  }
  if (!std::isfinite(p0) || p0 <= 0.0 || p0 > static_cast<double>(n)) {
    fail(Errc::invalid_initial_population,
         "initial population must lie in (0, n], got " + std::to_string(p0));
  }
  MeanFieldParams p;
  p.n = n;
  p.rates = rates;
  p.p0 = p0;
  p.kappa = static_cast<double>(n - 1) * rates.gamma_guided() / rates.gamma_total();
  // Written as gamma (kappa+1) so the identity with kappa holds bit-exactly.
  p.big_gamma = rates.gamma_total() * (p.kappa + 1.0);
  p.tau = 1.0 / p.big_gamma;
  if (p0 == static_cast<double>(n)) {
    p.t_a = 0.0;
  } else {
    const double arg = (p.kappa + 1.0) * (static_cast<double>(n) / p0) - p.kappa;
    p.t_a = p.tau * std::log(std::max(arg, 1.0));
  }
  return p;
}

/// Mean-field population: P(t) = n (kappa+1) q / (1 + kappa q) with
/// q = e^{-Gamma (t + t_a)}, written in the underflow-safe q form.
inline double meanfield_population(const MeanFieldParams& params, double t) {
  const double q = std::exp(-params.big_gamma * (t + params.t_a));
  return static_cast<double>(params.n) * (params.kappa + 1.0) * q / (1.0 + params.kappa * q);
}

/// Mean-field guided intensity in I0 units; equals -(dP/dt + gamma_rad P)
/// for the closed-form population.
inline double meanfield_intensity(const MeanFieldParams& params, double t) {
  const double q = std::exp(-params.big_gamma * (t + params.t_a));
  const double kq = 1.0 + params.kappa * q;
  const double pop = static_cast<double>(params.n) * (params.kappa + 1.0) * q / kq;
  return pop * (params.rates.gamma_total() * (params.kappa + 1.0) / kq - params.rates.gamma_rad());
}

/// Mean-field <J+J->: the factorized correlation P + (1 - 1/n) P (n - P),
/// so that gamma_guided * jpjm reproduces meanfield_intensity.
inline double meanfield_jpjm(const MeanFieldParams& params, double t) {
  const double pop = meanfield_population(params, t);
  const double n = static_cast<double>(params.n);
  return pop + (1.0 - 1.0 / n) * pop * (n - pop);
}

/// Time of the guided-intensity peak measured from the t_a-shifted origin:
/// t_p = tau ln{(1 - 1/n)[2 + (n-2) gamma_guided/gamma_total]}. Defined for
/// n >= 2; the argument of the log is >= 1 there, so t_p >= 0.
inline double peak_time_tp(int n, const DecayRates& rates) {
  if (n < 2) {
    fail(Errc::invalid_atom_count,
         "the peak-time formula needs n >= 2, got " + std::to_string(n));
  }
  const double nd = static_cast<double>(n);
  const double kappa = static_cast<double>(n - 1) * rates.gamma_guided() / rates.gamma_total();
  const double big_gamma = rates.gamma_total() * (kappa + 1.0);
  const double arg = (1.0 - 1.0 / nd) *
                     (2.0 + static_cast<double>(n - 2) * rates.gamma_guided() /
                                rates.gamma_total());
  return std::log(arg) / big_gamma;
}

struct GuidedPeak {
  double t_max = 0.0;  // peak time in tau0 units, measured from t = 0
  double i_max = 0.0;  // peak guided intensity in I0 units
};

/// Peak characterization of the mean-field guided intensity. A local peak
/// exists iff t_a < t_p (strict); its height gamma_guided n^3 / (4(n-1)) is
/// independent of p0. Returns the monotonic-decrease marker (empty optional)
/// otherwise; n = 1 is always monotonic.
inline std::optional<GuidedPeak> meanfield_peak(int n, const DecayRates& rates, double p0) {
  const MeanFieldParams params = meanfield_params(n, rates, p0);  // validates n, p0
  if (n == 1) return std::nullopt;
  const double t_p = peak_time_tp(n, rates);
  if (!(params.t_a < t_p)) return std::nullopt;
  GuidedPeak peak;
  peak.t_max = t_p - params.t_a;
  peak.i_max = rates.gamma_guided() * std::pow(static_cast<double>(n), 3) /
               (4.0 * static_cast<double>(n - 1));
  return peak;
}

namespace detail {

// g(kappa) = [ln(1+kappa) - ln(1+beta kappa)] / kappa, continued through
// kappa -> 0 by its series (1-beta) - (1-beta^2) kappa/2 + (1-beta^3) kappa^2/3.
inline double log_ratio_over_kappa(double kappa, double beta) {
  if (kappa < 1e-8) {
    return (1.0 - beta) - (1.0 - beta * beta) * kappa / 2.0 +
           (1.0 - beta * beta * beta) * kappa * kappa / 3.0;
  }
  return (std::log1p(kappa) - std::log1p(beta * kappa)) / kappa;
}

}  // namespace detail

/// Mean-field channeling fraction
/// f = 1 - (n/p0)(gamma_rad/gamma_total) [ln((kappa+1)/(1+(1-p0/n) kappa))]/kappa,
/// with the kappa -> 0 limit taken by series expansion.
inline double meanfield_fraction(int n, const DecayRates& rates, double p0) {
  const MeanFieldParams params = meanfield_params(n, rates, p0);  // validates
  const double beta = 1.0 - p0 / static_cast<double>(n);
  const double g = detail::log_ratio_over_kappa(params.kappa, beta);
  return 1.0 - (static_cast<double>(n) / p0) * (rates.gamma_rad() / rates.gamma_total()) * g;
}

/// Direct numerical integration of the mean-field population equation
/// dP/dt = -P [gamma + (1 - 1/n) gamma_guided (n - P)]; the independent
/// oracle for the closed form. The grid must increase strictly from 0.
inline std::vector<double> meanfield_ode(int n, const DecayRates& rates, double p0,
                                         std::span<const double> time_grid) {
  meanfield_params(n, rates, p0);  // validates n, p0
  if (time_grid.empty() || time_grid.front() != 0.0) {
    fail(Errc::invalid_range, "the time grid must start at 0");
  }
  const double gamma = rates.gamma_total();
  const double gg = rates.gamma_guided();
  const double nd = static_cast<double>(n);
  auto deriv = [&](double, const Eigen::VectorXcd& y, Eigen::VectorXcd& dy) {
    const std::complex<double> p = y[0];
    dy[0] = -p * (gamma + (1.0 - 1.0 / nd) * gg * (nd - p));
  };
  std::vector<double> out(time_grid.size(), 0.0);
  Eigen::VectorXcd y(1);
  y[0] = p0;
  integrate_dopri5(deriv, y, 1e-12, 1e-12, std::numeric_limits<double>::infinity(), time_grid,
                   [&](std::size_t idx, double, const Eigen::VectorXcd& yk) {
                     out[idx] = yk[0].real();
                   });
  return out;
}

}  // namespace guidedsr
