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
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "guidedsr/errors.hpp"

namespace guidedsr {

/// Vacuum speed of light in m/s.
inline constexpr double kSpeedOfLight = 299792458.0;

/// Per-atom decay rates into the guided fiber modes and into free-space
/// radiation modes, both in units of the free-space single-atom rate gamma0.
class DecayRates {
 public:
  double gamma_guided() const noexcept { return gamma_guided_; }
  double gamma_rad() const noexcept { return gamma_rad_; }
  double gamma_total() const noexcept { return gamma_guided_ + gamma_rad_; }

  /// Single-atom cooperativity parameter eta = gamma_guided / gamma_rad.
  /// Only defined when the radiation channel is open.
  double eta() const {
    if (!has_eta()) {
      fail(Errc::zero_radiation_rate,
           "eta is undefined when gamma_rad = 0; this rates object was built without eta");
    }
    return gamma_guided_ / gamma_rad_;
  }

  bool has_eta() const noexcept { return gamma_rad_ > 0.0; }

  friend DecayRates make_rates(double gamma_guided, double gamma_rad);
  friend DecayRates make_rates_without_eta(double gamma_guided, double gamma_rad);

 private:
  DecayRates(double g, double r) : gamma_guided_(g), gamma_rad_(r) {}

  double gamma_guided_ = 0.0;
  double gamma_rad_ = 0.0;
};

namespace detail {

inline void check_rates_finite_nonnegative(double gamma_guided, double gamma_rad) {
  if (!std::isfinite(gamma_guided) || !std::isfinite(gamma_rad)) {
    fail(Errc::nonfinite_input, "decay rates must be finite");
  }
  if (gamma_guided < 0.0 || gamma_rad < 0.0) {
    fail(Errc::negative_rate, "decay rates must be nonnegative, got gamma_guided = " +
                                  std::to_string(gamma_guided) +
                                  ", gamma_rad = " + std::to_string(gamma_rad));
  }
}

}  // namespace detail

/// Standard constructor: requires an open radiation channel so that the
/// channeling efficiency eta is well defined.
inline DecayRates make_rates(double gamma_guided, double gamma_rad) {
  detail::check_rates_finite_nonnegative(gamma_guided, gamma_rad);
  if (gamma_rad == 0.0) {
    fail(Errc::zero_radiation_rate,
         "gamma_rad = 0 makes eta undefined; use make_rates_without_eta for "
         "guided-only model studies");
  }
  if (gamma_guided + gamma_rad <= 0.0) {
    fail(Errc::negative_rate, "total decay rate must be positive");
  }
  return DecayRates(gamma_guided, gamma_rad);
}

/// Escape hatch for model studies with a closed radiation channel
/// (gamma_rad = 0). eta() on the result throws.
inline DecayRates make_rates_without_eta(double gamma_guided, double gamma_rad) {
  detail::check_rates_finite_nonnegative(gamma_guided, gamma_rad);
  if (gamma_guided + gamma_rad <= 0.0) {
    fail(Errc::negative_rate, "total decay rate must be positive");
  }
  return DecayRates(gamma_guided, gamma_rad);
}

/// Symmetric positive-semidefinite matrix gamma_ij of pairwise decay
/// coefficients, in units of gamma0. When built for an ideal string (all
/// atoms at equivalent positions, separations at multiples of the guided
/// wavelength), it also carries the underlying per-atom rates so solvers can
/// split emitted intensity into guided and radiation parts.
class CouplingMatrix {
 public:
  int n_atoms() const noexcept { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& entries() const noexcept { return entries_; }
  double operator()(int i, int j) const { return entries_(i, j); }

  /// True when the matrix has the ideal-string structure
  /// gamma_ij = gamma_guided + delta_ij * gamma_rad.
  bool ideal_string() const noexcept { return ideal_string_; }

  bool has_rates() const noexcept { return rates_.has_value(); }

  const DecayRates& rates() const {
    if (!rates_) {
      fail(Errc::missing_rates,
           "coupling matrix carries no per-atom decay rates; build it with "
           "ideal_string_matrix or attach rates via with_rates");
    }
    return *rates_;
  }

  /// Returns a copy with per-atom rates attached, enabling the
  /// guided/radiation intensity split for loaded matrices.
  CouplingMatrix with_rates(const DecayRates& rates) const {
    CouplingMatrix out = *this;
    out.rates_ = rates;
    return out;
  }

  friend CouplingMatrix ideal_string_matrix(int n, const DecayRates& rates);
  friend CouplingMatrix load_coupling_matrix(const Eigen::MatrixXd& entries);

 private:
  CouplingMatrix() = default;

  Eigen::MatrixXd entries_;
  bool ideal_string_ = false;
  std::optional<DecayRates> rates_;
};

/// Coupling matrix of an ideal atomic string:
/// gamma_ij = gamma_guided + delta_ij * gamma_rad.
inline CouplingMatrix ideal_string_matrix(int n, const DecayRates& rates) {
  if (n < 1) {
    fail(Errc::invalid_atom_count, "atom count must be >= 1, got " + std::to_string(n));
  }
  CouplingMatrix out;
  out.entries_ = Eigen::MatrixXd::Constant(n, n, rates.gamma_guided());
  out.entries_.diagonal().array() += rates.gamma_rad();
  out.ideal_string_ = true;
  out.rates_ = rates;
  return out;
}

/// Wraps a user-supplied coupling matrix after checking symmetry and
/// positive semidefiniteness (eigenvalues >= -1e-10 * max diagonal).
inline CouplingMatrix load_coupling_matrix(const Eigen::MatrixXd& entries) {
  if (entries.rows() < 1 || entries.rows() != entries.cols()) {
    fail(Errc::dimension_mismatch,
         "coupling matrix must be square with at least one row, got " +
             std::to_string(entries.rows()) + "x" + std::to_string(entries.cols()));
  }
  if (!entries.allFinite()) {
    fail(Errc::nonfinite_input, "coupling matrix entries must be finite");
  }
  const double scale = entries.cwiseAbs().maxCoeff();
  const double asym = (entries - entries.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(scale, 1e-300)) {
    fail(Errc::not_symmetric,
         "coupling matrix must be symmetric; max |gamma_ij - gamma_ji| = " + std::to_string(asym));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(entries, Eigen::EigenvaluesOnly);
  const double max_diag = entries.diagonal().maxCoeff();
  const double tol = 1e-10 * std::max(max_diag, 0.0);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig < -tol) {
    fail(Errc::not_positive_semidefinite,
         "coupling matrix must be positive semidefinite; smallest eigenvalue = " +
             std::to_string(min_eig));
  }
  // Loaded matrices are deliberately not inspected for ideal-string
  // structure: the flag asserts provenance, not shape. Callers that know the
  // physical split attach it via with_rates.
  CouplingMatrix out;
  out.entries_ = entries;
  return out;
}

/// One row of a distance-resolved rate table.
struct RatePoint {
  double distance_nm = 0.0;
  double gamma_guided = 0.0;
  double gamma_rad = 0.0;
};

/// Table of per-atom decay rates versus atom-surface distance, loaded from
/// CSV with header "distance_nm,gamma_guided,gamma_rad", rows sorted
/// ascending by distance. Lookup interpolates linearly between tabulated
/// distances and refuses anything outside the tabulated range (no
/// extrapolation).
class RateTable {
 public:
  static RateTable from_rows(std::vector<RatePoint> rows) {
    if (rows.empty()) {
      fail(Errc::rate_table_parse, "rate table has no rows");
    }
    RateTable t;
    double prev = -std::numeric_limits<double>::infinity();
    for (const auto& row : rows) {
      if (!std::isfinite(row.distance_nm) || row.distance_nm <= 0.0) {
        fail(Errc::rate_table_parse,
             "rate table distances must be positive, got " + std::to_string(row.distance_nm));
      }
      if (row.distance_nm <= prev) {
        fail(Errc::rate_table_parse, "rate table rows must be sorted ascending by distance");
      }
      prev = row.distance_nm;
      detail::check_rates_finite_nonnegative(row.gamma_guided, row.gamma_rad);
    }
    t.rows_ = std::move(rows);
    return t;
  }

  static RateTable from_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
      fail(Errc::io_failure, "cannot open rate table: " + path.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
      fail(Errc::rate_table_parse, "rate table is empty: " + path.string());
    }
    if (trimmed(line) != "distance_nm,gamma_guided,gamma_rad") {
      fail(Errc::rate_table_parse,
           "rate table must start with header 'distance_nm,gamma_guided,gamma_rad', got '" +
               trimmed(line) + "'");
    }
    std::vector<RatePoint> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string t = trimmed(line);
      if (t.empty()) continue;
      std::istringstream ss(t);
      RatePoint p;
      char c1 = 0, c2 = 0;
      if (!(ss >> p.distance_nm >> c1 >> p.gamma_guided >> c2 >> p.gamma_rad) || c1 != ',' ||
          c2 != ',') {
        fail(Errc::rate_table_parse,
             "rate table line " + std::to_string(lineno) + " is not 'distance,guided,rad': '" + t +
                 "'");
      }
      rows.push_back(p);
    }
    return from_rows(std::move(rows));
  }

  const std::vector<RatePoint>& rows() const noexcept { return rows_; }

  /// Resolves rates at an atom-surface distance by linear interpolation
  /// between the bracketing rows. Distances outside [first, last] are out of
  /// the table's validity range (no extrapolation).
  DecayRates lookup(double distance_nm) const {
    if (rows_.empty() || distance_nm < rows_.front().distance_nm ||
        distance_nm > rows_.back().distance_nm) {
      std::string have;
      for (const auto& row : rows_) {
        if (!have.empty()) have += ", ";
        have += std::to_string(row.distance_nm);
      }
      fail(Errc::rate_table_range,
           "distance " + std::to_string(distance_nm) +
               " nm is outside the tabulated range and rates there are not derivable "
               "from the table; tabulated distances (nm): " +
               (have.empty() ? std::string("<none>") : have));
    }
    auto hi = std::find_if(rows_.begin(), rows_.end(),
                           [&](const RatePoint& p) { return p.distance_nm >= distance_nm; });
    if (hi->distance_nm == distance_nm || hi == rows_.begin()) {
      return make_rates(hi->gamma_guided, hi->gamma_rad);
    }
    const auto lo = std::prev(hi);
    const double w = (distance_nm - lo->distance_nm) / (hi->distance_nm - lo->distance_nm);
    return make_rates(lo->gamma_guided + w * (hi->gamma_guided - lo->gamma_guided),
                      lo->gamma_rad + w * (hi->gamma_rad - lo->gamma_rad));
  }

 private:
  static std::string trimmed(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
  }

  std::vector<RatePoint> rows_;
};

/// Cooperativity length in meters: the propagation distance over which the
/// collective emission rate Gamma = gamma_rad + n * gamma_guided equals the
/// inverse transit time of guided light. gamma0_linewidth_mhz is the natural
/// linewidth gamma0 / (2 pi) in MHz.
inline double cooperativity_length_m(int n, const DecayRates& rates, double gamma0_linewidth_mhz) {
  if (n < 1) {
    fail(Errc::invalid_atom_count, "atom count must be >= 1, got " + std::to_string(n));
  }
  if (!std::isfinite(gamma0_linewidth_mhz) || gamma0_linewidth_mhz <= 0.0) {
    fail(Errc::invalid_linewidth,
         "linewidth must be a positive number of MHz, got " + std::to_string(gamma0_linewidth_mhz));
  }
  const double big_gamma = rates.gamma_rad() + static_cast<double>(n) * rates.gamma_guided();
  if (big_gamma <= 0.0) {
    fail(Errc::negative_rate, "collective rate must be positive");
  }
  const double gamma0_si = 2.0 * M_PI * gamma0_linewidth_mhz * 1e6;  // rad/s
  return kSpeedOfLight / (big_gamma * gamma0_si);
}

}  // namespace guidedsr
