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

#include <cmath>
#include <string>

#include "guidedsr/errors.hpp"

namespace guidedsr {

enum class StateKind {
  /// Equal-amplitude superposition of all single-atom-excited basis states.
  symmetric_one_excitation,
  /// Every atom in the same superposition cos(theta/2)|e> + e^{i phi} sin(theta/2)|g>.
  product,
};

inline const char* state_kind_name(StateKind k) {
  return k == StateKind::symmetric_one_excitation ? "symmetric" : "product";
}

/// Symbolic description of the initial atomic state; solvers materialize it
/// in their own representation. theta = 0 is full excitation, theta = pi all
/// ground.
class InitialStateSpec {
 public:
  static InitialStateSpec symmetric() { return InitialStateSpec(StateKind::symmetric_one_excitation, 0.0, 0.0); }

  static InitialStateSpec product(double theta, double phi = 0.0) {
    if (!std::isfinite(theta) || theta < 0.0 || theta > M_PI) {
      fail(Errc::invalid_angle, "theta must lie in [0, pi], got " + std::to_string(theta));
    }
    if (!std::isfinite(phi) || phi < 0.0 || phi >= 2.0 * M_PI) {
      fail(Errc::invalid_angle, "phi must lie in [0, 2 pi), got " + std::to_string(phi));
    }
    return InitialStateSpec(StateKind::product, theta, phi);
  }

  StateKind kind() const noexcept { return kind_; }

  double theta() const {
    require_product("theta");
    return theta_;
  }

  double phi() const {
    require_product("phi");
    return phi_;
  }

 private:
  InitialStateSpec(StateKind kind, double theta, double phi)
      : kind_(kind), theta_(theta), phi_(phi) {}

  void require_product(const char* field) const {
    if (kind_ != StateKind::product) {
      fail(Errc::wrong_state_kind,
           std::string(field) + " is only defined for product states");
    }
  }

  StateKind kind_;
  double theta_;
  double phi_;
};

/// Moments of the product state: initial population P0 = n cos^2(theta/2)
/// and the pairwise correlation <sigma_i^dag sigma_j> = C0 for every i != j.
struct ProductMoments {
  double p0 = 0.0;
  double pair_correlation = 0.0;
};

inline ProductMoments product_state_moments(const InitialStateSpec& spec, int n) {
  if (spec.kind() != StateKind::product) {
    fail(Errc::wrong_state_kind, "product_state_moments requires a product-state spec");
  }
  if (n < 1) {
    fail(Errc::invalid_atom_count, "atom count must be >= 1, got " + std::to_string(n));
  }
  const double c2 = std::cos(spec.theta() / 2.0) * std::cos(spec.theta() / 2.0);
  const double s2 = std::sin(spec.theta() / 2.0) * std::sin(spec.theta() / 2.0);
  ProductMoments m;
  m.p0 = static_cast<double>(n) * c2;
  m.pair_correlation = c2 * s2;
  return m;
}

/// Initial population of a spec for an n-atom system: 1 for the symmetric
/// one-excitation state, n cos^2(theta/2) for product states.
inline double initial_population(const InitialStateSpec& spec, int n) {
  if (n < 1) {
    fail(Errc::invalid_atom_count, "atom count must be >= 1, got " + std::to_string(n));
  }
  if (spec.kind() == StateKind::symmetric_one_excitation) return 1.0;
  return product_state_moments(spec, n).p0;
}

}  // namespace guidedsr
