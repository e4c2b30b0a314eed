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
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "guidedsr/errors.hpp"
#include "guidedsr/initial_state.hpp"
#include "guidedsr/ode.hpp"
#include "guidedsr/rates.hpp"
#include "guidedsr/trajectory.hpp"

namespace guidedsr {

/// One total-spin sector. Quantum numbers are stored doubled (twoj = 2j) so
/// half-integer spins stay in exact integer arithmetic. Rows of a block
/// matrix run from m = +j (row 0) down to m = -j (row 2j).
struct DickeBlock {
  int twoj = 0;
  Eigen::Index dim = 0;          // 2j + 1
  double multiplicity = 0.0;     // d_N(j), exact integer value stored as double
  Eigen::Index offset = 0;       // start of this block in the flattened state
};

namespace detail {

// Binomial row C(n, 0..n) in exact integer arithmetic.
inline std::vector<boost::multiprecision::cpp_int> binomial_row(int n) {
  std::vector<boost::multiprecision::cpp_int> row(static_cast<std::size_t>(n) + 1);
  row[0] = 1;
  for (int k = 1; k <= n; ++k) {
    row[static_cast<std::size_t>(k)] =
        row[static_cast<std::size_t>(k - 1)] * (n - k + 1) / k;
  }
  return row;
}

}  // namespace detail

/// Decomposition of the n-spin space into total-spin sectors j with
/// multiplicities d_N(j) = C(N, N/2 - j) - C(N, N/2 - j - 1). The dimension
/// identity sum_j d_N(j) (2j+1) = 2^N is verified exactly at construction.
class DickeSpace {
 public:
  int n_atoms() const noexcept { return n_atoms_; }
  const std::vector<DickeBlock>& blocks() const noexcept { return blocks_; }
  Eigen::Index total_elements() const noexcept { return total_elements_; }

  /// d_{N-1}(j1) for the (n-1)-atom system; 0 when j1 is out of range.
  /// Needed by the local-dissipator inter-block coefficients.
  double multiplicity_n_minus_1(int twoj1) const noexcept {
    if (twoj1 < 0 || twoj1 > n_atoms_ - 1 || ((n_atoms_ - 1 - twoj1) % 2) != 0) return 0.0;
    const std::size_t b = static_cast<std::size_t>((n_atoms_ - 1 - twoj1) / 2);
    return b < mult_prev_.size() ? mult_prev_[b] : 0.0;
  }

  /// Index into blocks() for a given twoj; -1 when absent.
  int block_index(int twoj) const noexcept {
    if (twoj < 0 || twoj > n_atoms_ || ((n_atoms_ - twoj) % 2) != 0) return -1;
    return (n_atoms_ - twoj) / 2;
  }

  friend DickeSpace enumerate_blocks(int n);

 private:
  int n_atoms_ = 0;
  std::vector<DickeBlock> blocks_;          // descending twoj: N, N-2, ...
  std::vector<double> mult_prev_;           // d_{N-1} by b' = (N-1-twoj1)/2
  Eigen::Index total_elements_ = 0;
};

inline DickeSpace enumerate_blocks(int n) {
  if (n < 1 || n > 500) {
    fail(Errc::atom_count_out_of_range,
         "block enumeration supports 1 <= n <= 500, got " + std::to_string(n));
  }
  using boost::multiprecision::cpp_int;
  const auto row = detail::binomial_row(n);
  DickeSpace space;
  space.n_atoms_ = n;
  cpp_int dim_sum = 0;
  Eigen::Index offset = 0;
  for (int twoj = n; twoj >= 0; twoj -= 2) {
    const int b = (n - twoj) / 2;
    cpp_int d = row[static_cast<std::size_t>(b)];
    if (b >= 1) d -= row[static_cast<std::size_t>(b - 1)];
    if (d < 1) {
      fail(Errc::invalid_range, "internal: nonpositive multiplicity at twoj = " +
                                    std::to_string(twoj));
    }
    DickeBlock blk;
    blk.twoj = twoj;
    blk.dim = twoj + 1;
    blk.multiplicity = d.convert_to<double>();
    blk.offset = offset;
    offset += blk.dim * blk.dim;
    dim_sum += d * (twoj + 1);
    space.blocks_.push_back(blk);
  }
  space.total_elements_ = offset;
  if (dim_sum != cpp_int(1) << n) {
    fail(Errc::invalid_range,
         "internal: block multiplicities fail the 2^n dimension identity for n = " +
             std::to_string(n));
  }
  if (n == 1) {
    space.mult_prev_ = {1.0};  // the empty (n-1)-spin system has one trivial sector
  } else {
    const auto prev = detail::binomial_row(n - 1);
    for (int twoj1 = n - 1; twoj1 >= 0; twoj1 -= 2) {
      const int b = (n - 1 - twoj1) / 2;
      cpp_int d = prev[static_cast<std::size_t>(b)];
      if (b >= 1) d -= prev[static_cast<std::size_t>(b - 1)];
      space.mult_prev_.push_back(d.convert_to<double>());
    }
  }
  return space;
}

/// How the sector multiplicities d_N(j) enter a stored state. The library
/// computes throughout with at_observables: each block matrix is the state of
/// a single copy of its sector, and expectation values weight block traces by
/// d_N(j). folded_into_blocks (multiplicities premultiplied into the block
/// matrices) is accepted only as an exchange format; computational operations
/// reject it.
enum class MultiplicityConvention { at_observables, folded_into_blocks };

/// Permutation-invariant density matrix: a direct sum of per-sector block
/// matrices p_j(m, m'), stored flattened (column-major within each block).
struct DickeState {
  DickeSpace space;
  Eigen::VectorXcd data;
  MultiplicityConvention convention = MultiplicityConvention::at_observables;

  Eigen::Map<Eigen::MatrixXcd> block(std::size_t b) {
    const DickeBlock& blk = space.blocks()[b];
    return {data.data() + blk.offset, blk.dim, blk.dim};
  }
  Eigen::Map<const Eigen::MatrixXcd> block(std::size_t b) const {
    const DickeBlock& blk = space.blocks()[b];
    return {data.data() + blk.offset, blk.dim, blk.dim};
  }

  std::complex<double> weighted_trace() const {
    std::complex<double> tr = 0.0;
    for (std::size_t b = 0; b < space.blocks().size(); ++b) {
      const double w =
          convention == MultiplicityConvention::at_observables ? space.blocks()[b].multiplicity
                                                               : 1.0;
      tr += w * block(b).trace();
    }
    return tr;
  }

  /// Checks the weighted-trace normalization and per-block Hermiticity.
  void validate(double trace_tol = 1e-10, double herm_tol = 1e-12) const {
    if (data.size() != space.total_elements()) {
      fail(Errc::dimension_mismatch, "state data does not match the block layout");
    }
    const double drift = std::abs(weighted_trace() - 1.0);
    if (drift > trace_tol) {
      fail(Errc::trace_drift,
           "weighted trace deviates from 1 by " + std::to_string(drift));
    }
    for (std::size_t b = 0; b < space.blocks().size(); ++b) {
      const auto blk = block(b);
      const double herm = (blk - blk.adjoint()).cwiseAbs().maxCoeff();
      if (herm > herm_tol) {
        fail(Errc::not_symmetric, "block twoj = " + std::to_string(space.blocks()[b].twoj) +
                                      " is not Hermitian within tolerance");
      }
    }
  }
};

/// Rescales block matrices between the two multiplicity conventions.
inline DickeState to_convention(const DickeState& state, MultiplicityConvention target) {
  if (state.convention == target) return state;
  DickeState out = state;
  out.convention = target;
  for (std::size_t b = 0; b < out.space.blocks().size(); ++b) {
    const double d = out.space.blocks()[b].multiplicity;
    const double scale = target == MultiplicityConvention::folded_into_blocks ? d : 1.0 / d;
    out.block(b) *= scale;
  }
  return out;
}

namespace detail {

inline void require_at_observables(const DickeState& state, const char* op) {
  if (state.convention != MultiplicityConvention::at_observables) {
    fail(Errc::convention_mismatch,
         std::string(op) +
             " expects the at_observables multiplicity convention; convert with to_convention");
  }
}

}  // namespace detail

/// Materializes an initial-state spec in the block basis. Both supported
/// kinds are permutation-symmetric pure states, so all weight sits in the
/// maximal sector j = n/2.
inline DickeState encode_initial(const InitialStateSpec& spec, const DickeSpace& space) {
  const int n = space.n_atoms();
  DickeState state;
  state.space = space;
  state.data = Eigen::VectorXcd::Zero(space.total_elements());
  auto top = state.block(0);  // twoj = n, dim = n + 1
  if (spec.kind() == StateKind::symmetric_one_excitation) {
    // One excitation: m = 1 - n/2, i.e. row r = j - m doubled: r = n - 1.
    top(n - 1, n - 1) = 1.0;
    return state;
  }
  // Product state: row r holds k = n - r excitations; the symmetric component
  // carries the full sqrt(C(n, k)) combinatorial weight.
  const double c = std::cos(spec.theta() / 2.0);
  const double s = std::sin(spec.theta() / 2.0);
  const std::complex<double> g = std::polar(s, spec.phi());
  const auto row = detail::binomial_row(n);
  Eigen::VectorXcd amp(n + 1);
  // Powers by repeated multiplication; complex std::pow would turn the
  // fully polarized angles (0^0) into NaN.
  std::complex<double> gpow = 1.0;
  for (int r = 0; r <= n; ++r) {
    const int k = n - r;
    double cpow = 1.0;
    for (int q = 0; q < k; ++q) cpow *= c;
    amp[r] = std::sqrt(row[static_cast<std::size_t>(k)].convert_to<double>()) *
             cpow * gpow;
    gpow *= g;
  }
  top = amp * amp.adjoint();
  return state;
}

namespace detail {

// Clebsch-Gordan factors for coupling one spin-1/2 to a sector j1 of the
// remaining n-1 atoms, in doubled quantum numbers. up = the added spin is
// excited, dn = ground.
inline double cg_up(int twoj1, int twoj, int twom) {
  const double den = 2.0 * (twoj1 + 1);
  if (twoj == twoj1 + 1) return std::sqrt(std::max(0.0, (twoj1 + twom + 1) / den));
  return -std::sqrt(std::max(0.0, (twoj1 - twom + 1) / den));
}

inline double cg_dn_target(int twoj1, int twojpp, int twom) {
  // Down-spin component of the target state |j'', m-1>.
  const double den = 2.0 * (twoj1 + 1);
  if (twojpp == twoj1 + 1) return std::sqrt(std::max(0.0, (twoj1 - twom + 3) / den));
  return std::sqrt(std::max(0.0, (twoj1 + twom - 1) / den));
}

// d rho/dt in the block basis (at_observables convention):
//   gamma_g D[J-]  -- closes within each sector
//   gamma_r sum_j D[sigma_j] -- anticommutator is diagonal; the feeding term
//     couples sector j to j'' in {j-1, j, j+1} through the shared (n-1)-atom
//     sectors j1, with weights gamma_r * n * d_{n-1}(j1) / d_n(j'').
// The coefficients are validated against the brute-force Liouvillian
// projected onto the permutation-invariant subspace (see the test suite).
inline void dicke_apply(const DickeSpace& space, double gamma_g, double gamma_r,
                        const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
  out.setZero();
  const int n = space.n_atoms();
  const auto& blocks = space.blocks();
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const DickeBlock& blk = blocks[b];
    const int twoj = blk.twoj;
    const Eigen::Index dim = blk.dim;
    const Eigen::Map<const Eigen::MatrixXcd> bin(in.data() + blk.offset, dim, dim);
    Eigen::Map<Eigen::MatrixXcd> bout(out.data() + blk.offset, dim, dim);

    // Lowering amplitudes: J-|j, m_r> = s[r] |j, m_{r+1}>, s^2 = (j+m)(j-m+1).
    Eigen::VectorXd s2(dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
      s2[r] = static_cast<double>(twoj - r) * static_cast<double>(r + 1);
    }

    if (gamma_g != 0.0) {
      for (Eigen::Index c = 0; c < dim; ++c) {
        for (Eigen::Index r = 0; r < dim; ++r) {
          bout(r, c) -= 0.5 * gamma_g * (s2[r] + s2[c]) * bin(r, c);
        }
      }
      const double* srt = s2.data();
      for (Eigen::Index c = 0; c + 1 < dim; ++c) {
        for (Eigen::Index r = 0; r + 1 < dim; ++r) {
          bout(r + 1, c + 1) +=
              gamma_g * std::sqrt(srt[r] * srt[c]) * bin(r, c);
        }
      }
    }

    if (gamma_r == 0.0) continue;

    // Local anticommutator: excitation count n_r = (n + twom_r) / 2.
    for (Eigen::Index c = 0; c < dim; ++c) {
      const double nc = 0.5 * static_cast<double>(n + twoj - 2 * c);
      for (Eigen::Index r = 0; r < dim; ++r) {
        const double nr = 0.5 * static_cast<double>(n + twoj - 2 * r);
        bout(r, c) -= 0.5 * gamma_r * (nr + nc) * bin(r, c);
      }
    }

    // Local feeding into sectors j'' = j-1, j, j+1.
    for (int twojpp = twoj - 2; twojpp <= twoj + 2; twojpp += 2) {
      const int bpp = space.block_index(twojpp);
      if (bpp < 0) continue;
      const DickeBlock& tgt = blocks[static_cast<std::size_t>(bpp)];
      Eigen::Map<Eigen::MatrixXcd> tout(out.data() + tgt.offset, tgt.dim, tgt.dim);
      const Eigen::Index shift = 1 + (twojpp - twoj) / 2;  // rpp = r + shift
      for (int twoj1 = twoj - 1; twoj1 <= twoj + 1; twoj1 += 2) {
        if (twoj1 != twojpp - 1 && twoj1 != twojpp + 1) continue;
        const double d1 = space.multiplicity_n_minus_1(twoj1);
        if (d1 == 0.0) continue;
        const double w = gamma_r * static_cast<double>(n) * d1 / tgt.multiplicity;
        // a[r] = <up-component of |j, m_r>> * <down-component of |j'', m_r - 1>>
        Eigen::VectorXd a = Eigen::VectorXd::Zero(dim);
        for (Eigen::Index r = 0; r < dim; ++r) {
          const Eigen::Index rpp = r + shift;
          if (rpp < 0 || rpp >= tgt.dim) continue;
          const int twom = twoj - 2 * static_cast<int>(r);
          a[r] = cg_up(twoj1, twoj, twom) * cg_dn_target(twoj1, twojpp, twom);
        }
        for (Eigen::Index c = 0; c < dim; ++c) {
          if (a[c] == 0.0) continue;
          const Eigen::Index cpp = c + shift;
          for (Eigen::Index r = 0; r < dim; ++r) {
            if (a[r] == 0.0) continue;
            tout(r + shift, cpp) += w * a[r] * a[c] * bin(r, c);
          }
        }
      }
    }
  }
}

}  // namespace detail

/// Master-equation right-hand side in the block basis for ideal-string
/// coupling. The state must use the at_observables convention.
inline DickeState dicke_derivative(const DickeState& state, const DecayRates& rates) {
  detail::require_at_observables(state, "dicke_derivative");
  DickeState out;
  out.space = state.space;
  out.convention = state.convention;
  out.data.resize(state.data.size());
  detail::dicke_apply(state.space, rates.gamma_guided(), rates.gamma_rad(), state.data, out.data);
  return out;
}

/// Collective observables of a block state: population P, <J+J->.
struct DickeObservables {
  double population = 0.0;
  double jpjm = 0.0;
};

inline DickeObservables dicke_observables(const DickeState& state) {
  detail::require_at_observables(state, "dicke_observables");
  DickeObservables obs;
  for (std::size_t b = 0; b < state.space.blocks().size(); ++b) {
    const DickeBlock& blk = state.space.blocks()[b];
    const auto mat = state.block(b);
    const int n = state.space.n_atoms();
    for (Eigen::Index r = 0; r < blk.dim; ++r) {
      const double p = mat(r, r).real();
      obs.population += blk.multiplicity * 0.5 * static_cast<double>(n + blk.twoj - 2 * r) * p;
      obs.jpjm += blk.multiplicity * static_cast<double>(blk.twoj - r) *
                  static_cast<double>(r + 1) * p;
    }
  }
  return obs;
}

/// Permutation-invariant integration of the ideal-string master equation.
/// State size grows as O(n^3) instead of 4^n, so the collective regime stays
/// tractable for n ~ 100.
inline Trajectory evolve_dicke(const DecayRates& rates, const InitialStateSpec& spec, int n,
                               const IntegratorConfig& config) {
  config.validate();
  const DickeSpace space = enumerate_blocks(n);
  DickeState state = encode_initial(spec, space);

  auto deriv = [&space, &rates](double, const Eigen::VectorXcd& y, Eigen::VectorXcd& dy) {
    detail::dicke_apply(space, rates.gamma_guided(), rates.gamma_rad(), y, dy);
  };

  const std::vector<double> grid = config.sample_grid();
  Trajectory traj;
  traj.n_atoms = n;
  const std::size_t s = grid.size();
  traj.times.reserve(s);
  traj.population.reserve(s);
  traj.jpjm.reserve(s);
  traj.i_guided.reserve(s);
  traj.i_rad.reserve(s);
  traj.i_total.reserve(s);

  DickeState view;  // reused shell for observable extraction
  view.space = space;
  view.convention = MultiplicityConvention::at_observables;

  auto on_sample = [&](std::size_t, double t, const Eigen::VectorXcd& y) {
    view.data = y;
    const double drift = std::abs(view.weighted_trace() - 1.0);
    if (drift > 1e-6) {
      fail(Errc::trace_drift, "weighted trace drifted by " + std::to_string(drift) +
                                  " at t = " + std::to_string(t));
    }
    const DickeObservables obs = dicke_observables(view);
    const double i_guided = rates.gamma_guided() * obs.jpjm;
    const double i_rad = rates.gamma_rad() * obs.population;
    traj.times.push_back(t);
    traj.population.push_back(obs.population);
    traj.jpjm.push_back(obs.jpjm);
    traj.i_guided.push_back(i_guided);
    traj.i_rad.push_back(i_rad);
    traj.i_total.push_back(i_guided + i_rad);
  };

  Eigen::VectorXcd y = state.data;
  integrate_dopri5(deriv, y, config.rel_tol, config.abs_tol, config.max_step,
                   std::span<const double>(grid), on_sample);
  finalize_energies(traj);
  return traj;
}

/// Coupling-matrix entry point: accepts only ideal-string matrices, because
/// the block decomposition requires permutation symmetry.
inline Trajectory evolve_dicke(const CouplingMatrix& coupling, const InitialStateSpec& spec,
                               const IntegratorConfig& config) {
  if (!coupling.ideal_string()) {
    fail(Errc::non_permutation_invariant_coupling,
         "the block solver requires permutation symmetry, which only ideal-string "
         "couplings guarantee; build the coupling with ideal_string_matrix or use "
         "evolve_exact for general matrices");
  }
  return evolve_dicke(coupling.rates(), spec, coupling.n_atoms(), config);
}

}  // namespace guidedsr
