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
#include <bit>
#include <cmath>
#include <complex>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "guidedsr/errors.hpp"
#include "guidedsr/initial_state.hpp"
#include "guidedsr/ode.hpp"
#include "guidedsr/rates.hpp"
#include "guidedsr/trajectory.hpp"

namespace guidedsr {

/// Default atom cap for the brute-force solver: a 2^10 x 2^10 complex
/// density matrix is ~16 MiB and integrates in minutes.
inline constexpr int kDefaultExactAtomCap = 10;

inline std::string exact_memory_estimate(int n) {
  const double entries = std::pow(4.0, n);
  const double mib = entries * 16.0 / (1024.0 * 1024.0);
  char buf[128];
  std::snprintf(buf, sizeof(buf), "4^%d = %.4g complex entries, about %.4g MiB", n, entries, mib);
  return buf;
}

/// Full density matrix on the 2^n computational product basis. Bit j of a
/// basis index encodes atom j (1 = excited).
struct DensityMatrix {
  int n_atoms = 0;
  Eigen::MatrixXcd entries;

  Eigen::Index dim() const noexcept { return entries.rows(); }

  /// Checks Hermiticity, unit trace, and positive semidefiniteness.
  void validate(double herm_tol = 1e-12, double trace_tol = 1e-10,
                double eig_tol = 1e-8) const {
    if (entries.rows() != entries.cols() ||
        entries.rows() != (Eigen::Index(1) << n_atoms)) {
      fail(Errc::dimension_mismatch, "density matrix must be 2^n x 2^n");
    }
    const double herm = (entries - entries.adjoint()).cwiseAbs().maxCoeff();
    if (herm > herm_tol) {
      fail(Errc::not_symmetric,
           "density matrix is not Hermitian within tolerance: deviation " + std::to_string(herm));
    }
    const std::complex<double> tr = entries.trace();
    if (std::abs(tr - 1.0) > trace_tol) {
      fail(Errc::trace_drift, "density matrix trace deviates from 1 by " +
                                  std::to_string(std::abs(tr - 1.0)));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(entries, Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < -eig_tol) {
      fail(Errc::positivity_violation,
           "density matrix has negative eigenvalue " + std::to_string(min_eig));
    }
  }
};

/// Materializes an initial-state spec as a pure-state density matrix.
inline DensityMatrix build_density_matrix(const InitialStateSpec& spec, int n,
                                          int cap = kDefaultExactAtomCap) {
  if (n < 1) {
    fail(Errc::invalid_atom_count, "atom count must be >= 1, got " + std::to_string(n));
  }
  if (n > cap) {
    fail(Errc::atom_count_exceeds_cap,
         "n = " + std::to_string(n) + " exceeds the exact-solver cap " + std::to_string(cap) +
             "; the density matrix would need " + exact_memory_estimate(n) +
             " (raise the cap explicitly to accept that)");
  }
  const Eigen::Index dim = Eigen::Index(1) << n;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  if (spec.kind() == StateKind::symmetric_one_excitation) {
    const double amp = 1.0 / std::sqrt(static_cast<double>(n));
    for (int j = 0; j < n; ++j) psi[Eigen::Index(1) << j] = amp;
  } else {
    const double c = std::cos(spec.theta() / 2.0);
    const double s = std::sin(spec.theta() / 2.0);
    const std::complex<double> g = std::polar(s, spec.phi());
    // Amplitude depends only on the excitation count: c^k * (s e^{i phi})^(n-k).
    // Powers by repeated multiplication; complex std::pow would turn the
    // fully polarized angles (0^0) into NaN.
    std::vector<std::complex<double>> by_count(static_cast<std::size_t>(n) + 1);
    std::vector<double> cpow(static_cast<std::size_t>(n) + 1, 1.0);
    std::vector<std::complex<double>> gpow(static_cast<std::size_t>(n) + 1, 1.0);
    for (int k = 1; k <= n; ++k) {
      cpow[static_cast<std::size_t>(k)] = cpow[static_cast<std::size_t>(k - 1)] * c;
      gpow[static_cast<std::size_t>(k)] = gpow[static_cast<std::size_t>(k - 1)] * g;
    }
    for (int k = 0; k <= n; ++k) {
      by_count[static_cast<std::size_t>(k)] =
          cpow[static_cast<std::size_t>(k)] * gpow[static_cast<std::size_t>(n - k)];
    }
    for (Eigen::Index x = 0; x < dim; ++x) {
      psi[x] = by_count[static_cast<std::size_t>(
          std::popcount(static_cast<unsigned long long>(x)))];
    }
  }
  DensityMatrix rho;
  rho.n_atoms = n;
  rho.entries = psi * psi.adjoint();
  return rho;
}

namespace detail {

using Cd = std::complex<double>;
using MatC = Eigen::MatrixXcd;

// All kernels below act by bit-index arithmetic; no 2^n x 2^n operator
// matrices are ever materialized. Loops run over contiguous column slices
// (column-major storage); basis index bit j selects atom j. Kernels are
// templated so Eigen Maps over integrator state pass through without copies.

// out += scale * (J- in): rows gain from the row with one more excitation.
template <class MIn, class MOut>
inline void add_lower_left(int n, const MIn& in, MOut& out, double scale) {
  const Eigen::Index dim = in.rows();
  for (Eigen::Index c = 0; c < dim; ++c) {
    const Cd* src = in.col(c).data();
    Cd* dst = out.col(c).data();
    for (int j = 0; j < n; ++j) {
      const Eigen::Index b = Eigen::Index(1) << j;
      for (Eigen::Index hi = 0; hi < dim; hi += 2 * b) {
        for (Eigen::Index lo = 0; lo < b; ++lo) {
          dst[hi + lo] += scale * src[hi + lo + b];
        }
      }
    }
  }
}

// out += scale * (J+ in): rows gain from the row with one less excitation.
template <class MIn, class MOut>
inline void add_raise_left(int n, const MIn& in, MOut& out, double scale) {
  const Eigen::Index dim = in.rows();
  for (Eigen::Index c = 0; c < dim; ++c) {
    const Cd* src = in.col(c).data();
    Cd* dst = out.col(c).data();
    for (int j = 0; j < n; ++j) {
      const Eigen::Index b = Eigen::Index(1) << j;
      for (Eigen::Index hi = 0; hi < dim; hi += 2 * b) {
        for (Eigen::Index lo = 0; lo < b; ++lo) {
          dst[hi + lo + b] += scale * src[hi + lo];
        }
      }
    }
  }
}

// out += scale * (in J+): columns gain from the column with one more excitation.
template <class MIn, class MOut>
inline void add_raise_right(int n, const MIn& in, MOut& out, double scale) {
  const Eigen::Index dim = in.rows();
  for (int j = 0; j < n; ++j) {
    const Eigen::Index b = Eigen::Index(1) << j;
    for (Eigen::Index hi = 0; hi < dim; hi += 2 * b) {
      for (Eigen::Index lo = 0; lo < b; ++lo) {
        out.col(hi + lo) += scale * in.col(hi + lo + b);
      }
    }
  }
}

// out += scale * (in J-): columns gain from the column with one less excitation.
template <class MIn, class MOut>
inline void add_lower_right(int n, const MIn& in, MOut& out, double scale) {
  const Eigen::Index dim = in.rows();
  for (int j = 0; j < n; ++j) {
    const Eigen::Index b = Eigen::Index(1) << j;
    for (Eigen::Index hi = 0; hi < dim; hi += 2 * b) {
      for (Eigen::Index lo = 0; lo < b; ++lo) {
        out.col(hi + lo + b) += scale * in.col(hi + lo);
      }
    }
  }
}

// out += scale * sum_j sigma_j in sigma_j^dag (local quantum-jump feeding).
template <class MIn, class MOut>
inline void add_local_feed(int n, const MIn& in, MOut& out, double scale) {
  const Eigen::Index dim = in.rows();
  for (int j = 0; j < n; ++j) {
    const Eigen::Index b = Eigen::Index(1) << j;
    for (Eigen::Index chi = 0; chi < dim; chi += 2 * b) {
      for (Eigen::Index clo = 0; clo < b; ++clo) {
        const Cd* src = in.col(chi + clo + b).data();
        Cd* dst = out.col(chi + clo).data();
        for (Eigen::Index rhi = 0; rhi < dim; rhi += 2 * b) {
          for (Eigen::Index rlo = 0; rlo < b; ++rlo) {
            dst[rhi + rlo] += scale * src[rhi + rlo + b];
          }
        }
      }
    }
  }
}

// out += scale * (n_r + n_c) in(r, c) where n_x is the excitation count of x.
template <class MIn, class MOut>
inline void add_excitation_weight(const MIn& in, MOut& out, double scale) {
  const Eigen::Index dim = in.rows();
  for (Eigen::Index c = 0; c < dim; ++c) {
    const double pc = static_cast<double>(std::popcount(static_cast<unsigned long long>(c)));
    const Cd* src = in.col(c).data();
    Cd* dst = out.col(c).data();
    for (Eigen::Index r = 0; r < dim; ++r) {
      const double pr = static_cast<double>(std::popcount(static_cast<unsigned long long>(r)));
      dst[r] += scale * (pr + pc) * src[r];
    }
  }
}

struct ExactScratch {
  MatC w;
  void resize(Eigen::Index dim) {
    if (w.rows() != dim) w.resize(dim, dim);
  }
};

// Ideal-string split: gamma_g D[J-] + gamma_r sum_j D[sigma_j],
// D[A]rho = A rho A^dag - (1/2){A^dag A, rho}. Cost O(n 4^n).
template <class MIn, class MOut>
inline void lindblad_apply_ideal(double gamma_g, double gamma_r, int n, const MIn& rho,
                                 MOut& out, ExactScratch& scratch) {
  const Eigen::Index dim = rho.rows();
  scratch.resize(dim);
  out.setZero();
  if (gamma_g != 0.0) {
    scratch.w.setZero();
    add_lower_left(n, rho, scratch.w, 1.0);             // w = J- rho
    add_raise_right(n, scratch.w, out, gamma_g);        // + g * J- rho J+
    add_raise_left(n, scratch.w, out, -0.5 * gamma_g);  // - g/2 * J+ J- rho
    scratch.w.setZero();
    add_raise_right(n, rho, scratch.w, 1.0);            // w = rho J+
    add_lower_right(n, scratch.w, out, -0.5 * gamma_g); // - g/2 * rho J+ J-
  }
  if (gamma_r != 0.0) {
    add_local_feed(n, rho, out, gamma_r);
    add_excitation_weight(rho, out, -0.5 * gamma_r);
  }
}

// Naive double sum over atom pairs for a general coupling matrix gamma_ij.
// Cost O(n^2 4^n); the ground truth the split form is tested against.
template <class MIn, class MOut>
inline void lindblad_apply_naive(const Eigen::MatrixXd& gamma, int n, const MIn& rho,
                                 MOut& out) {
  const Eigen::Index dim = rho.rows();
  out.setZero();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double g = gamma(i, j);
      if (g == 0.0) continue;
      const Eigen::Index bi = Eigen::Index(1) << i;
      const Eigen::Index bj = Eigen::Index(1) << j;
      // + g * sigma_j rho sigma_i^dag
      for (Eigen::Index c = 0; c < dim; ++c) {
        if (c & bi) continue;
        const Cd* src = rho.col(c + bi).data();
        Cd* dst = out.col(c).data();
        for (Eigen::Index r = 0; r < dim; ++r) {
          if (!(r & bj)) dst[r] += g * src[r + bj];
        }
      }
      if (i == j) {
        // - g/2 {sigma_i^dag sigma_i, rho}
        for (Eigen::Index c = 0; c < dim; ++c) {
          const Cd* src = rho.col(c).data();
          Cd* dst = out.col(c).data();
          for (Eigen::Index r = 0; r < dim; ++r) {
            if (r & bi) dst[r] -= 0.5 * g * src[r];
          }
        }
        for (Eigen::Index c = 0; c < dim; ++c) {
          if (c & bi) out.col(c) -= 0.5 * g * rho.col(c);
        }
      } else {
        // - g/2 sigma_i^dag sigma_j rho : bit i set, bit j clear in the row
        for (Eigen::Index c = 0; c < dim; ++c) {
          const Cd* src = rho.col(c).data();
          Cd* dst = out.col(c).data();
          for (Eigen::Index r = 0; r < dim; ++r) {
            if ((r & bi) && !(r & bj)) dst[r] -= 0.5 * g * src[r - bi + bj];
          }
        }
        // - g/2 rho sigma_i^dag sigma_j : bit j set, bit i clear in the column
        for (Eigen::Index c = 0; c < dim; ++c) {
          if ((c & bj) && !(c & bi)) out.col(c) -= 0.5 * g * rho.col(c - bj + bi);
        }
      }
    }
  }
}

}  // namespace detail

/// Pairwise correlations C(i, j) = Re tr(rho sigma_i^dag sigma_j). The
/// diagonal holds per-atom excited populations, so P = trace and
/// <J+J-> = full sum.
template <class Derived>
inline Eigen::MatrixXd correlation_matrix(int n, const Eigen::MatrixBase<Derived>& rho) {
  const Eigen::Index dim = rho.rows();
  Eigen::MatrixXd corr = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const Eigen::Index bi = Eigen::Index(1) << i;
    for (int j = 0; j < n; ++j) {
      const Eigen::Index bj = Eigen::Index(1) << j;
      double acc = 0.0;
      if (i == j) {
        for (Eigen::Index c = 0; c < dim; ++c) {
          if (c & bi) acc += rho(c, c).real();
        }
      } else {
        for (Eigen::Index c = 0; c < dim; ++c) {
          if ((c & bj) && !(c & bi)) acc += rho(c, c - bj + bi).real();
        }
      }
      corr(i, j) = acc;
    }
  }
  return corr;
}

/// Right-hand side of the master equation
/// d rho/dt = (1/2) sum_ij gamma_ij (2 sigma_j rho sigma_i^dag
///            - sigma_i^dag sigma_j rho - rho sigma_i^dag sigma_j).
/// Ideal-string couplings dispatch to the O(n 4^n) collective split;
/// general matrices take the O(n^2 4^n) double sum.
inline DensityMatrix lindblad_derivative(const DensityMatrix& rho,
                                         const CouplingMatrix& coupling) {
  if (coupling.n_atoms() != rho.n_atoms) {
    fail(Errc::dimension_mismatch,
         "coupling is for " + std::to_string(coupling.n_atoms()) + " atoms but state has " +
             std::to_string(rho.n_atoms));
  }
  DensityMatrix out;
  out.n_atoms = rho.n_atoms;
  out.entries.resize(rho.entries.rows(), rho.entries.cols());
  if (coupling.ideal_string()) {
    detail::ExactScratch scratch;
    detail::lindblad_apply_ideal(coupling.rates().gamma_guided(), coupling.rates().gamma_rad(),
                                 rho.n_atoms, rho.entries, out.entries, scratch);
  } else {
    detail::lindblad_apply_naive(coupling.entries(), rho.n_atoms, rho.entries, out.entries);
  }
  return out;
}

/// Brute-force integration of the master equation on the full 2^n space.
/// Trace drift and positivity violations along the trajectory are failures,
/// never silently corrected. The guided/radiation intensity split needs
/// per-atom rates on the coupling (MissingRates otherwise).
inline Trajectory evolve_exact(const CouplingMatrix& coupling, const InitialStateSpec& spec,
                               const IntegratorConfig& config, int cap = kDefaultExactAtomCap) {
  config.validate();
  const int n = coupling.n_atoms();
  const DecayRates rates = coupling.rates();
  DensityMatrix rho0 = build_density_matrix(spec, n, cap);
  const Eigen::Index dim = rho0.dim();
  const bool ideal = coupling.ideal_string();
  const Eigen::MatrixXd gamma = coupling.entries();

  detail::ExactScratch scratch;
  auto deriv = [&](double, const Eigen::VectorXcd& y, Eigen::VectorXcd& dy) {
    const Eigen::Map<const detail::MatC> rho(y.data(), dim, dim);
    Eigen::Map<detail::MatC> out(dy.data(), dim, dim);
    if (ideal) {
      detail::lindblad_apply_ideal(rates.gamma_guided(), rates.gamma_rad(), n, rho, out, scratch);
    } else {
      detail::lindblad_apply_naive(gamma, n, rho, out);
    }
  };

  const std::vector<double> grid = config.sample_grid();
  const std::size_t s = grid.size();
  Trajectory traj;
  traj.n_atoms = n;
  traj.times.reserve(s);
  traj.population.reserve(s);
  traj.jpjm.reserve(s);
  traj.i_guided.reserve(s);
  traj.i_rad.reserve(s);
  traj.i_total.reserve(s);

  // Full eigenvalue positivity checks are O(dim^3): run them at every sample
  // for small systems, on a spread of ~9 samples otherwise.
  const bool check_all = dim <= 128;
  const std::size_t stride = std::max<std::size_t>(1, (s - 1) / 8);

  auto on_sample = [&](std::size_t idx, double t, const Eigen::VectorXcd& y) {
    const Eigen::Map<const detail::MatC> rho(y.data(), dim, dim);
    const std::complex<double> tr = rho.trace();
    if (std::abs(tr - 1.0) > 1e-6) {
      fail(Errc::trace_drift, "trace drifted to |tr - 1| = " + std::to_string(std::abs(tr - 1.0)) +
                                  " at t = " + std::to_string(t));
    }
    if (check_all || idx % stride == 0 || idx == s - 1) {
      const detail::MatC herm = 0.5 * (rho + rho.adjoint());
      Eigen::SelfAdjointEigenSolver<detail::MatC> es(herm, Eigen::EigenvaluesOnly);
      const double min_eig = es.eigenvalues().minCoeff();
      if (min_eig < -1e-6) {
        fail(Errc::positivity_violation, "negative eigenvalue " + std::to_string(min_eig) +
                                             " at t = " + std::to_string(t));
      }
    }
    const Eigen::MatrixXd corr = correlation_matrix(n, rho);
    const double population = corr.trace();
    const double jpjm = corr.sum();
    const double i_guided = rates.gamma_guided() * jpjm;
    double i_total;
    if (ideal) {
      i_total = i_guided + rates.gamma_rad() * population;
    } else {
      i_total = gamma.cwiseProduct(corr).sum();
    }
    traj.times.push_back(t);
    traj.population.push_back(population);
    traj.jpjm.push_back(jpjm);
    traj.i_guided.push_back(i_guided);
    traj.i_rad.push_back(i_total - i_guided);
    traj.i_total.push_back(i_total);
  };

  Eigen::VectorXcd y = Eigen::Map<const Eigen::VectorXcd>(rho0.entries.data(), dim * dim);
  integrate_dopri5(deriv, y, config.rel_tol, config.abs_tol, config.max_step,
                   std::span<const double>(grid), on_sample);
  finalize_energies(traj);
  return traj;
}

}  // namespace guidedsr
