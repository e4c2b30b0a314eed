// Copyright 2026 The guidedsr Authors
// SPDX-License-Identifier: Apache-2.0
//
// Test-only oracles. Everything here is built independently of the library
// internals it checks: the dense permutation-symmetric basis is constructed
// by sequential angular-momentum coupling, one atom at a time, so it shares
// no code with the block enumeration or the block-space generator.

#pragma once

#include <complex>
#include <map>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "guidedsr/dicke.hpp"
#include "guidedsr/errors.hpp"

namespace oracles {

// Dense symmetry-adapted basis of the n-qubit space. copies[twoj] holds one
// (2^n) x (twoj+1) matrix per degeneracy copy; column r of a copy is the
// state |j, m_r> with twom = twoj - 2r. Atom k occupies bit k, spin-up = 1.
struct DenseDickeBasis {
  int n_atoms = 0;
  std::map<int, std::vector<Eigen::MatrixXcd>, std::greater<int>> copies;
};

// Couples one more spin-1/2 to every copy in `basis` using the standard
// Clebsch-Gordan coefficients for j1 x 1/2, written in doubled quantum
// numbers. Each copy of spin j1 yields one copy of j1+1/2 and, when j1 > 0,
// one copy of j1-1/2.
inline DenseDickeBasis couple_one_more(const DenseDickeBasis& basis) {
  const int k = basis.n_atoms;          // bit index of the new atom
  const Eigen::Index old_dim = Eigen::Index{1} << k;
  DenseDickeBasis out;
  out.n_atoms = k + 1;
  for (const auto& [twoj1, list] : basis.copies) {
    for (const Eigen::MatrixXcd& m1 : list) {
      // |j1+1/2, m> = +sqrt((j1+m+1/2)/(2j1+1)) |j1, m-1/2>|up>
      //              +sqrt((j1-m+1/2)/(2j1+1)) |j1, m+1/2>|down>
      {
        const int twoj = twoj1 + 1;
        Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(2 * old_dim, twoj + 1);
        for (int r = 0; r <= twoj; ++r) {
          const int twom = twoj - 2 * r;
          const double ca = std::sqrt(double(twoj1 + twom + 1) /
                                      double(2 * (twoj1 + 1)));
          const double cb = std::sqrt(double(twoj1 - twom + 1) /
                                      double(2 * (twoj1 + 1)));
          const int r1a = (twoj1 - (twom - 1)) / 2;  // m - 1/2 in the old copy
          const int r1b = (twoj1 - (twom + 1)) / 2;  // m + 1/2 in the old copy
          if (r1a >= 0 && r1a <= twoj1)
            mat.col(r).tail(old_dim) += ca * m1.col(r1a);
          if (r1b >= 0 && r1b <= twoj1)
            mat.col(r).head(old_dim) += cb * m1.col(r1b);
        }
        out.copies[twoj].push_back(std::move(mat));
      }
      // |j1-1/2, m> = -sqrt((j1-m+1/2)/(2j1+1)) |j1, m-1/2>|up>
      //              +sqrt((j1+m+1/2)/(2j1+1)) |j1, m+1/2>|down>
      if (twoj1 >= 1) {
        const int twoj = twoj1 - 1;
        Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(2 * old_dim, twoj + 1);
        for (int r = 0; r <= twoj; ++r) {
          const int twom = twoj - 2 * r;
          const double ca = -std::sqrt(double(twoj1 - twom + 1) /
                                       double(2 * (twoj1 + 1)));
          const double cb = std::sqrt(double(twoj1 + twom + 1) /
                                      double(2 * (twoj1 + 1)));
          const int r1a = (twoj1 - (twom - 1)) / 2;
          const int r1b = (twoj1 - (twom + 1)) / 2;
          if (r1a >= 0 && r1a <= twoj1)
            mat.col(r).tail(old_dim) += ca * m1.col(r1a);
          if (r1b >= 0 && r1b <= twoj1)
            mat.col(r).head(old_dim) += cb * m1.col(r1b);
        }
        out.copies[twoj].push_back(std::move(mat));
      }
    }
  }
  return out;
}

inline DenseDickeBasis build_dense_basis(int n) {
  DenseDickeBasis basis;
  basis.n_atoms = 1;
  Eigen::MatrixXcd single = Eigen::MatrixXcd::Zero(2, 2);
  single(1, 0) = 1.0;  // |1/2, +1/2> = spin-up = bit set
  single(0, 1) = 1.0;  // |1/2, -1/2>
  basis.copies[1] = {single};
  for (int k = 2; k <= n; ++k) basis = couple_one_more(basis);
  return basis;
}

inline guidedsr::DickeState zero_state(const guidedsr::DickeSpace& space) {
  guidedsr::DickeState state;
  state.space = space;
  state.data = Eigen::VectorXcd::Zero(space.total_elements());
  return state;
}

// Expands a block-space state into the full 2^n density matrix. In the
// at_observables convention every degeneracy copy carries the same block.
inline Eigen::MatrixXcd dicke_to_dense(const guidedsr::DickeState& state,
                                       const DenseDickeBasis& basis) {
  const Eigen::Index dim = Eigen::Index{1} << state.space.n_atoms();
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
  for (std::size_t b = 0; b < state.space.blocks().size(); ++b) {
    const auto& block = state.space.blocks()[b];
    const auto body = state.block(b);
    for (const Eigen::MatrixXcd& v : basis.copies.at(block.twoj))
      rho += v * body * v.adjoint();
  }
  return rho;
}

// Projects a dense matrix back onto the block space by averaging the copy
// overlaps. Exact inverse of dicke_to_dense for permutation-invariant input.
inline guidedsr::DickeState dense_to_dicke(const Eigen::MatrixXcd& rho,
                                           const guidedsr::DickeSpace& space,
                                           const DenseDickeBasis& basis) {
  guidedsr::DickeState state = zero_state(space);
  for (std::size_t b = 0; b < space.blocks().size(); ++b) {
    const auto& block = space.blocks()[b];
    auto body = state.block(b);
    const auto& list = basis.copies.at(block.twoj);
    for (const Eigen::MatrixXcd& v : list)
      body += v.adjoint() * rho * v / double(list.size());
  }
  return state;
}

// Random Hermitian, positive-semidefinite, unit-trace matrix.
inline Eigen::MatrixXcd random_density(Eigen::Index dim, std::mt19937& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXcd a(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c)
    for (Eigen::Index r = 0; r < dim; ++r)
      a(r, c) = std::complex<double>(gauss(rng), gauss(rng));
  Eigen::MatrixXcd rho = a * a.adjoint();
  rho /= rho.trace().real();
  return rho;
}

// Random block-space state: Hermitian PSD blocks, weighted trace one.
inline guidedsr::DickeState random_dicke_state(const guidedsr::DickeSpace& space,
                                               std::mt19937& rng) {
  guidedsr::DickeState state = zero_state(space);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t b = 0; b < space.blocks().size(); ++b) {
    auto body = state.block(b);
    const Eigen::Index dim = body.rows();
    Eigen::MatrixXcd a(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c)
      for (Eigen::Index r = 0; r < dim; ++r)
        a(r, c) = std::complex<double>(gauss(rng), gauss(rng));
    body = a * a.adjoint();
  }
  state.data /= state.weighted_trace().real();
  return state;
}

}  // namespace oracles
