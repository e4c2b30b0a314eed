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

#include <cstddef>
#include <vector>

#include "guidedsr/errors.hpp"

namespace guidedsr {

/// Time series of the collective observables. Units: times in tau0 = 1/gamma0,
/// population dimensionless, intensities in I0 = hbar omega0 gamma0, energies
/// in hbar omega0.
struct Trajectory {
  int n_atoms = 0;
  std::vector<double> times;
  std::vector<double> population;  // P(t) = sum_j <sigma_j^dag sigma_j>
  std::vector<double> jpjm;        // <J+ J->(t)
  std::vector<double> i_guided;
  std::vector<double> i_rad;
  std::vector<double> i_total;

  // Filled by trajectory post-processing (finalize_energies).
  double u_guided = 0.0;
  double u_rad = 0.0;
  double truncation_bound = 0.0;  // P(t_final): energy still stored in the atoms

  std::size_t size() const noexcept { return times.size(); }
};

struct TrajectoryEnergies {
  double u_guided = 0.0;
  double u_rad = 0.0;
  double f_guided = 0.0;
  double truncation_bound = 0.0;
};

/// Integrates the guided and radiated intensities over the sampled grid with
/// the composite trapezoidal rule. f_guided = u_guided/(u_guided + u_rad),
/// defined as 0 when no energy was emitted. The identity
/// u_guided + u_rad = P(0) - P(t_final) holds within integration tolerance.
inline TrajectoryEnergies trajectory_energies(const Trajectory& traj) {
  if (traj.size() < 2) {
    fail(Errc::empty_trajectory,
         "trajectory energies need at least 2 samples, got " + std::to_string(traj.size()));
  }
  const std::size_t s = traj.size();
  if (traj.population.size() != s || traj.i_guided.size() != s || traj.i_rad.size() != s) {
    fail(Errc::dimension_mismatch, "trajectory columns have inconsistent lengths");
  }
  for (std::size_t k = 1; k < s; ++k) {
    if (!(traj.times[k] > traj.times[k - 1])) {
      fail(Errc::non_monotonic_times, "trajectory times must be strictly increasing");
    }
  }
  TrajectoryEnergies out;
  for (std::size_t k = 1; k < s; ++k) {
    const double h = traj.times[k] - traj.times[k - 1];
    out.u_guided += 0.5 * h * (traj.i_guided[k - 1] + traj.i_guided[k]);
    out.u_rad += 0.5 * h * (traj.i_rad[k - 1] + traj.i_rad[k]);
  }
  const double total = out.u_guided + out.u_rad;
  out.f_guided = total > 0.0 ? out.u_guided / total : 0.0;
  out.truncation_bound = traj.population.back();
  return out;
}

/// Stamps the integrated energies onto the trajectory itself.
inline void finalize_energies(Trajectory& traj) {
  const TrajectoryEnergies e = trajectory_energies(traj);
  traj.u_guided = e.u_guided;
  traj.u_rad = e.u_rad;
  traj.truncation_bound = e.truncation_bound;
}

}  // namespace guidedsr
