// Copyright 2026 The guidedsr Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include "guidedsr/geometry.hpp"
#include "guidedsr/trajectory.hpp"
#include "support/matchers.hpp"

using namespace guidedsr;
using Catch::Approx;

namespace {

Trajectory synthetic(std::vector<double> times, std::vector<double> ig,
                     std::vector<double> ir) {
  Trajectory traj;
  traj.n_atoms = 1;
  traj.times = std::move(times);
  traj.i_guided = std::move(ig);
  traj.i_rad = std::move(ir);
  traj.population.assign(traj.times.size(), 0.0);
  traj.jpjm.assign(traj.times.size(), 0.0);
  traj.i_total.resize(traj.times.size());
  for (std::size_t k = 0; k < traj.times.size(); ++k)
    traj.i_total[k] = traj.i_guided[k] + traj.i_rad[k];
  return traj;
}

}  // namespace

TEST_CASE("trapezoid energies and guided fraction on a synthetic trajectory") {
  const Trajectory traj = synthetic({0.0, 1.0, 2.0}, {1.0, 1.0, 1.0},
                                    {0.5, 0.5, 0.5});
  const TrajectoryEnergies e = trajectory_energies(traj);
  CHECK(e.u_guided == Approx(2.0).epsilon(1e-15));
  CHECK(e.u_rad == Approx(1.0).epsilon(1e-15));
  CHECK(e.f_guided == Approx(2.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("guided fraction is zero when no energy was emitted") {
  const Trajectory traj = synthetic({0.0, 1.0}, {0.0, 0.0}, {0.0, 0.0});
  const TrajectoryEnergies e = trajectory_energies(traj);
  CHECK(e.u_guided == 0.0);
  CHECK(e.f_guided == 0.0);
}

TEST_CASE("truncation bound reports the population left at the end") {
  Trajectory traj = synthetic({0.0, 1.0, 2.0}, {1.0, 0.5, 0.25},
                              {0.1, 0.05, 0.025});
  traj.population = {1.0, 0.4, 0.07};
  const TrajectoryEnergies e = trajectory_energies(traj);
  CHECK(e.truncation_bound == Approx(0.07));
}

TEST_CASE("energy accounting rejects malformed trajectories") {
  CHECK_THROWS_MATCHES(trajectory_energies(synthetic({0.0}, {1.0}, {1.0})),
                       Error, ErrorCodeIs(Errc::empty_trajectory));
  CHECK_THROWS_MATCHES(trajectory_energies(Trajectory{}), Error,
                       ErrorCodeIs(Errc::empty_trajectory));
  CHECK_THROWS_MATCHES(
      trajectory_energies(synthetic({0.0, 1.0, 0.5}, {1, 1, 1}, {1, 1, 1})),
      Error, ErrorCodeIs(Errc::non_monotonic_times));

  Trajectory ragged = synthetic({0.0, 1.0}, {1.0, 1.0}, {1.0, 1.0});
  ragged.i_rad.push_back(0.0);
  CHECK_THROWS_MATCHES(trajectory_energies(ragged), Error,
                       ErrorCodeIs(Errc::dimension_mismatch));
}

TEST_CASE("geometry metadata validates physical dimensions") {
  GeometryMetadata geo;
  geo.fiber_radius_nm = 200.0;
  geo.core_index = 1.45;
  geo.clad_index = 1.0;
  geo.wavelength_nm = 852.0;
  geo.atom_surface_distance_nm = 100.0;
  geo.spacing_multiples = {1, 1, 2};
  CHECK_NOTHROW(geo.validate());

  GeometryMetadata bad = geo;
  bad.fiber_radius_nm = 0.0;
  CHECK_THROWS_MATCHES(bad.validate(), Error,
                       ErrorCodeIs(Errc::invalid_geometry));

  bad = geo;
  bad.clad_index = 1.45;  // guiding needs core above clad
  CHECK_THROWS_MATCHES(bad.validate(), Error,
                       ErrorCodeIs(Errc::invalid_geometry));

  bad = geo;
  bad.spacing_multiples = {1, 0};
  CHECK_THROWS_MATCHES(bad.validate(), Error,
                       ErrorCodeIs(Errc::invalid_geometry));
}
