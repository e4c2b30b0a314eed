// Copyright 2026 The guidedsr Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "guidedsr/io.hpp"
#include "support/matchers.hpp"

using namespace guidedsr;

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("full-precision formatting round-trips every double") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, 2.5e17, 0.0, -0.26,
                   0.96082779009608276, 27.060000000000002}) {
    const std::string s = format_full(x);
    CHECK(std::strtod(s.c_str(), nullptr) == x);
  }
}

TEST_CASE("trajectory CSV uses the fixed header and full precision") {
  Trajectory traj;
  traj.n_atoms = 2;
  traj.times = {0.0, 0.5};
  traj.population = {1.0, 0.25};
  traj.jpjm = {2.0, 0.5};
  traj.i_guided = {0.52, 0.13};
  traj.i_rad = {1.06, 0.265};
  traj.i_total = {1.58, 0.395};

  const auto path = std::filesystem::temp_directory_path() / "guidedsr_traj.csv";
  write_trajectory_csv(path, traj);
  const std::string body = slurp(path);
  CHECK(body ==
        "t_tau0,P,JpJm,i_guided_I0,i_rad_I0,i_total_I0\n"
        "0,1,2,0.52000000000000002,1.0600000000000001,1.5800000000000001\n"
        "0.5,0.25,0.5,0.13,0.26500000000000001,0.39500000000000002\n");
  std::filesystem::remove(path);
}

TEST_CASE("sweep CSV pairs atom numbers with guided fractions") {
  const auto path = std::filesystem::temp_directory_path() / "guidedsr_sweep.csv";
  write_sweep_csv(path, {{1, 0.16455696202531644}, {2, 0.5}});
  CHECK(slurp(path) ==
        "n,f_guided\n"
        "1,0.16455696202531644\n"
        "2,0.5\n");
  std::filesystem::remove(path);
}

TEST_CASE("unwritable paths raise io failures") {
  CHECK_THROWS_MATCHES(write_sweep_csv("/no/such/dir/out.csv", {{1, 0.5}}),
                       Error, ErrorCodeIs(Errc::io_failure));
  CHECK_THROWS_MATCHES(
      write_trajectory_csv("/no/such/dir/out.csv", Trajectory{}), Error,
      ErrorCodeIs(Errc::io_failure));
}
