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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "guidedsr/errors.hpp"
#include "guidedsr/trajectory.hpp"

namespace guidedsr {

/// Full-precision float formatting (17 significant digits) so identical runs
/// produce byte-identical files.
inline std::string format_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) {
    fail(Errc::io_failure, "cannot open for writing: " + path.string());
  }
  out << "t_tau0,P,JpJm,i_guided_I0,i_rad_I0,i_total_I0\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out << format_full(traj.times[k]) << ',' << format_full(traj.population[k]) << ','
        << format_full(traj.jpjm[k]) << ',' << format_full(traj.i_guided[k]) << ','
        << format_full(traj.i_rad[k]) << ',' << format_full(traj.i_total[k]) << '\n';
  }
  if (!out) {
    fail(Errc::io_failure, "write failed: " + path.string());
  }
}

struct SweepRow {
  int n = 0;
  double f_guided = 0.0;
};

inline void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
  std::ofstream out(path);
  if (!out) {
    fail(Errc::io_failure, "cannot open for writing: " + path.string());
  }
  out << "n,f_guided\n";
  for (const SweepRow& row : rows) {
    out << row.n << ',' << format_full(row.f_guided) << '\n';
  }
  if (!out) {
    fail(Errc::io_failure, "write failed: " + path.string());
  }
}

}  // namespace guidedsr
