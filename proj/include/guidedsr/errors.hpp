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

#include <stdexcept>
#include <string>

namespace guidedsr {

/// Error condition identifiers, grouped by how callers should react:
/// input/validation problems, numerical failures during integration, and
/// file I/O failures.
enum class Errc {
  // input / validation
  negative_rate,
  zero_radiation_rate,
  invalid_atom_count,
  atom_count_out_of_range,
  atom_count_exceeds_cap,
  not_symmetric,
  not_positive_semidefinite,
  wrong_state_kind,
  invalid_angle,
  invalid_initial_population,
  negative_time,
  invalid_linewidth,
  empty_trajectory,
  non_monotonic_times,
  dimension_mismatch,
  missing_rates,
  non_permutation_invariant_coupling,
  convention_mismatch,
  invalid_range,
  invalid_config,
  invalid_geometry,
  rate_table_range,
  nonfinite_input,
  // numerical
  tolerance_failure,
  trace_drift,
  positivity_violation,
  // I/O
  rate_table_parse,
  io_failure,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::negative_rate: return "NegativeRate";
    case Errc::zero_radiation_rate: return "ZeroRadiationRate";
    case Errc::invalid_atom_count: return "InvalidAtomCount";
    case Errc::atom_count_out_of_range: return "AtomCountOutOfRange";
    case Errc::atom_count_exceeds_cap: return "AtomCountExceedsCap";
    case Errc::not_symmetric: return "NotSymmetric";
    case Errc::not_positive_semidefinite: return "NotPositiveSemidefinite";
    case Errc::wrong_state_kind: return "WrongKind";
    case Errc::invalid_angle: return "InvalidAngle";
    case Errc::invalid_initial_population: return "InvalidInitialPopulation";
    case Errc::negative_time: return "NegativeTime";
    case Errc::invalid_linewidth: return "InvalidLinewidth";
    case Errc::empty_trajectory: return "EmptyTrajectory";
    case Errc::non_monotonic_times: return "NonMonotonicTimes";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::missing_rates: return "MissingRates";
    case Errc::non_permutation_invariant_coupling: return "NonPermutationInvariantCoupling";
    case Errc::convention_mismatch: return "ConventionMismatch";
    case Errc::invalid_range: return "RangeError";
    case Errc::invalid_config: return "InvalidConfig";
    case Errc::invalid_geometry: return "InvalidGeometry";
    case Errc::rate_table_range: return "RateTableRange";
    case Errc::nonfinite_input: return "NonFiniteInput";
    case Errc::tolerance_failure: return "ToleranceFailure";
    case Errc::trace_drift: return "TraceDrift";
    case Errc::positivity_violation: return "PositivityViolation";
    case Errc::rate_table_parse: return "RateTableParse";
    case Errc::io_failure: return "IoFailure";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline bool is_numerical_error(Errc c) {
  return c == Errc::tolerance_failure || c == Errc::trace_drift || c == Errc::positivity_violation;
}

inline bool is_io_error(Errc c) { return c == Errc::rate_table_parse || c == Errc::io_failure; }

}  // namespace guidedsr
