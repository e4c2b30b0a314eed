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

#include <string>
#include <vector>

#include "guidedsr/errors.hpp"

namespace guidedsr {

/// Fiber and trap geometry echoed verbatim into run outputs for provenance.
/// Drives no numerics: rates are inputs, not derived from mode functions.
struct GeometryMetadata {
  double fiber_radius_nm = 0.0;
  double core_index = 0.0;
  double clad_index = 0.0;
  double wavelength_nm = 0.0;
  double atom_surface_distance_nm = 0.0;
  /// Atom separations as integer multiples q_j of the guided-mode period.
  std::vector<int> spacing_multiples;

  void validate() const {
    if (fiber_radius_nm <= 0.0 || wavelength_nm <= 0.0 || atom_surface_distance_nm <= 0.0) {
      fail(Errc::invalid_geometry, "all geometry lengths must be positive");
    }
    if (core_index <= clad_index) {
      fail(Errc::invalid_geometry, "core index must exceed cladding index for a guiding fiber");
    }
    for (int q : spacing_multiples) {
      if (q < 1) {
        fail(Errc::invalid_geometry,
             "spacing multiples must be integers >= 1, got " + std::to_string(q));
      }
    }
  }
};

}  // namespace guidedsr
