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

// Umbrella header: collective spontaneous emission of a string of two-level
// atoms coupled to a nanofiber. Units throughout: rates in gamma0, time in
// tau0 = 1/gamma0, intensity in I0 = hbar omega0 gamma0, energy in
// hbar omega0.

#pragma once

#include "guidedsr/analytics.hpp"
#include "guidedsr/dicke.hpp"
#include "guidedsr/errors.hpp"
#include "guidedsr/exact.hpp"
#include "guidedsr/geometry.hpp"
#include "guidedsr/initial_state.hpp"
#include "guidedsr/io.hpp"
#include "guidedsr/ode.hpp"
#include "guidedsr/rates.hpp"
#include "guidedsr/trajectory.hpp"
