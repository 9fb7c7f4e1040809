// Copyright 2026 The sagnac-parity Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "sagnac/analytic.hpp"
#include "sagnac/detector.hpp"
#include "sagnac/experiment.hpp"
#include "sagnac/fit.hpp"
#include "sagnac/fock_oracle.hpp"
#include "sagnac/interferometer.hpp"
#include "sagnac/metrics.hpp"
#include "sagnac/qfi.hpp"
#include "sagnac/rng.hpp"
