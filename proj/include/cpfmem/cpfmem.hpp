// Copyright 2026 The cpfmem Authors
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

#include "cpfmem/bath_kernel.hpp"
#include "cpfmem/channel_map.hpp"
#include "cpfmem/cpf_analytic.hpp"
#include "cpfmem/csv.hpp"
#include "cpfmem/dynamics.hpp"
#include "cpfmem/errors.hpp"
#include "cpfmem/experiment_sim.hpp"
#include "cpfmem/initial_state.hpp"
#include "cpfmem/propagator.hpp"
#include "cpfmem/run_config.hpp"
#include "cpfmem/sweeps.hpp"
#include "cpfmem/version.hpp"
