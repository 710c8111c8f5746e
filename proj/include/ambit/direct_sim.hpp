// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The ambit-channel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
#pragma once

// Reference engine: explicit single-bounce geometry for every visible
// scatterer at every time step.

#include "ambit/impulse_response.hpp"
#include "ambit/levy_field.hpp"
#include "ambit/scene.hpp"

namespace ambit
{

struct DirectOptions : EngineOptions
{
    double t0_s = 0.0; // time of the first output step
};

// At each step t_k the scatterers within R of the MU contribute
// sqrt(G_s) * weight * d^(-gamma/2) * exp(j k d) at delay bin floor(d / (c dtau)),
// with d the BS -> scatterer -> MU length. The LoS term is added when requested.
// Throws delay_overflow_error if a bin reaches D.
ImpulseResponseGrid simulate_direct(const ChannelParams &params, const SceneGeometry &scene,
                                    const TrajectoryModel &traj, const GridSpec &grid,
                                    const ScattererSet &scatterers, const DirectOptions &options = {});

} // namespace ambit
