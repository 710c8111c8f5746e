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

// Common output of both engines and its export formats.

#include "ambit/scene.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace ambit
{

using ComplexMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Response
{
    impulse,             // complex amplitudes, paths sum coherently per bin
    power_delay_profile, // path powers |a|^2 summed per bin (real part only)
};

enum class AmbitSet
{
    disc,             // full disc of radius R around the MU
    causal_half_disc, // disc restricted to scatterers strictly behind the MU
};

struct EngineOptions
{
    bool include_los = false;
    Response response = Response::impulse;
    AmbitSet ambit_set = AmbitSet::disc;
};

// values(k, b): time step k in [0, P), delay bin b in [0, D).
struct ImpulseResponseGrid
{
    ComplexMatrix values;
    double dt_s = 0.0;
    double dtau_s = 0.0;
    double t0_s = 0.0;
    Response response = Response::impulse;

    std::int64_t steps() const { return values.rows(); }
    std::int64_t bins() const { return values.cols(); }
    double time_s(std::int64_t k) const { return t0_s + static_cast<double>(k) * dt_s; }
    double delay_s(std::int64_t b) const { return static_cast<double>(b) * dtau_s; }
    bool all_finite() const { return values.allFinite(); }
};

// Received power per time step with unit transmit power: sum over bins of
// |h|^2 for an impulse response, or of the stored path power for a power
// delay profile.
std::vector<double> received_power_trace(const ImpulseResponseGrid &h);

// CSV "time_s,delay_s,re,im". Only nonzero entries are listed unless
// `include_zeros` is set.
void write_grid_csv(std::ostream &os, const ImpulseResponseGrid &h, bool include_zeros = false);

// Column-major (time index fastest) little-endian float64 pairs (re, im).
void write_grid_binary(std::ostream &os, const ImpulseResponseGrid &h);
ImpulseResponseGrid read_grid_binary(std::istream &is, std::int64_t steps, std::int64_t bins,
                                     double dt_s, double dtau_s);

} // namespace ambit
