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

// Fast engine. The single-bounce kernel is split into a shift-invariant
// MU-leg factor (unit-modulus phase and delay impulse, one matrix per lateral
// index) and a BS-leg factor carrying path loss, volatility and the Levy
// increment. Their 2D convolution over (time, delay), summed over lateral
// indices, gives the response on a constant-velocity backbone, which is then
// resampled at the true MU positions.

#include "ambit/impulse_response.hpp"
#include "ambit/levy_field.hpp"
#include "ambit/scene.hpp"

#include <cstdint>
#include <vector>

namespace ambit
{

// Matrix with at most one nonzero (a delay impulse) per row.
struct ImpulseRows
{
    struct Row
    {
        std::int32_t bin = -1; // -1 marks an empty row
        cplx value{};
    };

    std::vector<Row> rows;
    std::int64_t bin_count = 0;

    std::int64_t row_count() const { return static_cast<std::int64_t>(rows.size()); }
    ComplexMatrix to_dense() const;
};

// MU-leg factor for lateral index `lateral`. Row a corresponds to the
// scatterer-minus-MU column offset j = a - N, j in [-N, N]; its entry is
// exp(j k d1) at bin floor(d1 / (c dtau)) with d1 = |(j v0 dt, lateral dy)|,
// present only where the offset lies in the ambit set.
ImpulseRows build_xmat(const ChannelParams &params, const GridSpec &grid,
                       const TrajectoryModel &traj, std::int64_t lateral,
                       AmbitSet ambit_set = AmbitSet::disc);

// BS-leg factor for lateral index `lateral`. Row b corresponds to field column
// grid.column_begin + b; its entry is sqrt(G_s) d2^(-gamma/2) exp(j k d2)
// * volatility * increment at bin floor(d2 / (c dtau)), d2 = |BS - cell corner|.
ImpulseRows build_ymat(const ChannelParams &params, const SceneGeometry &scene,
                       const GridSpec &grid, const TrajectoryModel &traj,
                       const LevyFieldRealization &field, std::int64_t lateral);

// Squared magnitudes, used for the power-delay-profile mode.
ImpulseRows squared_magnitude(const ImpulseRows &m);

// z += full 2D linear convolution of y with x reversed along rows.
// Shapes: z is (x.rows + y.rows - 1) x (x.cols + y.cols - 1).
void conv2d_fold_accumulate(const ComplexMatrix &x, const ComplexMatrix &y, ComplexMatrix &z);

// Same contract for impulse-row operands, with z of width 2 * bin_count - 1.
void conv2d_fold_accumulate(const ImpulseRows &x, const ImpulseRows &y, ComplexMatrix &z);

// Same contract computed with FFTs; y is split into blocks of `block_rows`
// rows whose partial convolutions are overlap-added into z.
void conv2d_fold_accumulate_fft(const ComplexMatrix &x, const ComplexMatrix &y, ComplexMatrix &z,
                                std::int64_t block_rows);

// Resamples backbone rows (row j at x = v0 j dt) at the stepped MU positions
// by linear interpolation and keeps the first grid.d_count delay columns.
// Throws horizon_error when a position falls outside the backbone.
ImpulseResponseGrid velocity_warp(const ComplexMatrix &backbone, const TrajectoryModel &traj,
                                  const GridSpec &grid, Response response = Response::impulse);

enum class ConvolutionMethod
{
    sparse,          // exact direct form over the impulse rows
    fft_overlap_add, // dense FFT blocks
};

struct AmbitTiming
{
    double build_s = 0.0;
    double convolve_s = 0.0;
    double warp_s = 0.0;
    double total_s() const { return build_s + convolve_s + warp_s; }
};

struct AmbitOptions : EngineOptions
{
    ConvolutionMethod method = ConvolutionMethod::sparse;
    std::int64_t fft_block_rows = 1024;
    AmbitTiming *timing = nullptr; // filled when set
};

ImpulseResponseGrid simulate_ambit(const ChannelParams &params, const SceneGeometry &scene,
                                   const TrajectoryModel &traj, const GridSpec &grid,
                                   const LevyFieldRealization &field,
                                   const AmbitOptions &options = {});

// Row of the accumulator holding backbone position `backbone_index`.
std::int64_t accumulator_row(const GridSpec &grid, std::int64_t backbone_index);

} // namespace ambit
