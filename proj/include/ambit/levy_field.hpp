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

// Poisson Levy basis sampled on the time-space grid, plus the scatterer set
// it implies. Both engines consume the same realization.

#include "ambit/scene.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace ambit
{

using CountMatrix = Eigen::Matrix<std::int32_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RealMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Rows are time columns (x = v0 * column * dt), columns are lateral indices
// (y = y_i + lateral * dy).
struct LevyFieldRealization
{
    CountMatrix increments;
    RealMatrix volatilities;
    double cell_area_m2 = 0.0;
    std::uint64_t seed = 0;
    std::int64_t column_begin = 0;
    std::int64_t lateral_begin = 0;

    std::int64_t column_count() const { return increments.rows(); }
    std::int64_t lateral_count() const { return increments.cols(); }

    std::int32_t increment(std::int64_t column, std::int64_t lateral) const
    {
        return increments(column - column_begin, lateral - lateral_begin);
    }
    double volatility(std::int64_t column, std::int64_t lateral) const
    {
        return volatilities(column - column_begin, lateral - lateral_begin);
    }
};

struct Scatterer
{
    double x_m = 0.0;
    double y_m = 0.0;
    std::int32_t count = 0;  // Poisson increment of the cell
    double volatility = 0.0; // Gaussian draw of the cell
    double weight = 0.0;     // count * volatility
    std::int64_t column = 0;
    std::int64_t lateral = 0;
};

// Sorted by x, then y.
using ScattererSet = std::vector<Scatterer>;

// Draws one Poisson count (mean density * cell area) and one zero-mean
// Gaussian volatility (std `volatility_std`) per grid cell. Every cell uses
// its own counter-based stream keyed on (seed, column, lateral), so the result
// depends only on the seed.
LevyFieldRealization sample_field(const GridSpec &grid, const SceneGeometry &scene,
                                  const TrajectoryModel &traj, std::uint64_t seed,
                                  double volatility_std = 1.0);

// One scatterer per nonzero cell, placed at the cell corner.
ScattererSet materialize_scatterers(const LevyFieldRealization &field, const GridSpec &grid,
                                    const TrajectoryModel &traj);

// Sum of counts of scatterers within `radius_m` of `center`.
std::int64_t count_in_disc(const ScattererSet &scatterers, Point center, double radius_m);

// Sum of counts of scatterers outside the disc at t = 0 that enter it during
// (0, t_end_s] as the MU advances.
std::int64_t count_fresh_arrivals(const ScattererSet &scatterers, const SceneGeometry &scene,
                                  const TrajectoryModel &traj, double t_end_s);

// CSV with header "x_m,y_m,weight".
void write_scatterers_csv(std::ostream &os, const ScattererSet &scatterers);

namespace detail
{
// Uniform variate in [0, 1) of draw `draw` of the stream (seed, column, lateral).
double cell_uniform(std::uint64_t seed, std::int64_t column, std::int64_t lateral,
                    std::uint32_t draw);
// Poisson variate by CDF inversion of the uniform `u`.
std::int32_t poisson_from_uniform(double mean, double u);
} // namespace detail

} // namespace ambit
