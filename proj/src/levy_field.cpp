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
#include "ambit/levy_field.hpp"

#include "ambit/error.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "csv_format.hpp"

namespace ambit
{
namespace detail
{
namespace
{

std::uint64_t splitmix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

} // namespace

double cell_uniform(std::uint64_t seed, std::int64_t column, std::int64_t lateral,
                    std::uint32_t draw)
{
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ static_cast<std::uint64_t>(column));
    h = splitmix64(h ^ (static_cast<std::uint64_t>(lateral) * 0xd1b54a32d192ed03ULL));
    h = splitmix64(h ^ draw);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

std::int32_t poisson_from_uniform(double mean, double u)
{
    if (mean <= 0.0)
        return 0;
    if (mean > 500.0)
        throw parameter_error("Poisson cell mean " + std::to_string(mean) +
                              " too large; refine dt_s or dy_m");
    double p = std::exp(-mean);
    double cdf = p;
    std::int32_t n = 0;
    while (u >= cdf && p > 0.0)
    {
        ++n;
        p *= mean / n;
        cdf += p;
    }
    return n;
}

} // namespace detail

LevyFieldRealization sample_field(const GridSpec &grid, const SceneGeometry &scene,
                                  const TrajectoryModel &traj, std::uint64_t seed,
                                  double volatility_std)
{
    const double area = traj.initial_speed_m_per_s * grid.dt_s() * grid.dy_m();
    if (!(area > 0.0))
        throw parameter_error("cell area v0 * dt * dy must be positive");
    if (!(volatility_std >= 0.0))
        throw parameter_error("volatility_std must be non-negative");

    LevyFieldRealization field;
    field.cell_area_m2 = area;
    field.seed = seed;
    field.column_begin = grid.column_begin;
    field.lateral_begin = -grid.m_half;
    field.increments = CountMatrix::Zero(grid.column_count(), grid.lateral_count());
    field.volatilities = RealMatrix::Zero(grid.column_count(), grid.lateral_count());

    const double mean = scene.scatterer_density_per_m2 * area;
    for (std::int64_t r = 0; r < field.increments.rows(); ++r)
    {
        const std::int64_t column = field.column_begin + r;
        for (std::int64_t c = 0; c < field.increments.cols(); ++c)
        {
            const std::int64_t lateral = field.lateral_begin + c;
            field.increments(r, c) =
                detail::poisson_from_uniform(mean, detail::cell_uniform(seed, column, lateral, 0));
            // Box-Muller on two further draws of the same cell stream.
            const double u1 = 1.0 - detail::cell_uniform(seed, column, lateral, 1);
            const double u2 = detail::cell_uniform(seed, column, lateral, 2);
            field.volatilities(r, c) =
                volatility_std * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * pi * u2);
        }
    }
    return field;
}

ScattererSet materialize_scatterers(const LevyFieldRealization &field, const GridSpec &grid,
                                    const TrajectoryModel &traj)
{
    if (field.column_count() != grid.column_count() ||
        field.lateral_count() != grid.lateral_count() || field.column_begin != grid.column_begin ||
        field.lateral_begin != -grid.m_half)
        throw contract_error("field shape does not match the grid");

    ScattererSet out;
    for (std::int64_t r = 0; r < field.increments.rows(); ++r)
    {
        const std::int64_t column = field.column_begin + r;
        for (std::int64_t c = 0; c < field.increments.cols(); ++c)
        {
            const std::int32_t count = field.increments(r, c);
            if (count == 0)
                continue;
            const std::int64_t lateral = field.lateral_begin + c;
            Scatterer s;
            s.x_m = grid.column_x_m(column, traj.initial_speed_m_per_s);
            s.y_m = traj.initial_y_m + static_cast<double>(lateral) * grid.dy_m();
            s.count = count;
            s.volatility = field.volatilities(r, c);
            s.weight = static_cast<double>(count) * s.volatility;
            s.column = column;
            s.lateral = lateral;
            out.push_back(s);
        }
    }
    return out;
}

std::int64_t count_in_disc(const ScattererSet &scatterers, Point center, double radius_m)
{
    std::int64_t total = 0;
    for (const auto &s : scatterers)
        if (euclidean_distance(center.x_m, center.y_m, s.x_m, s.y_m) <= radius_m)
            total += s.count;
    return total;
}

std::int64_t count_fresh_arrivals(const ScattererSet &scatterers, const SceneGeometry &scene,
                                  const TrajectoryModel &traj, double t_end_s)
{
    const double radius = scene.disc_radius_m;
    const Point start = mu_position(traj, 0.0);
    const double x_end = mu_position(traj, t_end_s).x_m;
    std::int64_t total = 0;
    for (const auto &s : scatterers)
    {
        const double dy = s.y_m - start.y_m;
        if (std::abs(dy) > radius)
            continue;
        if (euclidean_distance(start.x_m, start.y_m, s.x_m, s.y_m) <= radius)
            continue;
        // The MU enters the scatterer's visibility chord at x_s - half_chord.
        const double entry_x = s.x_m - std::sqrt(radius * radius - dy * dy);
        if (entry_x > start.x_m && entry_x <= x_end)
            total += s.count;
    }
    return total;
}

void write_scatterers_csv(std::ostream &os, const ScattererSet &scatterers)
{
    os << "x_m,y_m,weight\n";
    for (const auto &s : scatterers)
        os << csv::num(s.x_m) << ',' << csv::num(s.y_m) << ',' << csv::num(s.weight) << '\n';
}

} // namespace ambit
