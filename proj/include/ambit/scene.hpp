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

// Physical parameters, scene geometry, mobile-user trajectory and the
// time/space/delay discretization shared by both simulation engines.

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

namespace ambit
{

using cplx = std::complex<double>;

inline constexpr double speed_of_light_m_per_s = 2.99792458e8;
inline constexpr double pi = 3.14159265358979323846;

// Radio constants. Built through the factories so that wavelength and wave
// number always agree with the carrier frequency.
struct ChannelParams
{
    double carrier_frequency_hz = 0.0;
    double wavelength_m = 0.0;
    double wave_number_per_m = 0.0;
    double path_loss_exponent = 0.0; // gamma
    double ref_gain_scatter = 0.0;   // G_s
    double ref_gain_los = 0.0;       // G_L
    double light_speed_m_per_s = speed_of_light_m_per_s;

    // G_s = G_L = (lambda / 4 pi)^2
    static ChannelParams isotropic(double carrier_frequency_hz, double path_loss_exponent);

    static ChannelParams with_gains(double carrier_frequency_hz, double path_loss_exponent,
                                    double ref_gain_scatter, double ref_gain_los);
};

// Straight-line motion along +x with uniform acceleration, starting at (0, y_i).
struct TrajectoryModel
{
    double initial_speed_m_per_s = 0.0;
    double acceleration_m_per_s2 = 0.0;
    double initial_y_m = 0.0;

    double speed(double t_s) const { return initial_speed_m_per_s + acceleration_m_per_s2 * t_s; }

    // Throws parameter_error if the speed turns negative anywhere in [0, t_max_s].
    void check_horizon(double t_max_s) const;
};

struct Point
{
    double x_m = 0.0;
    double y_m = 0.0;
};

struct DiscGeometry
{
    double disc_radius_m = 0.0;
    double scatterer_density_per_m2 = 0.0;
};

struct SceneGeometry
{
    double bs_x_m = 0.0;
    double bs_y_m = 0.0;
    double disc_radius_m = 0.0;
    double scatterer_density_per_m2 = 0.0;
    // Present when the disc was derived from multipath statistics.
    std::optional<double> mean_path_count;
    std::optional<double> path_arrival_rate_per_s;

    static SceneGeometry from_path_statistics(double bs_x_m, double bs_y_m, double mean_path_count,
                                              double path_arrival_rate_per_s,
                                              double initial_speed_m_per_s);

    static SceneGeometry from_disc(double bs_x_m, double bs_y_m, double disc_radius_m,
                                   double scatterer_density_per_m2);
};

// Disc radius and scatterer density that produce, on average, `mean_path_count`
// visible scatterers and `path_arrival_rate_per_s` new ones per second.
DiscGeometry derive_geometry(double mean_path_count, double path_arrival_rate_per_s,
                             double initial_speed_m_per_s);

double euclidean_distance(double x1, double y1, double x2, double y2);

// Exact position of the mobile user at time t.
Point mu_position(const TrajectoryModel &traj, double t_s);

// BS -> scatterer -> MU path length at time t.
double propagation_distance(const SceneGeometry &scene, const TrajectoryModel &traj, double t_s,
                            double scatterer_x_m, double scatterer_y_m);

// Positions x_k = x_{k-1} + v(k dt) dt, x_0 = 0, for k in [0, count). This is
// the stepped position sequence the velocity-warp stage samples at.
std::vector<double> stepped_positions(const TrajectoryModel &traj, double dt_s, std::size_t count);

struct GridInputs
{
    double dt_s = 1e-3;      // time step
    double dy_m = 0.25;      // lateral step
    double dtau_s = 1e-8;    // delay resolution
    double tau_max_s = 1e-6; // delay axis extent
    double t_max_s = 1.0;    // simulated horizon

    bool operator==(const GridInputs &) const = default;
};

struct GridSpec
{
    GridInputs inputs;
    std::int64_t m_half = 0;  // floor(R / dy)
    std::int64_t n_half = 0;  // floor(R / (v0 dt))
    std::int64_t p_count = 0; // floor(T_max / dt), output time steps
    std::int64_t d_count = 0; // floor(tau_max / dtau), delay bins
    double disc_radius_m = 0.0;

    // Rows of the constant-velocity backbone (positions v0 * j * dt) needed to
    // cover every stepped MU position.
    std::int64_t backbone_count = 0;
    // Field time columns [column_begin, column_end); column j sits at x = v0 * j * dt.
    std::int64_t column_begin = 0;
    std::int64_t column_end = 0;

    double dt_s() const { return inputs.dt_s; }
    double dy_m() const { return inputs.dy_m; }
    double dtau_s() const { return inputs.dtau_s; }
    std::int64_t lateral_count() const { return 2 * m_half + 1; }
    std::int64_t column_count() const { return column_end - column_begin; }
    double column_x_m(std::int64_t column, double initial_speed_m_per_s) const
    {
        return initial_speed_m_per_s * (static_cast<double>(column) * inputs.dt_s);
    }
};

// Discretizes the scene. Throws parameter_error on non-positive steps, a zero
// initial speed, a negative speed inside the horizon, or a delay axis too
// short for the longest achievable single-bounce path.
GridSpec make_grid(const GridInputs &inputs, const SceneGeometry &scene,
                   const TrajectoryModel &traj,
                   double light_speed_m_per_s = speed_of_light_m_per_s);

// Everything an engine run needs besides the random field.
struct Scenario
{
    ChannelParams radio;
    SceneGeometry geometry;
    TrajectoryModel trajectory;
    GridSpec grid;
    double volatility_std = 1.0;
};

} // namespace ambit
