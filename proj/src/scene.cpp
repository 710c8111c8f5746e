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
#include "ambit/scene.hpp"

#include "ambit/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ambit
{
namespace
{

void require_positive(double value, const char *name)
{
    if (!(value > 0.0) || !std::isfinite(value))
        throw parameter_error(std::string(name) + " must be positive and finite, got " +
                              std::to_string(value));
}

// floor(a / b) of the real quotient; quotients within 1e-9 of an integer are
// treated as that integer so that e.g. 1.0 / 1e-3 gives 1000.
std::int64_t floor_ratio(double a, double b)
{
    const double q = a / b;
    const double r = std::nearbyint(q);
    if (std::abs(q - r) <= 1e-9 * std::max(1.0, std::abs(q)))
        return static_cast<std::int64_t>(r);
    return static_cast<std::int64_t>(std::floor(q));
}

} // namespace

ChannelParams ChannelParams::isotropic(double carrier_frequency_hz, double path_loss_exponent)
{
    require_positive(carrier_frequency_hz, "carrier_frequency_hz");
    const double wavelength = speed_of_light_m_per_s / carrier_frequency_hz;
    const double gain = std::pow(wavelength / (4.0 * pi), 2);
    return with_gains(carrier_frequency_hz, path_loss_exponent, gain, gain);
}

ChannelParams ChannelParams::with_gains(double carrier_frequency_hz, double path_loss_exponent,
                                        double ref_gain_scatter, double ref_gain_los)
{
    require_positive(carrier_frequency_hz, "carrier_frequency_hz");
    require_positive(path_loss_exponent, "path_loss_exponent");
    require_positive(ref_gain_scatter, "ref_gain_scatter");
    require_positive(ref_gain_los, "ref_gain_los");

    ChannelParams p;
    p.carrier_frequency_hz = carrier_frequency_hz;
    p.light_speed_m_per_s = speed_of_light_m_per_s;
    p.wavelength_m = p.light_speed_m_per_s / carrier_frequency_hz;
    p.wave_number_per_m = 2.0 * pi / p.wavelength_m;
    p.path_loss_exponent = path_loss_exponent;
    p.ref_gain_scatter = ref_gain_scatter;
    p.ref_gain_los = ref_gain_los;
    return p;
}

void TrajectoryModel::check_horizon(double t_max_s) const
{
    if (!(initial_speed_m_per_s >= 0.0))
        throw parameter_error("initial_speed_m_per_s must be non-negative");
    if (speed(t_max_s) < 0.0)
        throw parameter_error("speed becomes negative before t = " + std::to_string(t_max_s) +
                              " s (v0 + a t < 0)");
}

DiscGeometry derive_geometry(double mean_path_count, double path_arrival_rate_per_s,
                             double initial_speed_m_per_s)
{
    require_positive(mean_path_count, "mean_path_count");
    require_positive(path_arrival_rate_per_s, "path_arrival_rate_per_s");
    require_positive(initial_speed_m_per_s, "initial_speed_m_per_s");

    // Substituting lambda_s = R_s / (2 R v0) into N_s = lambda_s pi R^2 gives a
    // radius linear in N_s / R_s.
    DiscGeometry g;
    g.disc_radius_m = 2.0 * mean_path_count * initial_speed_m_per_s / (pi * path_arrival_rate_per_s);
    g.scatterer_density_per_m2 =
        path_arrival_rate_per_s / (2.0 * g.disc_radius_m * initial_speed_m_per_s);
    return g;
}

SceneGeometry SceneGeometry::from_path_statistics(double bs_x_m, double bs_y_m,
                                                  double mean_path_count,
                                                  double path_arrival_rate_per_s,
                                                  double initial_speed_m_per_s)
{
    const auto disc = derive_geometry(mean_path_count, path_arrival_rate_per_s, initial_speed_m_per_s);
    SceneGeometry s;
    s.bs_x_m = bs_x_m;
    s.bs_y_m = bs_y_m;
    s.disc_radius_m = disc.disc_radius_m;
    s.scatterer_density_per_m2 = disc.scatterer_density_per_m2;
    s.mean_path_count = mean_path_count;
    s.path_arrival_rate_per_s = path_arrival_rate_per_s;
    return s;
}

SceneGeometry SceneGeometry::from_disc(double bs_x_m, double bs_y_m, double disc_radius_m,
                                       double scatterer_density_per_m2)
{
    require_positive(disc_radius_m, "disc_radius_m");
    if (!(scatterer_density_per_m2 >= 0.0) || !std::isfinite(scatterer_density_per_m2))
        throw parameter_error("scatterer_density_per_m2 must be non-negative");
    SceneGeometry s;
    s.bs_x_m = bs_x_m;
    s.bs_y_m = bs_y_m;
    s.disc_radius_m = disc_radius_m;
    s.scatterer_density_per_m2 = scatterer_density_per_m2;
    return s;
}

double euclidean_distance(double x1, double y1, double x2, double y2)
{
    return std::hypot(x1 - x2, y1 - y2);
}

Point mu_position(const TrajectoryModel &traj, double t_s)
{
    if (traj.speed(t_s) < 0.0)
        throw parameter_error("negative speed at t = " + std::to_string(t_s) + " s");
    return {traj.initial_speed_m_per_s * t_s + 0.5 * traj.acceleration_m_per_s2 * t_s * t_s,
            traj.initial_y_m};
}

double propagation_distance(const SceneGeometry &scene, const TrajectoryModel &traj, double t_s,
                            double scatterer_x_m, double scatterer_y_m)
{
    const Point mu = mu_position(traj, t_s);
    return euclidean_distance(scene.bs_x_m, scene.bs_y_m, scatterer_x_m, scatterer_y_m) +
           euclidean_distance(mu.x_m, mu.y_m, scatterer_x_m, scatterer_y_m);
}

std::vector<double> stepped_positions(const TrajectoryModel &traj, double dt_s, std::size_t count)
{
    std::vector<double> x(count, 0.0);
    for (std::size_t k = 1; k < count; ++k)
    {
        const double v = traj.speed(static_cast<double>(k) * dt_s);
        if (v < 0.0)
            throw parameter_error("negative speed at step " + std::to_string(k));
        x[k] = x[k - 1] + v * dt_s;
    }
    return x;
}

GridSpec make_grid(const GridInputs &inputs, const SceneGeometry &scene,
                   const TrajectoryModel &traj, double light_speed_m_per_s)
{
    require_positive(inputs.dt_s, "dt_s");
    require_positive(inputs.dy_m, "dy_m");
    require_positive(inputs.dtau_s, "dtau_s");
    require_positive(inputs.tau_max_s, "tau_max_s");
    require_positive(inputs.t_max_s, "t_max_s");
    require_positive(scene.disc_radius_m, "disc_radius_m");
    require_positive(traj.initial_speed_m_per_s, "initial_speed_m_per_s");
    traj.check_horizon(inputs.t_max_s);

    const double radius = scene.disc_radius_m;
    const double v0 = traj.initial_speed_m_per_s;
    const double backbone_step = v0 * inputs.dt_s;

    GridSpec g;
    g.inputs = inputs;
    g.disc_radius_m = radius;
    g.m_half = floor_ratio(radius, inputs.dy_m);
    // The grid is laid on the constant-velocity backbone, so N uses v0.
    g.n_half = floor_ratio(radius, backbone_step);
    g.p_count = floor_ratio(inputs.t_max_s, inputs.dt_s);
    g.d_count = floor_ratio(inputs.tau_max_s, inputs.dtau_s);

    if (g.m_half < 1)
        throw parameter_error("dy_m exceeds the disc radius (M = 0)");
    if (g.n_half < 1)
        throw parameter_error("v0 * dt_s exceeds the disc radius (N = 0)");
    if (g.p_count < 1)
        throw parameter_error("t_max_s shorter than one time step (P = 0)");
    if (g.d_count < 1)
        throw parameter_error("tau_max_s shorter than one delay bin (D = 0)");

    const auto last = static_cast<std::size_t>(g.p_count);
    const double stepped_end = stepped_positions(traj, inputs.dt_s, last).back();
    const double exact_end = mu_position(traj, static_cast<double>(last - 1) * inputs.dt_s).x_m;

    g.backbone_count = static_cast<std::int64_t>(std::floor(stepped_end / backbone_step)) + 2;
    const double x_max = std::max({stepped_end, exact_end,
                                   static_cast<double>(g.backbone_count - 1) * backbone_step});
    g.column_begin = -g.n_half - 1;
    g.column_end = static_cast<std::int64_t>(std::floor((x_max + radius) / backbone_step)) + 2;

    // Longest single-bounce path: d(BS, MU) + 2R, maximized at a trajectory end.
    const double bs_leg = std::max(
        euclidean_distance(scene.bs_x_m, scene.bs_y_m, 0.0, traj.initial_y_m),
        euclidean_distance(scene.bs_x_m, scene.bs_y_m, x_max, traj.initial_y_m));
    const double max_delay = (bs_leg + 2.0 * radius) / light_speed_m_per_s;
    if (!(max_delay < static_cast<double>(g.d_count) * inputs.dtau_s))
        throw parameter_error("tau_max_s = " + std::to_string(inputs.tau_max_s) +
                              " s is shorter than the longest path delay " +
                              std::to_string(max_delay) + " s");
    return g;
}

} // namespace ambit
