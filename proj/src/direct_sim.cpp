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
#include "ambit/direct_sim.hpp"

#include "ambit/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ambit
{

ImpulseResponseGrid simulate_direct(const ChannelParams &params, const SceneGeometry &scene,
                                    const TrajectoryModel &traj, const GridSpec &grid,
                                    const ScattererSet &scatterers, const DirectOptions &options)
{
    const auto steps = grid.p_count;
    const auto bins = grid.d_count;
    const double radius = scene.disc_radius_m;
    const double bin_length_m = params.light_speed_m_per_s * grid.dtau_s();
    const double half_gamma = 0.5 * params.path_loss_exponent;
    const double sqrt_gs = std::sqrt(params.ref_gain_scatter);
    const double sqrt_gl = std::sqrt(params.ref_gain_los);
    const bool power = options.response == Response::power_delay_profile;

    traj.check_horizon(options.t0_s + static_cast<double>(steps - 1) * grid.dt_s());

    // Visit scatterers in x order so each step only scans the [x - R, x + R] slab.
    std::vector<std::size_t> order(scatterers.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scatterers[a].x_m < scatterers[b].x_m;
    });
    std::vector<double> xs(order.size());
    for (std::size_t n = 0; n < order.size(); ++n)
        xs[n] = scatterers[order[n]].x_m;

    ImpulseResponseGrid h;
    h.values = ComplexMatrix::Zero(steps, bins);
    h.dt_s = grid.dt_s();
    h.dtau_s = grid.dtau_s();
    h.t0_s = options.t0_s;
    h.response = options.response;

    auto bin_of = [&](double d, std::int64_t k) {
        const auto b = static_cast<std::int64_t>(std::floor(d / bin_length_m));
        if (b >= bins)
            throw delay_overflow_error(static_cast<std::size_t>(k), static_cast<std::size_t>(b),
                                       static_cast<std::size_t>(bins));
        return b;
    };

    for (std::int64_t k = 0; k < steps; ++k)
    {
        const double t = options.t0_s + static_cast<double>(k) * grid.dt_s();
        const Point mu = mu_position(traj, t);

        const auto first = std::lower_bound(xs.begin(), xs.end(), mu.x_m - radius);
        const auto last = std::upper_bound(first, xs.end(), mu.x_m + radius);
        for (auto it = first; it != last; ++it)
        {
            const Scatterer &s = scatterers[order[static_cast<std::size_t>(it - xs.begin())]];
            const double mu_leg = euclidean_distance(mu.x_m, mu.y_m, s.x_m, s.y_m);
            if (mu_leg > radius)
                continue;
            if (options.ambit_set == AmbitSet::causal_half_disc && !(s.x_m < mu.x_m))
                continue;
            const double d = euclidean_distance(scene.bs_x_m, scene.bs_y_m, s.x_m, s.y_m) + mu_leg;
            const auto b = bin_of(d, k);
            if (power)
                h.values(k, b) += params.ref_gain_scatter * s.weight * s.weight *
                                  std::pow(d, -params.path_loss_exponent);
            else
                h.values(k, b) += sqrt_gs * s.weight * std::pow(d, -half_gamma) *
                                  std::polar(1.0, params.wave_number_per_m * d);
        }

        if (options.include_los)
        {
            const double d = euclidean_distance(scene.bs_x_m, scene.bs_y_m, mu.x_m, mu.y_m);
            const auto b = bin_of(d, k);
            if (power)
                h.values(k, b) += params.ref_gain_los * std::pow(d, -params.path_loss_exponent);
            else
                h.values(k, b) +=
                    sqrt_gl * std::pow(d, -half_gamma) * std::polar(1.0, params.wave_number_per_m * d);
        }
    }
    return h;
}

} // namespace ambit
