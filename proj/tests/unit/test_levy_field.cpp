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
#include "ambit/error.hpp"
#include "ambit/levy_field.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

using namespace ambit;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{

struct Fixture
{
    SceneGeometry scene;
    TrajectoryModel traj;
    GridSpec grid;
};

// Unit-area cells: v0 = 1 m/s, dt = 1 s, dy = 1 m.
Fixture unit_cells(double density, double t_max_s, double radius_m = 50.0)
{
    Fixture f;
    f.scene = SceneGeometry::from_disc(0.0, 0.0, radius_m, density);
    f.traj = {1.0, 0.0, 0.0};
    GridInputs in;
    in.dt_s = 1.0;
    in.dy_m = 1.0;
    in.dtau_s = 1e-8;
    in.tau_max_s = 1e-5;
    in.t_max_s = t_max_s;
    f.grid = make_grid(in, f.scene, f.traj);
    return f;
}

Fixture small_scene()
{
    Fixture f;
    f.traj = {10.0, 0.0, 0.0};
    f.scene = SceneGeometry::from_disc(-100.0, 20.0, 2.0, 0.8);
    GridInputs in;
    in.dt_s = 0.05;
    in.dy_m = 0.5;
    in.t_max_s = 0.5;
    f.grid = make_grid(in, f.scene, f.traj);
    return f;
}

} // namespace

TEST_CASE("zero density gives an all-zero field", "[levy_field]")
{
    auto f = small_scene();
    f.scene.scatterer_density_per_m2 = 0.0;
    const auto field = sample_field(f.grid, f.scene, f.traj, 7);
    CHECK(field.increments.isZero());
    CHECK(materialize_scatterers(field, f.grid, f.traj).empty());
}

TEST_CASE("Poisson cell counts have the configured mean", "[levy_field]")
{
    const double density = 0.6362;
    const auto f = unit_cells(density, 900.0);
    const auto field = sample_field(f.grid, f.scene, f.traj, 2024);
    CHECK(field.cell_area_m2 == 1.0);
    const auto cells = static_cast<double>(field.increments.size());
    REQUIRE(cells >= 1e5);
    const double mean = static_cast<double>(field.increments.cast<std::int64_t>().sum()) / cells;
    CHECK(std::abs(mean - density) <= 3.0 * std::sqrt(density / cells));

    // Variance of a Poisson variate equals its mean.
    const double var =
        (field.increments.cast<double>().array() - mean).square().sum() / (cells - 1.0);
    CHECK_THAT(var, WithinRel(density, 0.03));
}

TEST_CASE("volatilities are standard Gaussian scaled by volatility_std", "[levy_field]")
{
    const auto f = unit_cells(0.5, 400.0);
    const auto field = sample_field(f.grid, f.scene, f.traj, 99, 2.0);
    const auto cells = static_cast<double>(field.volatilities.size());
    const double mean = field.volatilities.mean();
    const double var = (field.volatilities.array() - mean).square().sum() / (cells - 1.0);
    CHECK(std::abs(mean) < 4.0 * 2.0 / std::sqrt(cells));
    CHECK_THAT(var, WithinRel(4.0, 0.03));
}

TEST_CASE("neighbouring cells are uncorrelated", "[levy_field][property]")
{
    const auto f = unit_cells(1.3, 400.0);
    const auto field = sample_field(f.grid, f.scene, f.traj, 5);
    const auto &m = field.increments;
    const auto a = m.topRows(m.rows() - 1).cast<double>().eval();
    const auto b = m.bottomRows(m.rows() - 1).cast<double>().eval();
    const double ma = a.mean(), mb = b.mean();
    const double cov = ((a.array() - ma) * (b.array() - mb)).mean();
    const double corr = cov / std::sqrt((a.array() - ma).square().mean() * (b.array() - mb).square().mean());
    CHECK(std::abs(corr) < 4.0 / std::sqrt(static_cast<double>(a.size())));
}

TEST_CASE("sampling is a pure function of the seed", "[levy_field]")
{
    const auto f = small_scene();
    const auto a = sample_field(f.grid, f.scene, f.traj, 11);
    const auto b = sample_field(f.grid, f.scene, f.traj, 11);
    const auto c = sample_field(f.grid, f.scene, f.traj, 12);
    CHECK(a.increments == b.increments);
    CHECK(a.volatilities == b.volatilities);
    CHECK(a.increments != c.increments);
    // A cell's draws do not depend on the grid extent around it.
    auto g = f.grid;
    g.column_end += 10;
    const auto d = sample_field(g, f.scene, f.traj, 11);
    CHECK(d.increments.topRows(a.increments.rows()) == a.increments);
}

TEST_CASE("Poisson inversion", "[levy_field]")
{
    CHECK(detail::poisson_from_uniform(0.0, 0.99) == 0);
    CHECK(detail::poisson_from_uniform(1.0, 0.0) == 0);
    // P(0) = e^-1 ~ 0.3679, P(<=1) ~ 0.7358.
    CHECK(detail::poisson_from_uniform(1.0, 0.36) == 0);
    CHECK(detail::poisson_from_uniform(1.0, 0.37) == 1);
    CHECK(detail::poisson_from_uniform(1.0, 0.74) == 2);
    CHECK_THROWS_AS(detail::poisson_from_uniform(600.0, 0.5), parameter_error);
    for (std::uint32_t d = 0; d < 3; ++d)
    {
        const double u = detail::cell_uniform(1, -4, 3, d);
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("materialize places one scatterer per nonzero cell at its corner", "[levy_field]")
{
    const auto f = small_scene();
    auto field = sample_field(f.grid, f.scene, f.traj, 1);
    field.increments.setZero();
    CHECK(materialize_scatterers(field, f.grid, f.traj).empty());

    const double v0dt = f.traj.initial_speed_m_per_s * f.grid.dt_s();
    field.increments(2 - field.column_begin, 1 - field.lateral_begin) = 1;
    field.volatilities(2 - field.column_begin, 1 - field.lateral_begin) = 0.5;
    auto set = materialize_scatterers(field, f.grid, f.traj);
    REQUIRE(set.size() == 1);
    CHECK_THAT(set[0].x_m, WithinRel(2.0 * v0dt, 1e-15));
    CHECK(set[0].y_m == f.grid.dy_m());
    CHECK(set[0].weight == 0.5);

    field.increments(2 - field.column_begin, 1 - field.lateral_begin) = 2;
    field.volatilities(2 - field.column_begin, 1 - field.lateral_begin) = -0.75;
    set = materialize_scatterers(field, f.grid, f.traj);
    REQUIRE(set.size() == 1);
    CHECK(set[0].count == 2);
    CHECK(set[0].weight == -1.5);
}

TEST_CASE("materialize rejects a field from another grid", "[levy_field]")
{
    const auto f = small_scene();
    const auto field = sample_field(f.grid, f.scene, f.traj, 1);
    auto other = f.grid;
    other.m_half += 1;
    CHECK_THROWS_AS(materialize_scatterers(field, other, f.traj), contract_error);
}

TEST_CASE("scatterer CSV export", "[levy_field]")
{
    ScattererSet s(1);
    s[0].x_m = 0.1;
    s[0].y_m = -2.0;
    s[0].weight = 0.3;
    std::ostringstream os;
    write_scatterers_csv(os, s);
    CHECK(os.str() == "x_m,y_m,weight\n0.10000000000000001,-2,0.29999999999999999\n");
}

TEST_CASE("fresh arrivals count scatterers entering the disc", "[levy_field]")
{
    const auto scene = SceneGeometry::from_disc(0.0, 50.0, 5.0, 1.0);
    const TrajectoryModel traj{1.0, 0.0, 0.0};
    ScattererSet s(4);
    s[0] = {3.0, 0.0, 1};   // inside at t = 0
    s[1] = {8.0, 0.0, 2};   // enters at x = 3
    s[2] = {8.0, 4.0, 1};   // chord half-width 3, enters at x = 5
    s[3] = {20.0, 0.0, 1};  // enters at x = 15
    CHECK(count_in_disc(s, {0.0, 0.0}, 5.0) == 1);
    CHECK(count_fresh_arrivals(s, scene, traj, 4.0) == 2);
    CHECK(count_fresh_arrivals(s, scene, traj, 5.0) == 3);
    CHECK(count_fresh_arrivals(s, scene, traj, 15.0) == 4);
}
