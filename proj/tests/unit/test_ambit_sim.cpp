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
#include "ambit/ambit_sim.hpp"
#include "ambit/direct_sim.hpp"
#include "ambit/error.hpp"
#include "ambit/levy_field.hpp"
#include "oracles.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <array>
#include <set>

using namespace ambit;
using ambit::testing::brute_force_fold_conv;
using ambit::testing::max_abs_diff;
using ambit::testing::random_complex;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{

double bin_length()
{
    return speed_of_light_m_per_s * 1e-8;
}

LevyFieldRealization empty_field(const Scenario &s)
{
    auto f = sample_field(s.grid, s.geometry, s.trajectory, 0);
    f.increments.setZero();
    f.volatilities.setZero();
    return f;
}

void put(LevyFieldRealization &f, std::int64_t column, std::int64_t lateral, std::int32_t count, double vol)
{
    f.increments(column - f.column_begin, lateral - f.lateral_begin) = count;
    f.volatilities(column - f.column_begin, lateral - f.lateral_begin) = vol;
}

ImpulseResponseGrid run_ambit(const Scenario &s, const LevyFieldRealization &f, Response r = Response::impulse,
                              ConvolutionMethod m = ConvolutionMethod::sparse, AmbitSet set = AmbitSet::disc)
{
    AmbitOptions opt;
    opt.response = r;
    opt.method = m;
    opt.ambit_set = set;
    opt.fft_block_rows = 97;
    return simulate_ambit(s.radio, s.geometry, s.trajectory, s.grid, f, opt);
}

ImpulseResponseGrid run_direct(const Scenario &s, const LevyFieldRealization &f, Response r = Response::impulse,
                               AmbitSet set = AmbitSet::disc)
{
    DirectOptions opt;
    opt.response = r;
    opt.ambit_set = set;
    return simulate_direct(s.radio, s.geometry, s.trajectory, s.grid,
                           materialize_scatterers(f, s.grid, s.trajectory), opt);
}

} // namespace

TEST_CASE("X matrix rows hold unit-modulus MU-leg impulses", "[ambit_sim]")
{
    const auto s = testing::reference_scenario(0.01);
    const auto n = s.grid.n_half;

    const auto x0 = build_xmat(s.radio, s.grid, s.trajectory, 0);
    REQUIRE(x0.row_count() == 2 * n + 1);
    CHECK(x0.rows[n].bin == 0);
    CHECK(x0.rows[n].value == cplx{1.0, 0.0});

    // i dy = 5 m, j = 0.
    const std::int64_t lateral = 20;
    REQUIRE(lateral * s.grid.dy_m() == 5.0);
    const auto x5 = build_xmat(s.radio, s.grid, s.trajectory, lateral);
    CHECK(x5.rows[n].bin == static_cast<std::int32_t>(std::floor(5.0 / bin_length())));
    CHECK_THAT(std::abs(x5.rows[n].value - std::polar(1.0, s.radio.wave_number_per_m * 5.0)), WithinAbs(0.0, 1e-12));

    for (std::int64_t lat : {-s.grid.m_half, -7L, 0L, 13L, s.grid.m_half})
    {
        const auto x = build_xmat(s.radio, s.grid, s.trajectory, lat);
        for (std::int64_t a = 0; a < x.row_count(); ++a)
        {
            const double dx = s.grid.column_x_m(a - n, s.trajectory.initial_speed_m_per_s);
            const bool inside = std::hypot(dx, lat * s.grid.dy_m()) <= s.grid.disc_radius_m;
            CHECK((x.rows[a].bin >= 0) == inside);
            if (inside)
                CHECK_THAT(std::abs(x.rows[a].value), WithinAbs(1.0, 1e-14));
        }
    }
    CHECK_THROWS_AS(build_xmat(s.radio, s.grid, s.trajectory, s.grid.m_half + 1), contract_error);
}

TEST_CASE("causal half-disc keeps only offsets behind the MU", "[ambit_sim]")
{
    const auto s = testing::reference_scenario(0.01);
    const auto x = build_xmat(s.radio, s.grid, s.trajectory, 3, AmbitSet::causal_half_disc);
    for (std::int64_t a = 0; a < x.row_count(); ++a)
        if (a - s.grid.n_half >= 0)
            CHECK(x.rows[a].bin == -1);
    CHECK(x.rows[0].bin == -1);
    CHECK(x.rows[s.grid.n_half - 1].bin >= 0);
}

TEST_CASE("Y matrix carries BS-leg loss and the field", "[ambit_sim]")
{
    const auto s = testing::reference_scenario(0.01);
    auto f = empty_field(s);
    for (std::int64_t lat = -s.grid.m_half; lat <= s.grid.m_half; ++lat)
        for (const auto &row : build_ymat(s.radio, s.geometry, s.grid, s.trajectory, f, lat).rows)
            CHECK(row.bin == -1);

    put(f, 0, 20, 1, 1.0); // scatterer at (0, 5)
    const auto y = build_ymat(s.radio, s.geometry, s.grid, s.trajectory, f, 20);
    REQUIRE(y.row_count() == s.grid.column_count());
    const auto &row = y.rows[static_cast<std::size_t>(-s.grid.column_begin)];
    const double d2 = std::sqrt(10225.0);
    CHECK(row.bin == static_cast<std::int32_t>(std::floor(d2 / bin_length())));
    CHECK_THAT(std::abs(row.value), WithinRel(std::sqrt(s.radio.ref_gain_scatter) * std::pow(d2, -0.85), 1e-12));
    int nonzero = 0;
    for (const auto &r : y.rows)
        nonzero += r.bin >= 0;
    CHECK(nonzero == 1);
}

TEST_CASE("fold convolution with an identity kernel copies Y", "[ambit_sim]")
{
    const auto y = random_complex(4, 6, 1);
    ComplexMatrix one = ComplexMatrix::Zero(1, 1);
    one(0, 0) = 1.0;
    ComplexMatrix z = ComplexMatrix::Zero(4, 6);
    conv2d_fold_accumulate(one, y, z);
    CHECK(z == y);

    ComplexMatrix wide = ComplexMatrix::Zero(1, 3);
    wide(0, 0) = 1.0;
    ComplexMatrix zw = ComplexMatrix::Zero(4, 8);
    conv2d_fold_accumulate(wide, y, zw);
    CHECK(zw.leftCols(6) == y);
    CHECK(zw.rightCols(2).isZero());
}

TEST_CASE("delay impulses compose by adding bins and phases", "[ambit_sim]")
{
    const std::int64_t bins = 16;
    for (auto [b1, b2] : {std::pair{0, 0}, {3, 5}, {15, 15}, {7, 0}})
    {
        const double phi1 = 0.3 + b1, phi2 = -1.1 + 0.5 * b2, amp = 0.37;
        ImpulseRows x, y;
        x.bin_count = y.bin_count = bins;
        x.rows = {{b1, std::polar(1.0, phi1)}};
        y.rows = {{b2, std::polar(amp, phi2)}};
        ComplexMatrix z = ComplexMatrix::Zero(1, 2 * bins - 1);
        conv2d_fold_accumulate(x, y, z);
        for (std::int64_t c = 0; c < z.cols(); ++c)
            if (c != b1 + b2)
                CHECK(z(0, c) == cplx{});
        const cplx v = z(0, b1 + b2);
        CHECK(v.real() == x.rows[0].value.real() * y.rows[0].value.real() -
                              x.rows[0].value.imag() * y.rows[0].value.imag());
        CHECK_THAT(std::abs(v), WithinRel(amp, 1e-15));
        CHECK_THAT(std::remainder(std::arg(v) - phi1 - phi2, 2.0 * pi), WithinAbs(0.0, 1e-14));
    }
}

TEST_CASE("fold convolution equals the quadruple-loop oracle", "[ambit_sim]")
{
    for (auto [xr, xc, yr, yc] : {std::array{3, 3, 3, 3}, {5, 7, 5, 7}, {1, 4, 6, 2}, {9, 2, 3, 5}})
    {
        const auto x = random_complex(xr, xc, 10 + xr);
        const auto y = random_complex(yr, yc, 20 + yr);
        const auto expected = brute_force_fold_conv(x, y);

        ComplexMatrix z = ComplexMatrix::Zero(xr + yr - 1, xc + yc - 1);
        conv2d_fold_accumulate(x, y, z);
        CHECK(max_abs_diff(z, expected) < 1e-12);

        for (std::int64_t block : {1, 2, 3, 1000})
        {
            ComplexMatrix zf = ComplexMatrix::Zero(xr + yr - 1, xc + yc - 1);
            conv2d_fold_accumulate_fft(x, y, zf, block);
            CHECK(max_abs_diff(zf, expected) < 1e-10);
        }
    }
}

TEST_CASE("impulse-row convolution equals the dense oracle", "[ambit_sim]")
{
    const auto s = testing::reference_scenario(0.03);
    auto f = sample_field(s.grid, s.geometry, s.trajectory, 4);
    const auto x = build_xmat(s.radio, s.grid, s.trajectory, 6);
    const auto y = build_ymat(s.radio, s.geometry, s.grid, s.trajectory, f, 6);
    // Trim to keep the dense oracle cheap.
    ImpulseRows xs = x, ys = y;
    xs.rows.resize(40);
    ys.rows.resize(60);
    xs.bin_count = ys.bin_count = 50;
    for (auto &r : xs.rows)
        if (r.bin >= 50)
            r.bin = 49;
    for (auto &r : ys.rows)
        if (r.bin >= 50)
            r.bin = r.bin % 50;
    const auto expected = brute_force_fold_conv(xs.to_dense(), ys.to_dense());
    ComplexMatrix z = ComplexMatrix::Zero(99, 99);
    conv2d_fold_accumulate(xs, ys, z);
    CHECK(max_abs_diff(z, expected) < 1e-12);
}

TEST_CASE("convolution rejects a mis-sized accumulator", "[ambit_sim]")
{
    const auto x = random_complex(3, 3, 1);
    ComplexMatrix z = ComplexMatrix::Zero(5, 4);
    CHECK_THROWS_AS(conv2d_fold_accumulate(x, x, z), contract_error);
    CHECK_THROWS_AS(conv2d_fold_accumulate_fft(x, x, z, 2), contract_error);
}

TEST_CASE("velocity warp interpolates between backbone rows", "[ambit_sim]")
{
    GridSpec g;
    g.inputs.dt_s = 0.1;
    g.p_count = 2;
    g.d_count = 3;
    const ComplexMatrix backbone = random_complex(4, 3, 9);

    // v0 = 10, a = 2, dt = 0.1: x_1 = 1.02 on a 1 m backbone -> j = 1, alpha = 0.02.
    const auto h = velocity_warp(backbone, TrajectoryModel{10.0, 2.0, 0.0}, g);
    CHECK(h.values.row(0) == backbone.row(0));
    CHECK(max_abs_diff(h.values.row(1), 0.98 * backbone.row(1) + 0.02 * backbone.row(2)) < 1e-14);

    // x_1 = (10 + 50 * 0.1) * 0.1 = 1.5: midpoint.
    const auto mid = velocity_warp(backbone, TrajectoryModel{10.0, 50.0, 0.0}, g);
    CHECK(max_abs_diff(mid.values.row(1), 0.5 * (backbone.row(1) + backbone.row(2))) < 1e-14);

    // Constant velocity lands on backbone points.
    g.p_count = 4;
    const auto cv = velocity_warp(backbone, TrajectoryModel{10.0, 0.0, 0.0}, g);
    CHECK(cv.values == backbone);

    g.p_count = 3;
    CHECK_THROWS_AS(velocity_warp(backbone, TrajectoryModel{10.0, 50.0, 0.0}, g), horizon_error);
}

TEST_CASE("zero field gives an all-zero response", "[ambit_sim]")
{
    const auto s = testing::reference_scenario(0.05);
    const auto h = run_ambit(s, empty_field(s));
    CHECK(h.steps() == s.grid.p_count);
    CHECK(h.bins() == s.grid.d_count);
    CHECK(h.values.isZero());
}

TEST_CASE("single scatterer: ambit power tracks the direct engine", "[ambit_sim]")
{
    const auto s = testing::reference_scenario(0.8);
    auto f = empty_field(s);
    put(f, 300, -4, 1, 1.3);
    const auto pa = received_power_trace(run_ambit(s, f, Response::power_delay_profile));
    const auto pd = received_power_trace(run_direct(s, f, Response::power_delay_profile));
    int visible = 0;
    for (std::size_t k = 0; k < pa.size(); ++k)
    {
        REQUIRE((pa[k] > 0.0) == (pd[k] > 0.0));
        if (pd[k] == 0.0)
            continue;
        const double db = 10.0 * std::log10(pd[k] / pa[k]);
        CHECK(db <= 0.0);
        CHECK(db >= -0.6);
        ++visible;
    }
    CHECK(visible > 500);
}

TEST_CASE("ambit output is linear in the field", "[ambit_sim][property]")
{
    const auto s = testing::reference_scenario(0.1);
    const auto full = sample_field(s.grid, s.geometry, s.trajectory, 8);
    auto a = full, b = full;
    for (std::int64_t r = 0; r < full.increments.rows(); ++r)
        (r % 2 == 0 ? a : b).increments.row(r).setZero();
    const auto ha = run_ambit(s, a);
    const auto hb = run_ambit(s, b);
    const auto hf = run_ambit(s, full);
    CHECK(max_abs_diff(ha.values + hb.values, hf.values) <= 1e-12 * hf.values.cwiseAbs().maxCoeff());
}

TEST_CASE("every output bin is a sum of MU-leg and BS-leg bins", "[ambit_sim][property]")
{
    const auto s = testing::reference_scenario(0.6);
    const double v0 = s.trajectory.initial_speed_m_per_s;
    for (std::uint64_t trial = 0; trial < 4; ++trial)
    {
        auto f = empty_field(s);
        std::vector<std::array<std::int64_t, 2>> cells;
        for (std::int64_t n = 0; n < 5; ++n)
        {
            const std::int64_t col = 37 + 113 * n + 7 * static_cast<std::int64_t>(trial);
            const std::int64_t lat = (n * 11 + static_cast<std::int64_t>(trial) * 5) % (2 * s.grid.m_half + 1) - s.grid.m_half;
            put(f, col, lat, 1, 1.0);
            cells.push_back({col, lat});
        }
        const auto h = run_ambit(s, f, Response::power_delay_profile);
        for (std::int64_t k = 0; k < h.steps(); ++k)
        {
            std::set<std::int64_t> expected;
            for (const auto &[col, lat] : cells)
            {
                const double d1 = std::hypot(s.grid.column_x_m(col - k, v0), lat * s.grid.dy_m());
                if (d1 > s.grid.disc_radius_m)
                    continue;
                const double d2 = euclidean_distance(s.geometry.bs_x_m, s.geometry.bs_y_m, s.grid.column_x_m(col, v0),
                                                     lat * s.grid.dy_m());
                expected.insert(static_cast<std::int64_t>(std::floor(d1 / bin_length())) +
                                static_cast<std::int64_t>(std::floor(d2 / bin_length())));
            }
            std::set<std::int64_t> actual;
            for (std::int64_t b = 0; b < h.bins(); ++b)
                if (h.values(k, b) != cplx{})
                    actual.insert(b);
            CHECK(actual == expected);
        }
    }
}

TEST_CASE("fold alignment: an abeam scatterer is centred on its column", "[ambit_sim]")
{
    const auto s = testing::reference_scenario(2.0);
    auto f = empty_field(s);
    const std::int64_t column = 1000;
    put(f, column, 8, 1, 1.0);
    const auto h = run_ambit(s, f);
    std::int64_t first = -1, last = -1, nearest = -1;
    std::int64_t min_bin = h.bins();
    for (std::int64_t k = 0; k < h.steps(); ++k)
        for (std::int64_t b = 0; b < h.bins(); ++b)
            if (h.values(k, b) != cplx{})
            {
                if (first < 0)
                    first = k;
                last = k;
                if (b < min_bin)
                {
                    min_bin = b;
                    nearest = k;
                }
            }
    REQUIRE(first >= 0);
    CHECK(first + last == 2 * column);
    CHECK(std::abs(nearest - column) <= (last - first) / 4);
    // The delay bin is smallest while the MU passes the scatterer.
    CHECK(h.values.row(column).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("FFT and sparse convolution agree inside the engine", "[ambit_sim]")
{
    const auto s = testing::reference_scenario(0.05);
    const auto f = sample_field(s.grid, s.geometry, s.trajectory, 21);
    const auto sparse = run_ambit(s, f);
    const auto fft = run_ambit(s, f, Response::impulse, ConvolutionMethod::fft_overlap_add);
    CHECK(max_abs_diff(sparse.values, fft.values) <= 1e-10 * sparse.values.cwiseAbs().maxCoeff());
}

TEST_CASE("both engines see the same paths in either ambit set", "[ambit_sim]")
{
    for (auto set : {AmbitSet::disc, AmbitSet::causal_half_disc})
    {
        const auto s = testing::reference_scenario(0.2);
        const auto f = sample_field(s.grid, s.geometry, s.trajectory, 33);
        const auto ha = run_ambit(s, f, Response::power_delay_profile, ConvolutionMethod::sparse, set);
        const auto hd = run_direct(s, f, Response::power_delay_profile, set);
        const auto ta = received_power_trace(ha);
        const auto td = received_power_trace(hd);
        for (std::size_t k = 0; k < ta.size(); ++k)
        {
            CHECK((ta[k] > 0.0) == (td[k] > 0.0));
            // The BS-leg-only loss never drops below the full-path loss.
            CHECK(td[k] <= ta[k] * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("accelerating MU stays within the backbone", "[ambit_sim]")
{
    const auto s = testing::reference_scenario(0.5, 4.0);
    const auto f = sample_field(s.grid, s.geometry, s.trajectory, 2);
    const auto h = run_ambit(s, f);
    CHECK(h.all_finite());
    CHECK(received_power_trace(h).back() > 0.0);
}

TEST_CASE("LoS term uses the exact MU position", "[ambit_sim]")
{
    const auto s = testing::reference_scenario(0.05, 3.0);
    AmbitOptions ao;
    ao.include_los = true;
    DirectOptions dopt;
    dopt.include_los = true;
    const auto f = empty_field(s);
    const auto ha = simulate_ambit(s.radio, s.geometry, s.trajectory, s.grid, f, ao);
    const auto hd = simulate_direct(s.radio, s.geometry, s.trajectory, s.grid, {}, dopt);
    CHECK(max_abs_diff(ha.values, hd.values) == 0.0);
}
