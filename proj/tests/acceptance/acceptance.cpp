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
// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include "ambit/ambit_sim.hpp"
#include "ambit/harness.hpp"
#include "ambit/levy_field.hpp"
#include "ambit/stats.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

using namespace ambit;
namespace fs = std::filesystem;

namespace
{

struct Outcome
{
    bool pass = false;
    std::string detail;
};

std::string fmt(const char *f, double a)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::vector<GainTrace> ambit_gains(const Scenario &s, std::int64_t realizations, std::uint64_t base_seed)
{
    std::vector<GainTrace> gains;
    for (const auto seed : realization_seeds(base_seed, realizations))
    {
        const auto field = sample_field(s.grid, s.geometry, s.trajectory, seed, s.volatility_std);
        gains.push_back(narrowband_gain(simulate_ambit(s.radio, s.geometry, s.trajectory, s.grid, field)));
    }
    return gains;
}

Outcome oracle_equivalence()
{
    const auto s = testing::reference_scenario(1.0);
    const auto seeds = realization_seeds(1, 100);
    const auto c = compare_engines(s, seeds, {1, {}});
    const auto &p = c.power_ratio_db;
    const bool pass = p.median >= -0.46 && p.median <= -0.16 && p.stddev < 0.3 && p.values.back() <= 0.0;
    std::int64_t undefined = 0;
    for (const auto &r : c.runs)
        undefined += r.undefined_steps;
    return {pass, "median " + fmt("%.3f", p.median) + " dB in [-0.46, -0.16], std " + fmt("%.3f", p.stddev) +
                      " dB < 0.3, max " + fmt("%.3g", p.values.back()) + " dB <= 0 over " +
                      std::to_string(p.size()) + " steps (undefined " + std::to_string(undefined) +
                      "); coherent-power median " + fmt("%.3f", c.coherent_power_ratio_db.median) + " dB"};
}

Outcome speedup()
{
    std::vector<double> medians;
    std::string detail;
    for (double n : {100.0, 1000.0, 5000.0})
    {
        const auto s = testing::reference_scenario(4.0, 0.0, n);
        const auto seeds = realization_seeds(1, 5);
        const auto c = compare_engines(s, seeds, {3, {}});
        medians.push_back(c.runtime_ratio.median);
        double d = 0.0, a = 0.0;
        for (const auto &r : c.runs)
        {
            d += r.direct_s;
            a += r.ambit_s;
        }
        detail += "N=" + fmt("%g", n) + ": " + fmt("%.2f", c.runtime_ratio.median) + "x (direct " +
                  fmt("%.3f", d / 5.0) + " s, ambit " + fmt("%.3f", a / 5.0) + " s); ";
    }
    const bool monotone = medians[0] <= medians[1] && medians[1] <= medians[2];
    return {medians[2] > 2.0 && monotone, detail + (monotone ? "non-decreasing" : "NOT monotone")};
}

Outcome doppler_support()
{
    const auto cv = testing::reference_scenario(1.0);
    const auto gains = ambit_gains(cv, 200, 1);
    const auto psd = doppler_psd(gains, cv.grid.dt_s(), 0.5, 0.5);
    const double fd = cv.radio.carrier_frequency_hz * cv.trajectory.initial_speed_m_per_s / speed_of_light_m_per_s;
    const double limit = 96.4 + psd.resolution_hz;
    const double mass = psd_mass_within(psd, limit);

    const auto acc = testing::reference_scenario(3.3, 2.0, 100.0, 5e-4);
    const auto acc_gains = ambit_gains(acc, 200, 1001);
    const double edge0 = doppler_edge(doppler_psd(acc_gains, acc.grid.dt_s(), 0.0, 0.5));
    const double edge3 = doppler_edge(doppler_psd(acc_gains, acc.grid.dt_s(), 3.0, 0.5));

    return {mass >= 0.99 && edge3 > edge0,
            "f_D " + fmt("%.2f", fd) + " Hz; mass within " + fmt("%.2f", limit) + " Hz = " + fmt("%.4f", mass) +
                " >= 0.99; a=2: 99% edge " + fmt("%.1f", edge0) + " Hz at t0=0 < " + fmt("%.1f", edge3) +
                " Hz at t0=3 s"};
}

Outcome acf_nonstationarity()
{
    const auto acc = testing::reference_scenario(3.3, 2.0, 100.0, 5e-4);
    const auto gains = ambit_gains(acc, 200, 2001);
    const auto a0 = temporal_acf(gains, acc.grid.dt_s(), 0.0, 0.01);
    const auto a3 = temporal_acf(gains, acc.grid.dt_s(), 3.0, 0.01);
    const auto c0 = coherence_time(a0);
    const auto c3 = coherence_time(a3);
    const bool exact = a0.at_zero() == cplx{1.0, 0.0} && a3.at_zero() == cplx{1.0, 0.0};
    const bool pass = c0 && c3 && *c3 < *c0 && exact;
    return {pass, "coherence " + (c0 ? fmt("%.2f", *c0 * 1e3) : std::string("n/a")) + " ms at t0=0, " +
                      (c3 ? fmt("%.2f", *c3 * 1e3) : std::string("n/a")) + " ms at t0=3 s; rho(0) " +
                      (exact ? "exactly 1" : "NOT 1")};
}

Outcome poisson_statistics()
{
    const auto s = testing::reference_scenario(1.0);
    const std::int64_t seeds = 300;
    std::vector<double> in_disc, arrivals;
    for (const auto seed : realization_seeds(1, seeds))
    {
        const auto field = sample_field(s.grid, s.geometry, s.trajectory, seed);
        const auto set = materialize_scatterers(field, s.grid, s.trajectory);
        in_disc.push_back(static_cast<double>(count_in_disc(set, mu_position(s.trajectory, 0.0), s.geometry.disc_radius_m)));
        arrivals.push_back(static_cast<double>(count_fresh_arrivals(set, s.geometry, s.trajectory, 1.0)));
    }
    const auto a = EmpiricalCdf::from_samples(in_disc);
    const auto b = EmpiricalCdf::from_samples(arrivals);
    const double se_a = a.stddev / std::sqrt(static_cast<double>(seeds));
    const double se_b = b.stddev / std::sqrt(static_cast<double>(seeds));
    const double ns = *s.geometry.mean_path_count;
    const double rs = *s.geometry.path_arrival_rate_per_s;
    const bool pass = std::abs(a.mean - ns) <= 3.0 * se_a && std::abs(b.mean - rs) <= 3.0 * se_b;
    return {pass, "in-disc mean " + fmt("%.2f", a.mean) + " vs " + fmt("%g", ns) + " (3 SE " + fmt("%.2f", 3 * se_a) +
                      "); arrivals " + fmt("%.2f", b.mean) + "/s vs " + fmt("%g", rs) + " (3 SE " +
                      fmt("%.2f", 3 * se_b) + ") over " + std::to_string(seeds) + " seeds"};
}

Outcome convolution_correctness()
{
    const auto x = testing::random_complex(5, 7, 101);
    const auto y = testing::random_complex(5, 7, 202);
    const auto expected = testing::brute_force_fold_conv(x, y);
    ComplexMatrix z = ComplexMatrix::Zero(9, 13);
    conv2d_fold_accumulate(x, y, z);
    const double err = testing::max_abs_diff(z, expected);
    ComplexMatrix zf = ComplexMatrix::Zero(9, 13);
    conv2d_fold_accumulate_fft(x, y, zf, 2);
    const double err_fft = testing::max_abs_diff(zf, expected);

    bool composition = true;
    for (auto [b1, b2] : {std::pair{0, 0}, {2, 9}, {11, 11}})
    {
        ImpulseRows xi, yi;
        xi.bin_count = yi.bin_count = 12;
        const cplx vx = std::polar(1.0, 0.4 * b1 + 0.1), vy = std::polar(0.6, -0.3 * b2);
        xi.rows = {{b1, vx}};
        yi.rows = {{b2, vy}};
        ComplexMatrix zi = ComplexMatrix::Zero(1, 23);
        conv2d_fold_accumulate(xi, yi, zi);
        const cplx product{vx.real() * vy.real() - vx.imag() * vy.imag(),
                           vx.real() * vy.imag() + vx.imag() * vy.real()};
        composition = composition && zi(0, b1 + b2) == product && zi.cwiseAbs().sum() == std::abs(product);
        composition = composition &&
                      std::abs(std::remainder(std::arg(zi(0, b1 + b2)) - std::arg(vx) - std::arg(vy), 2 * pi)) < 1e-14;
    }
    return {err <= 1e-12 && err_fft <= 1e-10 && composition,
            "5x7 direct max error " + fmt("%.2e", err) + " <= 1e-12, FFT " + fmt("%.2e", err_fft) +
                " <= 1e-10, impulse composition " + (composition ? "exact" : "WRONG")};
}

std::string slurp(const fs::path &p)
{
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

Outcome determinism()
{
    auto config = default_config();
    config.grid.t_max_s = 0.2;
    config.run.realizations = 6;
    config.run.base_seed = 77;
    const auto root = fs::temp_directory_path() / "ambit_acceptance_determinism";
    fs::remove_all(root);
    std::ostringstream log;
    const auto a = run_simulate(config, root / "a", 1, log);
    const auto b = run_simulate(config, root / "b", 1, log);
    const auto c = run_simulate(config, root / "c", 4, log);
    std::size_t compared = 0;
    bool same = a.files == b.files && a.files == c.files;
    for (const auto &f : a.files)
        if (same && f.ends_with(".csv"))
        {
            const auto ref = slurp(root / "a" / f);
            same = same && ref == slurp(root / "b" / f) && ref == slurp(root / "c" / f);
            ++compared;
        }
    fs::remove_all(root);
    return {same && compared > 0,
            std::to_string(compared) + " CSV files bit-identical across repeat runs and 1 vs 4 workers"};
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"oracle_equivalence", oracle_equivalence},
        {"speedup", speedup},
        {"doppler_support", doppler_support},
        {"acf_nonstationarity", acf_nonstationarity},
        {"poisson_birth_death", poisson_statistics},
        {"convolution_correctness", convolution_correctness},
        {"determinism", determinism},
    };
    int failures = 0;
    for (const auto &[name, run] : criteria)
    {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try
        {
            o = run();
        }
        catch (const std::exception &e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << " [" << fmt("%.1f", secs) << " s]"
                  << std::endl;
        failures += o.pass ? 0 : 1;
    }
    std::cout << (failures == 0 ? "all acceptance criteria passed" : std::to_string(failures) + " criteria failed")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
