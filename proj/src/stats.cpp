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
#include "ambit/stats.hpp"

#include "ambit/error.hpp"
#include "ambit/levy_field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <ostream>

#include "csv_format.hpp"

namespace ambit
{
namespace
{

std::int64_t sample_index(double time_s, double dt_s)
{
    return static_cast<std::int64_t>(std::llround(time_s / dt_s));
}

std::size_t shortest_trace(std::span<const GainTrace> gains)
{
    std::size_t n = std::numeric_limits<std::size_t>::max();
    for (const auto &g : gains)
        n = std::min(n, g.size());
    return n;
}

std::mutex &fft_plan_mutex()
{
    static std::mutex m;
    return m;
}

template <class F>
double min_wall_clock(int repetitions, F &&body)
{
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < std::max(1, repetitions); ++r)
    {
        const auto start = std::chrono::steady_clock::now();
        body();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    return best;
}

} // namespace

GainTrace narrowband_gain(const ImpulseResponseGrid &h)
{
    GainTrace g(static_cast<std::size_t>(h.steps()));
    for (std::int64_t k = 0; k < h.steps(); ++k)
        g[static_cast<std::size_t>(k)] = h.values.row(k).sum();
    return g;
}

cplx AcfEstimate::at_zero() const
{
    for (std::size_t i = 0; i < lags_s.size(); ++i)
        if (lags_s[i] == 0.0)
            return values[i];
    throw contract_error("ACF estimate has no zero lag");
}

AcfEstimate temporal_acf(std::span<const GainTrace> gains, double dt_s, double anchor_time_s,
                         double max_lag_s, bool two_sided)
{
    if (gains.empty())
        throw parameter_error("temporal_acf needs at least one realization");
    if (!(dt_s > 0.0) || anchor_time_s < 0.0 || max_lag_s < 0.0)
        throw parameter_error("temporal_acf: dt must be positive, anchor and max lag non-negative");

    const std::int64_t anchor = sample_index(anchor_time_s, dt_s);
    const std::int64_t lags = sample_index(max_lag_s, dt_s);
    const auto length = static_cast<std::int64_t>(shortest_trace(gains));
    if (anchor + lags >= length)
        throw parameter_error("anchor " + std::to_string(anchor_time_s) + " s plus max lag " +
                              std::to_string(max_lag_s) + " s exceeds the simulated horizon");
    if (two_sided && anchor - lags < 0)
        throw parameter_error("two-sided ACF needs anchor >= max lag");

    auto power_at = [&](std::int64_t k) {
        double p = 0.0;
        for (const auto &g : gains)
            p += (g[static_cast<std::size_t>(k)] * std::conj(g[static_cast<std::size_t>(k)])).real();
        return p;
    };
    const double anchor_power = power_at(anchor);
    if (!(anchor_power > 0.0))
        throw error("degenerate anchor: zero power at t = " + std::to_string(anchor_time_s) + " s");

    AcfEstimate acf;
    acf.anchor_time_s = anchor_time_s;
    acf.realization_count = static_cast<std::int64_t>(gains.size());
    for (std::int64_t l = two_sided ? -lags : 0; l <= lags; ++l)
    {
        cplx sum{};
        for (const auto &g : gains)
            sum += g[static_cast<std::size_t>(anchor)] * std::conj(g[static_cast<std::size_t>(anchor + l)]);
        // Normalizing by the geometric mean of both powers keeps |rho| <= 1
        // when the power drifts; at lag 0 it is the anchor power itself.
        const double norm = l == 0 ? anchor_power : std::sqrt(anchor_power * power_at(anchor + l));
        acf.lags_s.push_back(static_cast<double>(l) * dt_s);
        acf.values.push_back(norm > 0.0 ? sum / norm : cplx{});
    }
    return acf;
}

std::optional<double> coherence_time(const AcfEstimate &acf, double threshold)
{
    for (std::size_t i = 0; i < acf.lags_s.size(); ++i)
        if (acf.lags_s[i] >= 0.0 && std::abs(acf.values[i]) < threshold)
            return acf.lags_s[i];
    return std::nullopt;
}

DopplerPsd doppler_psd(std::span<const GainTrace> gains, double dt_s, double anchor_time_s,
                       double window_length_s)
{
    if (gains.empty())
        throw parameter_error("doppler_psd needs at least one realization");
    if (!(dt_s > 0.0) || !(window_length_s > 0.0))
        throw parameter_error("doppler_psd: dt and window length must be positive");

    std::int64_t w = sample_index(window_length_s, dt_s);
    if (w % 2 == 0)
        --w; // odd length keeps the frequency axis symmetric about 0
    if (w < 9)
        throw parameter_error("PSD window of " + std::to_string(window_length_s) +
                              " s is too short for a usable frequency resolution");
    const auto length = static_cast<std::int64_t>(shortest_trace(gains));
    if (w > length)
        throw parameter_error("PSD window longer than the simulated horizon");
    const std::int64_t anchor = sample_index(anchor_time_s, dt_s);
    if (anchor < 0 || anchor >= length)
        throw parameter_error("PSD anchor outside the simulated horizon");
    const std::int64_t start = std::clamp(anchor - (w - 1) / 2, std::int64_t{0}, length - w);

    std::vector<double> taper(static_cast<std::size_t>(w));
    double taper_energy = 0.0;
    for (std::int64_t n = 0; n < w; ++n)
    {
        taper[n] = 0.5 * (1.0 - std::cos(2.0 * pi * static_cast<double>(n) / static_cast<double>(w - 1)));
        taper_energy += taper[n] * taper[n];
    }

    auto *buf = static_cast<fftw_complex *>(fftw_malloc(sizeof(fftw_complex) * static_cast<std::size_t>(w)));
    fftw_plan plan;
    {
        std::lock_guard lock(fft_plan_mutex());
        plan = fftw_plan_dft_1d(static_cast<int>(w), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    }

    std::vector<double> acc(static_cast<std::size_t>(w), 0.0);
    double mean_power = 0.0;
    for (const auto &g : gains)
    {
        double energy = 0.0;
        for (std::int64_t n = 0; n < w; ++n)
        {
            const cplx v = g[static_cast<std::size_t>(start + n)] * taper[n];
            buf[n][0] = v.real();
            buf[n][1] = v.imag();
            energy += std::norm(v);
        }
        fftw_execute(plan);
        for (std::int64_t m = 0; m < w; ++m)
            acc[m] += buf[m][0] * buf[m][0] + buf[m][1] * buf[m][1];
        mean_power += energy / taper_energy;
    }
    {
        std::lock_guard lock(fft_plan_mutex());
        fftw_destroy_plan(plan);
    }
    fftw_free(buf);

    const double realizations = static_cast<double>(gains.size());
    DopplerPsd psd;
    psd.anchor_time_s = anchor_time_s;
    psd.window_start_s = static_cast<double>(start) * dt_s;
    psd.window_length_s = static_cast<double>(w) * dt_s;
    psd.resolution_hz = 1.0 / psd.window_length_s;
    psd.windowed_mean_power = mean_power / realizations;
    const std::int64_t half = (w - 1) / 2;
    for (std::int64_t m = -half; m <= half; ++m)
    {
        const std::int64_t bin = (m + w) % w;
        psd.freqs_hz.push_back(static_cast<double>(m) * psd.resolution_hz);
        psd.psd.push_back(acc[bin] * dt_s / (taper_energy * realizations));
    }
    return psd;
}

double psd_mass_within(const DopplerPsd &psd, double f_hz)
{
    double total = 0.0;
    double inside = 0.0;
    for (std::size_t i = 0; i < psd.psd.size(); ++i)
    {
        total += psd.psd[i];
        if (std::abs(psd.freqs_hz[i]) <= f_hz)
            inside += psd.psd[i];
    }
    return total > 0.0 ? inside / total : 0.0;
}

double doppler_edge(const DopplerPsd &psd, double fraction)
{
    const double total = std::accumulate(psd.psd.begin(), psd.psd.end(), 0.0);
    if (!(total > 0.0))
        return 0.0;
    // Bins sorted by |f|; the axis is symmetric so +f and -f enter together.
    std::vector<std::size_t> order(psd.psd.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::abs(psd.freqs_hz[a]) < std::abs(psd.freqs_hz[b]);
    });
    double cumulative = 0.0;
    for (std::size_t n = 0; n < order.size(); ++n)
    {
        cumulative += psd.psd[order[n]];
        const bool last_of_pair = n + 1 == order.size() ||
                                  std::abs(psd.freqs_hz[order[n + 1]]) != std::abs(psd.freqs_hz[order[n]]);
        if (last_of_pair && cumulative >= fraction * total)
            return std::abs(psd.freqs_hz[order[n]]);
    }
    return std::abs(psd.freqs_hz[order.back()]);
}

EmpiricalCdf EmpiricalCdf::from_samples(std::vector<double> samples)
{
    if (samples.empty())
        throw parameter_error("empirical CDF of an empty sample");
    std::sort(samples.begin(), samples.end());
    EmpiricalCdf cdf;
    const auto n = samples.size();
    cdf.probs.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        cdf.probs[i] = static_cast<double>(i + 1) / static_cast<double>(n);
    cdf.median = samples[(n + 1) / 2 - 1];
    cdf.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(n);
    if (n > 1)
    {
        double ss = 0.0;
        for (double v : samples)
            ss += (v - cdf.mean) * (v - cdf.mean);
        cdf.stddev = std::sqrt(ss / static_cast<double>(n - 1));
    }
    cdf.values = std::move(samples);
    return cdf;
}

EngineRun compare_on_field(const Scenario &scenario, const LevyFieldRealization &field,
                           const CompareOptions &options)
{
    const auto &[radio, geometry, trajectory, grid, volatility_std] = scenario;
    const ScattererSet scatterers = materialize_scatterers(field, grid, trajectory);

    DirectOptions direct_options;
    direct_options.include_los = options.ambit.include_los;
    direct_options.ambit_set = options.ambit.ambit_set;
    AmbitOptions ambit_options = options.ambit;
    ambit_options.timing = nullptr;

    EngineRun run;
    run.seed = field.seed;
    ImpulseResponseGrid direct_h;
    ImpulseResponseGrid ambit_h;
    run.direct_s = min_wall_clock(options.timing_repetitions, [&] {
        direct_h = simulate_direct(radio, geometry, trajectory, grid, scatterers, direct_options);
    });
    run.ambit_s = min_wall_clock(options.timing_repetitions, [&] {
        ambit_h = simulate_ambit(radio, geometry, trajectory, grid, field, ambit_options);
    });

    direct_options.response = Response::power_delay_profile;
    ambit_options.response = Response::power_delay_profile;
    const auto direct_power = received_power_trace(
        simulate_direct(radio, geometry, trajectory, grid, scatterers, direct_options));
    const auto ambit_power =
        received_power_trace(simulate_ambit(radio, geometry, trajectory, grid, field, ambit_options));
    const auto direct_coherent = received_power_trace(direct_h);
    const auto ambit_coherent = received_power_trace(ambit_h);

    for (std::size_t k = 0; k < direct_power.size(); ++k)
    {
        const double pd = direct_power[k];
        const double pa = ambit_power[k];
        if (pd == 0.0 && pa == 0.0)
            continue;
        if (pd == 0.0 || pa == 0.0)
        {
            ++run.undefined_steps;
            continue;
        }
        run.power_ratio_db.push_back(10.0 * std::log10(pd / pa));
        if (direct_coherent[k] > 0.0 && ambit_coherent[k] > 0.0)
            run.coherent_power_ratio_db.push_back(10.0 * std::log10(direct_coherent[k] / ambit_coherent[k]));
    }
    return run;
}

EngineComparison summarize_runs(std::vector<EngineRun> runs)
{
    std::vector<double> ratio;
    std::vector<double> pooled;
    std::vector<double> coherent;
    for (const auto &r : runs)
    {
        ratio.push_back(r.direct_s / r.ambit_s);
        pooled.insert(pooled.end(), r.power_ratio_db.begin(), r.power_ratio_db.end());
        coherent.insert(coherent.end(), r.coherent_power_ratio_db.begin(), r.coherent_power_ratio_db.end());
    }
    EngineComparison c;
    c.runtime_ratio = EmpiricalCdf::from_samples(std::move(ratio));
    if (!pooled.empty())
        c.power_ratio_db = EmpiricalCdf::from_samples(std::move(pooled));
    if (!coherent.empty())
        c.coherent_power_ratio_db = EmpiricalCdf::from_samples(std::move(coherent));
    c.runs = std::move(runs);
    return c;
}

EngineComparison compare_engines(const Scenario &scenario, std::span<const std::uint64_t> seeds,
                                 const CompareOptions &options)
{
    if (seeds.empty())
        throw parameter_error("compare_engines needs at least one seed");
    std::vector<EngineRun> runs;
    for (const auto seed : seeds)
    {
        const auto field = sample_field(scenario.grid, scenario.geometry, scenario.trajectory, seed,
                                        scenario.volatility_std);
        runs.push_back(compare_on_field(scenario, field, options));
    }
    return summarize_runs(std::move(runs));
}

void write_acf_csv(std::ostream &os, const AcfEstimate &acf)
{
    os << "lag_s,re,im,abs\n";
    for (std::size_t i = 0; i < acf.lags_s.size(); ++i)
        os << csv::num(acf.lags_s[i]) << ',' << csv::num(acf.values[i].real()) << ','
           << csv::num(acf.values[i].imag()) << ',' << csv::num(std::abs(acf.values[i])) << '\n';
}

void write_psd_csv(std::ostream &os, const DopplerPsd &psd)
{
    os << "freq_hz,psd\n";
    for (std::size_t i = 0; i < psd.freqs_hz.size(); ++i)
        os << csv::num(psd.freqs_hz[i]) << ',' << csv::num(psd.psd[i]) << '\n';
}

void write_cdf_csv(std::ostream &os, const EmpiricalCdf &cdf)
{
    os << "value,prob\n";
    for (std::size_t i = 0; i < cdf.values.size(); ++i)
        os << csv::num(cdf.values[i]) << ',' << csv::num(cdf.probs[i]) << '\n';
}

} // namespace ambit
