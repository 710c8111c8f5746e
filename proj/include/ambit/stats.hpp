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

// Ensemble statistics over engine outputs: anchored temporal ACF, windowed
// Doppler PSD, and the engine comparison CDFs.

#include "ambit/ambit_sim.hpp"
#include "ambit/direct_sim.hpp"
#include "ambit/impulse_response.hpp"
#include "ambit/scene.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace ambit
{

using GainTrace = std::vector<cplx>;

// Sum over delay bins per time step.
GainTrace narrowband_gain(const ImpulseResponseGrid &h);

struct AcfEstimate
{
    double anchor_time_s = 0.0;
    std::vector<double> lags_s;
    std::vector<cplx> values;
    std::int64_t realization_count = 0;

    // Value at lag zero (exactly 1 for a non-degenerate anchor).
    cplx at_zero() const;
};

// rho(dt; t0) = <g(t0) conj(g(t0 + dt))> / sqrt(<|g(t0)|^2> <|g(t0 + dt)|^2>)
// over realizations, for
// lags 0, dt, ..., max_lag (and the mirrored negative lags when two_sided).
// Throws parameter_error for an empty ensemble or lags outside the traces,
// and error when the anchor carries no power.
AcfEstimate temporal_acf(std::span<const GainTrace> gains, double dt_s, double anchor_time_s,
                         double max_lag_s, bool two_sided = false);

// First non-negative lag with |rho| < threshold.
std::optional<double> coherence_time(const AcfEstimate &acf, double threshold = 0.5);

struct DopplerPsd
{
    double anchor_time_s = 0.0;
    double window_start_s = 0.0;
    double window_length_s = 0.0;
    double resolution_hz = 0.0;
    std::vector<double> freqs_hz; // ascending, symmetric about 0
    std::vector<double> psd;      // per Hz
    // Taper-weighted mean power of the gain over the window, averaged over
    // realizations; equals the PSD integral.
    double windowed_mean_power = 0.0;
};

// Hann-tapered periodogram over an odd-length window centred on the anchor
// (shifted to stay inside the traces), averaged over realizations.
DopplerPsd doppler_psd(std::span<const GainTrace> gains, double dt_s, double anchor_time_s,
                       double window_length_s);

// Fraction of PSD mass at |f| <= f_hz.
double psd_mass_within(const DopplerPsd &psd, double f_hz);

// Smallest bin frequency f such that the mass within |f| reaches `fraction`.
double doppler_edge(const DopplerPsd &psd, double fraction = 0.99);

struct EmpiricalCdf
{
    std::vector<double> values; // ascending
    std::vector<double> probs;  // (i + 1) / n
    double median = 0.0;        // 50th-percentile sample
    double mean = 0.0;
    double stddev = 0.0;        // sample standard deviation

    static EmpiricalCdf from_samples(std::vector<double> samples);
    std::size_t size() const { return values.size(); }
};

struct CompareOptions
{
    int timing_repetitions = 3;
    AmbitOptions ambit;
};

// One realization of the engine comparison.
struct EngineRun
{
    std::uint64_t seed = 0;
    double direct_s = 0.0; // minimum over repetitions
    double ambit_s = 0.0;
    // Per step 10 log10(P_direct / P_ambit) of the path-power sums.
    std::vector<double> power_ratio_db;
    // Same with the coherent received power sum_bins |h|^2 (informational).
    std::vector<double> coherent_power_ratio_db;
    std::int64_t undefined_steps = 0; // exactly one engine had zero power
};

struct EngineComparison
{
    std::vector<EngineRun> runs;
    EmpiricalCdf runtime_ratio;           // direct / ambit wall clock
    EmpiricalCdf power_ratio_db;          // pooled over steps and runs
    EmpiricalCdf coherent_power_ratio_db; // pooled, informational
};

// Runs both engines on the identical scatterer environment. Only engine
// compute is timed; field sampling and scatterer materialization are shared.
EngineRun compare_on_field(const Scenario &scenario, const LevyFieldRealization &field,
                           const CompareOptions &options = {});

EngineComparison compare_engines(const Scenario &scenario, std::span<const std::uint64_t> seeds,
                                 const CompareOptions &options = {});

EngineComparison summarize_runs(std::vector<EngineRun> runs);

void write_acf_csv(std::ostream &os, const AcfEstimate &acf);
void write_psd_csv(std::ostream &os, const DopplerPsd &psd);
void write_cdf_csv(std::ostream &os, const EmpiricalCdf &cdf);

} // namespace ambit
