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

// Experiment configuration, seeded orchestration and persistence.

#include "ambit/ambit_sim.hpp"
#include "ambit/impulse_response.hpp"
#include "ambit/scene.hpp"
#include "ambit/stats.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ambit
{

inline constexpr const char *toolkit_version = "0.1.0";

enum class EngineChoice
{
    direct,
    ambit,
    both,
};

struct SceneConfig
{
    double bs_x_m = -100.0;
    double bs_y_m = 20.0;
    // Exactly one pair: (mean_path_count, path_arrival_rate_per_s) or
    // (disc_radius_m, scatterer_density_per_m2).
    std::optional<double> mean_path_count;
    std::optional<double> path_arrival_rate_per_s;
    std::optional<double> disc_radius_m;
    std::optional<double> scatterer_density_per_m2;
    double initial_speed_m_per_s = 40.0 / 3.6;
    double acceleration_m_per_s2 = 0.0;
    double initial_y_m = 0.0;

    bool operator==(const SceneConfig &) const = default;
};

struct RadioConfig
{
    double carrier_frequency_hz = 2.6e9;
    double path_loss_exponent = 1.7;
    std::string gain_mode = "isotropic"; // or "explicit"
    std::optional<double> ref_gain_scatter;
    std::optional<double> ref_gain_los;
    double volatility_std = 1.0;

    bool operator==(const RadioConfig &) const = default;
};

struct RunConfig
{
    EngineChoice engine = EngineChoice::both;
    std::int64_t realizations = 500;
    std::uint64_t base_seed = 1;
    bool include_los = false;
    AmbitSet ambit_set = AmbitSet::disc;
    ConvolutionMethod convolution = ConvolutionMethod::sparse;
    unsigned workers = 1;

    bool operator==(const RunConfig &) const = default;
};

struct OutputConfig
{
    std::string directory = "out";
    bool csv = true;
    bool binary = false;
    bool export_cir = true;
    bool export_scatterers = false;

    bool operator==(const OutputConfig &) const = default;
};

struct StatsConfig
{
    std::vector<double> anchors_s{0.0, 1.5, 3.0};
    double max_lag_s = 0.02;
    double psd_window_s = 0.5;
    std::string engine = "ambit";

    bool operator==(const StatsConfig &) const = default;
};

struct BenchConfig
{
    std::vector<double> path_counts{100.0, 1000.0, 5000.0};
    std::int64_t realizations = 5;
    int timing_repetitions = 3;
    double t_max_s = 4.0;

    bool operator==(const BenchConfig &) const = default;
};

struct ExperimentConfig
{
    SceneConfig scene;
    RadioConfig radio;
    GridInputs grid;
    RunConfig run;
    OutputConfig output;
    StatsConfig stats;
    BenchConfig bench;

    bool operator==(const ExperimentConfig &) const = default;
};

// BS at (-100, 20), 40 km/h, 2.6 GHz, gamma = 1.7, isotropic gains, no LoS,
// N_s = R_s = 100, 500 realizations, desk-scale grid.
ExperimentConfig default_config();

// Validates while parsing; throws config_error naming the offending field.
// Speeds may be given in km/h (`initial_speed_kmh`) and carrier frequencies in
// GHz (`carrier_frequency_ghz`); both are converted to SI.
ExperimentConfig parse_config(const nlohmann::json &doc);
ExperimentConfig load_config(const std::filesystem::path &path);
nlohmann::json to_json(const ExperimentConfig &config);

// Throws config_error if any cross-field constraint fails, including the
// physical checks done by make_grid.
void validate(const ExperimentConfig &config);

Scenario build_scenario(const ExperimentConfig &config);

std::vector<std::uint64_t> realization_seeds(std::uint64_t base_seed, std::int64_t count);

// FNV-1a over the canonical JSON text, as 16 hex digits.
std::string config_hash(const ExperimentConfig &config);

struct RunManifest
{
    std::string config_hash;
    std::string version = toolkit_version;
    std::vector<std::uint64_t> seeds;
    nlohmann::json config;
    std::int64_t steps = 0;
    std::int64_t bins = 0;
    double dt_s = 0.0;
    double dtau_s = 0.0;
    std::vector<std::string> engines;
    std::vector<std::string> files; // relative to the manifest directory
    nlohmann::json timings;

    nlohmann::json to_json() const;
    static RunManifest from_json(const nlohmann::json &doc);
};

// Worker count: AMBIT_CHANNEL_WORKERS when set, else `requested`, at least 1.
unsigned resolve_workers(unsigned requested);

// Runs the configured engines over all realizations and writes impulse
// responses, gains, power traces, timing.json and manifest.json into `out_dir`.
RunManifest run_simulate(const ExperimentConfig &config, const std::filesystem::path &out_dir,
                         unsigned workers, std::ostream &log);

struct AnchorSummary
{
    double anchor_s = 0.0;
    std::optional<double> coherence_time_s;
    double doppler_edge_hz = 0.0;
    double psd_resolution_hz = 0.0;
};

struct StatsSummary
{
    std::string engine;
    std::int64_t realization_count = 0;
    std::vector<AnchorSummary> anchors;
    std::vector<std::string> warnings;
    std::vector<std::string> files;
};

// Reads the gain traces listed by a manifest and writes acf_*.csv, psd_*.csv
// and stats_summary.json into `out_dir`.
StatsSummary run_stats(const std::filesystem::path &manifest_path, const StatsConfig &stats,
                       const std::filesystem::path &out_dir, std::ostream &log);

struct BenchRow
{
    double path_count = 0.0;
    EngineComparison comparison;
};

// Engine comparison over bench.path_counts (N_s = R_s) with the bench horizon.
std::vector<BenchRow> run_bench(const ExperimentConfig &config, const std::filesystem::path &out_dir,
                                std::ostream &log);

// Reads a gain CSV written by run_simulate.
GainTrace read_gain_csv(const std::filesystem::path &path);

} // namespace ambit
