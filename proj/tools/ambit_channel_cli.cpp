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
#include "ambit/harness.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;

namespace
{

struct Common
{
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> workers;
    std::string out;
};

ambit::ExperimentConfig resolve(const Common &c)
{
    auto config = c.config_path.empty() ? ambit::default_config() : ambit::load_config(c.config_path);
    if (c.seed)
        config.run.base_seed = *c.seed;
    if (c.workers)
        config.run.workers = *c.workers;
    ambit::validate(config);
    return config;
}

fs::path output_dir(const Common &c, const ambit::ExperimentConfig &config)
{
    return c.out.empty() ? fs::path(config.output.directory) : fs::path(c.out);
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Time-varying wideband channel simulation with direct and ambit-field engines"};
    app.set_version_flag("--version", std::string(ambit::toolkit_version));
    app.require_subcommand(1);

    Common common;
    std::string format;
    std::string manifest;

    auto add_common = [&](CLI::App *sub) {
        sub->add_option("-c,--config", common.config_path, "Experiment configuration (JSON)")
            ->check(CLI::ExistingFile);
        sub->add_option("--seed", common.seed, "Base seed; realization r uses seed + r");
        sub->add_option("--workers", common.workers, "Worker threads (AMBIT_CHANNEL_WORKERS overrides)")
            ->check(CLI::PositiveNumber);
        sub->add_option("-o,--out", common.out, "Output directory");
    };

    auto *simulate = app.add_subcommand("simulate", "Run the configured engines and write artifacts");
    add_common(simulate);
    simulate->add_option("--format", format, "Impulse-response format")
        ->check(CLI::IsMember({"csv", "binary", "both"}));

    auto *stats = app.add_subcommand("stats", "ACF and Doppler PSD from a finished run");
    add_common(stats);
    stats->add_option("-m,--manifest", manifest, "manifest.json of a simulate run")->required();

    auto *bench = app.add_subcommand("bench", "Runtime and power comparison of the two engines");
    add_common(bench);

    auto *check = app.add_subcommand("validate", "Check a configuration and print the derived grid");
    add_common(check);

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (simulate->parsed())
        {
            auto config = resolve(common);
            if (format == "csv" || format == "both")
                config.output.csv = true;
            if (format == "binary" || format == "both")
                config.output.binary = true;
            if (format == "csv")
                config.output.binary = false;
            if (format == "binary")
                config.output.csv = false;
            const auto dir = output_dir(common, config);
            const auto m = ambit::run_simulate(config, dir, ambit::resolve_workers(config.run.workers), std::cerr);
            std::cout << "wrote " << m.files.size() << " files to " << dir.string() << " (config "
                      << m.config_hash << ")\n";
        }
        else if (stats->parsed())
        {
            auto config = resolve(common);
            const fs::path dir = common.out.empty() ? fs::path(manifest).parent_path() / "stats" : fs::path(common.out);
            const auto s = ambit::run_stats(manifest, config.stats, dir, std::cerr);
            for (const auto &a : s.anchors)
            {
                std::cout << "t0 = " << a.anchor_s << " s: coherence ";
                if (a.coherence_time_s)
                    std::cout << *a.coherence_time_s * 1e3 << " ms";
                else
                    std::cout << "beyond max lag";
                std::cout << ", 99% Doppler edge " << a.doppler_edge_hz << " Hz (bin " << a.psd_resolution_hz
                          << " Hz)\n";
            }
        }
        else if (bench->parsed())
        {
            const auto config = resolve(common);
            ambit::run_bench(config, output_dir(common, config), std::cout);
        }
        else if (check->parsed())
        {
            const auto config = resolve(common);
            const auto sc = ambit::build_scenario(config);
            const auto &g = sc.grid;
            std::cout << "disc radius R     " << sc.geometry.disc_radius_m << " m\n"
                      << "density lambda    " << sc.geometry.scatterer_density_per_m2 << " /m^2\n"
                      << "lateral cells     " << g.lateral_count() << " (M = " << g.m_half << ")\n"
                      << "disc columns      " << 2 * g.n_half + 1 << " (N = " << g.n_half << ")\n"
                      << "time steps        " << g.p_count << '\n'
                      << "delay bins        " << g.d_count << '\n'
                      << "field columns     " << g.column_count() << '\n'
                      << "config hash       " << ambit::config_hash(config) << '\n';
        }
    }
    catch (const ambit::config_error &e)
    {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
