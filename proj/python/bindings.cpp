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
#include "ambit/harness.hpp"
#include "ambit/levy_field.hpp"
#include "ambit/stats.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace ambit;

namespace
{

ExperimentConfig config_from(const std::string &text)
{
    return parse_config(nlohmann::json::parse(text));
}

EngineOptions engine_options(const ExperimentConfig &c)
{
    EngineOptions o;
    o.include_los = c.run.include_los;
    o.ambit_set = c.run.ambit_set;
    return o;
}

ComplexMatrix realization(const std::string &config_json, std::uint64_t seed, const std::string &engine,
                          bool power_delay_profile)
{
    const auto c = config_from(config_json);
    const auto s = build_scenario(c);
    const auto field = sample_field(s.grid, s.geometry, s.trajectory, seed, s.volatility_std);
    const auto response = power_delay_profile ? Response::power_delay_profile : Response::impulse;
    py::gil_scoped_release release;
    if (engine == "direct")
    {
        DirectOptions o;
        static_cast<EngineOptions &>(o) = engine_options(c);
        o.response = response;
        return simulate_direct(s.radio, s.geometry, s.trajectory, s.grid,
                               materialize_scatterers(field, s.grid, s.trajectory), o)
            .values;
    }
    if (engine == "ambit")
    {
        AmbitOptions o;
        static_cast<EngineOptions &>(o) = engine_options(c);
        o.response = response;
        o.method = c.run.convolution;
        return simulate_ambit(s.radio, s.geometry, s.trajectory, s.grid, field, o).values;
    }
    throw config_error("engine", "expected direct or ambit, got '" + engine + "'");
}

py::dict grid_info(const std::string &config_json)
{
    const auto s = build_scenario(config_from(config_json));
    py::dict d;
    d["disc_radius_m"] = s.geometry.disc_radius_m;
    d["scatterer_density_per_m2"] = s.geometry.scatterer_density_per_m2;
    d["m_half"] = s.grid.m_half;
    d["n_half"] = s.grid.n_half;
    d["steps"] = s.grid.p_count;
    d["bins"] = s.grid.d_count;
    d["dt_s"] = s.grid.dt_s();
    d["dtau_s"] = s.grid.dtau_s();
    d["column_begin"] = s.grid.column_begin;
    d["column_end"] = s.grid.column_end;
    return d;
}

py::dict compare(const std::string &config_json, const std::vector<std::uint64_t> &seeds, int repetitions)
{
    const auto c = config_from(config_json);
    const auto s = build_scenario(c);
    CompareOptions o;
    o.timing_repetitions = repetitions;
    static_cast<EngineOptions &>(o.ambit) = engine_options(c);
    o.ambit.method = c.run.convolution;
    EngineComparison r;
    {
        py::gil_scoped_release release;
        r = compare_engines(s, seeds, o);
    }
    py::dict d;
    d["runtime_ratio"] = r.runtime_ratio.values;
    d["power_ratio_db"] = r.power_ratio_db.values;
    d["power_ratio_db_median"] = r.power_ratio_db.median;
    d["power_ratio_db_std"] = r.power_ratio_db.stddev;
    d["coherent_power_ratio_db_median"] = r.coherent_power_ratio_db.median;
    d["runtime_ratio_median"] = r.runtime_ratio.median;
    return d;
}

std::string manifest_text(const std::string &config_json, const std::string &out_dir, unsigned workers)
{
    const auto c = config_from(config_json);
    std::ostringstream log;
    RunManifest m;
    {
        py::gil_scoped_release release;
        m = run_simulate(c, out_dir, resolve_workers(workers), log);
    }
    return m.to_json().dump();
}

} // namespace

PYBIND11_MODULE(_ambit_channel, m)
{
    m.doc() = "Time-varying wideband channel simulation with direct and ambit-field engines";
    m.attr("__version__") = toolkit_version;

    auto base = py::register_exception<error>(m, "AmbitError", PyExc_RuntimeError);
    py::register_exception<parameter_error>(m, "ParameterError", base.ptr());
    py::register_exception<config_error>(m, "ConfigError", base.ptr());
    py::register_exception<delay_overflow_error>(m, "DelayOverflowError", base.ptr());
    py::register_exception<horizon_error>(m, "HorizonError", base.ptr());
    py::register_exception<contract_error>(m, "ContractError", base.ptr());

    m.def(
        "derive_geometry",
        [](double n, double rate, double v0) {
            const auto g = derive_geometry(n, rate, v0);
            return py::make_tuple(g.disc_radius_m, g.scatterer_density_per_m2);
        },
        py::arg("mean_path_count"), py::arg("path_arrival_rate_per_s"), py::arg("initial_speed_m_per_s"),
        "Disc radius and scatterer density for the given multipath statistics.");
    m.def("euclidean_distance", &euclidean_distance, py::arg("x1"), py::arg("y1"), py::arg("x2"), py::arg("y2"));
    m.def(
        "mu_position",
        [](double v0, double a, double y, double t) {
            const auto p = mu_position(TrajectoryModel{v0, a, y}, t);
            return py::make_tuple(p.x_m, p.y_m);
        },
        py::arg("initial_speed_m_per_s"), py::arg("acceleration_m_per_s2"), py::arg("initial_y_m"), py::arg("t_s"));

    m.def("_validate", [](const std::string &text) { return to_json(config_from(text)).dump(); });
    m.def("_grid_info", &grid_info);
    m.def("_realization", &realization, py::arg("config_json"), py::arg("seed"), py::arg("engine"),
          py::arg("power_delay_profile") = false);
    m.def("_compare", &compare, py::arg("config_json"), py::arg("seeds"), py::arg("repetitions") = 1);
    m.def("_simulate", &manifest_text, py::arg("config_json"), py::arg("out_dir"), py::arg("workers") = 1);
    m.def("_stats", [](const std::string &manifest, const std::string &config_json, const std::string &out_dir) {
        const auto c = config_from(config_json);
        std::ostringstream log;
        const auto s = run_stats(manifest, c.stats, out_dir, log);
        py::list anchors;
        for (const auto &a : s.anchors)
        {
            py::dict d;
            d["anchor_s"] = a.anchor_s;
            d["coherence_time_s"] = a.coherence_time_s ? py::cast(*a.coherence_time_s) : py::none();
            d["doppler_edge_hz"] = a.doppler_edge_hz;
            anchors.append(d);
        }
        return py::make_tuple(anchors, s.warnings);
    });

    m.def(
        "temporal_acf",
        [](const std::vector<GainTrace> &gains, double dt, double anchor, double max_lag) {
            const auto a = temporal_acf(gains, dt, anchor, max_lag);
            return py::make_tuple(a.lags_s, a.values);
        },
        py::arg("gains"), py::arg("dt_s"), py::arg("anchor_time_s"), py::arg("max_lag_s"),
        "Anchored ensemble autocorrelation; returns (lags, values).");
    m.def(
        "doppler_psd",
        [](const std::vector<GainTrace> &gains, double dt, double anchor, double window) {
            const auto p = doppler_psd(gains, dt, anchor, window);
            return py::make_tuple(p.freqs_hz, p.psd);
        },
        py::arg("gains"), py::arg("dt_s"), py::arg("anchor_time_s"), py::arg("window_length_s"),
        "Hann-windowed ensemble periodogram; returns (freqs_hz, psd).");
    m.def(
        "conv2d_fold",
        [](const ComplexMatrix &x, const ComplexMatrix &y, bool fft) {
            ComplexMatrix z = ComplexMatrix::Zero(x.rows() + y.rows() - 1, x.cols() + y.cols() - 1);
            if (fft)
                conv2d_fold_accumulate_fft(x, y, z, 1024);
            else
                conv2d_fold_accumulate(x, y, z);
            return z;
        },
        py::arg("x"), py::arg("y"), py::arg("fft") = false,
        "Full 2D convolution of y with x reversed along rows.");
}
