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
#include "ambit/harness.hpp"

#include "ambit/direct_sim.hpp"
#include "ambit/error.hpp"
#include "ambit/levy_field.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "csv_format.hpp"

namespace ambit
{
namespace fs = std::filesystem;
using nlohmann::json;

namespace
{

// Typed access to one JSON object; remembers which keys were read so that
// unknown (usually misspelled) keys can be rejected.
class Section
{
public:
    Section(const json &doc, std::string path) : doc_(doc), path_(std::move(path))
    {
        if (!doc_.is_object())
            throw config_error(path_, "expected an object");
    }

    bool has(const char *key) const { return doc_.contains(key); }

    std::optional<double> number(const char *key)
    {
        seen_.insert(key);
        if (!doc_.contains(key))
            return std::nullopt;
        const auto &v = doc_.at(key);
        if (!v.is_number() || !std::isfinite(v.get<double>()))
            throw config_error(name(key), "expected a finite number");
        return v.get<double>();
    }

    double number_or(const char *key, double fallback) { return number(key).value_or(fallback); }

    double required_number(const char *key)
    {
        auto v = number(key);
        if (!v)
            throw config_error(name(key), "required field is missing");
        return *v;
    }

    std::int64_t integer_or(const char *key, std::int64_t fallback)
    {
        seen_.insert(key);
        if (!doc_.contains(key))
            return fallback;
        const auto &v = doc_.at(key);
        if (!v.is_number_integer())
            throw config_error(name(key), "expected an integer");
        return v.get<std::int64_t>();
    }

    std::uint64_t unsigned_or(const char *key, std::uint64_t fallback)
    {
        seen_.insert(key);
        if (!doc_.contains(key))
            return fallback;
        const auto &v = doc_.at(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
            throw config_error(name(key), "expected a non-negative integer");
        return v.get<std::uint64_t>();
    }

    bool boolean_or(const char *key, bool fallback)
    {
        seen_.insert(key);
        if (!doc_.contains(key))
            return fallback;
        const auto &v = doc_.at(key);
        if (!v.is_boolean())
            throw config_error(name(key), "expected true or false");
        return v.get<bool>();
    }

    std::string string_or(const char *key, std::string fallback)
    {
        seen_.insert(key);
        if (!doc_.contains(key))
            return fallback;
        const auto &v = doc_.at(key);
        if (!v.is_string())
            throw config_error(name(key), "expected a string");
        return v.get<std::string>();
    }

    std::vector<double> numbers_or(const char *key, std::vector<double> fallback)
    {
        seen_.insert(key);
        if (!doc_.contains(key))
            return fallback;
        const auto &v = doc_.at(key);
        if (!v.is_array())
            throw config_error(name(key), "expected an array of numbers");
        std::vector<double> out;
        for (const auto &e : v)
        {
            if (!e.is_number())
                throw config_error(name(key), "expected an array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

    std::vector<std::string> strings_or(const char *key, std::vector<std::string> fallback)
    {
        seen_.insert(key);
        if (!doc_.contains(key))
            return fallback;
        const auto &v = doc_.at(key);
        if (!v.is_array())
            throw config_error(name(key), "expected an array of strings");
        std::vector<std::string> out;
        for (const auto &e : v)
        {
            if (!e.is_string())
                throw config_error(name(key), "expected an array of strings");
            out.push_back(e.get<std::string>());
        }
        return out;
    }

    void finish() const
    {
        for (const auto &[key, value] : doc_.items())
            if (!seen_.contains(key))
                throw config_error(name(key.c_str()), "unknown field");
    }

    std::string name(const char *key) const { return path_ + "." + key; }

private:
    const json &doc_;
    std::string path_;
    std::set<std::string> seen_;
};

const json &child(const json &doc, const char *key)
{
    static const json empty = json::object();
    return doc.contains(key) ? doc.at(key) : empty;
}

template <class Enum>
Enum parse_enum(const std::string &field, const std::string &value,
                std::initializer_list<std::pair<const char *, Enum>> choices)
{
    std::string allowed;
    for (const auto &[text, e] : choices)
    {
        if (value == text)
            return e;
        allowed += allowed.empty() ? text : std::string("|") + text;
    }
    throw config_error(field, "expected one of " + allowed + ", got '" + value + "'");
}

const char *engine_name(EngineChoice e)
{
    switch (e)
    {
    case EngineChoice::direct: return "direct";
    case EngineChoice::ambit: return "ambit";
    case EngineChoice::both: return "both";
    }
    return "both";
}

const char *ambit_set_name(AmbitSet s) { return s == AmbitSet::disc ? "disc" : "causal_half_disc"; }

const char *convolution_name(ConvolutionMethod m)
{
    return m == ConvolutionMethod::sparse ? "sparse" : "fft_overlap_add";
}

void require(bool ok, const std::string &field, const std::string &what)
{
    if (!ok)
        throw config_error(field, what);
}

template <class F>
void parallel_for(std::int64_t count, unsigned workers, F &&body)
{
    std::atomic<std::int64_t> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
    auto drain = [&] {
        for (;;)
        {
            const std::int64_t i = next.fetch_add(1);
            if (i >= count)
                return;
            try
            {
                body(i);
            }
            catch (...)
            {
                errors[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 1; w < workers && static_cast<std::int64_t>(w) < count; ++w)
            pool.emplace_back(drain);
        drain();
    }
    for (const auto &e : errors)
        if (e)
            std::rethrow_exception(e);
}

std::string realization_tag(std::int64_t index)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "r%04lld", static_cast<long long>(index));
    return buf;
}

std::string anchor_tag(double anchor_s)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "t%.3fs", anchor_s);
    return buf;
}

std::string path_count_tag(double n)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "n%g", n);
    return buf;
}

void write_text(const fs::path &path, const std::string &text)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw error("cannot write " + path.string());
    os << text;
}

json cdf_summary(const EmpiricalCdf &cdf)
{
    return {{"median", cdf.median}, {"mean", cdf.mean}, {"std", cdf.stddev}, {"samples", cdf.size()}};
}

} // namespace

ExperimentConfig default_config()
{
    ExperimentConfig c;
    c.scene.mean_path_count = 100.0;
    c.scene.path_arrival_rate_per_s = 100.0;
    return c;
}

ExperimentConfig parse_config(const json &doc)
{
    if (!doc.is_object())
        throw config_error("config", "expected a JSON object");
    for (const auto &[key, value] : doc.items())
        if (key != "scene" && key != "radio" && key != "grid" && key != "run" && key != "output" &&
            key != "stats" && key != "bench")
            throw config_error(key, "unknown section");

    ExperimentConfig c;
    {
        Section s(child(doc, "scene"), "scene");
        c.scene.bs_x_m = s.number_or("bs_x_m", c.scene.bs_x_m);
        c.scene.bs_y_m = s.number_or("bs_y_m", c.scene.bs_y_m);
        c.scene.mean_path_count = s.number("mean_path_count");
        c.scene.path_arrival_rate_per_s = s.number("path_arrival_rate_per_s");
        c.scene.disc_radius_m = s.number("disc_radius_m");
        c.scene.scatterer_density_per_m2 = s.number("scatterer_density_per_m2");
        const auto kmh = s.number("initial_speed_kmh");
        const auto mps = s.number("initial_speed_m_per_s");
        require(!(kmh && mps), s.name("initial_speed_m_per_s"),
                "give either initial_speed_kmh or initial_speed_m_per_s, not both");
        require(kmh || mps, s.name("initial_speed_m_per_s"), "required field is missing");
        c.scene.initial_speed_m_per_s = mps ? *mps : *kmh / 3.6;
        c.scene.acceleration_m_per_s2 = s.number_or("acceleration_m_per_s2", 0.0);
        c.scene.initial_y_m = s.number_or("initial_y_m", 0.0);
        s.finish();
    }
    {
        Section s(child(doc, "radio"), "radio");
        const auto ghz = s.number("carrier_frequency_ghz");
        const auto hz = s.number("carrier_frequency_hz");
        require(!(ghz && hz), s.name("carrier_frequency_hz"),
                "give either carrier_frequency_ghz or carrier_frequency_hz, not both");
        require(ghz || hz, s.name("carrier_frequency_hz"), "required field is missing");
        c.radio.carrier_frequency_hz = hz ? *hz : *ghz * 1e9;
        c.radio.path_loss_exponent = s.required_number("path_loss_exponent");
        c.radio.gain_mode = s.string_or("gain_mode", "isotropic");
        c.radio.ref_gain_scatter = s.number("ref_gain_scatter");
        c.radio.ref_gain_los = s.number("ref_gain_los");
        c.radio.volatility_std = s.number_or("volatility_std", 1.0);
        s.finish();
    }
    {
        Section s(child(doc, "grid"), "grid");
        c.grid.dt_s = s.number_or("dt_s", c.grid.dt_s);
        c.grid.dy_m = s.number_or("dy_m", c.grid.dy_m);
        c.grid.dtau_s = s.number_or("dtau_s", c.grid.dtau_s);
        c.grid.tau_max_s = s.number_or("tau_max_s", c.grid.tau_max_s);
        c.grid.t_max_s = s.number_or("t_max_s", c.grid.t_max_s);
        s.finish();
    }
    {
        Section s(child(doc, "run"), "run");
        c.run.engine = parse_enum<EngineChoice>(s.name("engine"), s.string_or("engine", "both"),
                                  {{"direct", EngineChoice::direct},
                                   {"ambit", EngineChoice::ambit},
                                   {"both", EngineChoice::both}});
        c.run.realizations = s.integer_or("realizations", c.run.realizations);
        c.run.base_seed = s.unsigned_or("base_seed", c.run.base_seed);
        c.run.include_los = s.boolean_or("include_los", false);
        c.run.ambit_set = parse_enum<AmbitSet>(s.name("ambit_set"), s.string_or("ambit_set", "disc"),
                                     {{"disc", AmbitSet::disc},
                                      {"causal_half_disc", AmbitSet::causal_half_disc}});
        c.run.convolution = parse_enum<ConvolutionMethod>(s.name("convolution"), s.string_or("convolution", "sparse"),
                                       {{"sparse", ConvolutionMethod::sparse},
                                        {"fft_overlap_add", ConvolutionMethod::fft_overlap_add}});
        c.run.workers = static_cast<unsigned>(s.unsigned_or("workers", 1));
        s.finish();
    }
    {
        Section s(child(doc, "output"), "output");
        c.output.directory = s.string_or("directory", c.output.directory);
        const auto formats = s.strings_or("formats", {"csv"});
        c.output.csv = c.output.binary = false;
        for (const auto &f : formats)
        {
            if (f == "csv")
                c.output.csv = true;
            else if (f == "binary")
                c.output.binary = true;
            else
                throw config_error(s.name("formats"), "expected csv or binary, got '" + f + "'");
        }
        c.output.export_cir = s.boolean_or("export_cir", true);
        c.output.export_scatterers = s.boolean_or("export_scatterers", false);
        s.finish();
    }
    {
        Section s(child(doc, "stats"), "stats");
        c.stats.anchors_s = s.numbers_or("anchors_s", c.stats.anchors_s);
        c.stats.max_lag_s = s.number_or("max_lag_s", c.stats.max_lag_s);
        c.stats.psd_window_s = s.number_or("psd_window_s", c.stats.psd_window_s);
        c.stats.engine = s.string_or("engine", c.stats.engine);
        s.finish();
    }
    {
        Section s(child(doc, "bench"), "bench");
        c.bench.path_counts = s.numbers_or("path_counts", c.bench.path_counts);
        c.bench.realizations = s.integer_or("realizations", c.bench.realizations);
        c.bench.timing_repetitions =
            static_cast<int>(s.integer_or("timing_repetitions", c.bench.timing_repetitions));
        c.bench.t_max_s = s.number_or("t_max_s", c.bench.t_max_s);
        s.finish();
    }
    validate(c);
    return c;
}

ExperimentConfig load_config(const fs::path &path)
{
    std::ifstream is(path);
    if (!is)
        throw config_error("config", "cannot open " + path.string());
    json doc;
    try
    {
        doc = json::parse(is);
    }
    catch (const json::parse_error &e)
    {
        throw config_error("config", std::string("malformed JSON: ") + e.what());
    }
    return parse_config(doc);
}

json to_json(const ExperimentConfig &c)
{
    json scene = {{"bs_x_m", c.scene.bs_x_m},
                  {"bs_y_m", c.scene.bs_y_m},
                  {"initial_speed_m_per_s", c.scene.initial_speed_m_per_s},
                  {"acceleration_m_per_s2", c.scene.acceleration_m_per_s2},
                  {"initial_y_m", c.scene.initial_y_m}};
    if (c.scene.mean_path_count)
        scene["mean_path_count"] = *c.scene.mean_path_count;
    if (c.scene.path_arrival_rate_per_s)
        scene["path_arrival_rate_per_s"] = *c.scene.path_arrival_rate_per_s;
    if (c.scene.disc_radius_m)
        scene["disc_radius_m"] = *c.scene.disc_radius_m;
    if (c.scene.scatterer_density_per_m2)
        scene["scatterer_density_per_m2"] = *c.scene.scatterer_density_per_m2;

    json radio = {{"carrier_frequency_hz", c.radio.carrier_frequency_hz},
                  {"path_loss_exponent", c.radio.path_loss_exponent},
                  {"gain_mode", c.radio.gain_mode},
                  {"volatility_std", c.radio.volatility_std}};
    if (c.radio.ref_gain_scatter)
        radio["ref_gain_scatter"] = *c.radio.ref_gain_scatter;
    if (c.radio.ref_gain_los)
        radio["ref_gain_los"] = *c.radio.ref_gain_los;

    json formats = json::array();
    if (c.output.csv)
        formats.push_back("csv");
    if (c.output.binary)
        formats.push_back("binary");

    return {
        {"scene", scene},
        {"radio", radio},
        {"grid",
         {{"dt_s", c.grid.dt_s},
          {"dy_m", c.grid.dy_m},
          {"dtau_s", c.grid.dtau_s},
          {"tau_max_s", c.grid.tau_max_s},
          {"t_max_s", c.grid.t_max_s}}},
        {"run",
         {{"engine", engine_name(c.run.engine)},
          {"realizations", c.run.realizations},
          {"base_seed", c.run.base_seed},
          {"include_los", c.run.include_los},
          {"ambit_set", ambit_set_name(c.run.ambit_set)},
          {"convolution", convolution_name(c.run.convolution)},
          {"workers", c.run.workers}}},
        {"output",
         {{"directory", c.output.directory},
          {"formats", formats},
          {"export_cir", c.output.export_cir},
          {"export_scatterers", c.output.export_scatterers}}},
        {"stats",
         {{"anchors_s", c.stats.anchors_s},
          {"max_lag_s", c.stats.max_lag_s},
          {"psd_window_s", c.stats.psd_window_s},
          {"engine", c.stats.engine}}},
        {"bench",
         {{"path_counts", c.bench.path_counts},
          {"realizations", c.bench.realizations},
          {"timing_repetitions", c.bench.timing_repetitions},
          {"t_max_s", c.bench.t_max_s}}},
    };
}

void validate(const ExperimentConfig &c)
{
    const bool stats_pair = c.scene.mean_path_count || c.scene.path_arrival_rate_per_s;
    const bool disc_pair = c.scene.disc_radius_m || c.scene.scatterer_density_per_m2;
    require(stats_pair != disc_pair, "scene",
            "give exactly one of (mean_path_count, path_arrival_rate_per_s) or "
            "(disc_radius_m, scatterer_density_per_m2)");
    if (stats_pair)
    {
        require(c.scene.mean_path_count.has_value(), "scene.mean_path_count", "required with path_arrival_rate_per_s");
        require(c.scene.path_arrival_rate_per_s.has_value(), "scene.path_arrival_rate_per_s",
                "required with mean_path_count");
        require(*c.scene.mean_path_count > 0.0, "scene.mean_path_count", "must be positive");
        require(*c.scene.path_arrival_rate_per_s > 0.0, "scene.path_arrival_rate_per_s", "must be positive");
    }
    else
    {
        require(c.scene.disc_radius_m.has_value(), "scene.disc_radius_m", "required with scatterer_density_per_m2");
        require(c.scene.scatterer_density_per_m2.has_value(), "scene.scatterer_density_per_m2",
                "required with disc_radius_m");
        require(*c.scene.disc_radius_m > 0.0, "scene.disc_radius_m", "must be positive");
        require(*c.scene.scatterer_density_per_m2 >= 0.0, "scene.scatterer_density_per_m2",
                "must be non-negative");
    }
    require(c.scene.initial_speed_m_per_s > 0.0, "scene.initial_speed_m_per_s", "must be positive");
    require(c.scene.initial_speed_m_per_s + c.scene.acceleration_m_per_s2 * c.grid.t_max_s >= 0.0,
            "scene.acceleration_m_per_s2", "speed turns negative within grid.t_max_s");

    require(c.radio.carrier_frequency_hz > 0.0, "radio.carrier_frequency_hz", "must be positive");
    require(c.radio.path_loss_exponent > 0.0, "radio.path_loss_exponent", "must be positive");
    require(c.radio.volatility_std >= 0.0, "radio.volatility_std", "must be non-negative");
    if (c.radio.gain_mode == "explicit")
    {
        require(c.radio.ref_gain_scatter.has_value() && *c.radio.ref_gain_scatter > 0.0,
                "radio.ref_gain_scatter", "explicit gain mode needs a positive value");
        require(c.radio.ref_gain_los.has_value() && *c.radio.ref_gain_los > 0.0, "radio.ref_gain_los",
                "explicit gain mode needs a positive value");
    }
    else
    {
        require(c.radio.gain_mode == "isotropic", "radio.gain_mode", "expected isotropic or explicit");
        require(!c.radio.ref_gain_scatter && !c.radio.ref_gain_los, "radio.gain_mode",
                "reference gains are only allowed with gain_mode explicit");
    }

    require(c.grid.dt_s > 0.0, "grid.dt_s", "must be positive");
    require(c.grid.dy_m > 0.0, "grid.dy_m", "must be positive");
    require(c.grid.dtau_s > 0.0, "grid.dtau_s", "must be positive");
    require(c.grid.tau_max_s > 0.0, "grid.tau_max_s", "must be positive");
    require(c.grid.t_max_s > 0.0, "grid.t_max_s", "must be positive");

    require(c.run.realizations >= 1, "run.realizations", "must be at least 1");
    require(c.output.csv || c.output.binary, "output.formats", "needs at least one format");
    require(!c.output.directory.empty(), "output.directory", "must not be empty");

    require(c.stats.max_lag_s >= 0.0, "stats.max_lag_s", "must be non-negative");
    require(c.stats.psd_window_s > 0.0, "stats.psd_window_s", "must be positive");
    for (double a : c.stats.anchors_s)
        require(a >= 0.0, "stats.anchors_s", "anchors must be non-negative");
    require(c.stats.engine == "ambit" || c.stats.engine == "direct", "stats.engine",
            "expected ambit or direct");

    require(!c.bench.path_counts.empty(), "bench.path_counts", "must not be empty");
    for (double n : c.bench.path_counts)
        require(n > 0.0, "bench.path_counts", "values must be positive");
    require(c.bench.realizations >= 1, "bench.realizations", "must be at least 1");
    require(c.bench.timing_repetitions >= 1, "bench.timing_repetitions", "must be at least 1");
    require(c.bench.t_max_s > 0.0, "bench.t_max_s", "must be positive");

    try
    {
        (void)build_scenario(c);
    }
    catch (const parameter_error &e)
    {
        throw config_error("grid", e.what());
    }
}

Scenario build_scenario(const ExperimentConfig &c)
{
    Scenario s;
    s.trajectory.initial_speed_m_per_s = c.scene.initial_speed_m_per_s;
    s.trajectory.acceleration_m_per_s2 = c.scene.acceleration_m_per_s2;
    s.trajectory.initial_y_m = c.scene.initial_y_m;
    if (c.scene.mean_path_count)
        s.geometry = SceneGeometry::from_path_statistics(c.scene.bs_x_m, c.scene.bs_y_m, *c.scene.mean_path_count,
                                                         *c.scene.path_arrival_rate_per_s,
                                                         c.scene.initial_speed_m_per_s);
    else
        s.geometry = SceneGeometry::from_disc(c.scene.bs_x_m, c.scene.bs_y_m, c.scene.disc_radius_m.value_or(0.0),
                                              c.scene.scatterer_density_per_m2.value_or(0.0));
    s.radio = c.radio.gain_mode == "explicit"
                  ? ChannelParams::with_gains(c.radio.carrier_frequency_hz, c.radio.path_loss_exponent,
                                              c.radio.ref_gain_scatter.value_or(0.0),
                                              c.radio.ref_gain_los.value_or(0.0))
                  : ChannelParams::isotropic(c.radio.carrier_frequency_hz, c.radio.path_loss_exponent);
    s.grid = make_grid(c.grid, s.geometry, s.trajectory, s.radio.light_speed_m_per_s);
    s.volatility_std = c.radio.volatility_std;
    return s;
}

std::vector<std::uint64_t> realization_seeds(std::uint64_t base_seed, std::int64_t count)
{
    std::vector<std::uint64_t> seeds;
    for (std::int64_t r = 0; r < count; ++r)
        seeds.push_back(base_seed + static_cast<std::uint64_t>(r));
    return seeds;
}

std::string config_hash(const ExperimentConfig &config)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : to_json(config).dump())
    {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

json RunManifest::to_json() const
{
    return {{"config_hash", config_hash}, {"version", version}, {"seeds", seeds},
            {"config", config},           {"steps", steps},     {"bins", bins},
            {"dt_s", dt_s},               {"dtau_s", dtau_s},   {"engines", engines},
            {"files", files},             {"timings", timings}};
}

RunManifest RunManifest::from_json(const json &doc)
{
    try
    {
        RunManifest m;
        m.config_hash = doc.at("config_hash").get<std::string>();
        m.version = doc.at("version").get<std::string>();
        m.seeds = doc.at("seeds").get<std::vector<std::uint64_t>>();
        m.config = doc.at("config");
        m.steps = doc.at("steps").get<std::int64_t>();
        m.bins = doc.at("bins").get<std::int64_t>();
        m.dt_s = doc.at("dt_s").get<double>();
        m.dtau_s = doc.at("dtau_s").get<double>();
        m.engines = doc.at("engines").get<std::vector<std::string>>();
        m.files = doc.at("files").get<std::vector<std::string>>();
        m.timings = doc.value("timings", json::object());
        return m;
    }
    catch (const json::exception &e)
    {
        throw error(std::string("malformed manifest: ") + e.what());
    }
}

unsigned resolve_workers(unsigned requested)
{
    if (const char *env = std::getenv("AMBIT_CHANNEL_WORKERS"); env && *env)
    {
        char *end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v > 0)
            return static_cast<unsigned>(v);
        throw config_error("AMBIT_CHANNEL_WORKERS", "expected a positive integer, got '" + std::string(env) + "'");
    }
    return std::max(1u, requested);
}

RunManifest run_simulate(const ExperimentConfig &config, const fs::path &out_dir, unsigned workers,
                         std::ostream &log)
{
    validate(config);
    const Scenario sc = build_scenario(config);
    const auto seeds = realization_seeds(config.run.base_seed, config.run.realizations);
    fs::create_directories(out_dir);

    std::vector<std::string> engines;
    if (config.run.engine != EngineChoice::ambit)
        engines.push_back("direct");
    if (config.run.engine != EngineChoice::direct)
        engines.push_back("ambit");

    struct Result
    {
        std::vector<std::string> files;
        json timing;
    };
    std::vector<Result> results(seeds.size());
    std::mutex emit;

    parallel_for(static_cast<std::int64_t>(seeds.size()), workers, [&](std::int64_t r) {
        const auto seed = seeds[static_cast<std::size_t>(r)];
        const auto field = sample_field(sc.grid, sc.geometry, sc.trajectory, seed, sc.volatility_std);
        Result res;
        res.timing = {{"seed", seed}};

        std::vector<std::pair<std::string, ImpulseResponseGrid>> outputs;
        if (config.run.engine != EngineChoice::ambit || config.output.export_scatterers)
        {
            const auto scatterers = materialize_scatterers(field, sc.grid, sc.trajectory);
            if (config.output.export_scatterers)
            {
                std::ostringstream os;
                write_scatterers_csv(os, scatterers);
                const auto name = "scatterers_" + realization_tag(r) + ".csv";
                std::lock_guard lock(emit);
                write_text(out_dir / name, os.str());
                res.files.push_back(name);
            }
            if (config.run.engine != EngineChoice::ambit)
            {
                DirectOptions opt;
                opt.include_los = config.run.include_los;
                opt.ambit_set = config.run.ambit_set;
                const auto start = std::chrono::steady_clock::now();
                outputs.emplace_back("direct", simulate_direct(sc.radio, sc.geometry, sc.trajectory, sc.grid,
                                                               scatterers, opt));
                res.timing["direct_s"] =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            }
        }
        if (config.run.engine != EngineChoice::direct)
        {
            AmbitTiming timing;
            AmbitOptions opt;
            opt.include_los = config.run.include_los;
            opt.ambit_set = config.run.ambit_set;
            opt.method = config.run.convolution;
            opt.timing = &timing;
            outputs.emplace_back("ambit",
                                 simulate_ambit(sc.radio, sc.geometry, sc.trajectory, sc.grid, field, opt));
            res.timing["ambit"] = {{"build_s", timing.build_s},
                                   {"convolve_s", timing.convolve_s},
                                   {"warp_s", timing.warp_s}};
        }

        for (const auto &[engine, h] : outputs)
        {
            const std::string prefix = engine + "_" + realization_tag(r);
            std::vector<std::pair<std::string, std::string>> texts;
            if (config.output.export_cir && config.output.csv)
            {
                std::ostringstream os;
                write_grid_csv(os, h);
                texts.emplace_back(prefix + "_cir.csv", os.str());
            }
            if (config.output.export_cir && config.output.binary)
            {
                std::ostringstream os(std::ios::binary);
                write_grid_binary(os, h);
                texts.emplace_back(prefix + "_cir.bin", os.str());
            }
            {
                std::ostringstream os;
                os << "time_s,re,im\n";
                const auto g = narrowband_gain(h);
                for (std::size_t k = 0; k < g.size(); ++k)
                    os << csv::num(h.time_s(static_cast<std::int64_t>(k))) << ',' << csv::num(g[k].real())
                       << ',' << csv::num(g[k].imag()) << '\n';
                texts.emplace_back(prefix + "_gain.csv", os.str());
            }
            {
                std::ostringstream os;
                os << "time_s,power\n";
                const auto p = received_power_trace(h);
                for (std::size_t k = 0; k < p.size(); ++k)
                    os << csv::num(h.time_s(static_cast<std::int64_t>(k))) << ',' << csv::num(p[k]) << '\n';
                texts.emplace_back(prefix + "_power.csv", os.str());
            }
            std::lock_guard lock(emit);
            for (const auto &[name, text] : texts)
            {
                write_text(out_dir / name, text);
                res.files.push_back(name);
            }
        }
        {
            std::lock_guard lock(emit);
            log << "realization " << r << " (seed " << seed << ") done\n";
        }
        results[static_cast<std::size_t>(r)] = std::move(res);
    });

    RunManifest m;
    m.config_hash = config_hash(config);
    m.seeds = seeds;
    m.config = to_json(config);
    m.steps = sc.grid.p_count;
    m.bins = sc.grid.d_count;
    m.dt_s = sc.grid.dt_s();
    m.dtau_s = sc.grid.dtau_s();
    m.engines = engines;
    json timings = json::array();
    for (auto &res : results)
    {
        m.files.insert(m.files.end(), res.files.begin(), res.files.end());
        timings.push_back(res.timing);
    }
    write_text(out_dir / "timing.json", json{{"realizations", timings}}.dump(2));
    m.files.push_back("timing.json");
    m.files.push_back("manifest.json");
    std::sort(m.files.begin(), m.files.end());
    m.timings = {{"file", "timing.json"}};
    write_text(out_dir / "manifest.json", m.to_json().dump(2));
    return m;
}

GainTrace read_gain_csv(const fs::path &path)
{
    std::ifstream is(path);
    if (!is)
        throw error("cannot read " + path.string());
    std::string line;
    std::getline(is, line); // header
    GainTrace g;
    while (std::getline(is, line))
    {
        if (line.empty())
            continue;
        double t = 0.0, re = 0.0, im = 0.0;
        if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &t, &re, &im) != 3)
            throw error("malformed gain row in " + path.string() + ": " + line);
        g.emplace_back(re, im);
    }
    return g;
}

StatsSummary run_stats(const fs::path &manifest_path, const StatsConfig &stats, const fs::path &out_dir,
                       std::ostream &log)
{
    std::ifstream is(manifest_path);
    if (!is)
        throw error("cannot open manifest " + manifest_path.string());
    json doc;
    try
    {
        doc = json::parse(is);
    }
    catch (const json::parse_error &e)
    {
        throw error(std::string("malformed manifest: ") + e.what());
    }
    const RunManifest m = RunManifest::from_json(doc);
    const fs::path dir = manifest_path.parent_path();

    StatsSummary summary;
    summary.engine = stats.engine;
    if (std::find(m.engines.begin(), m.engines.end(), stats.engine) == m.engines.end())
    {
        if (m.engines.size() != 1)
            throw error("engine " + stats.engine + " not present in run");
        summary.warnings.push_back("engine " + stats.engine + " not in run; using " + m.engines.front());
        summary.engine = m.engines.front();
    }

    std::vector<fs::path> paths;
    std::vector<std::string> missing;
    for (std::size_t r = 0; r < m.seeds.size(); ++r)
    {
        const auto name = summary.engine + "_" + realization_tag(static_cast<std::int64_t>(r)) + "_gain.csv";
        paths.push_back(dir / name);
        if (!fs::exists(paths.back()))
            missing.push_back(name);
    }
    if (!missing.empty())
    {
        std::string list;
        for (const auto &f : missing)
            list += "\n  " + f;
        throw error("missing artifacts (" + std::to_string(missing.size()) + "):" + list);
    }

    std::vector<GainTrace> gains;
    for (const auto &p : paths)
        gains.push_back(read_gain_csv(p));
    summary.realization_count = static_cast<std::int64_t>(gains.size());
    if (gains.size() < 2)
        summary.warnings.push_back("degenerate ensemble: only " + std::to_string(gains.size()) +
                                   " realization; ACF reduces to a single product");

    const double horizon = static_cast<double>(m.steps - 1) * m.dt_s;
    fs::create_directories(out_dir);
    json anchors = json::array();
    for (const double anchor : stats.anchors_s)
    {
        if (anchor > horizon + 1e-12 || anchor + stats.max_lag_s > horizon + 1e-12)
            throw parameter_error("anchor " + std::to_string(anchor) + " s (+ max lag " +
                                  std::to_string(stats.max_lag_s) + " s) lies beyond the horizon " +
                                  std::to_string(horizon) + " s");
        const auto acf = temporal_acf(gains, m.dt_s, anchor, stats.max_lag_s);
        const auto psd = doppler_psd(gains, m.dt_s, anchor, stats.psd_window_s);

        AnchorSummary a;
        a.anchor_s = anchor;
        a.coherence_time_s = coherence_time(acf);
        a.doppler_edge_hz = doppler_edge(psd);
        a.psd_resolution_hz = psd.resolution_hz;
        summary.anchors.push_back(a);

        const auto acf_name = "acf_" + anchor_tag(anchor) + ".csv";
        const auto psd_name = "psd_" + anchor_tag(anchor) + ".csv";
        std::ostringstream acf_os, psd_os;
        write_acf_csv(acf_os, acf);
        write_psd_csv(psd_os, psd);
        write_text(out_dir / acf_name, acf_os.str());
        write_text(out_dir / psd_name, psd_os.str());
        summary.files.push_back(acf_name);
        summary.files.push_back(psd_name);

        anchors.push_back({{"anchor_s", anchor},
                           {"coherence_time_s", a.coherence_time_s ? json(*a.coherence_time_s) : json(nullptr)},
                           {"doppler_edge_99_hz", a.doppler_edge_hz},
                           {"psd_resolution_hz", a.psd_resolution_hz},
                           {"psd_window_start_s", psd.window_start_s}});
    }
    for (const auto &w : summary.warnings)
        log << "warning: " << w << '\n';

    const json out = {{"engine", summary.engine},
                      {"realization_count", summary.realization_count},
                      {"anchors", anchors},
                      {"warnings", summary.warnings}};
    write_text(out_dir / "stats_summary.json", out.dump(2));
    summary.files.push_back("stats_summary.json");
    return summary;
}

std::vector<BenchRow> run_bench(const ExperimentConfig &config, const fs::path &out_dir, std::ostream &log)
{
    validate(config);
    fs::create_directories(out_dir);

    CompareOptions options;
    options.timing_repetitions = config.bench.timing_repetitions;
    options.ambit.include_los = config.run.include_los;
    options.ambit.ambit_set = config.run.ambit_set;
    options.ambit.method = config.run.convolution;

    std::vector<BenchRow> rows;
    json summary = json::array();
    log << "path_count  runtime_ratio_median  power_ratio_db_median  power_ratio_db_std\n";
    for (const double n : config.bench.path_counts)
    {
        ExperimentConfig c = config;
        c.scene.mean_path_count = n;
        c.scene.path_arrival_rate_per_s = n;
        c.scene.disc_radius_m.reset();
        c.scene.scatterer_density_per_m2.reset();
        c.grid.t_max_s = config.bench.t_max_s;
        Scenario sc;
        try
        {
            sc = build_scenario(c);
        }
        catch (const parameter_error &e)
        {
            throw config_error("bench", e.what());
        }
        const auto seeds = realization_seeds(c.run.base_seed, c.bench.realizations);
        BenchRow row{n, compare_engines(sc, seeds, options)};

        const auto tag = path_count_tag(n);
        std::ostringstream rt, pr, cp;
        write_cdf_csv(rt, row.comparison.runtime_ratio);
        write_cdf_csv(pr, row.comparison.power_ratio_db);
        write_cdf_csv(cp, row.comparison.coherent_power_ratio_db);
        write_text(out_dir / ("runtime_ratio_" + tag + ".csv"), rt.str());
        write_text(out_dir / ("power_ratio_db_" + tag + ".csv"), pr.str());
        write_text(out_dir / ("coherent_power_ratio_db_" + tag + ".csv"), cp.str());

        std::vector<double> direct_s, ambit_s;
        for (const auto &r : row.comparison.runs)
        {
            direct_s.push_back(r.direct_s);
            ambit_s.push_back(r.ambit_s);
        }
        summary.push_back({{"path_count", n},
                           {"realizations", c.bench.realizations},
                           {"runtime_ratio", cdf_summary(row.comparison.runtime_ratio)},
                           {"power_ratio_db", cdf_summary(row.comparison.power_ratio_db)},
                           {"coherent_power_ratio_db", cdf_summary(row.comparison.coherent_power_ratio_db)},
                           {"direct_s", cdf_summary(EmpiricalCdf::from_samples(direct_s))},
                           {"ambit_s", cdf_summary(EmpiricalCdf::from_samples(ambit_s))}});

        char line[160];
        std::snprintf(line, sizeof line, "%10g  %20.3f  %21.3f  %18.3f\n", n, row.comparison.runtime_ratio.median,
                      row.comparison.power_ratio_db.median, row.comparison.power_ratio_db.stddev);
        log << line;
        rows.push_back(std::move(row));
    }
    write_text(out_dir / "bench_summary.json", json{{"t_max_s", config.bench.t_max_s}, {"rows", summary}}.dump(2));
    return rows;
}

} // namespace ambit
