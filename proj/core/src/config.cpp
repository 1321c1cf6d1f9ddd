// SPDX-License-Identifier: Apache-2.0
//
// mmsl - slot-level simulator for beamformed NR V2X sidelink at 60 GHz
// Copyright (C) 2026 The mmsl authors
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

#include "mmsl/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

namespace mmsl::config
{

namespace
{

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

double to_double(const std::string& key, const std::string& v)
{
    double x = 0.0;
    const auto* end = v.data() + v.size();
    const auto res = std::from_chars(v.data(), end, x);
    if (res.ec != std::errc() || res.ptr != end || !std::isfinite(x))
        throw ConfigError(ErrorKind::BadValue, key, "invalid number '" + v + "' for '" + key + "'");
    return x;
}

std::int64_t to_int(const std::string& key, const std::string& v)
{
    std::int64_t x = 0;
    const auto* end = v.data() + v.size();
    const auto res = std::from_chars(v.data(), end, x);
    if (res.ec != std::errc() || res.ptr != end)
        throw ConfigError(ErrorKind::BadValue, key, "invalid integer '" + v + "' for '" + key + "'");
    return x;
}

bool to_bool(const std::string& key, const std::string& v)
{
    const auto s = lower(v);
    if (s == "1" || s == "true" || s == "on" || s == "yes")
        return true;
    if (s == "0" || s == "false" || s == "off" || s == "no")
        return false;
    throw ConfigError(ErrorKind::BadValue, key, "invalid boolean '" + v + "' for '" + key + "'");
}

[[noreturn]] void out_of_range(const std::string& key, const std::string& v, const std::string& rule)
{
    throw ConfigError(ErrorKind::OutOfRange, key, "value '" + v + "' for '" + key + "' out of range (" + rule + ")");
}

double positive(const std::string& key, const std::string& v)
{
    const double x = to_double(key, v);
    if (!(x > 0.0))
        out_of_range(key, v, "must be > 0");
    return x;
}

double non_negative(const std::string& key, const std::string& v)
{
    const double x = to_double(key, v);
    if (!(x >= 0.0))
        out_of_range(key, v, "must be >= 0");
    return x;
}

int int_in(const std::string& key, const std::string& v, std::int64_t lo, std::int64_t hi)
{
    const auto x = to_int(key, v);
    if (x < lo || x > hi)
        out_of_range(key, v, "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return static_cast<int>(x);
}

struct KeyHandler
{
    std::string key;
    std::function<void(sim::SimConfig&, const std::string&)> apply;
};

// Application order matters: scenario presets and PRFS presets first, the
// frame rate before the application rate.
const std::vector<KeyHandler>& handlers()
{
    static const std::vector<KeyHandler> table = [] {
        std::vector<KeyHandler> t;
        auto add = [&](std::string key, std::function<void(sim::SimConfig&, const std::string&)> fn) {
            t.push_back({std::move(key), std::move(fn)});
        };
        add("scenario", [](sim::SimConfig& c, const std::string& v) {
            try
            {
                const auto kind = scenario::parse_scenario_kind(v);
                const auto k_rx = c.scenario.k_rx;
                c.scenario = scenario::ScenarioConfig::preset(kind);
                c.scenario.k_rx = k_rx;
            }
            catch (const std::invalid_argument&)
            {
                throw ConfigError(ErrorKind::BadValue, "scenario",
                                  "invalid value '" + v + "' for 'scenario' (expected 1w-ld, 1w-hd, 2w-ld or 2w-hd)");
            }
        });
        add("scheme", [](sim::SimConfig& c, const std::string& v) {
            try
            {
                c.scheme = mac::parse_scheme(v);
            }
            catch (const std::invalid_argument&)
            {
                throw ConfigError(ErrorKind::BadValue, "scheme",
                                  "invalid value '" + v + "' for 'scheme' (expected dbra, dbra-o or rra)");
            }
        });
        add("prfs", [](sim::SimConfig& c, const std::string& v) { c.prfs = phy::PrfsConfig::preset(int_in("prfs", v, 1, 4)); });
        add("numerology", [](sim::SimConfig& c, const std::string& v) {
            c.prfs = phy::PrfsConfig::custom(int_in("numerology", v, 0, 6), c.prfs.n_sh);
        });
        add("n_sh", [](sim::SimConfig& c, const std::string& v) {
            c.prfs = phy::PrfsConfig::custom(c.prfs.numerology, int_in("n_sh", v, 1, 64));
        });
        add("vehicles_per_lane", [](sim::SimConfig& c, const std::string& v) {
            c.scenario.vehicles_per_lane = int_in("vehicles_per_lane", v, 1, 10000);
        });
        add("lane_length", [](sim::SimConfig& c, const std::string& v) { c.scenario.lane_length = positive("lane_length", v); });
        add("lane_separation", [](sim::SimConfig& c, const std::string& v) {
            c.scenario.lane_separation = positive("lane_separation", v);
        });
        add("speed", [](sim::SimConfig& c, const std::string& v) { c.scenario.speed = non_negative("speed", v); });
        add("krx", [](sim::SimConfig& c, const std::string& v) { c.scenario.k_rx = int_in("krx", v, 1, 10000); });
        add("ntx", [](sim::SimConfig& c, const std::string& v) { c.arrays.n_tx = int_in("ntx", v, 1, 1024); });
        add("nrx", [](sim::SimConfig& c, const std::string& v) { c.arrays.n_rx = int_in("nrx", v, 1, 1024); });
        add("frame_rate", [](sim::SimConfig& c, const std::string& v) { c.frame_rate = positive("frame_rate", v); });
        add("rate_mbps", [](sim::SimConfig& c, const std::string& v) {
            const double mbps = positive("rate_mbps", v);
            c.frame_size_bits = std::llround(mbps * 1e6 / c.frame_rate);
            if (c.frame_size_bits < 1)
                out_of_range("rate_mbps", v, "frame size rounds to zero bits");
        });
        add("pdb_ms", [](sim::SimConfig& c, const std::string& v) { c.pdb_ms = positive("pdb_ms", v); });
        add("duration_s", [](sim::SimConfig& c, const std::string& v) { c.duration_s = positive("duration_s", v); });
        add("seed", [](sim::SimConfig& c, const std::string& v) {
            std::uint64_t x = 0;
            const auto* end = v.data() + v.size();
            const auto res = std::from_chars(v.data(), end, x);
            if (res.ec != std::errc() || res.ptr != end)
                throw ConfigError(ErrorKind::BadValue, "seed", "invalid seed '" + v + "' for 'seed'");
            c.seed = x;
        });
        add("replications", [](sim::SimConfig&, const std::string& v) { int_in("replications", v, 1, 1000000); });
        add("tx_power_dbm", [](sim::SimConfig& c, const std::string& v) {
            c.link_budget.tx_power = beam::dbm_to_watt(to_double("tx_power_dbm", v));
        });
        add("noise_temperature", [](sim::SimConfig& c, const std::string& v) {
            c.link_budget.noise_temperature = positive("noise_temperature", v);
        });
        add("bandwidth_hz", [](sim::SimConfig& c, const std::string& v) { c.link_budget.bandwidth = positive("bandwidth_hz", v); });
        add("sinr_threshold_db", [](sim::SimConfig& c, const std::string& v) {
            c.link_budget.sinr_threshold_db = to_double("sinr_threshold_db", v);
        });
        add("carrier_ghz", [](sim::SimConfig& c, const std::string& v) { c.carrier_frequency = positive("carrier_ghz", v) * 1e9; });
        add("oxygen_db_per_km", [](sim::SimConfig& c, const std::string& v) {
            c.oxygen_db_per_km = non_negative("oxygen_db_per_km", v);
        });
        add("rri_ms", [](sim::SimConfig& c, const std::string& v) { c.rri_ms = positive("rri_ms", v); });
        add("p_rc", [](sim::SimConfig& c, const std::string& v) {
            const double x = to_double("p_rc", v);
            if (!(x >= 0.0 && x <= 1.0))
                out_of_range("p_rc", v, "must be in [0, 1]");
            c.p_rc = x;
        });
        add("min_free_fraction", [](sim::SimConfig& c, const std::string& v) {
            const double x = to_double("min_free_fraction", v);
            if (!(x >= 0.0 && x < 1.0))
                out_of_range("min_free_fraction", v, "must be in [0, 1)");
            c.min_free_fraction = x;
        });
        add("sensing_span_ms", [](sim::SimConfig& c, const std::string& v) { c.sensing_span_ms = positive("sensing_span_ms", v); });
        add("half_duplex", [](sim::SimConfig& c, const std::string& v) { c.half_duplex = to_bool("half_duplex", v); });
        add("sci_snr_threshold_db", [](sim::SimConfig& c, const std::string& v) {
            c.sci_snr_threshold_db = to_double("sci_snr_threshold_db", v);
        });
        add("capture_sir_db", [](sim::SimConfig& c, const std::string& v) { c.capture_sir_db = to_double("capture_sir_db", v); });
        add("rsrp_margin_db", [](sim::SimConfig& c, const std::string& v) { c.rsrp_margin_db = to_double("rsrp_margin_db", v); });
        add("geometry_refresh_ms", [](sim::SimConfig& c, const std::string& v) {
            c.geometry_refresh_s = positive("geometry_refresh_ms", v) * 1e-3;
        });
        return t;
    }();
    return table;
}

const std::map<std::string, std::string>& aliases()
{
    static const std::map<std::string, std::string> a = {
        {"n_tx", "ntx"}, {"n_rx", "nrx"}, {"k_rx", "krx"}, {"pdb", "pdb_ms"}, {"duration", "duration_s"},
    };
    return a;
}

const std::vector<std::string> kRequired = {"scheme", "scenario"};

} // namespace

std::string to_string(ErrorKind k)
{
    switch (k)
    {
    case ErrorKind::Syntax: return "syntax error";
    case ErrorKind::UnknownKey: return "unknown key";
    case ErrorKind::BadValue: return "invalid value";
    case ErrorKind::OutOfRange: return "out of range";
    case ErrorKind::MissingRequired: return "missing required key";
    case ErrorKind::Inconsistent: return "inconsistent configuration";
    }
    return "error";
}

ConfigError::ConfigError(ErrorKind kind, std::string key, const std::string& message)
    : std::runtime_error(to_string(kind) + ": " + message), kind_(kind), key_(std::move(key))
{
}

std::string normalize_key(std::string_view key)
{
    auto k = lower(trim(key));
    std::replace(k.begin(), k.end(), '-', '_');
    const auto it = aliases().find(k);
    return it == aliases().end() ? k : it->second;
}

const std::vector<std::string>& known_keys()
{
    static const std::vector<std::string> keys = [] {
        std::vector<std::string> k;
        for (const auto& h : handlers())
            k.push_back(h.key);
        return k;
    }();
    return keys;
}

void ParameterSet::set(std::string key, std::vector<std::string> values)
{
    key = normalize_key(key);
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
        throw ConfigError(ErrorKind::UnknownKey, key, "'" + key + "' is not a recognised parameter");
    if (values.empty())
        throw ConfigError(ErrorKind::BadValue, key, "empty value list for '" + key + "'");
    for (auto& e : entries_)
        if (e.first == key)
        {
            e.second = std::move(values);
            return;
        }
    entries_.emplace_back(std::move(key), std::move(values));
}

const std::vector<std::string>* ParameterSet::find(std::string_view key) const
{
    const auto k = normalize_key(key);
    for (const auto& e : entries_)
        if (e.first == k)
            return &e.second;
    return nullptr;
}

std::vector<std::string> split_values(std::string_view key, std::string_view raw)
{
    const auto v = trim(raw);
    if (v.empty())
        throw ConfigError(ErrorKind::BadValue, std::string(key), "missing value for '" + std::string(key) + "'");
    if (v.front() != '[')
        return {v};
    if (v.back() != ']')
        throw ConfigError(ErrorKind::Syntax, std::string(key), "unterminated list for '" + std::string(key) + "'");
    std::vector<std::string> out;
    std::string_view body(v);
    body = body.substr(1, body.size() - 2);
    std::size_t start = 0;
    while (start <= body.size())
    {
        const auto pos = body.find(',', start);
        const auto item = trim(body.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (item.empty())
            throw ConfigError(ErrorKind::Syntax, std::string(key), "empty list item for '" + std::string(key) + "'");
        out.push_back(item);
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

ParameterSet parse_config_text(std::string_view text)
{
    ParameterSet ps;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    std::vector<std::string> seen;
    while (std::getline(in, line))
    {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        const auto body = trim(line);
        if (body.empty())
            continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError(ErrorKind::Syntax, "", "line " + std::to_string(lineno) + ": expected 'key = value'");
        const auto key = normalize_key(body.substr(0, eq));
        if (key.empty())
            throw ConfigError(ErrorKind::Syntax, "", "line " + std::to_string(lineno) + ": empty key");
        if (std::find(seen.begin(), seen.end(), key) != seen.end())
            throw ConfigError(ErrorKind::Syntax, key, "line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        seen.push_back(key);
        ps.set(key, split_values(key, body.substr(eq + 1)));
    }
    return ps;
}

ParameterSet load_config_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

ParameterSet merge(const ParameterSet& a, const ParameterSet& b)
{
    ParameterSet out = a;
    for (const auto& [k, v] : b.entries())
        out.set(k, v);
    return out;
}

std::vector<sim::SimConfig> expand(const ParameterSet& params)
{
    for (const auto& req : kRequired)
        if (params.find(req) == nullptr)
            throw ConfigError(ErrorKind::MissingRequired, req, "'" + req + "' must be given");

    int replications = 1;
    if (const auto* r = params.find("replications"))
    {
        if (r->size() != 1)
            throw ConfigError(ErrorKind::BadValue, "replications", "'replications' cannot be swept");
        replications = int_in("replications", r->front(), 1, 1000000);
    }
    std::uint64_t base_seed = sim::SimConfig{}.seed;
    if (const auto* s = params.find("seed"))
    {
        if (s->size() != 1)
            throw ConfigError(ErrorKind::BadValue, "seed", "'seed' is the base seed and cannot be swept");
        sim::SimConfig tmp;
        for (const auto& h : handlers())
            if (h.key == "seed")
                h.apply(tmp, s->front());
        base_seed = tmp.seed;
    }

    // Sweep axes in first-appearance order; the last axis varies fastest.
    std::vector<std::pair<std::string, const std::vector<std::string>*>> axes;
    for (const auto& [k, v] : params.entries())
        if (k != "seed" && k != "replications")
            axes.emplace_back(k, &v);

    std::vector<sim::SimConfig> out;
    std::vector<std::size_t> pos(axes.size(), 0);
    std::uint64_t run_index = 0;
    while (true)
    {
        std::map<std::string, std::string> chosen;
        for (std::size_t i = 0; i < axes.size(); ++i)
            chosen[axes[i].first] = (*axes[i].second)[pos[i]];

        sim::SimConfig cfg;
        for (const auto& h : handlers())
        {
            const auto it = chosen.find(h.key);
            if (it != chosen.end())
                h.apply(cfg, it->second);
        }
        for (int r = 0; r < replications; ++r)
        {
            cfg.seed = base_seed + run_index++;
            try
            {
                cfg.validate();
            }
            catch (const std::invalid_argument& e)
            {
                throw ConfigError(ErrorKind::Inconsistent, "", e.what());
            }
            out.push_back(cfg);
        }

        std::size_t i = axes.size();
        while (i > 0)
        {
            --i;
            if (++pos[i] < axes[i].second->size())
                break;
            pos[i] = 0;
            if (i == 0)
                return out;
        }
        if (axes.empty())
            return out;
    }
}

std::vector<sim::SimConfig> parse_config(const ParameterSet& overrides,
                                         const std::optional<std::filesystem::path>& config_file)
{
    ParameterSet params;
    if (config_file)
        params = load_config_file(*config_file);
    return expand(merge(params, overrides));
}

} // namespace mmsl::config
