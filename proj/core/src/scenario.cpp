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

#include "mmsl/scenario.hpp"

#include "mmsl/rng.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace mmsl::scenario
{

namespace
{
beam::Position ring_displacement(const beam::Position& a, const beam::Position& b, double length)
{
    double dx = b.x - a.x;
    if (length > 0.0)
        dx -= length * std::round(dx / length);
    return {dx, b.y - a.y};
}

double wrap_position(double x, double length)
{
    double r = std::fmod(x, length);
    if (r < 0.0)
        r += length;
    return r;
}

void orient_arrays(VehicleState& v, const ArrayLayout& layout)
{
    const double back = beam::wrap_angle(v.heading + beam::kPi);
    v.tx_arrays[kForward] = {layout.n_tx, layout.spacing, v.heading};
    v.tx_arrays[kBackward] = {layout.n_tx, layout.spacing, back};
    v.rx_arrays[kForward] = {layout.n_rx, layout.spacing, v.heading};
    v.rx_arrays[kBackward] = {layout.n_rx, layout.spacing, back};
}
} // namespace

std::string to_string(ScenarioKind kind)
{
    switch (kind)
    {
    case ScenarioKind::OneWayLowDensity: return "1w-ld";
    case ScenarioKind::OneWayHighDensity: return "1w-hd";
    case ScenarioKind::TwoWayLowDensity: return "2w-ld";
    case ScenarioKind::TwoWayHighDensity: return "2w-hd";
    }
    return "unknown";
}

ScenarioKind parse_scenario_kind(std::string_view text)
{
    std::string s(text);
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (s == "1w-ld")
        return ScenarioKind::OneWayLowDensity;
    if (s == "1w-hd")
        return ScenarioKind::OneWayHighDensity;
    if (s == "2w-ld")
        return ScenarioKind::TwoWayLowDensity;
    if (s == "2w-hd")
        return ScenarioKind::TwoWayHighDensity;
    throw std::invalid_argument("unknown scenario '" + std::string(text) + "' (expected 1w-ld, 1w-hd, 2w-ld or 2w-hd)");
}

bool ScenarioConfig::two_way() const
{
    return kind == ScenarioKind::TwoWayLowDensity || kind == ScenarioKind::TwoWayHighDensity;
}

ScenarioConfig ScenarioConfig::preset(ScenarioKind kind, std::uint64_t seed)
{
    ScenarioConfig cfg;
    cfg.kind = kind;
    cfg.seed = seed;
    // Lane lengths fitted offline against the mean 5-NN link distance.
    switch (kind)
    {
    case ScenarioKind::OneWayLowDensity:
        cfg.vehicles_per_lane = 15;
        cfg.lane_length = 531.0;
        break;
    case ScenarioKind::OneWayHighDensity:
        cfg.vehicles_per_lane = 30;
        cfg.lane_length = 362.0;
        break;
    case ScenarioKind::TwoWayLowDensity:
        cfg.vehicles_per_lane = 15;
        cfg.lane_length = 1264.0;
        break;
    case ScenarioKind::TwoWayHighDensity:
        cfg.vehicles_per_lane = 30;
        cfg.lane_length = 809.0;
        break;
    }
    return cfg;
}

void ScenarioConfig::validate() const
{
    if (vehicles_per_lane < 1)
        throw std::invalid_argument("ScenarioConfig: vehicles_per_lane must be at least 1");
    if (!(lane_length > 0.0))
        throw std::invalid_argument("ScenarioConfig: lane_length must be positive");
    if (lane_length < kMinVehicleSpacing * vehicles_per_lane)
        throw std::invalid_argument("ScenarioConfig: lane_length too short for the minimum vehicle spacing");
    if (speed < 0.0)
        throw std::invalid_argument("ScenarioConfig: speed must be non-negative");
    if (k_rx < 1)
        throw std::invalid_argument("ScenarioConfig: k_rx must be at least 1");
    if (two_way() && !(lane_separation > 0.0))
        throw std::invalid_argument("ScenarioConfig: lane_separation must be positive");
}

beam::Position Scenario::displacement(const beam::Position& a, const beam::Position& b) const
{
    return ring_displacement(a, b, config.lane_length);
}

double Scenario::distance(const VehicleState& a, const VehicleState& b) const
{
    const auto d = displacement(a.position, b.position);
    return std::hypot(d.x, d.y);
}

Scenario build_scenario(const ScenarioConfig& cfg, const ArrayLayout& layout)
{
    cfg.validate();
    Scenario sc;
    sc.config = cfg;
    Rng rng(mix_seed(cfg.seed, 0x5CE7A410ull));

    int id = 0;
    for (int lane = 0; lane < cfg.lanes(); ++lane)
    {
        // Uniform placement subject to a minimum gap: draw offsets in the
        // reduced length, sort, then re-insert the mandatory spacing.
        const int n = cfg.vehicles_per_lane;
        const double free_length = cfg.lane_length - kMinVehicleSpacing * n;
        std::vector<double> offsets(static_cast<std::size_t>(n));
        for (auto& u : offsets)
            u = rng.uniform01() * free_length;
        std::sort(offsets.begin(), offsets.end());

        const double heading = lane == 0 ? 0.0 : -beam::kPi;
        const double y = lane == 0 ? 0.0 : cfg.lane_separation;
        for (int k = 0; k < n; ++k)
        {
            VehicleState v;
            v.id = id++;
            v.lane = lane;
            v.position = {offsets[static_cast<std::size_t>(k)] + kMinVehicleSpacing * k, y};
            v.heading = heading;
            v.speed = cfg.speed;
            orient_arrays(v, layout);
            sc.vehicles.push_back(v);
        }
    }
    return sc;
}

void step_mobility_in_place(std::vector<VehicleState>& vehicles, double dt, double lane_length)
{
    if (dt < 0.0)
        throw std::invalid_argument("step_mobility: dt must be non-negative");
    if (dt == 0.0)
        return;
    for (auto& v : vehicles)
    {
        v.position.x += v.speed * dt * std::cos(v.heading);
        v.position.y += v.speed * dt * std::sin(v.heading);
        if (lane_length > 0.0)
            v.position.x = wrap_position(v.position.x, lane_length);
    }
}

std::vector<VehicleState> step_mobility(const std::vector<VehicleState>& vehicles, double dt, double lane_length)
{
    auto out = vehicles;
    step_mobility_in_place(out, dt, lane_length);
    return out;
}

LinkSet neighbor_links(const std::vector<VehicleState>& vehicles, int k_rx, double lane_length)
{
    if (k_rx < 1)
        throw std::invalid_argument("neighbor_links: k_rx must be at least 1");
    LinkSet out;
    std::vector<std::pair<double, int>> candidates;
    for (const auto& a : vehicles)
    {
        candidates.clear();
        for (const auto& b : vehicles)
        {
            if (b.id == a.id)
                continue;
            const auto d = ring_displacement(a.position, b.position, lane_length);
            candidates.emplace_back(std::hypot(d.x, d.y), b.id);
        }
        std::sort(candidates.begin(), candidates.end());
        const auto take = std::min(candidates.size(), static_cast<std::size_t>(k_rx));
        for (std::size_t k = 0; k < take; ++k)
            out.links.push_back({a.id, candidates[k].second});
    }
    return out;
}

DistanceStats distance_stats(const std::vector<VehicleState>& vehicles, const LinkSet& links, double lane_length)
{
    if (links.links.empty())
        throw std::invalid_argument("distance_stats: empty link set");
    auto find = [&](int id) -> const VehicleState& {
        for (const auto& v : vehicles)
            if (v.id == id)
                return v;
        throw std::invalid_argument("distance_stats: link references unknown vehicle");
    };
    double sum = 0.0;
    double sum_sq = 0.0;
    for (const auto& l : links.links)
    {
        const auto d = ring_displacement(find(l.tx).position, find(l.rx).position, lane_length);
        const double r = std::hypot(d.x, d.y);
        sum += r;
        sum_sq += r * r;
    }
    const double n = static_cast<double>(links.links.size());
    const double mean = sum / n;
    const double var = std::max(0.0, sum_sq / n - mean * mean);
    return {mean, std::sqrt(var)};
}

} // namespace mmsl::scenario
