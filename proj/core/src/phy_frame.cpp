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

#include "mmsl/phy_frame.hpp"

#include <cmath>
#include <stdexcept>

namespace mmsl::phy
{

namespace
{
// Absorbs representation error in products such as 12000 * 0.7 * 6.
constexpr double kFloorSlack = 1e-9;

void require(bool ok, const char* what)
{
    if (!ok)
        throw std::invalid_argument(what);
}
} // namespace

void FrameParams::validate() const
{
    require(n_sy > 0, "FrameParams: n_sy must be positive");
    require(n_sr_prb > 0, "FrameParams: n_sr_prb must be positive");
    require(n_prb_sh > 0, "FrameParams: n_prb_sh must be positive");
    require(mod_order > 0, "FrameParams: mod_order must be positive");
    require(n_layers > 0, "FrameParams: n_layers must be positive");
    require(n_dmrs >= 0, "FrameParams: n_dmrs must be non-negative");
    require(n_sci1 >= 0, "FrameParams: n_sci1 must be non-negative");
    require(n_sci2 >= 0, "FrameParams: n_sci2 must be non-negative");
    require(n_dmrs <= n_sy * n_sr_prb, "FrameParams: n_dmrs exceeds the REs of a PRB");
    require(code_rate > 0.0 && code_rate <= 1.0, "FrameParams: code_rate must lie in (0, 1]");
}

double slot_duration(int numerology)
{
    if (numerology < 0)
        throw std::invalid_argument("slot_duration: numerology must be non-negative");
    return std::ldexp(1e-3, -numerology);
}

double PrfsConfig::slot_duration() const { return phy::slot_duration(numerology); }

PrfsConfig PrfsConfig::preset(int k)
{
    switch (k)
    {
    case 1: return {PrfsId::Prfs1, 3, 4};
    case 2: return {PrfsId::Prfs2, 4, 3};
    case 3: return {PrfsId::Prfs3, 5, 2};
    case 4: return {PrfsId::Prfs4, 6, 1};
    default: throw std::invalid_argument("PrfsConfig::preset: PRFS index must be 1..4");
    }
}

PrfsConfig PrfsConfig::custom(int numerology, int n_sh)
{
    if (numerology < 0)
        throw std::invalid_argument("PrfsConfig::custom: numerology must be non-negative");
    if (n_sh < 1)
        throw std::invalid_argument("PrfsConfig::custom: n_sh must be at least 1");
    for (int k = 1; k <= 4; ++k)
    {
        const auto p = preset(k);
        if (p.numerology == numerology && p.n_sh == n_sh)
            return p;
    }
    return {PrfsId::Custom, numerology, n_sh};
}

std::string PrfsConfig::name() const
{
    if (id == PrfsId::Custom)
        return "mu" + std::to_string(numerology) + "-sh" + std::to_string(n_sh);
    return "PRFS-" + std::to_string(static_cast<int>(id));
}

std::int64_t resource_elements_per_slot(const FrameParams& fp, const PrfsConfig& cfg)
{
    fp.validate();
    if (cfg.n_sh < 1)
        throw std::invalid_argument("resource_elements_per_slot: n_sh must be at least 1");
    const std::int64_t per_prb = std::int64_t{fp.n_sr_prb} * fp.n_sy - fp.n_dmrs;
    const std::int64_t n_re =
        per_prb * fp.n_prb_sh * cfg.n_sh - std::int64_t{fp.n_sr_prb} * fp.n_sci1;
    if (n_re < 0)
        throw std::domain_error("resource_elements_per_slot: PSCCH overhead exceeds slot capacity");
    return n_re;
}

std::int64_t bits_per_slot(const FrameParams& fp, const PrfsConfig& cfg)
{
    const auto n_re = resource_elements_per_slot(fp, cfg);
    const double raw = static_cast<double>(n_re) * fp.code_rate * fp.mod_order * fp.n_layers;
    const auto bits = static_cast<std::int64_t>(std::floor(raw + kFloorSlack)) - fp.n_sci2;
    if (bits <= 0)
        throw std::domain_error("bits_per_slot: configuration leaves no payload capacity");
    return bits;
}

std::int64_t slots_needed(std::int64_t data_bits, std::int64_t bits_per_slot)
{
    if (bits_per_slot <= 0)
        throw std::invalid_argument("slots_needed: bits_per_slot must be positive");
    if (data_bits <= 0)
        throw std::invalid_argument("slots_needed: data_bits must be positive");
    return (data_bits + bits_per_slot - 1) / bits_per_slot;
}

WindowCapacity selection_window_capacity(double pdb_s, const PrfsConfig& cfg)
{
    if (!(pdb_s > 0.0))
        throw std::invalid_argument("selection_window_capacity: pdb must be positive");
    const double ratio = pdb_s / cfg.slot_duration();
    const auto slots = static_cast<std::int64_t>(std::floor(ratio + kFloorSlack));
    return {slots, slots * cfg.n_sh};
}

std::int64_t cells_needed(std::int64_t data_bits, const FrameParams& fp, const PrfsConfig& cfg)
{
    // Each cell carries 1/n_sh of a slot's payload.
    return slots_needed(data_bits * cfg.n_sh, bits_per_slot(fp, cfg));
}

} // namespace mmsl::phy
