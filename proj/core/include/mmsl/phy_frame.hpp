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

#pragma once

#include <cstdint>
#include <string>

// NR sidelink frame-structure arithmetic: resource elements, bits per slot,
// slot durations and the four PRFS presets.

namespace mmsl::phy
{

/// Per-slot resource-grid parameters. Defaults are the reference values used
/// throughout the evaluation (12 symbols, 12 subcarriers/PRB, 18 DMRS REs,
/// 25 PRBs/subchannel, 50 PSCCH PRBs, 48-bit 2nd-stage SCI, R=0.7, 64-QAM, 1 layer).
struct FrameParams
{
    int n_sy = 12;
    int n_sr_prb = 12;
    int n_dmrs = 18;
    int n_prb_sh = 25;
    int n_sci1 = 50;
    int n_sci2 = 48;
    double code_rate = 0.7;
    int mod_order = 6;
    int n_layers = 1;

    /// Throws std::invalid_argument naming the first violated constraint.
    void validate() const;
};

enum class PrfsId : int
{
    Custom = 0,
    Prfs1 = 1,
    Prfs2 = 2,
    Prfs3 = 3,
    Prfs4 = 4,
};

/// Numerology / subchannel-count pairing.
struct PrfsConfig
{
    PrfsId id = PrfsId::Prfs1;
    int numerology = 3;
    int n_sh = 4;

    double slot_duration() const; // seconds

    /// Built-in preset k in 1..4: (3,4), (4,3), (5,2), (6,1).
    static PrfsConfig preset(int k);
    /// Arbitrary pairing for experimentation; id is Custom unless it matches a preset.
    static PrfsConfig custom(int numerology, int n_sh);

    std::string name() const;
};

/// 1 ms / 2^numerology, in seconds.
double slot_duration(int numerology);

/// (n_sr_prb*n_sy - n_dmrs)*n_prb_sh*n_sh - n_sr_prb*n_sci1.
/// Throws std::domain_error when the PSCCH overhead exceeds the slot capacity.
std::int64_t resource_elements_per_slot(const FrameParams& fp, const PrfsConfig& cfg);

/// N_re*R*Q_m*n_l - N_sci2, floored. Throws std::domain_error if not positive.
std::int64_t bits_per_slot(const FrameParams& fp, const PrfsConfig& cfg);

/// ceil(data_bits / bits_per_slot).
std::int64_t slots_needed(std::int64_t data_bits, std::int64_t bits_per_slot);

struct WindowCapacity
{
    std::int64_t slots = 0;
    std::int64_t cells = 0;
};

/// floor(pdb / slot_duration) slots and that times n_sh (slot, subchannel) cells.
WindowCapacity selection_window_capacity(double pdb_s, const PrfsConfig& cfg);

/// Number of (slot, subchannel) cells a frame needs when each cell carries
/// bits_per_slot / n_sh bits.
std::int64_t cells_needed(std::int64_t data_bits, const FrameParams& fp, const PrfsConfig& cfg);

} // namespace mmsl::phy
