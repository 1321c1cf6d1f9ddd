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

#include "mmsl/beamforming.hpp"
#include "mmsl/mac_allocator.hpp"
#include "mmsl/phy_frame.hpp"
#include "mmsl/scenario.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

// Slot-clocked sidelink simulation: frame arrivals, allocation, SCI
// delivery, collision bookkeeping and per-frame SINR.

namespace mmsl::sim
{

struct SimConfig
{
    mac::Scheme scheme = mac::Scheme::Dbra;
    phy::PrfsConfig prfs = phy::PrfsConfig::preset(1);
    phy::FrameParams frame;
    scenario::ScenarioConfig scenario = scenario::ScenarioConfig::preset(scenario::ScenarioKind::OneWayHighDensity);
    scenario::ArrayLayout arrays;
    beam::LinkBudget link_budget;
    double carrier_frequency = 60e9; // Hz
    double oxygen_db_per_km = beam::kOxygenDbPerKm60GHz;

    std::int64_t frame_size_bits = 2'000'000; // s_d
    double frame_rate = 10.0;                 // frames per second
    double pdb_ms = 10.0;
    double duration_s = 5.0;
    std::uint64_t seed = 1;

    double rri_ms = 100.0;
    double p_rc = 0.0;
    double min_free_fraction = 0.2;
    double sensing_span_ms = 100.0;
    bool half_duplex = true;
    double sci_snr_threshold_db = 0.0;
    /// An overlapping transmission counts as a collision when the wanted
    /// signal does not exceed it by more than this margin.
    double capture_sir_db = 0.0;
    /// Initial RSRP threshold sits this far below an aligned link at the
    /// mean link distance.
    double rsrp_margin_db = 6.0;
    double geometry_refresh_s = 1e-3;

    double rate_mbps() const { return static_cast<double>(frame_size_bits) * frame_rate / 1e6; }
    void validate() const;
};

struct TransmissionRecord
{
    mac::LinkId link;
    int link_index = 0;
    int frame = 0;
    std::int64_t arrival_slot = 0;
    std::int64_t slot = 0; // first cell
    std::vector<mac::Cell> cells;
    bool overlapped = false; // shares at least one cell with another pair
    bool collided = false;   // shares a cell with a pair that overpowers it
    int overlapped_cells = 0;
    int collided_cells = 0;
    double sinr_db = 0.0;
    bool decoded = false;
    bool forced = false;
    bool pdb_violation = false;
    bool reselected = false;
};

struct SimResult
{
    std::vector<TransmissionRecord> records;
    int vehicles = 0;
    int links = 0;
    std::int64_t cells_per_frame = 0;
    std::int64_t window_cells = 0;
    double mean_link_distance = 0.0;
    double initial_threshold_dbm = 0.0;
    std::int64_t sci_delivered = 0;
};

SimResult run(const SimConfig& cfg);

/// One transmission's cells within a slot (or any set of cells).
struct CellUse
{
    std::vector<mac::Cell> cells;
};

/// collided[i] is true iff transmission i shares a cell with another one.
std::vector<bool> detect_collisions(std::span<const CellUse> transmissions);

struct SinrOutcome
{
    double sinr_db = 0.0;
    bool decoded = false;
};

/// Signal and interference given as received powers in watts.
SinrOutcome evaluate_sinr(double signal_w, std::span<const double> interference_w, const beam::LinkBudget& lb);
/// Same, from channel matrices and beamforming vectors.
SinrOutcome evaluate_sinr(const beam::SignalTerm& signal, std::span<const beam::InterferenceTerm> interferers,
                          const beam::LinkBudget& lb);

/// An SCI on the air: the emitting array and the codeword it uses.
struct SciBeam
{
    mac::SciMessage message;
    int vehicle = 0;
    beam::Position position;
    beam::ArrayConfig array;
    beam::ComplexVector weights;
};

/// A listening sensing beam.
struct SensingBeam
{
    int vehicle = 0;
    beam::Position position;
    beam::ArrayConfig array;
    beam::ComplexVector combiner;
};

struct DeliveryParams
{
    mac::Scheme scheme = mac::Scheme::Dbra;
    beam::LinkBudget link_budget;
    double carrier_frequency = 60e9;
    double oxygen_db_per_km = beam::kOxygenDbPerKm60GHz;
    double snr_threshold_db = 0.0;
    bool half_duplex = true;
};

/// Inbox per sensing beam. A message reaches a beam when the scheme sends
/// that direction, the listener is not transmitting (busy_vehicles) and the
/// received SNR clears the threshold.
std::vector<std::vector<mac::SensedSci>> deliver_sci(std::span<const SciBeam> emitted,
                                                     std::span<const SensingBeam> listeners,
                                                     std::span<const int> busy_vehicles, const DeliveryParams& p);

} // namespace mmsl::sim
