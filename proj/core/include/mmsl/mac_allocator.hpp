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

#include "mmsl/rng.hpp"

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// Mode 2 sidelink allocation: reselection counter, sensing-window
// aggregation, RSRP blocking with threshold escalation, and selection.

namespace mmsl::mac
{

enum class Scheme
{
    Dbra,  // SCI in the primary and the paired direction
    DbraO, // SCI in the primary direction only
    Rra,   // random selection, no SCI
};

std::string to_string(Scheme s);
/// Accepts "dbra", "dbra-o", "rra" (case-insensitive).
Scheme parse_scheme(std::string_view text);

bool emits_sci(Scheme s);
bool emits_paired(Scheme s);

enum class SciDirection
{
    Primary,
    Paired,
};

struct Cell
{
    std::int64_t slot = 0;
    int subchannel = 0;
    friend auto operator<=>(const Cell&, const Cell&) = default;
};

struct LinkId
{
    int tx = 0;
    int rx = 0;
    friend bool operator==(const LinkId&, const LinkId&) = default;
};

struct SciMessage
{
    int sender = 0;
    LinkId link;
    std::vector<Cell> reserved_cells;
    double rri_ms = 100.0;
    std::int64_t emitted_slot = 0;
    SciDirection direction = SciDirection::Primary;
};

/// An SCI as heard by one sensing receiver.
struct SensedSci
{
    std::shared_ptr<const SciMessage> message;
    double rsrp_dbm = 0.0;
};

struct WindowTiming
{
    std::int64_t t0 = 800;   // sensing span, slots
    std::int64_t t_s0 = 1;   // sensing processing time, slots
    std::int64_t t1 = 2;     // selection processing time, slots
    std::int64_t t2 = 80;    // selection-window end, slots
    double slot_duration = 125e-6; // s

    void validate() const;
    std::int64_t rri_slots(double rri_ms) const;

    /// Defaults for a given slot duration: T0 = sensing_span_s, T_s0 = 1,
    /// T1 = 2 and T2 = the PDB in whole slots.
    static WindowTiming make(double pdb_s, double slot_duration_s, double sensing_span_s = 0.1);
};

enum class CellState : std::uint8_t
{
    Free,
    Reserved,
    Selected,
};

/// Candidate cells of one selection window, [window_start, window_start + n_slots).
class ResourceGrid
{
  public:
    ResourceGrid() = default;
    ResourceGrid(std::int64_t window_start, std::int64_t n_slots, int n_sh);

    std::int64_t window_start() const { return window_start_; }
    std::int64_t n_slots() const { return n_slots_; }
    int n_sh() const { return n_sh_; }
    std::size_t cell_count() const { return state_.size(); }

    bool contains(const Cell& c) const;
    std::size_t index(const Cell& c) const;
    Cell cell_at(std::size_t i) const;

    CellState state(const Cell& c) const { return state_[index(c)]; }
    CellState state_at(std::size_t i) const { return state_[i]; }
    double rsrp_at(std::size_t i) const { return max_rsrp_[i]; }

    /// Records a reservation heard at rsrp_dbm (+inf blocks unconditionally).
    void note_reservation(const Cell& c, double rsrp_dbm);
    /// Projects cells forward by multiples of rri_slots and notes those
    /// landing inside the window.
    void project(std::span<const Cell> cells, std::int64_t rri_slots, double rsrp_dbm);

    /// Cells whose strongest reservation exceeds threshold become Reserved,
    /// everything not Selected becomes Free otherwise.
    void apply_threshold(double threshold_dbm);
    void mark_selected(const Cell& c);

    std::size_t free_count() const;
    std::vector<Cell> cells_in(CellState s) const;
    /// Cells with a finite reservation RSRP currently blocked.
    bool has_unblockable() const;

  private:
    std::int64_t window_start_ = 0;
    std::int64_t n_slots_ = 0;
    int n_sh_ = 1;
    std::vector<double> max_rsrp_;
    std::vector<CellState> state_;
};

struct LinkState
{
    LinkId link;
    int panel = 0;
    std::size_t codeword = 0;
    int rc = 0;
    std::vector<Cell> reserved_cells; // absolute cells of the latest frame
    double rsrp_threshold_dbm = 0.0;
    double initial_threshold_dbm = 0.0;
};

/// Draws the reselection counter for a reservation interval.
int init_rc(double rri_ms, Rng& rng);

/// Builds the selection-window grid for an allocation at slot now. Only SCI
/// emitted in [now - t0, now - t_s0] counts. RRA ignores all SCI and DBRA-O
/// ignores paired-direction SCI. The threshold is applied before returning.
ResourceGrid collect_sensing_window(Scheme scheme, std::span<const SensedSci> received, const WindowTiming& timing,
                                    std::int64_t now, int n_sh, double rsrp_threshold_dbm);

class PdbViolation : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

struct Selection
{
    std::vector<Cell> cells; // sorted
    bool forced = false;
    int escalations = 0;
};

/// Escalates link.rsrp_threshold_dbm by 3 dB while free cells are at most
/// min_free_fraction of the window (or fewer than n_s) and some blocked cell
/// can still be released, then draws n_s distinct free cells. Throws
/// PdbViolation when n_s exceeds the window.
Selection select_resources(ResourceGrid& grid, std::int64_t n_s, double min_free_fraction, LinkState& link,
                           Rng& rng);

struct AllocationRequest
{
    Scheme scheme = Scheme::Dbra;
    std::int64_t now = 0;
    std::int64_t n_s = 1;
    double p_rc = 0.0;
    double rri_ms = 100.0;
    double min_free_fraction = 0.2;
    const WindowTiming* timing = nullptr;
    /// Produces the grid with all reservations noted; called only on reselection.
    std::function<ResourceGrid()> sense;
};

struct FrameDecision
{
    std::vector<Cell> cells;
    bool reselected = false;
    bool forced = false;
    bool pdb_violation = false;
};

/// One pass of the selection flowchart for a newly arrived frame.
FrameDecision on_frame_arrival(LinkState& link, const AllocationRequest& req, Rng& rng);

/// SCI announcing the cells of one frame.
std::vector<SciMessage> emit_sci(const LinkState& link, Scheme scheme, std::span<const Cell> cells, double rri_ms,
                                 std::int64_t emitted_slot);

} // namespace mmsl::mac
