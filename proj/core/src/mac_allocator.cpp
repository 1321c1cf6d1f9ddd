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

#include "mmsl/mac_allocator.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

namespace mmsl::mac
{

namespace
{
constexpr double kEscalationStepDb = 3.0;
constexpr double kNoReservation = -std::numeric_limits<double>::infinity();

std::string lower(std::string_view s)
{
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// Draws k distinct elements of pool (partial Fisher-Yates); pool is reordered.
template <class T>
std::vector<T> draw_distinct(std::vector<T>& pool, std::size_t k, Rng& rng)
{
    std::vector<T> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i)
    {
        const auto j = static_cast<std::size_t>(rng.uniform_int(static_cast<std::int64_t>(i),
                                                                static_cast<std::int64_t>(pool.size()) - 1));
        std::swap(pool[i], pool[j]);
        out.push_back(pool[i]);
    }
    return out;
}
} // namespace

std::string to_string(Scheme s)
{
    switch (s)
    {
    case Scheme::Dbra: return "dbra";
    case Scheme::DbraO: return "dbra-o";
    case Scheme::Rra: return "rra";
    }
    return "unknown";
}

Scheme parse_scheme(std::string_view text)
{
    const auto s = lower(text);
    if (s == "dbra")
        return Scheme::Dbra;
    if (s == "dbra-o")
        return Scheme::DbraO;
    if (s == "rra")
        return Scheme::Rra;
    throw std::invalid_argument("unknown scheme '" + std::string(text) + "' (expected dbra, dbra-o or rra)");
}

bool emits_sci(Scheme s) { return s != Scheme::Rra; }
bool emits_paired(Scheme s) { return s == Scheme::Dbra; }

void WindowTiming::validate() const
{
    if (!(t0 > t_s0) || t_s0 < 0)
        throw std::invalid_argument("WindowTiming: need t0 > t_s0 >= 0");
    if (t1 < 0 || !(t1 < t2))
        throw std::invalid_argument("WindowTiming: need 0 <= t1 < t2");
    if (!(slot_duration > 0.0))
        throw std::invalid_argument("WindowTiming: slot duration must be positive");
}

std::int64_t WindowTiming::rri_slots(double rri_ms) const
{
    if (!(rri_ms > 0.0))
        throw std::invalid_argument("rri must be positive");
    return std::max<std::int64_t>(1, std::llround(rri_ms * 1e-3 / slot_duration));
}

WindowTiming WindowTiming::make(double pdb_s, double slot_duration_s, double sensing_span_s)
{
    WindowTiming t;
    t.slot_duration = slot_duration_s;
    t.t0 = std::llround(sensing_span_s / slot_duration_s);
    t.t_s0 = 1;
    t.t1 = 2;
    t.t2 = static_cast<std::int64_t>(std::floor(pdb_s / slot_duration_s + 1e-9));
    t.validate();
    return t;
}

ResourceGrid::ResourceGrid(std::int64_t window_start, std::int64_t n_slots, int n_sh)
    : window_start_(window_start), n_slots_(n_slots), n_sh_(n_sh)
{
    if (n_slots < 1 || n_sh < 1)
        throw std::invalid_argument("ResourceGrid: empty window");
    const auto n = static_cast<std::size_t>(n_slots) * static_cast<std::size_t>(n_sh);
    max_rsrp_.assign(n, kNoReservation);
    state_.assign(n, CellState::Free);
}

bool ResourceGrid::contains(const Cell& c) const
{
    return c.slot >= window_start_ && c.slot < window_start_ + n_slots_ && c.subchannel >= 0 && c.subchannel < n_sh_;
}

std::size_t ResourceGrid::index(const Cell& c) const
{
    if (!contains(c))
        throw std::out_of_range("ResourceGrid: cell outside the window");
    return static_cast<std::size_t>(c.slot - window_start_) * static_cast<std::size_t>(n_sh_) +
           static_cast<std::size_t>(c.subchannel);
}

Cell ResourceGrid::cell_at(std::size_t i) const
{
    const auto n = static_cast<std::size_t>(n_sh_);
    return {window_start_ + static_cast<std::int64_t>(i / n), static_cast<int>(i % n)};
}

void ResourceGrid::note_reservation(const Cell& c, double rsrp_dbm)
{
    auto& r = max_rsrp_[index(c)];
    r = std::max(r, rsrp_dbm);
}

void ResourceGrid::project(std::span<const Cell> cells, std::int64_t rri_slots, double rsrp_dbm)
{
    const std::int64_t end = window_start_ + n_slots_;
    for (const auto& c : cells)
    {
        if (c.subchannel < 0 || c.subchannel >= n_sh_)
            continue;
        std::int64_t s = c.slot;
        if (s < window_start_)
        {
            const std::int64_t k = (window_start_ - s + rri_slots - 1) / rri_slots;
            s += k * rri_slots;
        }
        for (; s < end; s += rri_slots)
            note_reservation({s, c.subchannel}, rsrp_dbm);
    }
}

void ResourceGrid::apply_threshold(double threshold_dbm)
{
    for (std::size_t i = 0; i < state_.size(); ++i)
    {
        if (state_[i] == CellState::Selected)
            continue;
        state_[i] = max_rsrp_[i] > threshold_dbm ? CellState::Reserved : CellState::Free;
    }
}

void ResourceGrid::mark_selected(const Cell& c) { state_[index(c)] = CellState::Selected; }

std::size_t ResourceGrid::free_count() const
{
    return static_cast<std::size_t>(std::count(state_.begin(), state_.end(), CellState::Free));
}

std::vector<Cell> ResourceGrid::cells_in(CellState s) const
{
    std::vector<Cell> out;
    for (std::size_t i = 0; i < state_.size(); ++i)
        if (state_[i] == s)
            out.push_back(cell_at(i));
    return out;
}

bool ResourceGrid::has_unblockable() const
{
    for (std::size_t i = 0; i < state_.size(); ++i)
        if (state_[i] == CellState::Reserved && std::isfinite(max_rsrp_[i]))
            return true;
    return false;
}

int init_rc(double rri_ms, Rng& rng)
{
    if (!(rri_ms > 0.0))
        throw std::invalid_argument("init_rc: rri must be positive");
    if (rri_ms >= 100.0)
        return static_cast<int>(rng.uniform_int(5, 15));
    const double c = 100.0 / std::max(20.0, rri_ms);
    const auto lo = static_cast<std::int64_t>(std::ceil(5.0 * c - 1e-9));
    const auto hi = static_cast<std::int64_t>(std::floor(15.0 * c + 1e-9));
    return static_cast<int>(rng.uniform_int(lo, hi));
}

ResourceGrid collect_sensing_window(Scheme scheme, std::span<const SensedSci> received, const WindowTiming& timing,
                                    std::int64_t now, int n_sh, double rsrp_threshold_dbm)
{
    ResourceGrid grid(now + timing.t1, timing.t2 - timing.t1 + 1, n_sh);
    if (scheme != Scheme::Rra)
    {
        for (const auto& s : received)
        {
            if (!s.message)
                continue;
            const auto& m = *s.message;
            if (m.emitted_slot < now - timing.t0 || m.emitted_slot > now - timing.t_s0)
                continue;
            if (scheme == Scheme::DbraO && m.direction != SciDirection::Primary)
                continue;
            grid.project(m.reserved_cells, timing.rri_slots(m.rri_ms), s.rsrp_dbm);
        }
    }
    grid.apply_threshold(rsrp_threshold_dbm);
    return grid;
}

Selection select_resources(ResourceGrid& grid, std::int64_t n_s, double min_free_fraction, LinkState& link,
                           Rng& rng)
{
    if (n_s < 1)
        throw std::invalid_argument("select_resources: n_s must be at least 1");
    const auto total = grid.cell_count();
    if (static_cast<std::size_t>(n_s) > total)
        throw PdbViolation("select_resources: frame needs " + std::to_string(n_s) + " cells but the window holds " +
                           std::to_string(total));
    const auto need = static_cast<std::size_t>(n_s);

    Selection sel;
    auto starved = [&] {
        const auto free = grid.free_count();
        return static_cast<double>(free) <= min_free_fraction * static_cast<double>(total) || free < need;
    };
    while (starved() && grid.has_unblockable())
    {
        link.rsrp_threshold_dbm += kEscalationStepDb;
        grid.apply_threshold(link.rsrp_threshold_dbm);
        ++sel.escalations;
    }

    auto free = grid.cells_in(CellState::Free);
    if (free.size() >= need)
    {
        sel.cells = draw_distinct(free, need, rng);
    }
    else
    {
        sel.forced = true;
        sel.cells = free;
        auto rest = grid.cells_in(CellState::Reserved);
        auto extra = draw_distinct(rest, need - free.size(), rng);
        sel.cells.insert(sel.cells.end(), extra.begin(), extra.end());
    }
    std::sort(sel.cells.begin(), sel.cells.end());
    for (const auto& c : sel.cells)
        grid.mark_selected(c);
    return sel;
}

FrameDecision on_frame_arrival(LinkState& link, const AllocationRequest& req, Rng& rng)
{
    if (req.timing == nullptr || !req.sense)
        throw std::invalid_argument("on_frame_arrival: timing and sensing callback are required");
    const auto& timing = *req.timing;
    FrameDecision out;

    auto shifted = [&] {
        std::vector<Cell> cells = link.reserved_cells;
        const auto step = timing.rri_slots(req.rri_ms);
        for (auto& c : cells)
            c.slot += step;
        return cells;
    };
    auto in_window = [&](const std::vector<Cell>& cells) {
        return !cells.empty() && std::all_of(cells.begin(), cells.end(), [&](const Cell& c) {
            return c.slot >= req.now + timing.t1 && c.slot <= req.now + timing.t2;
        });
    };

    if (!link.reserved_cells.empty())
    {
        auto reuse = shifted();
        if (in_window(reuse) && static_cast<std::int64_t>(reuse.size()) == req.n_s)
        {
            if (link.rc > 0)
            {
                --link.rc;
                link.reserved_cells = reuse;
                out.cells = std::move(reuse);
                return out;
            }
            if (rng.bernoulli(req.p_rc))
            {
                link.rc = init_rc(req.rri_ms, rng);
                link.reserved_cells = reuse;
                out.cells = std::move(reuse);
                return out;
            }
        }
    }

    out.reselected = true;
    link.rsrp_threshold_dbm = link.initial_threshold_dbm;
    auto grid = req.sense();
    if (static_cast<std::size_t>(req.n_s) > grid.cell_count())
    {
        out.pdb_violation = true;
        for (std::size_t i = 0; i < grid.cell_count(); ++i)
            out.cells.push_back(grid.cell_at(i));
    }
    else
    {
        auto sel = select_resources(grid, req.n_s, req.min_free_fraction, link, rng);
        out.forced = sel.forced;
        out.cells = std::move(sel.cells);
    }
    link.reserved_cells = out.cells;
    link.rc = init_rc(req.rri_ms, rng);
    return out;
}

std::vector<SciMessage> emit_sci(const LinkState& link, Scheme scheme, std::span<const Cell> cells, double rri_ms,
                                 std::int64_t emitted_slot)
{
    std::vector<SciMessage> out;
    if (!emits_sci(scheme))
        return out;
    if (cells.empty())
        throw std::invalid_argument("emit_sci: no cells to announce");
    SciMessage m;
    m.sender = link.link.tx;
    m.link = link.link;
    m.reserved_cells.assign(cells.begin(), cells.end());
    m.rri_ms = rri_ms;
    m.emitted_slot = emitted_slot;
    m.direction = SciDirection::Primary;
    out.push_back(m);
    if (emits_paired(scheme))
    {
        m.direction = SciDirection::Paired;
        out.push_back(std::move(m));
    }
    return out;
}

} // namespace mmsl::mac
