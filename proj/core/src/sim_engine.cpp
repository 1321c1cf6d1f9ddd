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

#include "mmsl/sim_engine.hpp"

#include "mmsl/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <stdexcept>

namespace mmsl::sim
{

using mac::Cell;

void SimConfig::validate() const
{
    frame.validate();
    scenario.validate();
    link_budget.validate();
    if (arrays.n_tx < 1 || arrays.n_rx < 1)
        throw std::invalid_argument("SimConfig: array sizes must be at least 1");
    if (frame_size_bits < 1)
        throw std::invalid_argument("SimConfig: frame_size_bits must be positive");
    if (!(frame_rate > 0.0))
        throw std::invalid_argument("SimConfig: frame_rate must be positive");
    if (!(pdb_ms > 0.0))
        throw std::invalid_argument("SimConfig: pdb_ms must be positive");
    if (!(duration_s * frame_rate >= 10.0 - 1e-9))
        throw std::invalid_argument("SimConfig: duration must cover at least 10 frame periods");
    if (!(rri_ms > 0.0))
        throw std::invalid_argument("SimConfig: rri_ms must be positive");
    if (!(p_rc >= 0.0 && p_rc <= 1.0))
        throw std::invalid_argument("SimConfig: p_rc must lie in [0, 1]");
    if (!(min_free_fraction >= 0.0 && min_free_fraction < 1.0))
        throw std::invalid_argument("SimConfig: min_free_fraction must lie in [0, 1)");
    if (!(sensing_span_ms > 0.0))
        throw std::invalid_argument("SimConfig: sensing_span_ms must be positive");
    if (!(geometry_refresh_s > 0.0))
        throw std::invalid_argument("SimConfig: geometry_refresh_s must be positive");
    if (!(carrier_frequency > 0.0))
        throw std::invalid_argument("SimConfig: carrier_frequency must be positive");
    if (prfs.numerology < 0 || prfs.n_sh < 1)
        throw std::invalid_argument("SimConfig: invalid numerology / subchannel pairing");
}

std::vector<bool> detect_collisions(std::span<const CellUse> transmissions)
{
    std::map<Cell, int> users;
    std::vector<std::vector<Cell>> unique(transmissions.size());
    for (std::size_t i = 0; i < transmissions.size(); ++i)
    {
        auto& u = unique[i];
        u = transmissions[i].cells;
        std::sort(u.begin(), u.end());
        u.erase(std::unique(u.begin(), u.end()), u.end());
        for (const auto& c : u)
            ++users[c];
    }
    std::vector<bool> out(transmissions.size(), false);
    for (std::size_t i = 0; i < transmissions.size(); ++i)
        out[i] = std::any_of(unique[i].begin(), unique[i].end(), [&](const Cell& c) { return users[c] > 1; });
    return out;
}

SinrOutcome evaluate_sinr(double signal_w, std::span<const double> interference_w, const beam::LinkBudget& lb)
{
    double i = 0.0;
    for (double x : interference_w)
        i += x;
    const double s = beam::sinr_from_powers(signal_w, i, beam::noise_power(lb));
    return {s, s >= lb.sinr_threshold_db};
}

SinrOutcome evaluate_sinr(const beam::SignalTerm& signal, std::span<const beam::InterferenceTerm> interferers,
                          const beam::LinkBudget& lb)
{
    const double s = beam::sinr(signal, interferers, lb);
    return {s, s >= lb.sinr_threshold_db};
}

std::vector<std::vector<mac::SensedSci>> deliver_sci(std::span<const SciBeam> emitted,
                                                     std::span<const SensingBeam> listeners,
                                                     std::span<const int> busy_vehicles, const DeliveryParams& p)
{
    std::vector<std::vector<mac::SensedSci>> inbox(listeners.size());
    const double floor_w = beam::noise_power(p.link_budget) * beam::db_to_linear(p.snr_threshold_db);
    for (const auto& e : emitted)
    {
        if (!mac::emits_sci(p.scheme))
            continue;
        if (e.message.direction == mac::SciDirection::Paired && !mac::emits_paired(p.scheme))
            continue;
        auto msg = std::make_shared<const mac::SciMessage>(e.message);
        for (std::size_t k = 0; k < listeners.size(); ++k)
        {
            const auto& l = listeners[k];
            if (l.vehicle == e.vehicle)
                continue;
            if (p.half_duplex &&
                std::find(busy_vehicles.begin(), busy_vehicles.end(), l.vehicle) != busy_vehicles.end())
                continue;
            const auto path = beam::los_path(e.position, l.position, e.array, l.array, p.carrier_frequency,
                                             p.oxygen_db_per_km);
            const double rx = p.link_budget.tx_power * beam::path_coupling(path, e.array, e.weights, l.array, l.combiner);
            if (rx >= floor_w)
                inbox[k].push_back({msg, beam::watt_to_dbm(rx)});
        }
    }
    return inbox;
}

namespace
{

constexpr double kSinrFloorDb = -200.0;

struct Tx
{
    int link;
    int subchannel;
    int record;
};

// One SCI repeated in every slot its frame occupies. Listeners that clear
// the SNR test are found on the first repetition; each then takes the first
// repetition it is idle for.
struct SciOnAir
{
    int link = 0;
    std::shared_ptr<const mac::SciMessage> message;
    bool resolved = false;
    std::vector<std::pair<int, double>> pending; // listener link, rsrp dBm
};

struct LinkRuntime
{
    mac::LinkState state;
    int tx_vehicle = 0;
    int rx_vehicle = 0;
    int sensing_panel = 0;
    std::size_t sensing_codeword = 0;
    std::vector<mac::SensedSci> inbox;
    Rng rng{0};
};

class Engine
{
  public:
    explicit Engine(const SimConfig& cfg) : cfg_(cfg) {}

    SimResult run();

  private:
    void setup();
    void refresh_pair(int a, int v);
    double bearing(int a, int v);
    double path_gain(int a, int v);
    double element(double local) const { return beam::db_to_linear(beam::element_gain(local)); }
    double boresight(int v, int panel) const { return sc_.vehicles[static_cast<std::size_t>(v)].tx_arrays[static_cast<std::size_t>(panel)].boresight; }
    double tx_factor(int a, int panel, double sin_steer, double theta) const;
    double rx_factor(int v, int panel, int n, double sin_steer, double theta) const;
    double data_rx_factor(int v, double theta) const;
    double data_gain(int link, int v);
    void select_beam(int link);
    void allocate(int link, std::int64_t now, int frame);
    void transmit(std::int64_t slot);
    void deliver(std::int64_t slot);

    SimConfig cfg_;
    scenario::Scenario sc_;
    std::vector<LinkRuntime> links_;
    std::vector<std::vector<int>> links_of_;
    mac::WindowTiming timing_;
    beam::Codebook tx_cb_;
    beam::Codebook rx_cb_;
    std::vector<double> tx_sines_;
    std::vector<double> rx_sines_;
    double u0_sine_ = 0.0;
    double noise_w_ = 0.0;
    double capture_ = 1.0;
    std::int64_t n_s_ = 1;
    std::int64_t refresh_slots_ = 1;
    std::int64_t epoch_ = 0;
    std::int64_t ring_ = 1;
    int nv_ = 0;

    std::vector<double> pair_bearing_;
    std::vector<double> pair_gain_;
    std::vector<std::int64_t> pair_stamp_;
    std::vector<double> data_gain_;
    std::vector<std::int64_t> data_stamp_;

    std::vector<std::vector<Tx>> tx_ring_;
    std::vector<std::vector<std::shared_ptr<SciOnAir>>> sci_ring_;
    std::vector<char> busy_;

    std::vector<TransmissionRecord> records_;
    std::vector<double> sum_signal_;
    std::vector<double> sum_noise_;
    SimResult result_;
};

void Engine::setup()
{
    cfg_.validate();
    const double slot = cfg_.prfs.slot_duration();
    timing_ = mac::WindowTiming::make(cfg_.pdb_ms * 1e-3, slot, cfg_.sensing_span_ms * 1e-3);

    auto scfg = cfg_.scenario;
    scfg.seed = cfg_.seed;
    sc_ = scenario::build_scenario(scfg, cfg_.arrays);
    nv_ = static_cast<int>(sc_.vehicles.size());
    const auto link_set = scenario::neighbor_links(sc_.vehicles, scfg.k_rx, scfg.lane_length);

    tx_cb_ = beam::Codebook::dft(cfg_.arrays.n_tx, cfg_.arrays.spacing);
    rx_cb_ = beam::Codebook::dft(cfg_.arrays.n_rx, cfg_.arrays.spacing);
    for (const auto& d : tx_cb_.directions)
        tx_sines_.push_back(std::sin(d.azimuth));
    for (const auto& d : rx_cb_.directions)
        rx_sines_.push_back(std::sin(d.azimuth));
    u0_sine_ = rx_sines_[rx_cb_.boresight_index()];

    noise_w_ = beam::noise_power(cfg_.link_budget);
    capture_ = beam::db_to_linear(cfg_.capture_sir_db);
    n_s_ = phy::cells_needed(cfg_.frame_size_bits, cfg_.frame, cfg_.prfs);
    refresh_slots_ = std::max<std::int64_t>(1, std::llround(cfg_.geometry_refresh_s / slot));
    ring_ = timing_.t2 + 2;

    result_.vehicles = nv_;
    result_.links = static_cast<int>(link_set.links.size());
    result_.cells_per_frame = n_s_;
    result_.window_cells = (timing_.t2 - timing_.t1 + 1) * cfg_.prfs.n_sh;

    double threshold = 0.0;
    if (!link_set.links.empty())
    {
        const auto stats = scenario::distance_stats(sc_.vehicles, link_set, scfg.lane_length);
        result_.mean_link_distance = stats.mean;
        const double aligned = cfg_.link_budget.tx_power *
                               beam::propagation_gain(stats.mean, cfg_.carrier_frequency, cfg_.oxygen_db_per_km) *
                               beam::db_to_linear(2.0 * beam::kElementPeakGainDbi) * cfg_.arrays.n_tx * cfg_.arrays.n_rx;
        threshold = beam::watt_to_dbm(aligned) - cfg_.rsrp_margin_db;
    }
    result_.initial_threshold_dbm = threshold;

    links_of_.assign(static_cast<std::size_t>(nv_), {});
    links_.resize(link_set.links.size());
    for (std::size_t i = 0; i < link_set.links.size(); ++i)
    {
        auto& l = links_[i];
        const auto& ln = link_set.links[i];
        l.tx_vehicle = ln.tx;
        l.rx_vehicle = ln.rx;
        l.state.link = {ln.tx, ln.rx};
        l.state.panel = -1;
        l.state.initial_threshold_dbm = threshold;
        l.state.rsrp_threshold_dbm = threshold;
        l.rng = Rng(mix_seed(cfg_.seed, 1000 + i));
        links_of_[static_cast<std::size_t>(ln.tx)].push_back(static_cast<int>(i));
    }

    const auto nv = static_cast<std::size_t>(nv_);
    pair_bearing_.assign(nv * nv, 0.0);
    pair_gain_.assign(nv * nv, 0.0);
    pair_stamp_.assign(nv * nv, -1);
    data_gain_.assign(links_.size() * nv, 0.0);
    data_stamp_.assign(links_.size() * nv, -1);
    tx_ring_.assign(static_cast<std::size_t>(ring_), {});
    sci_ring_.assign(static_cast<std::size_t>(ring_), {});
    busy_.assign(nv, 0);

    for (std::size_t i = 0; i < links_.size(); ++i)
        select_beam(static_cast<int>(i));
}

void Engine::refresh_pair(int a, int v)
{
    const auto k = static_cast<std::size_t>(a) * static_cast<std::size_t>(nv_) + static_cast<std::size_t>(v);
    if (pair_stamp_[k] == epoch_)
        return;
    const auto d = sc_.displacement(sc_.vehicles[static_cast<std::size_t>(a)].position,
                                    sc_.vehicles[static_cast<std::size_t>(v)].position);
    const double r = std::max(std::hypot(d.x, d.y), 1e-3);
    pair_bearing_[k] = std::atan2(d.y, d.x);
    pair_gain_[k] = beam::propagation_gain(r, cfg_.carrier_frequency, cfg_.oxygen_db_per_km);
    pair_stamp_[k] = epoch_;
}

double Engine::bearing(int a, int v)
{
    refresh_pair(a, v);
    return pair_bearing_[static_cast<std::size_t>(a) * static_cast<std::size_t>(nv_) + static_cast<std::size_t>(v)];
}

double Engine::path_gain(int a, int v)
{
    refresh_pair(a, v);
    return pair_gain_[static_cast<std::size_t>(a) * static_cast<std::size_t>(nv_) + static_cast<std::size_t>(v)];
}

double Engine::tx_factor(int a, int panel, double sin_steer, double theta) const
{
    const double local = beam::wrap_angle(theta - boresight(a, panel));
    return element(local) * beam::ula_codeword_gain(cfg_.arrays.n_tx, cfg_.arrays.spacing, std::sin(local), sin_steer);
}

double Engine::rx_factor(int v, int panel, int n, double sin_steer, double theta) const
{
    const double local = beam::wrap_angle(theta + beam::kPi - boresight(v, panel));
    return element(local) * beam::ula_codeword_gain(n, cfg_.arrays.spacing, std::sin(local), sin_steer);
}

double Engine::data_rx_factor(int v, double theta) const
{
    // Data reception combines both panels, each on its boresight beam.
    return rx_factor(v, 0, cfg_.arrays.n_rx, u0_sine_, theta) + rx_factor(v, 1, cfg_.arrays.n_rx, u0_sine_, theta);
}

double Engine::data_gain(int link, int v)
{
    const auto k = static_cast<std::size_t>(link) * static_cast<std::size_t>(nv_) + static_cast<std::size_t>(v);
    if (data_stamp_[k] == epoch_)
        return data_gain_[k];
    const auto& l = links_[static_cast<std::size_t>(link)];
    double g = 0.0;
    if (v != l.tx_vehicle)
    {
        const double theta = bearing(l.tx_vehicle, v);
        g = cfg_.link_budget.tx_power * path_gain(l.tx_vehicle, v) *
            tx_factor(l.tx_vehicle, l.state.panel, tx_sines_[l.state.codeword], theta) * data_rx_factor(v, theta);
    }
    data_gain_[k] = g;
    data_stamp_[k] = epoch_;
    return g;
}

void Engine::select_beam(int link)
{
    auto& l = links_[static_cast<std::size_t>(link)];
    const double theta = bearing(l.tx_vehicle, l.rx_vehicle);
    const double rx = data_rx_factor(l.rx_vehicle, theta);
    int best_panel = 0;
    std::size_t best_cw = 0;
    double best = -1.0;
    for (int p = 0; p < 2; ++p)
    {
        // Codeword argmax on this panel; lowest index wins ties.
        const double local = beam::wrap_angle(theta - boresight(l.tx_vehicle, p));
        const double sl = std::sin(local);
        std::size_t cw = 0;
        double g = -1.0;
        for (std::size_t k = 0; k < tx_sines_.size(); ++k)
        {
            const double x = beam::ula_codeword_gain(cfg_.arrays.n_tx, cfg_.arrays.spacing, sl, tx_sines_[k]);
            if (x > g * (1.0 + 1e-12))
            {
                g = x;
                cw = k;
            }
        }
        const double power = element(local) * g * rx;
        if (power > best * (1.0 + 1e-12))
        {
            best = power;
            best_panel = p;
            best_cw = cw;
        }
    }
    if (best_panel != l.state.panel || best_cw != l.state.codeword)
    {
        l.state.panel = best_panel;
        l.state.codeword = best_cw;
        l.sensing_panel = best_panel;
        l.sensing_codeword = beam::select_sensing_codeword(rx_cb_, tx_cb_.directions[best_cw]);
        const auto row = static_cast<std::size_t>(link) * static_cast<std::size_t>(nv_);
        std::fill(data_stamp_.begin() + static_cast<std::ptrdiff_t>(row),
                  data_stamp_.begin() + static_cast<std::ptrdiff_t>(row + static_cast<std::size_t>(nv_)), -1);
    }
}

void Engine::allocate(int link, std::int64_t now, int frame)
{
    auto& l = links_[static_cast<std::size_t>(link)];
    select_beam(link);

    auto& inbox = l.inbox;
    inbox.erase(std::remove_if(inbox.begin(), inbox.end(),
                               [&](const mac::SensedSci& s) { return s.message->emitted_slot < now - timing_.t0; }),
                inbox.end());

    mac::AllocationRequest req;
    req.scheme = cfg_.scheme;
    req.now = now;
    req.n_s = n_s_;
    req.p_rc = cfg_.p_rc;
    req.rri_ms = cfg_.rri_ms;
    req.min_free_fraction = cfg_.min_free_fraction;
    req.timing = &timing_;
    req.sense = [&] {
        auto grid = mac::collect_sensing_window(cfg_.scheme, inbox, timing_, now, cfg_.prfs.n_sh,
                                                l.state.rsrp_threshold_dbm);
        if (cfg_.scheme != mac::Scheme::Rra)
        {
            // The vehicle's own reservations on its other links are known exactly.
            const auto rri = timing_.rri_slots(cfg_.rri_ms);
            for (int other : links_of_[static_cast<std::size_t>(l.tx_vehicle)])
                if (other != link)
                    grid.project(links_[static_cast<std::size_t>(other)].state.reserved_cells, rri,
                                 std::numeric_limits<double>::infinity());
            grid.apply_threshold(l.state.rsrp_threshold_dbm);
        }
        return grid;
    };
    auto decision = mac::on_frame_arrival(l.state, req, l.rng);

    TransmissionRecord rec;
    rec.link = l.state.link;
    rec.link_index = link;
    rec.frame = frame;
    rec.arrival_slot = now;
    rec.slot = decision.cells.front().slot;
    rec.cells = decision.cells;
    rec.forced = decision.forced;
    rec.pdb_violation = decision.pdb_violation;
    rec.reselected = decision.reselected;
    const int idx = static_cast<int>(records_.size());
    records_.push_back(std::move(rec));
    sum_signal_.push_back(0.0);
    sum_noise_.push_back(0.0);

    for (const auto& c : decision.cells)
        tx_ring_[static_cast<std::size_t>(c.slot % ring_)].push_back({link, c.subchannel, idx});

    for (auto& m : mac::emit_sci(l.state, cfg_.scheme, decision.cells, cfg_.rri_ms, decision.cells.front().slot))
    {
        auto air = std::make_shared<SciOnAir>();
        air->link = link;
        air->message = std::make_shared<const mac::SciMessage>(std::move(m));
        std::int64_t prev = -1;
        for (const auto& c : decision.cells)
            if (c.slot != prev)
            {
                sci_ring_[static_cast<std::size_t>(c.slot % ring_)].push_back(air);
                prev = c.slot;
            }
    }
}

void Engine::transmit(std::int64_t slot)
{
    auto& bucket = tx_ring_[static_cast<std::size_t>(slot % ring_)];
    std::stable_sort(bucket.begin(), bucket.end(), [](const Tx& a, const Tx& b) { return a.subchannel < b.subchannel; });
    for (const auto& t : bucket)
        busy_[static_cast<std::size_t>(links_[static_cast<std::size_t>(t.link)].tx_vehicle)] = 1;

    std::size_t begin = 0;
    while (begin < bucket.size())
    {
        std::size_t end = begin + 1;
        while (end < bucket.size() && bucket[end].subchannel == bucket[begin].subchannel)
            ++end;
        for (std::size_t i = begin; i < end; ++i)
        {
            const auto& ti = bucket[i];
            const auto& li = links_[static_cast<std::size_t>(ti.link)];
            auto& rec = records_[static_cast<std::size_t>(ti.record)];
            double signal = data_gain(ti.link, li.rx_vehicle);
            double interference = 0.0;
            bool overlapped = false;
            bool collided = false;
            for (std::size_t j = begin; j < end; ++j)
            {
                if (j == i)
                    continue;
                const auto& lj = links_[static_cast<std::size_t>(bucket[j].link)];
                overlapped = true;
                if (lj.tx_vehicle == li.rx_vehicle)
                {
                    // The receiver itself transmits on this cell and hears nothing.
                    collided = true;
                    signal = 0.0;
                    continue;
                }
                const double ij = data_gain(bucket[j].link, li.rx_vehicle);
                interference += ij;
                if (signal <= capture_ * ij)
                    collided = true;
            }
            rec.overlapped = rec.overlapped || overlapped;
            rec.collided = rec.collided || collided;
            rec.overlapped_cells += overlapped ? 1 : 0;
            rec.collided_cells += collided ? 1 : 0;
            sum_signal_[static_cast<std::size_t>(ti.record)] += signal;
            sum_noise_[static_cast<std::size_t>(ti.record)] += noise_w_ + interference;
        }
        begin = end;
    }
}

void Engine::deliver(std::int64_t slot)
{
    auto& on_air = sci_ring_[static_cast<std::size_t>(slot % ring_)];
    const double floor_w = noise_w_ * beam::db_to_linear(cfg_.sci_snr_threshold_db);
    for (const auto& air : on_air)
    {
        const auto& m = *air->message;
        if (m.direction == mac::SciDirection::Paired && !mac::emits_paired(cfg_.scheme))
            continue;
        if (!air->resolved)
        {
            air->resolved = true;
            const auto& src = links_[static_cast<std::size_t>(air->link)];
            const int a = src.tx_vehicle;
            const int panel = m.direction == mac::SciDirection::Primary ? src.state.panel : 1 - src.state.panel;
            for (int v = 0; v < nv_; ++v)
            {
                if (v == a || links_of_[static_cast<std::size_t>(v)].empty())
                    continue;
                const double theta = bearing(a, v);
                const double tx = cfg_.link_budget.tx_power * path_gain(a, v) *
                                  tx_factor(a, panel, tx_sines_[src.state.codeword], theta);
                for (int link : links_of_[static_cast<std::size_t>(v)])
                {
                    const auto& dst = links_[static_cast<std::size_t>(link)];
                    const double rsrp = tx * rx_factor(v, dst.sensing_panel, cfg_.arrays.n_rx,
                                                       rx_sines_[dst.sensing_codeword], theta);
                    if (rsrp >= floor_w)
                        air->pending.emplace_back(link, beam::watt_to_dbm(rsrp));
                }
            }
        }
        auto& pending = air->pending;
        std::size_t keep = 0;
        for (std::size_t k = 0; k < pending.size(); ++k)
        {
            auto& dst = links_[static_cast<std::size_t>(pending[k].first)];
            if (cfg_.half_duplex && busy_[static_cast<std::size_t>(dst.tx_vehicle)])
            {
                pending[keep++] = pending[k];
                continue;
            }
            dst.inbox.push_back({air->message, pending[k].second});
            ++result_.sci_delivered;
        }
        pending.resize(keep);
    }
    on_air.clear();
}

SimResult Engine::run()
{
    setup();
    const double slot = cfg_.prfs.slot_duration();
    const std::int64_t total_slots = std::llround(cfg_.duration_s / slot);
    const std::int64_t period = std::max<std::int64_t>(1, std::llround(1.0 / (cfg_.frame_rate * slot)));

    // Phase-staggered periodic arrivals.
    Rng phase_rng(mix_seed(cfg_.seed, 2));
    struct Arrival
    {
        std::int64_t slot;
        int link;
        int frame;
    };
    std::vector<Arrival> arrivals;
    for (std::size_t l = 0; l < links_.size(); ++l)
    {
        const auto phase = phase_rng.uniform_int(0, period - 1);
        int k = 0;
        for (std::int64_t s = phase; s < total_slots; s += period)
            arrivals.push_back({s, static_cast<int>(l), k++});
    }
    std::sort(arrivals.begin(), arrivals.end(), [](const Arrival& a, const Arrival& b) {
        return a.slot != b.slot ? a.slot < b.slot : a.link < b.link;
    });

    const std::int64_t last = arrivals.empty() ? -1 : arrivals.back().slot + timing_.t2;
    std::size_t next = 0;
    for (std::int64_t s = 0; s <= last; ++s)
    {
        if (s > 0)
            scenario::step_mobility_in_place(sc_.vehicles, slot, sc_.lane_length());
        epoch_ = s / refresh_slots_;
        std::fill(busy_.begin(), busy_.end(), 0);

        while (next < arrivals.size() && arrivals[next].slot == s)
        {
            allocate(arrivals[next].link, s, arrivals[next].frame);
            ++next;
        }
        transmit(s);
        deliver(s);
        tx_ring_[static_cast<std::size_t>(s % ring_)].clear();
    }

    for (std::size_t i = 0; i < records_.size(); ++i)
    {
        auto& r = records_[i];
        const double db = beam::linear_to_db(sum_signal_[i] / sum_noise_[i]);
        r.sinr_db = std::max(db, kSinrFloorDb);
        r.decoded = r.sinr_db >= cfg_.link_budget.sinr_threshold_db;
    }
    result_.records = std::move(records_);
    return std::move(result_);
}

} // namespace

SimResult run(const SimConfig& cfg)
{
    Engine engine(cfg);
    return engine.run();
}

} // namespace mmsl::sim
