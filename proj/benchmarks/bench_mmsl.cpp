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

#include "mmsl/beamforming.hpp"
#include "mmsl/mac_allocator.hpp"
#include "mmsl/sim_engine.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>

namespace
{

using namespace mmsl;

void BM_CodewordGainClosedForm(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    double look = -0.9;
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(beam::ula_codeword_gain(n, 0.5, look, 0.25));
        look = look > 0.9 ? -0.9 : look + 1e-3;
    }
}
BENCHMARK(BM_CodewordGainClosedForm)->Arg(4)->Arg(16)->Arg(64);

void BM_CodewordGainSummed(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    const auto cb = beam::Codebook::dft(n);
    const beam::ArrayConfig arr{n, 0.5, 0.0};
    double look = -0.9;
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(beam::beam_gain(arr, std::asin(look), cb.entries[0]));
        look = look > 0.9 ? -0.9 : look + 1e-3;
    }
}
BENCHMARK(BM_CodewordGainSummed)->Arg(4)->Arg(16)->Arg(64);

void BM_SelectTxCodeword(benchmark::State& state)
{
    const int n = static_cast<int>(state.range(0));
    const auto cb = beam::Codebook::dft(n);
    const auto h = beam::los_channel({0, 0}, {30, 4}, {n, 0.5, 0.0}, {2, 0.5, beam::kPi}, 60e9);
    const beam::ComplexVector u(2, {1 / std::sqrt(2.0), 0});
    for (auto _ : state)
        benchmark::DoNotOptimize(beam::select_tx_codeword(h, cb, u));
}
BENCHMARK(BM_SelectTxCodeword)->Arg(4)->Arg(16)->Arg(64);

void BM_SenseAndSelect(benchmark::State& state)
{
    const auto timing = mac::WindowTiming::make(10e-3, 125e-6);
    Rng rng(1);
    std::vector<mac::SensedSci> heard;
    for (int m = 0; m < state.range(0); ++m)
    {
        auto msg = std::make_shared<mac::SciMessage>();
        msg->emitted_slot = -rng.uniform_int(1, 800);
        for (int c = 0; c < 46; ++c)
            msg->reserved_cells.push_back({msg->emitted_slot + rng.uniform_int(2, 80), static_cast<int>(rng.uniform_int(0, 3))});
        heard.push_back({msg, -100.0 + 50.0 * rng.uniform01()});
    }
    for (auto _ : state)
    {
        auto grid = mac::collect_sensing_window(mac::Scheme::Dbra, heard, timing, 0, 4, -80.0);
        mac::LinkState link;
        link.rsrp_threshold_dbm = link.initial_threshold_dbm = -80.0;
        benchmark::DoNotOptimize(mac::select_resources(grid, 46, 0.2, link, rng));
    }
}
BENCHMARK(BM_SenseAndSelect)->Arg(0)->Arg(20)->Arg(100);

void BM_RunOneSecond(benchmark::State& state)
{
    sim::SimConfig cfg;
    cfg.scheme = static_cast<mac::Scheme>(state.range(0));
    cfg.frame_size_bits = 2'000'000;
    cfg.duration_s = 1.0;
    for (auto _ : state)
        benchmark::DoNotOptimize(sim::run(cfg).records.size());
}
BENCHMARK(BM_RunOneSecond)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
