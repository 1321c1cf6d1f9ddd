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

#include "generators.hpp"
#include "mmsl/metrics.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <clocale>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <locale>
#include <sstream>
#include <stdexcept>

namespace
{

using namespace mmsl::metrics;
using mmsl::Rng;
using mmsl::sim::TransmissionRecord;
using mmsl::testing::for_all;
using mmsl::testing::pick_int;
using mmsl::testing::uniform;
namespace fs = std::filesystem;

TransmissionRecord single_cell(bool collided, double sinr = 10.0)
{
    TransmissionRecord r;
    r.cells = {{5, 0}};
    r.collided = r.overlapped = collided;
    r.collided_cells = r.overlapped_cells = collided ? 1 : 0;
    r.sinr_db = sinr;
    r.decoded = sinr >= 0.0;
    return r;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir
{
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name)
    {
        fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

TEST(CollisionProbability, Examples)
{
    std::vector<TransmissionRecord> recs;
    for (int i = 0; i < 10; ++i)
        recs.push_back(single_cell(i < 2));
    EXPECT_DOUBLE_EQ(collision_probability(recs), 0.2);
    EXPECT_DOUBLE_EQ(frame_collision_probability(recs), 0.2);
    for (auto& r : recs)
        r = single_cell(false);
    EXPECT_DOUBLE_EQ(collision_probability(recs), 0.0);
    EXPECT_THROW(collision_probability({}), std::invalid_argument);
    EXPECT_THROW(frame_collision_probability({}), std::invalid_argument);
}

TEST(CollisionProbability, RecountOracle)
{
    for_all(61, 200, [](Rng& rng, int) {
        std::vector<TransmissionRecord> recs(static_cast<std::size_t>(pick_int(rng, 1, 50)));
        for (auto& r : recs)
        {
            const int n = pick_int(rng, 1, 30);
            for (int c = 0; c < n; ++c)
                r.cells.push_back({c, 0});
            r.overlapped_cells = pick_int(rng, 0, n);
            r.collided_cells = pick_int(rng, 0, r.overlapped_cells);
            r.overlapped = r.overlapped_cells > 0;
            r.collided = r.collided_cells > 0;
        }
        double cells = 0, hit = 0, over = 0, frames_hit = 0;
        for (const auto& r : recs)
        {
            cells += static_cast<double>(r.cells.size());
            hit += r.collided_cells;
            over += r.overlapped_cells;
            frames_hit += r.collided;
        }
        const double p = collision_probability(recs);
        EXPECT_DOUBLE_EQ(p, hit / cells);
        EXPECT_DOUBLE_EQ(overlap_probability(recs), over / cells);
        EXPECT_DOUBLE_EQ(frame_collision_probability(recs), frames_hit / static_cast<double>(recs.size()));
        EXPECT_GE(p, 0.0);
        EXPECT_LE(p, 1.0);
    });
}

TEST(DecodeFailure, Ratio)
{
    std::vector<TransmissionRecord> recs{single_cell(false, 5.0), single_cell(true, -3.0), single_cell(false, 1.0),
                                         single_cell(true, -0.5)};
    EXPECT_DOUBLE_EQ(decode_failure_rate(recs), 0.5);
}

TEST(Quantiles, Examples)
{
    auto q = sinr_summary(std::vector{single_cell(false, 10.0)});
    EXPECT_EQ(q.min, 10.0);
    EXPECT_EQ(q.p25, 10.0);
    EXPECT_EQ(q.median, 10.0);
    EXPECT_EQ(q.p75, 10.0);
    EXPECT_EQ(q.max, 10.0);

    q = quantiles({40, 0, 30, 10, 20});
    EXPECT_EQ(q.min, 0.0);
    EXPECT_EQ(q.p25, 10.0);
    EXPECT_EQ(q.median, 20.0);
    EXPECT_EQ(q.p75, 30.0);
    EXPECT_EQ(q.max, 40.0);
    EXPECT_THROW(quantiles({}), std::invalid_argument);
    EXPECT_THROW(sinr_summary({}), std::invalid_argument);
}

TEST(Quantiles, SortOracle)
{
    for_all(62, 50, [](Rng& rng, int) {
        const int n = pick_int(rng, 1, 1000);
        std::vector<double> v(static_cast<std::size_t>(n));
        for (auto& x : v)
            x = uniform(rng, -30, 60);
        auto sorted = v;
        std::sort(sorted.begin(), sorted.end());
        auto rank = [&](double p) {
            auto k = static_cast<std::size_t>(std::ceil(p * n));
            k = std::clamp<std::size_t>(k, 1, sorted.size());
            return sorted[k - 1];
        };
        const auto q = quantiles(v);
        EXPECT_EQ(q.min, sorted.front());
        EXPECT_EQ(q.max, sorted.back());
        EXPECT_EQ(q.p25, rank(0.25));
        EXPECT_EQ(q.median, rank(0.5));
        EXPECT_EQ(q.p75, rank(0.75));
        EXPECT_LE(q.min, q.p25);
        EXPECT_LE(q.p25, q.median);
        EXPECT_LE(q.median, q.p75);
        EXPECT_LE(q.p75, q.max);
    });
}

TEST(Format, FixedDecimal)
{
    EXPECT_EQ(format_fixed(0.2), "0.200000");
    EXPECT_EQ(format_fixed(-1e-9), "0.000000");
    EXPECT_EQ(format_fixed(-2.5, 2), "-2.50");
    EXPECT_EQ(format_fixed(1234567.0, 0), "1234567");
}

TEST(Format, LocaleIndependent)
{
    const std::string before = format_fixed(3.25);
    for (const char* name : {"de_DE.UTF-8", "fr_FR.UTF-8", "C.UTF-8"})
    {
        if (std::setlocale(LC_ALL, name) == nullptr)
            continue;
        EXPECT_EQ(format_fixed(3.25), before) << name;
    }
    std::setlocale(LC_ALL, "C");
    EXPECT_EQ(before, "3.250000");
}

RunSummary sample_summary(std::uint64_t seed)
{
    RunSummary s;
    s.scheme = "dbra";
    s.prfs = "1";
    s.scenario = "1w-hd";
    s.n_tx = 64;
    s.rate_mbps = 20.0;
    s.pdb_ms = 10.0;
    s.k_rx = 5;
    s.seed = seed;
    s.collision_probability = 0.125 + 0.001 * static_cast<double>(seed);
    s.decode_failure_rate = 0.25;
    s.sinr = {-12.5, 1.25, 4.5, 9.75, 30.0};
    s.pdb_violations = 0;
    s.forced_selections = 3;
    s.frames = 7500;
    return s;
}

TEST(SummaryCsv, RoundTrip)
{
    std::vector<RunSummary> runs{sample_summary(1), sample_summary(2)};
    std::string text = summary_header() + "\n";
    for (const auto& r : runs)
        text += summary_row(r) + "\n";
    const auto back = parse_summary_csv(text);
    ASSERT_EQ(back.size(), 2u);
    for (std::size_t i = 0; i < 2; ++i)
    {
        EXPECT_EQ(back[i].scheme, runs[i].scheme);
        EXPECT_EQ(back[i].prfs, runs[i].prfs);
        EXPECT_EQ(back[i].scenario, runs[i].scenario);
        EXPECT_EQ(back[i].n_tx, runs[i].n_tx);
        EXPECT_EQ(back[i].seed, runs[i].seed);
        EXPECT_DOUBLE_EQ(back[i].collision_probability, runs[i].collision_probability);
        EXPECT_DOUBLE_EQ(back[i].sinr.median, runs[i].sinr.median);
        EXPECT_EQ(back[i].forced_selections, runs[i].forced_selections);
        EXPECT_EQ(back[i].frames, runs[i].frames);
    }
    EXPECT_THROW(parse_summary_csv("bogus\n"), std::invalid_argument);
}

TEST(SummaryCsv, HeaderColumns)
{
    EXPECT_EQ(summary_header(),
              "scheme,prfs,scenario,n_tx,rate_mbps,pdb_ms,k_rx,seed,collision_probability,decode_failure_rate,"
              "sinr_min,sinr_p25,sinr_median,sinr_p75,sinr_max,pdb_violations,forced_selections,frames");
}

TEST(WriteResults, RecordsOptional)
{
    TempDir dir("mmsl_write_results_test");
    std::vector<RunSummary> runs{sample_summary(1)};
    write_results(dir.path, runs, nullptr);
    EXPECT_TRUE(fs::exists(dir.path / "summary.csv"));
    EXPECT_TRUE(fs::exists(dir.path / "aggregate.csv"));
    EXPECT_FALSE(fs::exists(dir.path / "records.csv"));
    const auto parsed = parse_summary_csv(slurp(dir.path / "summary.csv"));
    EXPECT_EQ(parsed.size(), 1u);

    std::vector<std::vector<TransmissionRecord>> recs{{single_cell(true), single_cell(false)}};
    write_results(dir.path, runs, &recs);
    const auto text = slurp(dir.path / "records.csv");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
    EXPECT_EQ(text.substr(0, text.find('\n')), records_header());
}

TEST(WriteResults, ByteStable)
{
    TempDir a("mmsl_bytes_a"), b("mmsl_bytes_b");
    std::vector<RunSummary> runs{sample_summary(1), sample_summary(2), sample_summary(3)};
    write_results(a.path, runs, nullptr);
    write_results(b.path, runs, nullptr);
    EXPECT_EQ(slurp(a.path / "summary.csv"), slurp(b.path / "summary.csv"));
    EXPECT_EQ(slurp(a.path / "aggregate.csv"), slurp(b.path / "aggregate.csv"));
}

TEST(WriteResults, UnwritablePathReported)
{
    TempDir dir("mmsl_unwritable");
    fs::create_directories(dir.path);
    std::ofstream(dir.path / "blocker") << "x";
    std::vector<RunSummary> runs{sample_summary(1)};
    EXPECT_THROW(write_results(dir.path / "blocker" / "out", runs, nullptr), std::runtime_error);
}

TEST(Aggregate, GroupsBySeedlessKey)
{
    std::vector<RunSummary> runs{sample_summary(1), sample_summary(2), sample_summary(3)};
    auto other = sample_summary(4);
    other.scheme = "rra";
    runs.push_back(other);
    const auto agg = aggregate(runs);
    ASSERT_EQ(agg.size(), 2u);
    EXPECT_EQ(agg[0].runs, 3u);
    EXPECT_NEAR(agg[0].collision_mean, 0.127, 1e-12);
    EXPECT_NEAR(agg[0].collision_se, 0.001 / std::sqrt(3.0), 1e-12);
    EXPECT_EQ(agg[1].runs, 1u);
    EXPECT_EQ(agg[1].collision_se, 0.0);
}

TEST(Aggregate, MeanSe)
{
    const std::vector<double> v{1, 2, 3, 4};
    const auto m = mean_se(v);
    EXPECT_DOUBLE_EQ(m.mean, 2.5);
    EXPECT_NEAR(m.se, std::sqrt(5.0 / 3.0) / 2.0, 1e-12);
    EXPECT_THROW(mean_se({}), std::invalid_argument);
}

TEST(Summarize, EchoesConfig)
{
    mmsl::sim::SimConfig cfg;
    cfg.scheme = mmsl::mac::Scheme::DbraO;
    cfg.seed = 11;
    cfg.frame_size_bits = 570000;
    std::vector<TransmissionRecord> recs{single_cell(true, -2.0), single_cell(false, 8.0)};
    recs[0].forced = true;
    const auto s = summarize(cfg, recs);
    EXPECT_EQ(s.scheme, "dbra-o");
    EXPECT_EQ(s.prfs, "1");
    EXPECT_EQ(s.scenario, "1w-hd");
    EXPECT_EQ(s.n_tx, 64);
    EXPECT_DOUBLE_EQ(s.rate_mbps, 5.7);
    EXPECT_EQ(s.seed, 11u);
    EXPECT_EQ(s.frames, 2);
    EXPECT_EQ(s.forced_selections, 1);
    EXPECT_DOUBLE_EQ(s.collision_probability, 0.5);
    EXPECT_DOUBLE_EQ(s.decode_failure_rate, 0.5);
}

} // namespace
