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

#include "mmsl/sim_engine.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Run summaries, quantiles and CSV output.

namespace mmsl::metrics
{

struct SinrQuantiles
{
    double min = 0.0;
    double p25 = 0.0;
    double median = 0.0;
    double p75 = 0.0;
    double max = 0.0;
};

struct RunSummary
{
    std::string scheme;
    std::string prfs;
    std::string scenario;
    int n_tx = 0;
    double rate_mbps = 0.0;
    double pdb_ms = 0.0;
    int k_rx = 0;
    std::uint64_t seed = 0;
    double collision_probability = 0.0;
    double decode_failure_rate = 0.0;
    SinrQuantiles sinr;
    std::int64_t pdb_violations = 0;
    std::int64_t forced_selections = 0;
    std::int64_t frames = 0;
};

/// Fraction of allocated cells that collided, pooled over all records.
/// Throws on an empty list.
double collision_probability(std::span<const sim::TransmissionRecord> records);
/// Fraction of records with at least one collided cell.
double frame_collision_probability(std::span<const sim::TransmissionRecord> records);
/// Fraction of allocated cells shared with any other pair.
double overlap_probability(std::span<const sim::TransmissionRecord> records);
double decode_failure_rate(std::span<const sim::TransmissionRecord> records);

/// Nearest-rank quantile: the ceil(p*n)-th smallest value (p = 0 gives the minimum).
double nearest_rank(std::span<const double> sorted, double p);
SinrQuantiles quantiles(std::vector<double> values);
SinrQuantiles sinr_summary(std::span<const sim::TransmissionRecord> records);

RunSummary summarize(const sim::SimConfig& cfg, std::span<const sim::TransmissionRecord> records);

/// Fixed decimal with a dot separator regardless of the global locale.
std::string format_fixed(double v, int precision = 6);

std::string summary_header();
std::string summary_row(const RunSummary& s);
std::vector<RunSummary> parse_summary_csv(std::string_view text);

std::string records_header();
std::string record_row(std::size_t run, const sim::TransmissionRecord& r);

struct Aggregate
{
    RunSummary key; // seed and metric fields unused
    std::size_t runs = 0;
    double collision_mean = 0.0;
    double collision_se = 0.0;
    double decode_failure_mean = 0.0;
    double decode_failure_se = 0.0;
    double sinr_median_mean = 0.0;
    double sinr_median_se = 0.0;
};

/// Groups runs that differ only in seed, in first-seen order.
std::vector<Aggregate> aggregate(std::span<const RunSummary> runs);

struct MeanSe
{
    double mean = 0.0;
    double se = 0.0;
};
/// Sample mean and standard error (sd / sqrt(n), sd with n-1); se = 0 for n < 2.
MeanSe mean_se(std::span<const double> values);

/// Writes summary.csv and aggregate.csv into dir, plus records.csv when
/// records is non-null (one inner list per run, same order as runs).
void write_results(const std::filesystem::path& dir, std::span<const RunSummary> runs,
                   const std::vector<std::vector<sim::TransmissionRecord>>* records);

} // namespace mmsl::metrics
