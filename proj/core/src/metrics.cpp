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

#include "mmsl/metrics.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace mmsl::metrics
{

namespace
{
void require_non_empty(std::span<const sim::TransmissionRecord> records, const char* what)
{
    if (records.empty())
        throw std::invalid_argument(std::string(what) + ": empty record list");
}

std::string prfs_label(const phy::PrfsConfig& p)
{
    if (p.id == phy::PrfsId::Custom)
        return p.name();
    return std::to_string(static_cast<int>(p.id));
}

std::vector<std::string> split(std::string_view line, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true)
    {
        const auto pos = line.find(sep, start);
        out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

template <class T>
T parse_number(const std::string& s)
{
    T v{};
    const auto* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end)
        throw std::invalid_argument("malformed number '" + s + "' in summary csv");
    return v;
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open '" + path.string() + "' for writing");
    out << content;
    out.flush();
    if (!out)
        throw std::runtime_error("failed writing '" + path.string() + "'");
}

const char* flag(bool b) { return b ? "1" : "0"; }
} // namespace

double collision_probability(std::span<const sim::TransmissionRecord> records)
{
    require_non_empty(records, "collision_probability");
    std::int64_t cells = 0;
    std::int64_t hit = 0;
    for (const auto& r : records)
    {
        cells += static_cast<std::int64_t>(r.cells.size());
        hit += r.collided_cells;
    }
    return cells == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(cells);
}

double frame_collision_probability(std::span<const sim::TransmissionRecord> records)
{
    require_non_empty(records, "frame_collision_probability");
    const auto n = std::count_if(records.begin(), records.end(), [](const auto& r) { return r.collided; });
    return static_cast<double>(n) / static_cast<double>(records.size());
}

double overlap_probability(std::span<const sim::TransmissionRecord> records)
{
    require_non_empty(records, "overlap_probability");
    std::int64_t cells = 0;
    std::int64_t hit = 0;
    for (const auto& r : records)
    {
        cells += static_cast<std::int64_t>(r.cells.size());
        hit += r.overlapped_cells;
    }
    return cells == 0 ? 0.0 : static_cast<double>(hit) / static_cast<double>(cells);
}

double decode_failure_rate(std::span<const sim::TransmissionRecord> records)
{
    require_non_empty(records, "decode_failure_rate");
    const auto n = std::count_if(records.begin(), records.end(), [](const auto& r) { return !r.decoded; });
    return static_cast<double>(n) / static_cast<double>(records.size());
}

double nearest_rank(std::span<const double> sorted, double p)
{
    if (sorted.empty())
        throw std::invalid_argument("nearest_rank: empty sample");
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument("nearest_rank: p must lie in [0, 1]");
    const auto n = static_cast<double>(sorted.size());
    auto rank = static_cast<std::size_t>(std::ceil(p * n - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

SinrQuantiles quantiles(std::vector<double> values)
{
    if (values.empty())
        throw std::invalid_argument("quantiles: empty sample");
    std::sort(values.begin(), values.end());
    return {values.front(), nearest_rank(values, 0.25), nearest_rank(values, 0.5), nearest_rank(values, 0.75),
            values.back()};
}

SinrQuantiles sinr_summary(std::span<const sim::TransmissionRecord> records)
{
    require_non_empty(records, "sinr_summary");
    std::vector<double> v;
    v.reserve(records.size());
    for (const auto& r : records)
        v.push_back(r.sinr_db);
    return quantiles(std::move(v));
}

RunSummary summarize(const sim::SimConfig& cfg, std::span<const sim::TransmissionRecord> records)
{
    RunSummary s;
    s.scheme = mac::to_string(cfg.scheme);
    s.prfs = prfs_label(cfg.prfs);
    s.scenario = scenario::to_string(cfg.scenario.kind);
    s.n_tx = cfg.arrays.n_tx;
    s.rate_mbps = cfg.rate_mbps();
    s.pdb_ms = cfg.pdb_ms;
    s.k_rx = cfg.scenario.k_rx;
    s.seed = cfg.seed;
    s.frames = static_cast<std::int64_t>(records.size());
    if (records.empty())
        return s;
    s.collision_probability = collision_probability(records);
    s.decode_failure_rate = decode_failure_rate(records);
    s.sinr = sinr_summary(records);
    for (const auto& r : records)
    {
        s.pdb_violations += r.pdb_violation ? 1 : 0;
        s.forced_selections += r.forced ? 1 : 0;
    }
    return s;
}

std::string format_fixed(double v, int precision)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    std::array<char, 512> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, precision);
    if (res.ec != std::errc())
        throw std::runtime_error("format_fixed: value too large");
    std::string out(buf.data(), res.ptr);
    if (out.find_first_not_of("-0.") == std::string::npos && out.front() == '-')
        out.erase(0, 1); // no negative zero
    return out;
}

std::string summary_header()
{
    return "scheme,prfs,scenario,n_tx,rate_mbps,pdb_ms,k_rx,seed,collision_probability,decode_failure_rate,"
           "sinr_min,sinr_p25,sinr_median,sinr_p75,sinr_max,pdb_violations,forced_selections,frames";
}

std::string summary_row(const RunSummary& s)
{
    std::string row;
    row += s.scheme + ',' + s.prfs + ',' + s.scenario + ',' + std::to_string(s.n_tx) + ',';
    row += format_fixed(s.rate_mbps) + ',' + format_fixed(s.pdb_ms) + ',' + std::to_string(s.k_rx) + ',';
    row += std::to_string(s.seed) + ',';
    row += format_fixed(s.collision_probability) + ',' + format_fixed(s.decode_failure_rate) + ',';
    row += format_fixed(s.sinr.min) + ',' + format_fixed(s.sinr.p25) + ',' + format_fixed(s.sinr.median) + ',';
    row += format_fixed(s.sinr.p75) + ',' + format_fixed(s.sinr.max) + ',';
    row += std::to_string(s.pdb_violations) + ',' + std::to_string(s.forced_selections) + ',' +
           std::to_string(s.frames);
    return row;
}

std::vector<RunSummary> parse_summary_csv(std::string_view text)
{
    std::vector<RunSummary> out;
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line != summary_header())
        throw std::invalid_argument("summary csv: unexpected header");
    while (std::getline(in, line))
    {
        if (line.empty())
            continue;
        const auto f = split(line, ',');
        if (f.size() != 18)
            throw std::invalid_argument("summary csv: expected 18 fields, got " + std::to_string(f.size()));
        RunSummary s;
        s.scheme = f[0];
        s.prfs = f[1];
        s.scenario = f[2];
        s.n_tx = parse_number<int>(f[3]);
        s.rate_mbps = parse_number<double>(f[4]);
        s.pdb_ms = parse_number<double>(f[5]);
        s.k_rx = parse_number<int>(f[6]);
        s.seed = parse_number<std::uint64_t>(f[7]);
        s.collision_probability = parse_number<double>(f[8]);
        s.decode_failure_rate = parse_number<double>(f[9]);
        s.sinr = {parse_number<double>(f[10]), parse_number<double>(f[11]), parse_number<double>(f[12]),
                  parse_number<double>(f[13]), parse_number<double>(f[14])};
        s.pdb_violations = parse_number<std::int64_t>(f[15]);
        s.forced_selections = parse_number<std::int64_t>(f[16]);
        s.frames = parse_number<std::int64_t>(f[17]);
        out.push_back(std::move(s));
    }
    return out;
}

std::string records_header()
{
    return "run,tx,rx,frame,arrival_slot,first_slot,last_slot,n_cells,overlapped,collided,overlapped_cells,collided_cells,"
           "sinr_db,decoded,forced,"
           "pdb_violation,reselected";
}

std::string record_row(std::size_t run, const sim::TransmissionRecord& r)
{
    std::string row;
    row += std::to_string(run) + ',' + std::to_string(r.link.tx) + ',' + std::to_string(r.link.rx) + ',';
    row += std::to_string(r.frame) + ',' + std::to_string(r.arrival_slot) + ',';
    row += std::to_string(r.cells.empty() ? r.slot : r.cells.front().slot) + ',';
    row += std::to_string(r.cells.empty() ? r.slot : r.cells.back().slot) + ',';
    row += std::to_string(r.cells.size()) + ',';
    row += std::string(flag(r.overlapped)) + ',' + flag(r.collided) + ',';
    row += std::to_string(r.overlapped_cells) + ',' + std::to_string(r.collided_cells) + ',';
    row += format_fixed(r.sinr_db) + ',';
    row += std::string(flag(r.decoded)) + ',' + flag(r.forced) + ',' + flag(r.pdb_violation) + ',' + flag(r.reselected);
    return row;
}

MeanSe mean_se(std::span<const double> values)
{
    if (values.empty())
        throw std::invalid_argument("mean_se: empty sample");
    double sum = 0.0;
    for (double v : values)
        sum += v;
    const double n = static_cast<double>(values.size());
    const double mean = sum / n;
    if (values.size() < 2)
        return {mean, 0.0};
    double ss = 0.0;
    for (double v : values)
        ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / (n - 1.0)) / std::sqrt(n)};
}

std::vector<Aggregate> aggregate(std::span<const RunSummary> runs)
{
    using Key = std::tuple<std::string, std::string, std::string, int, std::string, std::string, int>;
    std::map<Key, std::size_t> index;
    std::vector<Aggregate> out;
    std::vector<std::array<std::vector<double>, 3>> samples;
    for (const auto& r : runs)
    {
        const Key k{r.scheme, r.prfs, r.scenario, r.n_tx, format_fixed(r.rate_mbps), format_fixed(r.pdb_ms), r.k_rx};
        auto it = index.find(k);
        if (it == index.end())
        {
            it = index.emplace(k, out.size()).first;
            Aggregate a;
            a.key = r;
            out.push_back(a);
            samples.emplace_back();
        }
        auto& s = samples[it->second];
        s[0].push_back(r.collision_probability);
        s[1].push_back(r.decode_failure_rate);
        s[2].push_back(r.sinr.median);
    }
    for (std::size_t i = 0; i < out.size(); ++i)
    {
        auto& a = out[i];
        a.runs = samples[i][0].size();
        const auto c = mean_se(samples[i][0]);
        const auto d = mean_se(samples[i][1]);
        const auto m = mean_se(samples[i][2]);
        a.collision_mean = c.mean;
        a.collision_se = c.se;
        a.decode_failure_mean = d.mean;
        a.decode_failure_se = d.se;
        a.sinr_median_mean = m.mean;
        a.sinr_median_se = m.se;
    }
    return out;
}

void write_results(const std::filesystem::path& dir, std::span<const RunSummary> runs,
                   const std::vector<std::vector<sim::TransmissionRecord>>* records)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());

    std::string summary = summary_header() + '\n';
    for (const auto& r : runs)
        summary += summary_row(r) + '\n';
    write_file(dir / "summary.csv", summary);

    std::string agg = "scheme,prfs,scenario,n_tx,rate_mbps,pdb_ms,k_rx,runs,collision_mean,collision_se,"
                      "decode_failure_mean,decode_failure_se,sinr_median_mean,sinr_median_se\n";
    for (const auto& a : aggregate(runs))
    {
        const auto& k = a.key;
        agg += k.scheme + ',' + k.prfs + ',' + k.scenario + ',' + std::to_string(k.n_tx) + ',' +
               format_fixed(k.rate_mbps) + ',' + format_fixed(k.pdb_ms) + ',' + std::to_string(k.k_rx) + ',' +
               std::to_string(a.runs) + ',' + format_fixed(a.collision_mean) + ',' + format_fixed(a.collision_se) +
               ',' + format_fixed(a.decode_failure_mean) + ',' + format_fixed(a.decode_failure_se) + ',' +
               format_fixed(a.sinr_median_mean) + ',' + format_fixed(a.sinr_median_se) + '\n';
    }
    write_file(dir / "aggregate.csv", agg);

    const auto rec_path = dir / "records.csv";
    if (records == nullptr)
        return;
    if (records->size() != runs.size())
        throw std::invalid_argument("write_results: one record list per run required");
    std::ofstream out(rec_path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot open '" + rec_path.string() + "' for writing");
    out << records_header() << '\n';
    for (std::size_t i = 0; i < records->size(); ++i)
        for (const auto& r : (*records)[i])
            out << record_row(i, r) << '\n';
    out.flush();
    if (!out)
        throw std::runtime_error("failed writing '" + rec_path.string() + "'");
}

} // namespace mmsl::metrics
