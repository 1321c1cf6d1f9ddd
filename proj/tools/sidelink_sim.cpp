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

// Command-line front end: single runs and parameter sweeps.

#include "mmsl/config.hpp"
#include "mmsl/metrics.hpp"
#include "mmsl/sim_engine.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <iostream>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace
{

struct Options
{
    std::optional<std::string> scheme, prfs, scenario, ntx, nrx, rate_mbps, pdb_ms, krx, duration_s, seed,
        replications;
    std::optional<std::string> config;
    std::string out = ".";
    bool emit_records = false;
    unsigned jobs = 1;
    bool quiet = false;
};

mmsl::config::ParameterSet overrides(const Options& o)
{
    mmsl::config::ParameterSet ps;
    auto put = [&](const char* key, const std::optional<std::string>& v) {
        if (v)
            ps.set(key, mmsl::config::split_values(key, *v));
    };
    put("scheme", o.scheme);
    put("prfs", o.prfs);
    put("scenario", o.scenario);
    put("ntx", o.ntx);
    put("nrx", o.nrx);
    put("rate_mbps", o.rate_mbps);
    put("pdb_ms", o.pdb_ms);
    put("krx", o.krx);
    put("duration_s", o.duration_s);
    put("seed", o.seed);
    put("replications", o.replications);
    return ps;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Slot-level 60 GHz NR V2X sidelink Mode 2 simulator"};
    Options o;
    app.add_option("--scheme", o.scheme, "dbra | dbra-o | rra (or a [list])");
    app.add_option("--prfs", o.prfs, "frame structure preset 1..4");
    app.add_option("--scenario", o.scenario, "1w-ld | 1w-hd | 2w-ld | 2w-hd");
    app.add_option("--ntx", o.ntx, "transmit array elements per panel");
    app.add_option("--nrx", o.nrx, "receive array elements per panel");
    app.add_option("--rate-mbps", o.rate_mbps, "application rate in Mbps");
    app.add_option("--pdb-ms", o.pdb_ms, "packet delay budget in ms");
    app.add_option("--krx", o.krx, "receivers per transmitter");
    app.add_option("--duration-s", o.duration_s, "simulated time per run in seconds");
    app.add_option("--seed", o.seed, "base seed; run i uses seed + i");
    app.add_option("--replications", o.replications, "runs per configuration");
    app.add_option("--config", o.config, "key = value configuration file")->check(CLI::ExistingFile);
    app.add_option("--out", o.out, "output directory")->capture_default_str();
    app.add_flag("--emit-records", o.emit_records, "also write records.csv");
    app.add_option("--jobs", o.jobs, "parallel runs")->capture_default_str()->check(CLI::Range(1u, 1024u));
    app.add_flag("--quiet", o.quiet, "no per-run progress on stderr");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        return app.exit(e);
    }

    try
    {
        std::optional<std::filesystem::path> file;
        if (o.config)
            file = *o.config;
        const auto configs = mmsl::config::parse_config(overrides(o), file);

        std::vector<mmsl::metrics::RunSummary> summaries(configs.size());
        std::vector<std::vector<mmsl::sim::TransmissionRecord>> records(o.emit_records ? configs.size() : 0);
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex mu;

        auto worker = [&] {
            while (true)
            {
                const auto i = next.fetch_add(1);
                if (i >= configs.size())
                    return;
                try
                {
                    auto result = mmsl::sim::run(configs[i]);
                    summaries[i] = mmsl::metrics::summarize(configs[i], result.records);
                    if (o.emit_records)
                        records[i] = std::move(result.records);
                    if (!o.quiet)
                    {
                        std::lock_guard lock(mu);
                        const auto& s = summaries[i];
                        std::fprintf(stderr, "[%zu/%zu] %s %s prfs=%s ntx=%d D=%.1f pdb=%.0f seed=%llu collision=%.4f\n",
                                     i + 1, configs.size(), s.scheme.c_str(), s.scenario.c_str(), s.prfs.c_str(),
                                     s.n_tx, s.rate_mbps, s.pdb_ms, static_cast<unsigned long long>(s.seed),
                                     s.collision_probability);
                    }
                }
                catch (...)
                {
                    std::lock_guard lock(mu);
                    if (!failure)
                        failure = std::current_exception();
                    next = configs.size();
                }
            }
        };

        const auto n_threads = std::min<std::size_t>(o.jobs, configs.size());
        std::vector<std::thread> pool;
        for (std::size_t t = 1; t < n_threads; ++t)
            pool.emplace_back(worker);
        worker();
        for (auto& t : pool)
            t.join();
        if (failure)
            std::rethrow_exception(failure);

        mmsl::metrics::write_results(o.out, summaries, o.emit_records ? &records : nullptr);
        std::cout << mmsl::metrics::summary_header() << '\n';
        for (const auto& s : summaries)
            std::cout << mmsl::metrics::summary_row(s) << '\n';
        return 0;
    }
    catch (const mmsl::config::ConfigError& e)
    {
        std::cerr << "sidelink_sim: " << e.what() << '\n';
        return 2;
    }
    catch (const std::exception& e)
    {
        std::cerr << "sidelink_sim: error: " << e.what() << '\n';
        return 1;
    }
}
