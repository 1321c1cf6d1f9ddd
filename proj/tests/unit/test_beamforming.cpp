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
#include "mmsl/beamforming.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace
{

using namespace mmsl::beam;
using mmsl::testing::for_all;
using mmsl::testing::pick_int;
using mmsl::testing::uniform;

constexpr double kFc = 60e9;

double deg(double d) { return d * kPi / 180.0; }

ComplexVector boresight(int n)
{
    return ComplexVector(static_cast<std::size_t>(n), Complex{1.0 / std::sqrt(double(n)), 0.0});
}

TEST(SteeringVector, Examples)
{
    auto a = steering_vector({1, 0.5, 0.0}, 0.7);
    ASSERT_EQ(a.size(), 1u);
    EXPECT_NEAR(std::abs(a[0] - Complex{1.0, 0.0}), 0.0, 1e-15);

    a = steering_vector({4, 0.5, 0.0}, 0.0);
    for (auto v : a)
        EXPECT_NEAR(std::abs(v - Complex{1.0, 0.0}), 0.0, 1e-15);

    a = steering_vector({2, 0.5, 0.0}, kPi / 2);
    EXPECT_NEAR(std::abs(a[0] - Complex{1.0, 0.0}), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(a[1] - Complex{-1.0, 0.0}), 0.0, 1e-12);
    EXPECT_THROW(steering_vector({0, 0.5, 0.0}, 0.0), std::invalid_argument);
}

TEST(SteeringVector, UnitModulus)
{
    for_all(21, 100, [](mmsl::Rng& rng, int) {
        const ArrayConfig cfg{pick_int(rng, 1, 64), uniform(rng, 0.1, 2.0), 0.0};
        for (auto v : steering_vector(cfg, uniform(rng, -kPi, kPi)))
            EXPECT_NEAR(std::abs(v), 1.0, 1e-12);
    });
}

TEST(ElementGain, Examples)
{
    EXPECT_DOUBLE_EQ(element_gain(0.0), 8.0);
    EXPECT_NEAR(element_gain(deg(65.0)), -4.0, 1e-12);
    EXPECT_NEAR(element_gain(deg(-65.0)), -4.0, 1e-12);
    EXPECT_NEAR(element_gain(deg(180.0)), -22.0, 1e-12);
}

TEST(Codebook, DftUnitNormAndBoresight)
{
    for (int n : {1, 2, 4, 5, 16, 64})
    {
        const auto cb = Codebook::dft(n);
        ASSERT_EQ(cb.size(), static_cast<std::size_t>(n));
        for (const auto& w : cb.entries)
        {
            double norm = 0.0;
            for (auto v : w)
                norm += std::norm(v);
            EXPECT_NEAR(norm, 1.0, 1e-12);
        }
        EXPECT_NEAR(cb.directions[cb.boresight_index()].azimuth, 0.0, 1e-15);
    }
}

TEST(Codebook, ClosedFormGainMatchesBeamGain)
{
    for_all(22, 200, [](mmsl::Rng& rng, int) {
        const int n = pick_int(rng, 1, 64);
        const auto cb = Codebook::dft(n);
        const auto k = static_cast<std::size_t>(pick_int(rng, 0, n - 1));
        const double look = uniform(rng, -kPi / 2, kPi / 2);
        const double ref = beam_gain({n, 0.5, 0.0}, look, cb.entries[k]);
        const double got = ula_codeword_gain(n, 0.5, std::sin(look), std::sin(cb.directions[k].azimuth));
        EXPECT_NEAR(got, ref, 1e-9 * n);
    });
}

TEST(LosChannel, FriisAtHundredMetres)
{
    const double d = 100.0;
    const auto h = los_channel({0, 0}, {d, 0}, {1, 0.5, 0.0}, {1, 0.5, kPi}, kFc);
    const double fspl_db = 20.0 * std::log10(4.0 * kPi * d * kFc / 299792458.0);
    const double expect_db = -fspl_db + 16.0 - 1.5;
    EXPECT_NEAR(10.0 * std::log10(std::norm(h(0, 0))), expect_db, 1e-9);
    EXPECT_DOUBLE_EQ(h.distance, d);
}

TEST(LosChannel, DistanceDoubling)
{
    for_all(23, 50, [](mmsl::Rng& rng, int) {
        const double d = uniform(rng, 1.0, 500.0);
        const auto h1 = los_channel({0, 0}, {d, 0}, {1, 0.5, 0.0}, {1, 0.5, kPi}, kFc);
        const auto h2 = los_channel({0, 0}, {2 * d, 0}, {1, 0.5, 0.0}, {1, 0.5, kPi}, kFc);
        const double drop = 10.0 * std::log10(std::norm(h1(0, 0)) / std::norm(h2(0, 0)));
        EXPECT_NEAR(drop, 20.0 * std::log10(2.0) + 15.0 * d / 1000.0, 1e-9);
    });
}

TEST(LosChannel, CoincidentRejected)
{
    EXPECT_THROW(los_channel({1, 1}, {1, 1}, {4, 0.5, 0.0}, {4, 0.5, 0.0}, kFc), std::invalid_argument);
}

TEST(LosChannel, RankOne)
{
    for_all(24, 50, [](mmsl::Rng& rng, int) {
        const ArrayConfig tx{pick_int(rng, 2, 16), 0.5, uniform(rng, -kPi, kPi)};
        const ArrayConfig rx{pick_int(rng, 2, 8), 0.5, uniform(rng, -kPi, kPi)};
        const auto h = los_channel({0, 0}, {uniform(rng, -200, 200), uniform(rng, 1, 200)}, tx, rx, kFc);
        const double scale = std::norm(h(0, 0));
        for (int r = 1; r < h.n_rx; ++r)
            for (int c = 1; c < h.n_tx; ++c)
            {
                const Complex minor = h(0, 0) * h(r, c) - h(0, c) * h(r, 0);
                EXPECT_LE(std::abs(minor), 1e-9 * scale);
            }
    });
}

TEST(LosChannel, PathCouplingMatchesMatrix)
{
    for_all(25, 50, [](mmsl::Rng& rng, int) {
        const ArrayConfig tx{pick_int(rng, 1, 16), 0.5, uniform(rng, -kPi, kPi)};
        const ArrayConfig rx{pick_int(rng, 1, 4), 0.5, uniform(rng, -kPi, kPi)};
        const Position a{0, 0}, b{uniform(rng, -100, 100), uniform(rng, 1, 100)};
        const auto h = los_channel(a, b, tx, rx, kFc);
        const auto p = los_path(a, b, tx, rx, kFc);
        const auto cbt = Codebook::dft(tx.n_elements);
        const auto cbr = Codebook::dft(rx.n_elements);
        const auto& w = cbt.entries[static_cast<std::size_t>(pick_int(rng, 0, tx.n_elements - 1))];
        const auto& u = cbr.entries[static_cast<std::size_t>(pick_int(rng, 0, rx.n_elements - 1))];
        const double ref = coupling(h, w, u);
        EXPECT_NEAR(path_coupling(p, tx, w, rx, u), ref, 1e-9 * ref + 1e-30);
    });
}

TEST(TxCodeword, SingleEntry)
{
    const auto h = los_channel({0, 0}, {50, 10}, {1, 0.5, 0.0}, {1, 0.5, kPi}, kFc);
    EXPECT_EQ(select_tx_codeword(h, Codebook::dft(1), boresight(1)), 0u);
    Codebook empty;
    EXPECT_THROW(select_tx_codeword(h, empty, boresight(1)), std::invalid_argument);
}

TEST(TxCodeword, SteeredTowardsEntry)
{
    const int n = 8;
    const auto cb = Codebook::dft(n);
    for (std::size_t k = 1; k < cb.size(); ++k)
    {
        const double az = cb.directions[k].azimuth;
        const Position rx{100.0 * std::cos(az), 100.0 * std::sin(az)};
        const auto h = los_channel({0, 0}, rx, {n, 0.5, 0.0}, {2, 0.5, az + kPi}, kFc);
        // Brute force over the codebook.
        std::size_t best = 0;
        double best_p = -1.0;
        for (std::size_t j = 0; j < cb.size(); ++j)
        {
            const double p = coupling(h, cb.entries[j], boresight(2));
            if (p > best_p * (1 + 1e-12))
            {
                best = j;
                best_p = p;
            }
        }
        EXPECT_EQ(best, k);
        EXPECT_EQ(select_tx_codeword(h, cb, boresight(2)), k);
    }
}

TEST(TxCodeword, ScaleInvariant)
{
    for_all(26, 100, [](mmsl::Rng& rng, int) {
        const int n = 1 << pick_int(rng, 0, 6);
        const auto cb = Codebook::dft(n);
        const auto h = los_channel({0, 0}, {uniform(rng, -100, 100), uniform(rng, -100, 100) + 0.5},
                                   {n, 0.5, uniform(rng, -kPi, kPi)}, {2, 0.5, 0.0}, kFc);
        const auto k = select_tx_codeword(h, cb, boresight(2));
        EXPECT_EQ(select_tx_codeword(h.scaled(uniform(rng, 1e-6, 1e6)), cb, boresight(2)), k);
    });
}

TEST(SensingCodeword, Examples)
{
    const auto cb = Codebook::dft(8);
    EXPECT_EQ(select_sensing_codeword(cb, cb.directions[3]), 3u);
    const Direction mid{0.5 * (cb.directions[1].azimuth + cb.directions[2].azimuth), 0.0};
    // Exhaustive check that 1 and 2 are the two nearest entries and equidistant.
    const double d1 = std::abs(cb.directions[1].azimuth - mid.azimuth);
    const double d2 = std::abs(cb.directions[2].azimuth - mid.azimuth);
    EXPECT_NEAR(d1, d2, 1e-12);
    for (std::size_t k = 0; k < cb.size(); ++k)
        EXPECT_GE(std::abs(cb.directions[k].azimuth - mid.azimuth), d1 - 1e-12);
    EXPECT_EQ(select_sensing_codeword(cb, mid), 1u);
}

TEST(SensingCodeword, MatchesTxCodewordWithSameCodebook)
{
    for_all(27, 100, [](mmsl::Rng& rng, int) {
        const int n = 1 << pick_int(rng, 0, 6);
        const auto cb = Codebook::dft(n);
        const double az = uniform(rng, -1.4, 1.4);
        const auto h = los_channel({0, 0}, {std::cos(az) * 80, std::sin(az) * 80}, {n, 0.5, 0.0},
                                   {2, 0.5, 0.0}, kFc);
        const auto k = select_tx_codeword(h, cb, boresight(2));
        EXPECT_EQ(select_sensing_codeword(cb, cb.directions[k]), k);
    });
}

TEST(NoisePower, Examples)
{
    LinkBudget lb;
    EXPECT_NEAR(noise_power(lb), 1.656e-12, 1e-15);
    EXPECT_NEAR(noise_power(lb), 1.380649e-23 * 300 * 4e8, 1e-25);
    lb.bandwidth = 200e6;
    EXPECT_NEAR(noise_power(lb), 0.5 * 1.380649e-23 * 300 * 4e8, 1e-25);
    lb.bandwidth = 0.0;
    EXPECT_EQ(noise_power(lb), 0.0);
}

TEST(Sinr, Examples)
{
    const LinkBudget lb;
    const auto u = boresight(2);
    const auto cb = Codebook::dft(4);
    const auto h = los_channel({0, 0}, {30, 0}, {4, 0.5, 0.0}, {2, 0.5, kPi}, kFc);
    const auto& w = cb.entries[cb.boresight_index()];
    const double s = lb.tx_power * coupling(h, w, u);
    EXPECT_NEAR(sinr({h, w, u}, {}, lb), 10.0 * std::log10(s / noise_power(lb)), 1e-9);

    // Equal-power interferer, noise negligible.
    LinkBudget quiet = lb;
    quiet.noise_temperature = 1e-12;
    const InterferenceTerm same{h, w};
    EXPECT_NEAR(sinr({h, w, u}, std::vector{same}, quiet), 0.0, 1e-6);

    // Three interferers against a scalar recomputation.
    const auto h1 = los_channel({10, 5}, {30, 0}, {4, 0.5, 1.0}, {2, 0.5, kPi}, kFc);
    const auto h2 = los_channel({-40, 3}, {30, 0}, {4, 0.5, 0.0}, {2, 0.5, kPi}, kFc);
    const auto h3 = los_channel({90, -2}, {30, 0}, {4, 0.5, kPi}, {2, 0.5, kPi}, kFc);
    const std::vector<InterferenceTerm> terms{{h1, cb.entries[0]}, {h2, cb.entries[2]}, {h3, cb.entries[3]}};
    const double i_sum = lb.tx_power * (coupling(h1, cb.entries[0], u) + coupling(h2, cb.entries[2], u) +
                           coupling(h3, cb.entries[3], u));
    EXPECT_NEAR(sinr({h, w, u}, terms, lb), 10.0 * std::log10(s / (noise_power(lb) + i_sum)), 1e-9);
}

TEST(Sinr, NonIncreasingAsInterferersAdded)
{
    for_all(28, 60, [](mmsl::Rng& rng, int) {
        const LinkBudget lb;
        const auto cb = Codebook::dft(8);
        const auto u = boresight(2);
        const auto h = los_channel({0, 0}, {uniform(rng, 5, 100), 0.0}, {8, 0.5, 0.0}, {2, 0.5, kPi}, kFc);
        const auto& w = cb.entries[cb.boresight_index()];
        std::vector<ChannelMatrix> hs;
        hs.reserve(6);
        std::vector<InterferenceTerm> terms;
        double prev = sinr({h, w, u}, terms, lb);
        for (int k = 0; k < 6; ++k)
        {
            hs.push_back(los_channel({uniform(rng, -200, 200), uniform(rng, -10, 10) + 20.0}, {0, 0},
                                     {8, 0.5, uniform(rng, -kPi, kPi)}, {2, 0.5, kPi}, kFc));
            terms.clear();
            for (std::size_t j = 0; j < hs.size(); ++j)
                terms.push_back({hs[j], cb.entries[j % cb.size()]});
            const double now = sinr({h, w, u}, terms, lb);
            EXPECT_LE(now, prev + 1e-12);
            prev = now;
        }
    });
}

TEST(ReceivedPower, ArrayGainBound)
{
    for_all(29, 200, [](mmsl::Rng& rng, int) {
        const int nt = pick_int(rng, 1, 64), nr = pick_int(rng, 1, 8);
        const ArrayConfig tx{nt, 0.5, uniform(rng, -kPi, kPi)}, rx{nr, 0.5, uniform(rng, -kPi, kPi)};
        const Position b{uniform(rng, -300, 300), uniform(rng, -300, 300)};
        if (std::hypot(b.x, b.y) < 1.0)
            return;
        const auto p = los_path({0, 0}, b, tx, rx, kFc);
        const auto cbt = Codebook::dft(nt);
        const auto cbr = Codebook::dft(nr);
        const double bound = propagation_gain(p.distance, kFc) * db_to_linear(16.0) * nt * nr;
        for (std::size_t k = 0; k < cbt.size(); k += 3)
            EXPECT_LE(path_coupling(p, tx, cbt.entries[k], rx, cbr.entries[0]), bound * (1 + 1e-9));
    });
}

TEST(ReceivedPower, SnrGrowsWithArraySize)
{
    const LinkBudget lb;
    double prev = -1e9;
    for (int n : {4, 16, 64})
    {
        const auto cb = Codebook::dft(n);
        const auto h = los_channel({0, 0}, {40, 0}, {n, 0.5, 0.0}, {2, 0.5, kPi}, kFc);
        const auto k = select_tx_codeword(h, cb, boresight(2));
        const double snr = sinr({h, cb.entries[k], boresight(2)}, {}, lb);
        EXPECT_GT(snr, prev);
        prev = snr;
    }
}

TEST(Units, Conversions)
{
    EXPECT_NEAR(dbm_to_watt(23.0), 0.19952623149688797, 1e-15);
    EXPECT_NEAR(watt_to_dbm(1.0), 30.0, 1e-12);
    EXPECT_NEAR(linear_to_db(db_to_linear(-7.3)), -7.3, 1e-12);
    EXPECT_NEAR(wrap_angle(3 * kPi), -kPi, 1e-12);
}

} // namespace
