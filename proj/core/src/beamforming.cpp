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

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mmsl::beam
{

namespace
{
// Relative slack under which two codeword powers count as tied.
constexpr double kTieTolerance = 1e-12;

bool strictly_better(double candidate, double best)
{
    return candidate > best + kTieTolerance * std::max(std::abs(best), std::abs(candidate));
}
} // namespace

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double lin)
{
    if (lin <= 0.0)
        return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(lin);
}

double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watt_to_dbm(double w) { return linear_to_db(w) + 30.0; }

double wrap_angle(double rad)
{
    double a = std::fmod(rad + kPi, 2.0 * kPi);
    if (a < 0.0)
        a += 2.0 * kPi;
    return a - kPi;
}

void ArrayConfig::validate() const
{
    if (n_elements < 1)
        throw std::invalid_argument("ArrayConfig: n_elements must be at least 1");
    if (!(spacing > 0.0))
        throw std::invalid_argument("ArrayConfig: spacing must be positive");
}

std::size_t Codebook::boresight_index() const
{
    return select_sensing_codeword(*this, Direction{0.0, 0.0});
}

Codebook Codebook::dft(int n_elements, double spacing)
{
    ArrayConfig arr{n_elements, spacing, 0.0};
    arr.validate();
    Codebook cb;
    cb.entries.reserve(static_cast<std::size_t>(n_elements));
    cb.directions.reserve(static_cast<std::size_t>(n_elements));
    const double norm = 1.0 / std::sqrt(static_cast<double>(n_elements));
    const int half = n_elements / 2;
    for (int k = 0; k < n_elements; ++k)
    {
        const double s = static_cast<double>(2 * k - 2 * half) / n_elements;
        const double az = std::asin(std::clamp(s, -1.0, 1.0));
        auto w = steering_vector(arr, az);
        for (auto& x : w)
            x *= norm;
        cb.entries.push_back(std::move(w));
        cb.directions.push_back({az, 0.0});
    }
    return cb;
}

ChannelMatrix ChannelMatrix::scaled(double factor) const
{
    ChannelMatrix out = *this;
    for (auto& g : out.gains)
        g *= factor;
    return out;
}

void LinkBudget::validate() const
{
    if (!(tx_power > 0.0) || !(noise_temperature > 0.0) || !(bandwidth > 0.0))
        throw std::invalid_argument("LinkBudget: power, temperature and bandwidth must be positive");
}

ComplexVector steering_vector(const ArrayConfig& cfg, double azimuth)
{
    cfg.validate();
    ComplexVector a(static_cast<std::size_t>(cfg.n_elements));
    const double psi = 2.0 * kPi * cfg.spacing * std::sin(azimuth);
    for (int m = 0; m < cfg.n_elements; ++m)
        a[static_cast<std::size_t>(m)] = std::polar(1.0, psi * m);
    return a;
}

double beam_gain(const ArrayConfig& cfg, double azimuth, std::span<const Complex> weights)
{
    // a^H w = sum_m conj(a_m) w_m, with conj(a_m) = z^m; Horner from the top.
    const double psi = 2.0 * kPi * cfg.spacing * std::sin(azimuth);
    const Complex z = std::polar(1.0, -psi);
    Complex acc{0.0, 0.0};
    for (std::size_t m = weights.size(); m-- > 0;)
        acc = acc * z + weights[m];
    return std::norm(acc);
}

double element_gain(double angle_off_boresight)
{
    const double deg = std::abs(wrap_angle(angle_off_boresight)) * 180.0 / kPi;
    const double ratio = deg / kElementBeamwidthDeg;
    return kElementPeakGainDbi - std::min(12.0 * ratio * ratio, kElementMaxAttenuationDb);
}

double ula_codeword_gain(int n_elements, double spacing, double sin_look, double sin_steer)
{
    if (n_elements < 1)
        throw std::invalid_argument("ula_codeword_gain: n_elements must be at least 1");
    const double half_psi = kPi * spacing * (sin_look - sin_steer);
    const double den = std::sin(half_psi);
    const double n = static_cast<double>(n_elements);
    if (std::abs(den) < 1e-9)
        return n;
    const double num = std::sin(n * half_psi);
    return num * num / (n * den * den);
}

double propagation_gain(double distance, double carrier_hz, double oxygen_db_per_km)
{
    if (!(distance > 0.0) || !(carrier_hz > 0.0))
        throw std::invalid_argument("propagation_gain: distance and carrier must be positive");
    const double lambda = kSpeedOfLight / carrier_hz;
    const double fs = lambda / (4.0 * kPi * distance);
    return fs * fs * db_to_linear(-oxygen_db_per_km * distance / 1000.0);
}

LosPath los_path(Position tx, Position rx, const ArrayConfig& tx_array, const ArrayConfig& rx_array,
                 double carrier_hz, double oxygen_db_per_km)
{
    const double dx = rx.x - tx.x;
    const double dy = rx.y - tx.y;
    const double d = std::hypot(dx, dy);
    if (!(d > 1e-9))
        throw std::invalid_argument("los_channel: transmitter and receiver positions coincide");
    if (!(carrier_hz > 0.0))
        throw std::invalid_argument("los_channel: carrier frequency must be positive");

    const double bearing = std::atan2(dy, dx);
    LosPath p;
    p.distance = d;
    p.departure = wrap_angle(bearing - tx_array.boresight);
    p.arrival = wrap_angle(bearing + kPi - rx_array.boresight);

    const double lambda = kSpeedOfLight / carrier_hz;
    const double gain_db = element_gain(p.departure) + element_gain(p.arrival) - oxygen_db_per_km * d / 1000.0;
    const double amplitude = std::sqrt(db_to_linear(gain_db)) * lambda / (4.0 * kPi * d);
    p.gain = std::polar(amplitude, -2.0 * kPi * d / lambda);
    return p;
}

ChannelMatrix los_channel(Position tx, Position rx, const ArrayConfig& tx_array, const ArrayConfig& rx_array,
                          double carrier_hz, double oxygen_db_per_km)
{
    tx_array.validate();
    rx_array.validate();
    const auto p = los_path(tx, rx, tx_array, rx_array, carrier_hz, oxygen_db_per_km);
    const auto a_tx = steering_vector(tx_array, p.departure);
    const auto a_rx = steering_vector(rx_array, p.arrival);

    ChannelMatrix h;
    h.n_rx = rx_array.n_elements;
    h.n_tx = tx_array.n_elements;
    h.carrier_frequency = carrier_hz;
    h.distance = p.distance;
    h.gains.resize(static_cast<std::size_t>(h.n_rx) * h.n_tx);
    for (int r = 0; r < h.n_rx; ++r)
        for (int c = 0; c < h.n_tx; ++c)
            h(r, c) = p.gain * a_rx[static_cast<std::size_t>(r)] * std::conj(a_tx[static_cast<std::size_t>(c)]);
    return h;
}

double path_coupling(const LosPath& path, const ArrayConfig& tx_array, std::span<const Complex> w,
                     const ArrayConfig& rx_array, std::span<const Complex> u)
{
    return std::norm(path.gain) * beam_gain(tx_array, path.departure, w) * beam_gain(rx_array, path.arrival, u);
}

double coupling(const ChannelMatrix& h, std::span<const Complex> w, std::span<const Complex> u)
{
    if (w.size() != static_cast<std::size_t>(h.n_tx) || u.size() != static_cast<std::size_t>(h.n_rx))
        throw std::invalid_argument("coupling: weight dimensions do not match the channel");
    Complex acc{0.0, 0.0};
    for (int r = 0; r < h.n_rx; ++r)
    {
        Complex row{0.0, 0.0};
        for (int c = 0; c < h.n_tx; ++c)
            row += h(r, c) * w[static_cast<std::size_t>(c)];
        acc += std::conj(u[static_cast<std::size_t>(r)]) * row;
    }
    return std::norm(acc);
}

std::size_t select_tx_codeword(const ChannelMatrix& h, const Codebook& cb, std::span<const Complex> rx_combiner)
{
    if (cb.size() == 0)
        throw std::invalid_argument("select_tx_codeword: empty codebook");
    if (rx_combiner.size() != static_cast<std::size_t>(h.n_rx))
        throw std::invalid_argument("select_tx_codeword: combiner length does not match n_rx");

    // v = u^H H, then each candidate costs one inner product.
    ComplexVector v(static_cast<std::size_t>(h.n_tx), Complex{0.0, 0.0});
    for (int r = 0; r < h.n_rx; ++r)
    {
        const Complex cu = std::conj(rx_combiner[static_cast<std::size_t>(r)]);
        for (int c = 0; c < h.n_tx; ++c)
            v[static_cast<std::size_t>(c)] += cu * h(r, c);
    }

    std::size_t best = 0;
    double best_power = -1.0;
    for (std::size_t k = 0; k < cb.size(); ++k)
    {
        const auto& w = cb.entries[k];
        if (w.size() != v.size())
            throw std::invalid_argument("select_tx_codeword: codeword length does not match n_tx");
        Complex acc{0.0, 0.0};
        for (std::size_t c = 0; c < w.size(); ++c)
            acc += v[c] * w[c];
        const double p = std::norm(acc);
        if (k == 0 || strictly_better(p, best_power))
        {
            best = k;
            best_power = p;
        }
    }
    return best;
}

std::size_t select_sensing_codeword(const Codebook& cb_rx, Direction tx_direction)
{
    if (cb_rx.directions.empty())
        throw std::invalid_argument("select_sensing_codeword: empty codebook");
    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < cb_rx.directions.size(); ++k)
    {
        const double da = cb_rx.directions[k].azimuth - tx_direction.azimuth;
        const double de = cb_rx.directions[k].elevation - tx_direction.elevation;
        const double dist = std::hypot(da, de);
        if (dist < best_dist - kTieTolerance)
        {
            best = k;
            best_dist = dist;
        }
    }
    return best;
}

double noise_power(const LinkBudget& lb)
{
    return kBoltzmann * lb.noise_temperature * lb.bandwidth;
}

double sinr_from_powers(double signal_w, double interference_w, double noise_w)
{
    return linear_to_db(signal_w / (noise_w + interference_w));
}

double sinr(const SignalTerm& signal, std::span<const InterferenceTerm> interferers, const LinkBudget& lb)
{
    const double s = lb.tx_power * coupling(signal.h, signal.w, signal.u);
    double i = 0.0;
    for (const auto& term : interferers)
        i += lb.tx_power * coupling(term.h, term.w, signal.u);
    return sinr_from_powers(s, i, noise_power(lb));
}

} // namespace mmsl::beam
