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

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

// Analytic 60 GHz line-of-sight channel between uniform linear arrays,
// DFT codebooks, codeword selection and SINR.
//
// Conventions: azimuths are radians; an array's local angle is measured from
// its boresight; elevation is always zero (planar geometry). Powers are linear
// (watts) internally; dB appears only at the interfaces that say so.

namespace mmsl::beam
{

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

inline constexpr double kBoltzmann = 1.380649e-23;   // J/K
inline constexpr double kSpeedOfLight = 299792458.0; // m/s
inline constexpr double kPi = 3.14159265358979323846;

inline constexpr double kElementPeakGainDbi = 8.0;
inline constexpr double kElementBeamwidthDeg = 65.0;
inline constexpr double kElementMaxAttenuationDb = 30.0;
inline constexpr double kOxygenDbPerKm60GHz = 15.0;

double db_to_linear(double db);
double linear_to_db(double lin);
double dbm_to_watt(double dbm);
double watt_to_dbm(double w);

/// Wraps an angle to [-pi, pi).
double wrap_angle(double rad);

struct ArrayConfig
{
    int n_elements = 1;
    double spacing = 0.5;   // wavelengths
    double boresight = 0.0; // world-frame azimuth, radians

    void validate() const;
};

struct Direction
{
    double azimuth = 0.0;
    double elevation = 0.0;
};

/// Unit-norm transmit/receive weight vectors with their steering directions
/// (array-local frame).
struct Codebook
{
    std::vector<ComplexVector> entries;
    std::vector<Direction> directions;

    std::size_t size() const { return entries.size(); }
    std::size_t boresight_index() const;

    /// DFT codebook with one beam per element. Beam k steers to
    /// sin(theta_k) = (2k - 2*floor(n/2)) / n, a uniform grid in sine space
    /// over [-90, +90) degrees that always contains boresight.
    static Codebook dft(int n_elements, double spacing = 0.5);
};

struct Position
{
    double x = 0.0;
    double y = 0.0;
};

/// Complex receive-by-transmit channel, row-major (n_rx rows, n_tx columns).
struct ChannelMatrix
{
    int n_rx = 0;
    int n_tx = 0;
    std::vector<Complex> gains;
    double carrier_frequency = 0.0; // Hz
    double distance = 0.0;          // m

    Complex operator()(int r, int c) const { return gains[static_cast<std::size_t>(r) * n_tx + c]; }
    Complex& operator()(int r, int c) { return gains[static_cast<std::size_t>(r) * n_tx + c]; }
    ChannelMatrix scaled(double factor) const;
};

/// Table I link budget: 23 dBm, 300 K, 400 MHz, 0 dB threshold.
struct LinkBudget
{
    double tx_power = dbm_to_watt(23.0); // W
    double noise_temperature = 300.0;    // K
    double bandwidth = 400e6;            // Hz
    double sinr_threshold_db = 0.0;

    void validate() const;
};

/// ULA response: element m is exp(j*2*pi*spacing*m*sin(azimuth)); azimuth is array-local.
ComplexVector steering_vector(const ArrayConfig& cfg, double azimuth);

/// Array-local beam gain |a(azimuth)^H w|^2 without forming a(azimuth).
double beam_gain(const ArrayConfig& cfg, double azimuth, std::span<const Complex> weights);

/// 38.901 single-element horizontal pattern in dBi.
double element_gain(double angle_off_boresight);

/// Gain of a unit-norm uniform-linear steering codeword aimed at sine
/// sin_steer, seen from a direction with sine sin_look. Same value as
/// beam_gain with that codeword, in closed form.
double ula_codeword_gain(int n_elements, double spacing, double sin_look, double sin_steer);

/// Power gain of the propagation path alone: (lambda / 4 pi d)^2 with oxygen
/// absorption, no antenna gains.
double propagation_gain(double distance, double carrier_hz, double oxygen_db_per_km = kOxygenDbPerKm60GHz);

/// Single-path geometry between two arrays. `gain` folds free-space loss,
/// oxygen absorption, carrier phase and both element gains; departure and
/// arrival are local to the respective arrays.
struct LosPath
{
    Complex gain;
    double departure = 0.0;
    double arrival = 0.0;
    double distance = 0.0;
};

LosPath los_path(Position tx, Position rx, const ArrayConfig& tx_array, const ArrayConfig& rx_array,
                 double carrier_hz, double oxygen_db_per_km = kOxygenDbPerKm60GHz);

/// H = g * a_rx(arrival) * a_tx(departure)^H. Throws on coincident positions.
ChannelMatrix los_channel(Position tx, Position rx, const ArrayConfig& tx_array, const ArrayConfig& rx_array,
                          double carrier_hz, double oxygen_db_per_km = kOxygenDbPerKm60GHz);

/// |u^H H w|^2 evaluated on the factored path; equals the matrix route exactly in theory.
double path_coupling(const LosPath& path, const ArrayConfig& tx_array, std::span<const Complex> w,
                     const ArrayConfig& rx_array, std::span<const Complex> u);

/// |u^H H w|^2
double coupling(const ChannelMatrix& h, std::span<const Complex> w, std::span<const Complex> u);

/// argmax_w |u^H H w|^2 over the codebook; ties go to the lowest index.
std::size_t select_tx_codeword(const ChannelMatrix& h, const Codebook& cb, std::span<const Complex> rx_combiner);

/// argmin_u ||dir(u) - direction||; ties go to the lowest index.
std::size_t select_sensing_codeword(const Codebook& cb_rx, Direction tx_direction);

/// k*T*B in watts.
double noise_power(const LinkBudget& lb);

struct SignalTerm
{
    const ChannelMatrix& h;
    std::span<const Complex> w;
    std::span<const Complex> u;
};

struct InterferenceTerm
{
    const ChannelMatrix& h; // interferer's transmit array to the intended receiver
    std::span<const Complex> w;
};

/// Signal-to-interference-plus-noise ratio in dB; interferers are received
/// through the intended receiver's combiner.
double sinr(const SignalTerm& signal, std::span<const InterferenceTerm> interferers, const LinkBudget& lb);

/// Same ratio from already-computed powers (watts).
double sinr_from_powers(double signal_w, double interference_w, double noise_w);

} // namespace mmsl::beam
