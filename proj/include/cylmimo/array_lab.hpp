// SPDX-License-Identifier: Apache-2.0
//
// cylmimo - near-field cylindrical MIMO millimeter-wave imaging library
// Copyright (C) 2026 The cylmimo authors
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

#ifndef CYLMIMO_ARRAY_LAB_H
#define CYLMIMO_ARRAY_LAB_H

#include "cylmimo/common.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cylmimo
{
    enum class ArrayRole
    {
        tx,
        rx,
        monostatic // co-located tx/rx: the two-way path doubles the wavenumber
    };

    // Linear array along z, centered on z = 0, observing a point at broadside distance R0
    struct LinearArraySpec
    {
        double length_L = 1.0;
        double spacing = 0.01;
        ArrayRole role = ArrayRole::rx;
        double R0 = 1.0;
        double frequency_hz = 30e9;

        void validate() const;
        std::size_t intervals() const;         // L / spacing (integer)
        std::vector<double> positions() const; // intervals() + 1 elements from -L/2 to L/2
        double wavelength() const { return speed_of_light / frequency_hz; }
        double wavenumber() const; // effective: doubled for monostatic
    };

    enum class BeamMethod
    {
        bp,
        rma
    };

    struct BeamOptions
    {
        bool zero_fill = false;
        std::size_t zero_fill_P = 1;
        bool spectrum_filter = false;
        double target_extent_D = 0.0; // D in the support bound of the filter
        double spectral_period = 0.0; // minimum N * dz of the spatial FFT (m); 0 = 8 L
        double samples_per_lambda = 8.0;
        double half_span = 0.0; // evaluation half-width (m); 0 = L
    };

    struct BeamPatternResult
    {
        std::vector<double> coords;   // cross-range z (m)
        std::vector<double> linear;   // peak-normalized magnitude
        std::vector<double> db;       // 20 log10(linear)
        std::vector<cdouble> complex; // unnormalized complex pattern
        std::string method;
    };

    // One-way point response of a single array
    BeamPatternResult beam_pattern(const LinearArraySpec &spec, BeamMethod method, const BeamOptions &opt = {});

    // Two-way MIMO pattern: product of the transmit and receive one-way patterns
    BeamPatternResult beam_pattern(const LinearArraySpec &tx, const BeamOptions &tx_opt,
                                   const LinearArraySpec &rx, const BeamOptions &rx_opt, BeamMethod method);

    // Builds a pattern from an arbitrary profile (coords must be uniform)
    BeamPatternResult make_pattern(std::vector<double> coords, std::vector<cdouble> values, std::string method);

    struct QualityMetrics
    {
        double resolution = 0.0;                  // -3 dB full width (m)
        std::optional<double> pslr;               // dB; empty when no sidelobe exists
        std::optional<double> grating_lobe_offset; // m; strongest secondary lobe above -15 dB
        std::optional<double> strongest_lobe_offset; // m; strongest secondary lobe regardless of level
    };

    QualityMetrics measure_metrics(const BeamPatternResult &p);

    // Mainlobe-to-grating-lobe spacing relations and sampling bounds
    double grating_lobe_spacing(double lambda0, double R0, double L, double D);
    double grating_lobe_spacing_approx(double lambda0, double R0, double D);
    double nyquist_spacing(double lambda0, double R0, double L, double D);
    double angular_sampling_bound(double lambda0, double D);

    struct Resolution
    {
        double dx, dy, dz;
    };
    Resolution resolution_formulas(double lambda_c, double Theta_h, double Theta_z, double B);

    // The nine linear-array scenarios (L = 1 m, 30 GHz, R0 = 1 m, sparse spacing 0.1 m, P = 20)
    struct ScenarioResult
    {
        std::string label;
        QualityMetrics metrics;
        BeamPatternResult pattern;
    };

    struct Table1Setup
    {
        double L = 1.0, R0 = 1.0, frequency_hz = 30e9;
        double sparse_spacing = 0.1;
        std::size_t P = 20;
    };

    std::vector<ScenarioResult> table1_scenarios(const Table1Setup &s = {});
}

#endif
