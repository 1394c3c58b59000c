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

#ifndef CYLMIMO_EXPERIMENT_H
#define CYLMIMO_EXPERIMENT_H

#include "cylmimo/array_lab.hpp"
#include "cylmimo/forward_model.hpp"
#include "cylmimo/rma.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace cylmimo
{
    struct LayoutParams
    {
        double radius = 1.5;
        std::size_t tx_arc_count = 5, rx_arc_count = 41;
        double tx_arc_spacing = 0.099, rx_arc_spacing = 0.0099; // arc length (m)
        std::size_t tx_z_count = 5, rx_z_count = 41;
        double tx_z_spacing = 0.1, rx_z_spacing = 0.01;
    };

    struct GridParams
    {
        std::size_t n = 64;
        double voxel_fraction = 0.25; // of the theoretical resolution, when voxel is not given
        Vec3 center{0.0, 0.0, 0.0};
        std::optional<Vec3> voxel;
    };

    // Linear-array beam pattern study (beampattern command)
    struct BeamParams
    {
        double length = 1.0, radius = 1.0, frequency_hz = 30e9;
        std::string method = "rma"; // rma | bp
        std::string mode = "two_way"; // one_way | two_way | monostatic
        double tx_spacing = 0.1, rx_spacing = 1.0 / 90.0;
        bool zero_fill = true;
        bool spectrum_filter = true;
        double target_extent = 0.0;
    };

    struct ExperimentConfig
    {
        std::string source;       // path of the config file ("" if parsed from text)
        LayoutParams layout;
        double freq_start_hz = 31e9, freq_stop_hz = 39e9;
        std::size_t freq_count = 15;
        std::string scene_path;   // resolved relative to the config file directory
        std::string method = "rma";
        RmaConfig rma;
        GridParams grid;
        std::string output_dir = "out";
        std::uint64_t seed = 1;
        double noise_sigma = 0.0;
        int format_version = 1;
        BeamParams beam;

        ArrayLayout array() const;
        FrequencyGrid frequencies() const;
        GridSpec image_grid() const;
        RmaConfig rma_config() const; // rma with the resolved image grid

        // Cross-checks: grid matching (integer spacing ratios), vertical no-aliasing bound and angular
        // sampling bound for the dense subarrays, scene file existence, grid sanity.
        void validate(bool require_scene = true) const;
    };

    // INI-style text: [section] headers, key = value, '#' or ';' comments. Unknown keys are rejected.
    ExperimentConfig parse_config(const std::string &text, const std::string &base_dir = ".");
    ExperimentConfig load_config(const std::string &path);
}

#endif
