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

#ifndef CYLMIMO_IO_H
#define CYLMIMO_IO_H

#include "cylmimo/array_lab.hpp"
#include "cylmimo/forward_model.hpp"
#include "cylmimo/rma.hpp"

#include <string>

namespace cylmimo
{
    inline constexpr int format_version = 1;

    // <stem>.hdr (text sidecar) + <stem>.bin (little-endian float32 re/im pairs)
    void write_echo(const EchoTensor &e, const std::string &stem);
    EchoTensor read_echo(const std::string &stem);

    // <stem>.hdr + <stem>.bin, plus <stem>_mip.pgm (max over y) and <stem>_profiles.csv (lines through the peak)
    void write_image(const ImageVolume &img, const std::string &stem);
    ImageVolume read_image(const std::string &stem);

    // Only the 8-bit maximum-intensity projection over the range (y) axis: rows = z (top = largest), cols = x
    void write_mip_pgm(const ImageVolume &img, const std::string &path);
    void write_peak_profiles_csv(const ImageVolume &img, const std::string &path);

    // coordinate_m,magnitude_linear,magnitude_db
    void write_pattern_csv(const BeamPatternResult &p, const std::string &path);
    BeamPatternResult read_pattern_csv(const std::string &path);

    // Single-row CSV with header
    void write_metrics_csv(const QualityMetrics &m, const std::string &path);

    std::string format_double(double v); // shortest round-trip text ("%.17g")
}

#endif
