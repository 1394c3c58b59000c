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

#ifndef CYLMIMO_BACKPROJECTION_H
#define CYLMIMO_BACKPROJECTION_H

#include "cylmimo/rma.hpp"

#include <vector>

namespace cylmimo
{
    // Straight line of n points: start + i * step
    struct LineSpec
    {
        Vec3 start{0.0, 0.0, 0.0};
        Vec3 step{0.0, 0.0, 0.001};
        std::size_t n = 1;

        std::vector<Vec3> points() const;
    };

    // Line through voxel idx of grid along dim (0 = x, 1 = y, 2 = z)
    LineSpec grid_line(const GridSpec &grid, int dim, const std::array<std::size_t, 3> &idx);

    // g(r) = sum_{k, tx, rx} s exp(+j k (R_T(r) + R_R(r))) at arbitrary points
    std::vector<cdouble> bp_points(const EchoTensor &e, const std::vector<Vec3> &points);

    ImageVolume reconstruct_bp(const EchoTensor &e, const ArrayLayout &layout, const GridSpec &grid);

    std::vector<cdouble> bp_profile_1d(const EchoTensor &e, const ArrayLayout &layout, const LineSpec &line);
}

#endif
