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

#ifndef CYLMIMO_FORWARD_MODEL_H
#define CYLMIMO_FORWARD_MODEL_H

#include "cylmimo/geometry.hpp"

#include <cstdint>
#include <vector>

namespace cylmimo
{
    // Multistatic echo s(k, theta_T, theta_R, z_T, z_R), row-major in that order
    class EchoTensor
    {
    public:
        EchoTensor(FrequencyGrid freqs, ArrayLayout layout);                              // zero data
        EchoTensor(FrequencyGrid freqs, ArrayLayout layout, std::vector<cdouble> samples); // validated

        const FrequencyGrid &freqs() const { return grid; }
        const ArrayLayout &layout() const { return arr; }

        // {N_k, N_thetaT, N_thetaR, N_zT, N_zR}
        std::array<std::size_t, 5> shape() const { return dims; }
        std::size_t size() const { return buf.size(); }

        std::size_t index(std::size_t k, std::size_t tT, std::size_t tR, std::size_t zT, std::size_t zR) const
        {
            return (((k * dims[1] + tT) * dims[2] + tR) * dims[3] + zT) * dims[4] + zR;
        }
        cdouble &operator()(std::size_t k, std::size_t tT, std::size_t tR, std::size_t zT, std::size_t zR)
        {
            return buf[index(k, tT, tR, zT, zR)];
        }
        cdouble operator()(std::size_t k, std::size_t tT, std::size_t tR, std::size_t zT, std::size_t zR) const
        {
            return buf[index(k, tT, tR, zT, zR)];
        }

        const std::vector<cdouble> &data() const { return buf; }
        std::vector<cdouble> &data() { return buf; }

        // True when frequency grid and layout are identical (bitwise)
        bool same_axes(const EchoTensor &other) const;

    private:
        FrequencyGrid grid;
        ArrayLayout arr;
        std::array<std::size_t, 5> dims;
        std::vector<cdouble> buf;
    };

    EchoTensor simulate_echo(const Scene &scene, const ArrayLayout &layout, const FrequencyGrid &freqs);

    EchoTensor superpose(const EchoTensor &e1, const EchoTensor &e2);

    EchoTensor scale(const EchoTensor &e, cdouble alpha);

    // Additive circular complex Gaussian noise, per-component standard deviation sigma/sqrt(2)
    EchoTensor add_noise(const EchoTensor &e, double sigma, std::uint64_t seed);
}

#endif
