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

#include "cylmimo/forward_model.hpp"

#include <cmath>
#include <random>

namespace cylmimo
{
    static std::array<std::size_t, 5> echo_dims(const FrequencyGrid &f, const ArrayLayout &a)
    {
        return {f.count(), a.angles(Side::tx).size(), a.angles(Side::rx).size(),
                a.heights(Side::tx).size(), a.heights(Side::rx).size()};
    }

    static std::size_t product(const std::array<std::size_t, 5> &d)
    {
        return d[0] * d[1] * d[2] * d[3] * d[4];
    }

    EchoTensor::EchoTensor(FrequencyGrid freqs, ArrayLayout layout)
        : grid(std::move(freqs)), arr(std::move(layout)), dims(echo_dims(grid, arr)),
          buf(product(dims), cdouble(0.0))
    {
    }

    EchoTensor::EchoTensor(FrequencyGrid freqs, ArrayLayout layout, std::vector<cdouble> samples)
        : grid(std::move(freqs)), arr(std::move(layout)), dims(echo_dims(grid, arr)), buf(std::move(samples))
    {
        if (buf.size() != product(dims))
            throw validation_error("EchoTensor: sample count does not match layout and frequency grid");
        for (const auto &s : buf)
            if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
                throw validation_error("EchoTensor: non-finite sample");
    }

    bool EchoTensor::same_axes(const EchoTensor &o) const
    {
        return grid.start() == o.grid.start() && grid.stop() == o.grid.stop() && grid.count() == o.grid.count() &&
               arr.radius() == o.arr.radius() &&
               arr.angles(Side::tx) == o.arr.angles(Side::tx) && arr.angles(Side::rx) == o.arr.angles(Side::rx) &&
               arr.heights(Side::tx) == o.arr.heights(Side::tx) && arr.heights(Side::rx) == o.arr.heights(Side::rx);
    }

    static double distance(const Vec3 &a, const Vec3 &b)
    {
        double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
        return std::sqrt(dx * dx + dy * dy + dz * dz);
    }

    EchoTensor simulate_echo(const Scene &scene, const ArrayLayout &layout, const FrequencyGrid &freqs)
    {
        scene.check_inside(layout.radius());
        EchoTensor e(freqs, layout);
        const auto d = e.shape();
        const std::size_t nT = d[1] * d[3], nR = d[2] * d[4], S = scene.size();
        if (S == 0)
            return e;

        // One-way distances per scatterer: RT[s][tT*NzT + zT], RR[s][tR*NzR + zR]
        std::vector<double> RT(S * nT), RR(S * nR);
        for (std::size_t s = 0; s < S; ++s)
        {
            const Vec3 &p = scene.scatterers()[s].position;
            for (std::size_t a = 0; a < d[1]; ++a)
                for (std::size_t h = 0; h < d[3]; ++h)
                {
                    Vec3 t = antenna_position(layout, Side::tx, a, h);
                    RT[s * nT + a * d[3] + h] = distance(t, p);
                }
            for (std::size_t a = 0; a < d[2]; ++a)
                for (std::size_t h = 0; h < d[4]; ++h)
                {
                    Vec3 r = antenna_position(layout, Side::rx, a, h);
                    RR[s * nR + a * d[4] + h] = distance(r, p);
                }
        }
        auto &out = e.data();
        parallel_for(d[0], [&](std::size_t ik)
                     {
            const double k = freqs.wavenumber(ik);
            for (std::size_t tT = 0; tT < d[1]; ++tT)
                for (std::size_t tR = 0; tR < d[2]; ++tR)
                    for (std::size_t zT = 0; zT < d[3]; ++zT)
                        for (std::size_t zR = 0; zR < d[4]; ++zR)
                        {
                            cdouble acc(0.0);
                            for (std::size_t s = 0; s < S; ++s)
                            {
                                double R = RT[s * nT + tT * d[3] + zT] + RR[s * nR + tR * d[4] + zR];
                                acc += scene.scatterers()[s].reflectivity * std::polar(1.0, -k * R);
                            }
                            out[e.index(ik, tT, tR, zT, zR)] = acc;
                        } });
        return e;
    }

    EchoTensor superpose(const EchoTensor &e1, const EchoTensor &e2)
    {
        if (!e1.same_axes(e2))
            throw validation_error("superpose: echo tensors have different axes");
        std::vector<cdouble> out(e1.size());
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = e1.data()[i] + e2.data()[i];
        return EchoTensor(e1.freqs(), e1.layout(), std::move(out));
    }

    EchoTensor scale(const EchoTensor &e, cdouble alpha)
    {
        std::vector<cdouble> out(e.data());
        for (auto &s : out)
            s *= alpha;
        return EchoTensor(e.freqs(), e.layout(), std::move(out));
    }

    EchoTensor add_noise(const EchoTensor &e, double sigma, std::uint64_t seed)
    {
        if (!(sigma >= 0.0))
            throw validation_error("add_noise: sigma must be non-negative");
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> nd(0.0, sigma / std::sqrt(2.0));
        std::vector<cdouble> out(e.data());
        for (auto &s : out)
        {
            double re = nd(rng);
            double im = nd(rng);
            s += cdouble(re, im);
        }
        return EchoTensor(e.freqs(), e.layout(), std::move(out));
    }
}
