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

#include "cylmimo/backprojection.hpp"

#include <cmath>

namespace cylmimo
{
    std::vector<Vec3> LineSpec::points() const
    {
        std::vector<Vec3> p(n);
        for (std::size_t i = 0; i < n; ++i)
            for (int d = 0; d < 3; ++d)
                p[i][d] = start[d] + double(i) * step[d];
        return p;
    }

    LineSpec grid_line(const GridSpec &grid, int dim, const std::array<std::size_t, 3> &idx)
    {
        LineSpec l;
        for (int d = 0; d < 3; ++d)
        {
            const auto a = grid.axis(d);
            l.start[d] = d == dim ? a.front() : a[idx[d]];
            l.step[d] = d == dim ? grid.voxel[d] : 0.0;
        }
        l.n = grid.n[dim];
        return l;
    }

    static void check_layout(const EchoTensor &e, const ArrayLayout &layout)
    {
        if (e.layout().radius() != layout.radius() || e.layout().angles(Side::tx) != layout.angles(Side::tx) ||
            e.layout().angles(Side::rx) != layout.angles(Side::rx) || e.layout().heights(Side::tx) != layout.heights(Side::tx) ||
            e.layout().heights(Side::rx) != layout.heights(Side::rx))
            throw validation_error("backprojection: echo layout does not match the supplied layout");
    }

    std::vector<cdouble> bp_points(const EchoTensor &e, const std::vector<Vec3> &points)
    {
        const auto d = e.shape();
        const ArrayLayout &L = e.layout();
        const std::size_t nT = d[1] * d[3], nR = d[2] * d[4];
        std::vector<Vec3> tx(nT), rx(nR);
        for (std::size_t a = 0; a < d[1]; ++a)
            for (std::size_t h = 0; h < d[3]; ++h)
                tx[a * d[3] + h] = antenna_position(L, Side::tx, a, h);
        for (std::size_t a = 0; a < d[2]; ++a)
            for (std::size_t h = 0; h < d[4]; ++h)
                rx[a * d[4] + h] = antenna_position(L, Side::rx, a, h);
        const std::vector<double> kv = e.freqs().wavenumbers();
        const std::size_t Nk = kv.size();
        const double k0 = kv.front(), dk = Nk > 1 ? kv[1] - kv[0] : 0.0;
        const auto &s = e.data();

        std::vector<cdouble> out(points.size());
        parallel_chunks(points.size(), worker_count(), [&](std::size_t, std::size_t b, std::size_t en)
                        {
            std::vector<cdouble> ET(nT), ER(nR), stepT(nT), stepR(nR), acc_z(d[3]);
            for (std::size_t p = b; p < en; ++p)
            {
                const Vec3 &r = points[p];
                auto dist = [&](const Vec3 &a)
                {
                    const double dx = a[0] - r[0], dy = a[1] - r[1], dz = a[2] - r[2];
                    return std::sqrt(dx * dx + dy * dy + dz * dz);
                };
                // exp(+j k_i R) by recurrence over the uniform frequency grid
                for (std::size_t q = 0; q < nT; ++q)
                {
                    const double R = dist(tx[q]);
                    ET[q] = std::polar(1.0, k0 * R);
                    stepT[q] = std::polar(1.0, dk * R);
                }
                for (std::size_t q = 0; q < nR; ++q)
                {
                    const double R = dist(rx[q]);
                    ER[q] = std::polar(1.0, k0 * R);
                    stepR[q] = std::polar(1.0, dk * R);
                }
                cdouble total(0.0);
                for (std::size_t ik = 0; ik < Nk; ++ik)
                {
                    if (ik > 0)
                    {
                        for (std::size_t q = 0; q < nT; ++q)
                            ET[q] *= stepT[q];
                        for (std::size_t q = 0; q < nR; ++q)
                            ER[q] *= stepR[q];
                    }
                    for (std::size_t tT = 0; tT < d[1]; ++tT)
                    {
                        std::fill(acc_z.begin(), acc_z.end(), cdouble(0.0));
                        for (std::size_t tR = 0; tR < d[2]; ++tR)
                        {
                            const cdouble *er = &ER[tR * d[4]];
                            for (std::size_t zT = 0; zT < d[3]; ++zT)
                            {
                                const cdouble *sp = &s[e.index(ik, tT, tR, zT, 0)];
                                cdouble a(0.0);
                                for (std::size_t zR = 0; zR < d[4]; ++zR)
                                    a += sp[zR] * er[zR];
                                acc_z[zT] += a;
                            }
                        }
                        for (std::size_t zT = 0; zT < d[3]; ++zT)
                            total += ET[tT * d[3] + zT] * acc_z[zT];
                    }
                }
                out[p] = total;
            } });
        return out;
    }

    ImageVolume reconstruct_bp(const EchoTensor &e, const ArrayLayout &layout, const GridSpec &grid)
    {
        check_layout(e, layout);
        grid.validate();
        const auto x = grid.axis(0), y = grid.axis(1), z = grid.axis(2);
        std::vector<Vec3> pts;
        pts.reserve(x.size() * y.size() * z.size());
        for (double a : x)
            for (double b : y)
                for (double c : z)
                    pts.push_back({a, b, c});
        return ImageVolume(grid, "bp", "-", bp_points(e, pts));
    }

    std::vector<cdouble> bp_profile_1d(const EchoTensor &e, const ArrayLayout &layout, const LineSpec &line)
    {
        check_layout(e, layout);
        return bp_points(e, line.points());
    }
}
