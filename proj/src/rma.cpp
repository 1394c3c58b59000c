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

#include "cylmimo/rma.hpp"
#include "cylmimo/array_lab.hpp"
#include "cylmimo/fft.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <sstream>

namespace cylmimo
{
    // ---------------------------------------------------------------------------------------------
    // Grid and image containers

    std::vector<double> GridSpec::axis(int dim) const
    {
        std::vector<double> a(n[dim]);
        const double c = 0.5 * double(n[dim] - 1);
        for (std::size_t i = 0; i < n[dim]; ++i)
            a[i] = center[dim] + (double(i) - c) * voxel[dim];
        return a;
    }

    void GridSpec::validate() const
    {
        for (int d = 0; d < 3; ++d)
        {
            if (n[d] == 0)
                throw validation_error("GridSpec: zero samples along an axis");
            if (!(voxel[d] > 0.0) || !std::isfinite(voxel[d]) || !std::isfinite(center[d]))
                throw validation_error("GridSpec: voxel sizes must be positive and finite");
        }
    }

    GridSpec default_grid(const ArrayLayout &layout, const FrequencyGrid &freqs, std::size_t n, double fraction, Vec3 center)
    {
        const double Theta_z = 2.0 * std::atan(0.5 * layout.height_extent() / layout.radius());
        const Resolution r = resolution_formulas(freqs.lambda_center(), layout.angular_extent(), Theta_z, freqs.bandwidth());
        GridSpec g;
        g.center = center;
        g.n = {n, n, n};
        g.voxel = {fraction * r.dx, fraction * r.dy, fraction * r.dz};
        return g;
    }

    ImageVolume::ImageVolume(GridSpec grid, std::string method, std::string config_hash)
        : spec(grid), tag(std::move(method)), hash(std::move(config_hash))
    {
        spec.validate();
        for (int d = 0; d < 3; ++d)
            ax[d] = spec.axis(d);
        buf.assign(spec.n[0] * spec.n[1] * spec.n[2], cdouble(0.0));
    }

    ImageVolume::ImageVolume(GridSpec grid, std::string method, std::string config_hash, std::vector<cdouble> data)
        : ImageVolume(grid, std::move(method), std::move(config_hash))
    {
        if (data.size() != buf.size())
            throw validation_error("ImageVolume: data size does not match grid");
        for (const auto &v : data)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw numeric_error("ImageVolume: non-finite sample");
        buf = std::move(data);
    }

    std::array<std::size_t, 3> ImageVolume::peak_index() const
    {
        std::size_t best = 0;
        double bv = -1.0;
        for (std::size_t i = 0; i < buf.size(); ++i)
        {
            double v = std::norm(buf[i]);
            if (v > bv)
            {
                bv = v;
                best = i;
            }
        }
        return {best / (spec.n[1] * spec.n[2]), (best / spec.n[2]) % spec.n[1], best % spec.n[2]};
    }

    Vec3 ImageVolume::peak_position() const
    {
        auto p = peak_index();
        return {ax[0][p[0]], ax[1][p[1]], ax[2][p[2]]};
    }

    double ImageVolume::max_abs() const
    {
        double m = 0.0;
        for (const auto &v : buf)
            m = std::max(m, std::abs(v));
        return m;
    }

    std::vector<double> ImageVolume::profile(int dim, const std::array<std::size_t, 3> &idx) const
    {
        std::vector<double> p(spec.n[dim]);
        std::array<std::size_t, 3> q = idx;
        for (std::size_t i = 0; i < spec.n[dim]; ++i)
        {
            q[dim] = i;
            p[i] = std::abs(buf[index(q[0], q[1], q[2])]);
        }
        return p;
    }

    // ---------------------------------------------------------------------------------------------
    // Configuration

    Side sparse_side_z(const ArrayLayout &layout)
    {
        if (layout.heights(Side::tx).size() < 2)
            return Side::rx;
        if (layout.heights(Side::rx).size() < 2)
            return Side::tx;
        return layout.spacing_z(Side::tx) > layout.spacing_z(Side::rx) ? Side::tx : Side::rx;
    }

    Side sparse_side_arc(const ArrayLayout &layout)
    {
        if (layout.angles(Side::tx).size() < 2)
            return Side::rx;
        if (layout.angles(Side::rx).size() < 2)
            return Side::tx;
        return layout.spacing_angle(Side::tx) > layout.spacing_angle(Side::rx) ? Side::tx : Side::rx;
    }

    std::size_t RmaConfig::P_vertical(const ArrayLayout &layout) const
    {
        return zero_fill_P_vertical == 0 ? layout.ratio_z() : zero_fill_P_vertical;
    }

    std::size_t RmaConfig::P_arc(const ArrayLayout &layout) const
    {
        return zero_fill_P_arc == 0 ? layout.ratio_arc() : zero_fill_P_arc;
    }

    void RmaConfig::validate(const ArrayLayout &layout) const
    {
        if (zero_fill_P_vertical != 0 && zero_fill_P_vertical != layout.ratio_z())
            throw validation_error("RmaConfig: zero_fill_P_vertical = " + std::to_string(zero_fill_P_vertical) +
                                   " does not match the layout spacing ratio " + std::to_string(layout.ratio_z()) +
                                   " (transmit and receive k_z grids would differ)");
        if (zero_fill_P_arc != 0 && zero_fill_P_arc != layout.ratio_arc())
            throw validation_error("RmaConfig: zero_fill_P_arc = " + std::to_string(zero_fill_P_arc) +
                                   " does not match the layout spacing ratio " + std::to_string(layout.ratio_arc()));
        if (!(evanescent_guard > 0.0 && evanescent_guard <= 1.0))
            throw validation_error("RmaConfig: evanescent_guard must lie in (0, 1]");
        if (!(target_extent >= 0.0))
            throw validation_error("RmaConfig: target_extent must be non-negative");
        if (!(interp_oversampling >= 1.0))
            throw validation_error("RmaConfig: interp_oversampling must be >= 1");
        grid.validate();
    }

    std::string RmaConfig::hash() const
    {
        std::ostringstream s;
        s.precision(17);
        s << zero_fill_P_vertical << '|' << zero_fill_P_arc << '|' << spectrum_filter << '|' << target_extent << '|'
          << evanescent_guard << '|' << int(hankel) << '|' << interp_oversampling << '|' << angular_fft_size << '|';
        for (int d = 0; d < 3; ++d)
            s << grid.center[d] << ',' << grid.n[d] << ',' << grid.voxel[d] << ';';
        // FNV-1a 64
        std::uint64_t h = 1469598103934665603ull;
        for (unsigned char c : s.str())
        {
            h ^= c;
            h *= 1099511628211ull;
        }
        char out[17];
        std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
        return out;
    }

    // ---------------------------------------------------------------------------------------------
    // Stages

    SpectrumTensor echo_tensor(const EchoTensor &e)
    {
        const ArrayLayout &L = e.layout();
        std::vector<Axis> axes = {
            make_axis(AxisLabel::k, e.freqs().wavenumbers()),
            make_axis(AxisLabel::theta_T, L.angles(Side::tx)),
            make_axis(AxisLabel::theta_R, L.angles(Side::rx)),
            make_axis(AxisLabel::z_T, L.heights(Side::tx)),
            make_axis(AxisLabel::z_R, L.heights(Side::rx))};
        return SpectrumTensor(std::move(axes), e.data());
    }

    SpectrumTensor vertical_spectra(const EchoTensor &e, const RmaConfig &cfg)
    {
        const ArrayLayout &L = e.layout();
        cfg.validate(L);
        SpectrumTensor t = echo_tensor(e);
        const std::size_t P = cfg.P_vertical(L);
        if (P > 1)
            t = zero_fill(t, z_label(sparse_side_z(L)), P);

        const Axis &aT = t.axis(AxisLabel::z_T), &aR = t.axis(AxisLabel::z_R);
        if (std::abs(aT.spacing() - aR.spacing()) > 1e-6 * aR.spacing())
            throw validation_error("vertical_spectra: transmit and receive z spacings differ after zero filling");
        DftOptions o;
        o.fft_size = next_pow2(std::max(aT.size(), aR.size()));
        o.phase_reference = true;
        t = dft_axis(t, AxisLabel::z_T, Direction::forward, o);
        t = dft_axis(t, AxisLabel::z_R, Direction::forward, o);

        // identical k_z grids on both sides: adopt the receive coordinates bit-for-bit
        const std::size_t iT = t.axis_index(AxisLabel::k_zT);
        Axis kzT = t.axes()[iT];
        kzT.coords = t.axis(AxisLabel::k_zR).coords;
        t.replace_axis(iT, kzT);
        return t;
    }

    // Samples moved from the tail of a circular axis of length M to its front, so that the occupied
    // span ((n - 1) P + 1 samples) sits in the middle
    static std::size_t angular_shift(std::size_t n, std::size_t P, std::size_t M)
    {
        const std::size_t span = (n - 1) * std::max<std::size_t>(P, 1) + 1;
        return span >= M ? 0 : (M - span) / 2;
    }

    static SpectrumTensor center_padding(const SpectrumTensor &t, AxisLabel label, std::size_t shift)
    {
        if (shift == 0)
            return t;
        const std::size_t ia = t.axis_index(label);
        const auto shape = t.shape(), st = t.strides();
        const std::size_t M = shape[ia];
        std::vector<Axis> axes = t.axes();
        Axis &a = axes[ia];
        const double d = a.spacing(), c0 = a.coords.front();
        for (std::size_t m = 0; m < M; ++m)
            a.coords[m] = c0 + (double(m) - double(shift)) * d;
        std::vector<cdouble> out(t.size());
        for (std::size_t f = 0; f < t.size(); ++f)
        {
            const std::size_t m = (f / st[ia]) % M;
            const std::size_t src = f - m * st[ia] + ((m + M - shift) % M) * st[ia];
            out[f] = t.data()[src];
        }
        return SpectrumTensor(std::move(axes), std::move(out));
    }

    cdouble angular_kernel(double xi, double k, double kz, double R0, double guard, HankelModel model)
    {
        const double q = k * k - kz * kz;
        if (!(q > 0.0))
            return cdouble(0.0);
        const double k_rho = std::sqrt(q);
        const double z = k_rho * R0;
        if (!(xi * xi < guard * guard * z * z))
            return cdouble(0.0);
        if (model == HankelModel::asymptotic)
        {
            const cdouble h = hankel_factor(xi, k_rho, R0) * std::polar(1.0, pi * xi / 2.0);
            if (h == cdouble(0.0))
                return cdouble(0.0);
            return 1.0 / (k_rho * std::conj(h));
        }
        const double w = std::sqrt(z * z - xi * xi);
        return std::polar(1.0 / k_rho, w + xi * std::asin(xi / z));
    }

    SpectrumTensor angular_deconvolve(const SpectrumTensor &in, double R0, const AngularOptions &opt)
    {
        if (!(R0 > 0.0))
            throw validation_error("angular_deconvolve: R0 must be positive");
        for (AxisLabel l : {AxisLabel::k, AxisLabel::theta_T, AxisLabel::theta_R, AxisLabel::k_zT, AxisLabel::k_zR})
            (void)in.axis_index(l);

        const std::size_t nT0 = in.axis(AxisLabel::theta_T).size(), nR0 = in.axis(AxisLabel::theta_R).size();
        SpectrumTensor t = in;
        if (opt.P_T > 1)
            t = zero_fill(t, AxisLabel::theta_T, opt.P_T);
        if (opt.P_R > 1)
            t = zero_fill(t, AxisLabel::theta_R, opt.P_R);
        const std::size_t nT = t.axis(AxisLabel::theta_T).size(), nR = t.axis(AxisLabel::theta_R).size();
        const std::size_t M = opt.fft_size == 0 ? next_pow2(std::max(nT, nR)) : opt.fft_size;
        if (M < nT || M < nR)
            throw validation_error("angular_deconvolve: fft_size smaller than the angular axes");
        t = pad_axis(t, AxisLabel::theta_T, M);
        t = pad_axis(t, AxisLabel::theta_R, M);
        t = dft_axis(t, AxisLabel::theta_T, Direction::forward);
        t = dft_axis(t, AxisLabel::theta_R, Direction::forward);

        const std::size_t ik = t.axis_index(AxisLabel::k), izT = t.axis_index(AxisLabel::k_zT),
                          izR = t.axis_index(AxisLabel::k_zR), ixT = t.axis_index(AxisLabel::xi_T),
                          ixR = t.axis_index(AxisLabel::xi_R);
        const auto &kc = t.axes()[ik].coords, &kzT = t.axes()[izT].coords, &kzR = t.axes()[izR].coords,
                   &xiT = t.axes()[ixT].coords, &xiR = t.axes()[ixR].coords;

        // kernel tables [k][kz][xi]
        auto table = [&](const std::vector<double> &kz, const std::vector<double> &xi)
        {
            std::vector<cdouble> tab(kc.size() * kz.size() * xi.size());
            for (std::size_t a = 0; a < kc.size(); ++a)
                for (std::size_t b = 0; b < kz.size(); ++b)
                    for (std::size_t c = 0; c < xi.size(); ++c)
                        tab[(a * kz.size() + b) * xi.size() + c] =
                            angular_kernel(xi[c], kc[a], kz[b], R0, opt.guard, opt.model);
            return tab;
        };
        const std::vector<cdouble> KT = table(kzT, xiT), KR = table(kzR, xiR);

        const auto shape = t.shape(), st = t.strides();
        auto &d = t.data();
        for (std::size_t f = 0; f < d.size(); ++f)
        {
            auto idx = [&](std::size_t ax)
            { return (f / st[ax]) % shape[ax]; };
            const std::size_t a = idx(ik);
            d[f] *= KT[(a * kzT.size() + idx(izT)) * xiT.size() + idx(ixT)] *
                    KR[(a * kzR.size() + idx(izR)) * xiR.size() + idx(ixR)];
        }

        DftOptions keep;
        keep.keep_padding = true;
        t = dft_axis(t, AxisLabel::xi_T, Direction::inverse, keep);
        t = dft_axis(t, AxisLabel::xi_R, Direction::inverse, keep);
        // The transform is circular: split the padding evenly around the aperture so that
        // directions just outside either edge are not wrapped to the far end of the axis
        t = center_padding(t, AxisLabel::theta_T, angular_shift(nT0, opt.P_T, M));
        t = center_padding(t, AxisLabel::theta_R, angular_shift(nR0, opt.P_R, M));
        return t;
    }

    SpectrumTensor dimension_increase(const SpectrumTensor &t)
    {
        const std::size_t ik = t.axis_index(AxisLabel::k);
        const Axis &ka = t.axes()[ik];
        const std::size_t Nk = ka.size();
        if (Nk > 1 && !is_uniform(ka.coords, 1e-9))
            throw validation_error("dimension_increase: k axis is not uniformly sampled");
        const double dk = Nk > 1 ? ka.spacing() : 0.0;
        std::vector<double> half(Nk);
        for (std::size_t i = 0; i < Nk; ++i)
            half[i] = 0.5 * ka.coords.front() + double(i) * dk;

        std::vector<Axis> axes;
        for (std::size_t i = 0; i < t.rank(); ++i)
        {
            if (i == ik)
            {
                axes.push_back(make_axis(AxisLabel::k_T, half));
                axes.push_back(make_axis(AxisLabel::k_R, half));
            }
            else
                axes.push_back(t.axes()[i]);
        }

        const auto shape = t.shape();
        std::size_t outer = 1, inner = 1;
        for (std::size_t i = 0; i < ik; ++i)
            outer *= shape[i];
        for (std::size_t i = ik + 1; i < shape.size(); ++i)
            inner *= shape[i];

        std::vector<cdouble> data(outer * Nk * Nk * inner, cdouble(0.0));
        std::vector<std::uint8_t> mask(data.size(), 0);
        for (std::size_t o = 0; o < outer; ++o)
            for (std::size_t i = 0; i < Nk; ++i)
                for (std::size_t j = 0; i + j < Nk; ++j)
                    for (std::size_t r = 0; r < inner; ++r)
                    {
                        const std::size_t src = (o * Nk + i + j) * inner + r;
                        const std::size_t dst = ((o * Nk + i) * Nk + j) * inner + r;
                        data[dst] = t.data()[src];
                        mask[dst] = t.is_valid(src) ? 1 : 0;
                    }
        return SpectrumTensor(std::move(axes), std::move(data), std::move(mask));
    }

    SpectrumTensor anti_diagonal_reduce(const SpectrumTensor &t)
    {
        const std::size_t iT = t.axis_index(AxisLabel::k_T), iR = t.axis_index(AxisLabel::k_R);
        if (iR != iT + 1)
            throw validation_error("anti_diagonal_reduce: k_R must directly follow k_T");
        const Axis &aT = t.axes()[iT], &aR = t.axes()[iR];
        const std::size_t Nk = aT.size();
        if (aR.size() != Nk)
            throw validation_error("anti_diagonal_reduce: k_T and k_R grids differ in length");
        const double dk = Nk > 1 ? aT.spacing() : 0.0;
        std::vector<double> kc(Nk);
        for (std::size_t n = 0; n < Nk; ++n)
            kc[n] = aT.coords.front() + aR.coords.front() + double(n) * dk;

        std::vector<Axis> axes;
        for (std::size_t i = 0; i < t.rank(); ++i)
        {
            if (i == iT)
                axes.push_back(make_axis(AxisLabel::k, kc));
            else if (i != iR)
                axes.push_back(t.axes()[i]);
        }
        const auto shape = t.shape();
        std::size_t outer = 1, inner = 1;
        for (std::size_t i = 0; i < iT; ++i)
            outer *= shape[i];
        for (std::size_t i = iR + 1; i < shape.size(); ++i)
            inner *= shape[i];
        std::vector<cdouble> data(outer * Nk * inner, cdouble(0.0));
        for (std::size_t o = 0; o < outer; ++o)
            for (std::size_t n = 0; n < Nk; ++n)
                for (std::size_t r = 0; r < inner; ++r)
                {
                    cdouble acc(0.0);
                    for (std::size_t i = 0; i <= n; ++i)
                        acc += t.data()[((o * Nk + i) * Nk + (n - i)) * inner + r];
                    data[(o * Nk + n) * inner + r] = acc / double(n + 1);
                }
        return SpectrumTensor(std::move(axes), std::move(data));
    }

    SpectrumTensor to_polar_wavenumber(const SpectrumTensor &t, Side side)
    {
        const std::size_t ik = t.axis_index(kside_label(side));
        const Axis &kz = t.axis(kz_label(side));
        if (kz.size() != 1)
            throw validation_error("to_polar_wavenumber: the k_z axis of the side must hold a single sample");
        const double kzv = kz.coords.front();
        std::vector<double> rho(t.axes()[ik].size());
        for (std::size_t i = 0; i < rho.size(); ++i)
        {
            const double q = 4.0 * t.axes()[ik].coords[i] * t.axes()[ik].coords[i] - kzv * kzv;
            if (!(q > 0.0))
                throw validation_error("to_polar_wavenumber: evanescent radial sample (4 k^2 <= k_z^2)");
            rho[i] = std::sqrt(q);
        }
        SpectrumTensor out = t;
        out.replace_axis(ik, make_axis(krho_label(side), rho));
        const std::size_t ith = t.axis_index(theta_label(side));
        std::vector<double> phi = t.axes()[ith].coords;
        for (auto &p : phi)
            p += pi;
        out.replace_axis(ith, make_axis(theta_label(side), phi));
        return out;
    }

    static bool same_coords(const std::vector<double> &a, const std::vector<double> &b)
    {
        if (a.size() != b.size())
            return false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (std::abs(a[i] - b[i]) > 1e-9 * std::max(1.0, std::abs(a[i])))
                return false;
        return true;
    }

    SpectrumTensor reduce_to_image_spectrum(const SpectrumTensor &t, const RmaConfig &)
    {
        if (t.rank() != 6)
            throw validation_error("reduce_to_image_spectrum: expected exactly the six axes (k_xT, k_yT, k_xR, k_yR, k_zT, k_zR)");
        const std::size_t ixT = t.axis_index(AxisLabel::k_xT), iyT = t.axis_index(AxisLabel::k_yT),
                          ixR = t.axis_index(AxisLabel::k_xR), iyR = t.axis_index(AxisLabel::k_yR),
                          izT = t.axis_index(AxisLabel::k_zT), izR = t.axis_index(AxisLabel::k_zR);
        const auto &ax = t.axes();
        if (!same_coords(ax[ixT].coords, ax[ixR].coords) || !same_coords(ax[iyT].coords, ax[iyR].coords) ||
            !same_coords(ax[izT].coords, ax[izR].coords))
            throw validation_error("reduce_to_image_spectrum: transmit and receive wavenumber grids differ");

        auto sum_axis = [](AxisLabel l, const Axis &a)
        {
            const std::size_t n = a.size();
            std::vector<double> c(2 * n - 1);
            const double d = n > 1 ? a.spacing() : 0.0;
            for (std::size_t i = 0; i < c.size(); ++i)
                c[i] = 2.0 * a.coords.front() + double(i) * d;
            if (n == 1)
                c[0] = 2.0 * a.coords.front();
            return make_axis(l, c);
        };
        for (std::size_t i : {ixT, iyT, izT})
            if (ax[i].size() > 1 && !is_uniform(ax[i].coords, 1e-9))
                throw validation_error("reduce_to_image_spectrum: wavenumber grid is not uniform");

        SpectrumTensor out({sum_axis(AxisLabel::k_x, ax[ixT]), sum_axis(AxisLabel::k_y, ax[iyT]),
                            sum_axis(AxisLabel::k_z, ax[izT])});
        const auto shape = t.shape(), st = t.strides();
        const std::size_t NY = out.axes()[1].size(), NZ = out.axes()[2].size();
        for (std::size_t f = 0; f < t.size(); ++f)
        {
            if (!t.is_valid(f))
                continue;
            auto idx = [&](std::size_t a)
            { return (f / st[a]) % shape[a]; };
            const std::size_t X = idx(ixT) + idx(ixR), Y = idx(iyT) + idx(iyR), Z = idx(izT) + idx(izR);
            out.data()[(X * NY + Y) * NZ + Z] += t.data()[f];
        }
        return out;
    }

    ImageVolume image_from_spectrum(const SpectrumTensor &G, const GridSpec &grid,
                                    const std::string &method, const std::string &hash)
    {
        if (G.rank() != 3 || G.axes()[0].label != AxisLabel::k_x || G.axes()[1].label != AxisLabel::k_y ||
            G.axes()[2].label != AxisLabel::k_z)
            throw validation_error("image_from_spectrum: expected axes (k_x, k_y, k_z)");
        ImageVolume img(grid, method, hash);
        const auto &Kx = G.axes()[0].coords, &Ky = G.axes()[1].coords, &Kz = G.axes()[2].coords;
        const std::size_t A = Kx.size(), B = Ky.size(), C = Kz.size();
        const std::size_t nx = grid.n[0], ny = grid.n[1], nz = grid.n[2];

        auto table = [](const std::vector<double> &pos, const std::vector<double> &K)
        {
            std::vector<cdouble> e(pos.size() * K.size());
            for (std::size_t i = 0; i < pos.size(); ++i)
                for (std::size_t a = 0; a < K.size(); ++a)
                    e[i * K.size() + a] = std::polar(1.0, K[a] * pos[i]);
            return e;
        };
        const auto Ex = table(img.x(), Kx), Ey = table(img.y(), Ky), Ez = table(img.z(), Kz);

        // z first: T1[a][b][iz]
        std::vector<cdouble> T1(A * B * nz, cdouble(0.0));
        const auto &g = G.data();
        parallel_for(A, [&](std::size_t a)
                     {
            for (std::size_t b = 0; b < B; ++b)
            {
                const cdouble *row = &g[(a * B + b) * C];
                bool any = false;
                for (std::size_t c = 0; c < C && !any; ++c)
                    any = row[c] != cdouble(0.0);
                if (!any)
                    continue;
                cdouble *dst = &T1[(a * B + b) * nz];
                for (std::size_t iz = 0; iz < nz; ++iz)
                {
                    const cdouble *e = &Ez[iz * C];
                    cdouble acc(0.0);
                    for (std::size_t c = 0; c < C; ++c)
                        acc += row[c] * e[c];
                    dst[iz] = acc;
                }
            } });
        // y: T2[a][iy][iz]
        std::vector<cdouble> T2(A * ny * nz, cdouble(0.0));
        parallel_for(A, [&](std::size_t a)
                     {
            for (std::size_t iy = 0; iy < ny; ++iy)
            {
                cdouble *dst = &T2[(a * ny + iy) * nz];
                for (std::size_t b = 0; b < B; ++b)
                {
                    const cdouble e = Ey[iy * B + b];
                    const cdouble *src = &T1[(a * B + b) * nz];
                    for (std::size_t iz = 0; iz < nz; ++iz)
                        dst[iz] += e * src[iz];
                }
            } });
        // x
        const double scale = 1.0 / double(A * B * C);
        auto &out = img.data();
        parallel_for(nx, [&](std::size_t ix)
                     {
            cdouble *dst = &out[ix * ny * nz];
            for (std::size_t a = 0; a < A; ++a)
            {
                const cdouble e = Ex[ix * A + a];
                const cdouble *src = &T2[a * ny * nz];
                for (std::size_t q = 0; q < ny * nz; ++q)
                    dst[q] += e * src[q];
            }
            for (std::size_t q = 0; q < ny * nz; ++q)
                dst[q] *= scale; });
        for (const auto &v : out)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw numeric_error("image_from_spectrum: non-finite image value");
        return img;
    }

    CartesianGrid shared_cartesian_grid(double rho_min, double rho_max, double phi_min, double phi_max, double dk)
    {
        if (!(rho_max > rho_min) || !(rho_min >= 0.0) || !(phi_max > phi_min) || !(dk > 0.0))
            throw validation_error("shared_cartesian_grid: invalid polar support");
        double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
        for (double r : {rho_min, rho_max})
            for (double p : {phi_min, phi_max})
            {
                xlo = std::min(xlo, r * std::sin(p));
                xhi = std::max(xhi, r * std::sin(p));
                ylo = std::min(ylo, -r * std::cos(p));
                yhi = std::max(yhi, -r * std::cos(p));
            }
        // extrema of the arcs inside the sector
        for (double p0 : {0.0, 0.5 * pi, pi, 1.5 * pi, 2.0 * pi, -0.5 * pi, -pi})
            if (p0 > phi_min && p0 < phi_max)
            {
                xlo = std::min(xlo, rho_max * std::sin(p0));
                xhi = std::max(xhi, rho_max * std::sin(p0));
                ylo = std::min(ylo, -rho_max * std::cos(p0));
                yhi = std::max(yhi, -rho_max * std::cos(p0));
            }
        auto grid = [dk](double lo, double hi)
        {
            const long a = long(std::floor(lo / dk)), b = long(std::ceil(hi / dk));
            std::vector<double> g;
            for (long i = a; i <= b; ++i)
                g.push_back(double(i) * dk);
            return g;
        };
        return {grid(xlo, xhi), grid(ylo, yhi)};
    }

    namespace detail
    {
        void accumulate_slice(const std::vector<cdouble> &A, std::size_t Nk, std::size_t MT, std::size_t MR,
                              const PolarInterpolator &interpT, const PolarInterpolator &interpR,
                              std::size_t nx, std::size_t ny, cdouble *plane)
        {
            const std::size_t nC = nx * ny, NY = 2 * ny - 1;
            if (interpT.n_dst() != nC || interpR.n_dst() != nC || interpT.n_src() != Nk * MT || interpR.n_src() != Nk * MR)
                throw validation_error("accumulate_slice: interpolator sizes do not match the slice");

            // highest radial index touched by each Cartesian cell (validity of the anti-diagonal support)
            auto max_index = [](const PolarInterpolator &ip, std::size_t nphi)
            {
                std::vector<long> m(ip.n_dst(), -1);
                for (std::size_t c = 0; c < ip.n_dst(); ++c)
                    if (ip.valid(c))
                        for (const auto &e : ip.row(c))
                            m[c] = std::max<long>(m[c], long(e.src / nphi));
                return m;
            };
            const std::vector<long> maxi = max_index(interpT, MT), maxj = max_index(interpR, MR);

            thread_local std::vector<cdouble> At, HT, Hc, wT;
            const auto &rotT = interpT.source_phase(), &rotR = interpR.source_phase();
            // receive angles actually read by the receive interpolator
            std::size_t r_lo = MR, r_hi = 0;
            for (std::size_t c = 0; c < nC; ++c)
                for (const auto &e : interpR.row(c))
                {
                    r_lo = std::min<std::size_t>(r_lo, e.src % MR);
                    r_hi = std::max<std::size_t>(r_hi, e.src % MR);
                }
            if (r_lo > r_hi)
                return;

            At.resize(MR * Nk * MT);
            for (std::size_t i = 0; i < Nk; ++i)
                for (std::size_t p = 0; p < MT; ++p)
                    for (std::size_t r = r_lo; r <= r_hi; ++r)
                        At[(r * Nk + i) * MT + p] = A[(i * MT + p) * MR + r];

            // transmit side: HT[j][thetaR][cT] = sum_e w * A[i_e + j][thetaT_e][thetaR].
            // Entries left unwritten only reach cells that fail the support test below.
            HT.resize(Nk * MR * nC);
            for (std::size_t cT = 0; cT < nC; ++cT)
            {
                if (maxi[cT] < 0)
                    continue;
                const auto row = interpT.row(cT);
                wT.resize(row.size());
                for (std::size_t q = 0; q < row.size(); ++q)
                    wT[q] = rotT.empty() ? cdouble(row[q].w) : row[q].w * rotT[row[q].src];
                for (std::size_t j = 0; long(j) + maxi[cT] <= long(Nk) - 1; ++j)
                    for (std::size_t r = r_lo; r <= r_hi; ++r)
                    {
                        const cdouble *src = &At[r * Nk * MT];
                        cdouble acc(0.0);
                        for (std::size_t q = 0; q < row.size(); ++q)
                            acc += wT[q] * src[(row[q].src / MT + j) * MT + row[q].src % MT];
                        HT[(j * MR + r) * nC + cT] = acc;
                    }
            }
            // receive-side demodulation folded into HT so the pairwise loop below uses real weights
            if (!rotR.empty())
                for (std::size_t j = 0; j < Nk; ++j)
                    for (std::size_t r = r_lo; r <= r_hi; ++r)
                    {
                        const cdouble g = rotR[j * MR + r];
                        cdouble *h = &HT[(j * MR + r) * nC];
                        for (std::size_t cT = 0; cT < nC; ++cT)
                            h[cT] *= g;
                    }

            // receive side + pairwise reduction onto the (k_xT + k_xR, k_yT + k_yR) plane
            Hc.assign(nC, cdouble(0.0));
            for (std::size_t cR = 0; cR < nC; ++cR)
            {
                if (maxj[cR] < 0)
                    continue;
                std::fill(Hc.begin(), Hc.end(), cdouble(0.0));
                for (const auto &e : interpR.row(cR))
                {
                    const cdouble *src = &HT[e.src * nC]; // e.src = j * MR + thetaR
                    for (std::size_t cT = 0; cT < nC; ++cT)
                        Hc[cT] += e.w * src[cT];
                }
                const std::size_t ixR = cR / ny, iyR = cR % ny;
                const long lim = long(Nk) - 1 - maxj[cR];
                for (std::size_t ixT = 0; ixT < nx; ++ixT)
                {
                    cdouble *dst = plane + (ixT + ixR) * NY + iyR;
                    for (std::size_t iyT = 0; iyT < ny; ++iyT)
                    {
                        const std::size_t cT = ixT * ny + iyT;
                        if (maxi[cT] >= 0 && maxi[cT] <= lim)
                            dst[iyT] += Hc[cT];
                    }
                }
            }
        }
    }

    namespace detail
    {
        std::vector<cdouble> angular_kernel_table(const std::vector<double> &k, double kz, double R0,
                                                  double dtheta, std::size_t M, double guard, HankelModel model)
        {
            if (!(dtheta > 0.0) || M == 0)
                throw validation_error("angular_kernel_table: invalid angular sampling");
            const std::size_t h = M / 2;
            const double dxi = 2.0 * pi / (double(M) * dtheta);
            std::vector<cdouble> tab(k.size() * M);
            for (std::size_t a = 0; a < k.size(); ++a)
                for (std::size_t m = 0; m < M; ++m)
                {
                    const double xi = (double((m + h) % M) - double(h)) * dxi;
                    tab[a * M + m] = angular_kernel(xi, k[a], kz, R0, guard, model);
                }
            return tab;
        }

        void angular_deconvolve_slice(const cdouble *in, std::size_t Nk, std::size_t nT, std::size_t nR,
                                      std::size_t P_T, std::size_t P_R, std::size_t M,
                                      const cdouble *KT, const cdouble *KR, std::vector<cdouble> &out)
        {
            if ((nT - 1) * P_T + 1 > M || (nR - 1) * P_R + 1 > M || !is_pow2(M))
                throw validation_error("angular_deconvolve_slice: angular axes do not fit the transform size");
            const std::size_t sT = angular_shift(nT, P_T, M), sR = angular_shift(nR, P_R, M);
            const double scale = 1.0 / (double(M) * double(M));
            out.resize(Nk * M * M);
            std::vector<cdouble> buf(M * M), col(M);
            for (std::size_t i = 0; i < Nk; ++i)
            {
                std::fill(buf.begin(), buf.end(), cdouble(0.0));
                for (std::size_t t = 0; t < nT; ++t)
                {
                    cdouble *row = &buf[t * P_T * M];
                    for (std::size_t r = 0; r < nR; ++r)
                        row[r * P_R] = in[(i * nT + t) * nR + r];
                    fft_inplace({row, M}, false);
                }
                const cdouble *kt = KT + i * M, *kr = KR + i * M;
                for (std::size_t r = 0; r < M; ++r)
                {
                    for (std::size_t p = 0; p < M; ++p)
                        col[p] = buf[p * M + r];
                    fft_inplace(col, false);
                    for (std::size_t p = 0; p < M; ++p)
                        col[p] *= kt[p] * kr[r];
                    fft_inplace(col, true);
                    for (std::size_t p = 0; p < M; ++p)
                        buf[p * M + r] = col[p];
                }
                cdouble *o = &out[i * M * M];
                for (std::size_t p = 0; p < M; ++p)
                {
                    cdouble *row = &buf[p * M];
                    fft_inplace({row, M}, true);
                    // circular relabelling that centers the aperture in the padded axis
                    cdouble *dst = o + ((p + sT) % M) * M;
                    for (std::size_t r = 0; r < M; ++r)
                        dst[(r + sR) % M] = row[r] * scale;
                }
            }
        }
    }

    // ---------------------------------------------------------------------------------------------
    // Full pipeline

    static std::vector<double> angular_coords(const std::vector<double> &theta, std::size_t P, std::size_t M)
    {
        // same arithmetic as angular_deconvolve applies to the axis
        SpectrumTensor t({make_axis(AxisLabel::theta_T, theta)});
        if (P > 1)
            t = zero_fill(t, AxisLabel::theta_T, P);
        t = pad_axis(t, AxisLabel::theta_T, M);
        std::vector<double> c = t.axes()[0].coords;
        const std::size_t s = angular_shift(theta.size(), P, M);
        const double d = c[1] - c[0], c0 = c.front();
        for (std::size_t m = 0; m < M; ++m)
            c[m] = c0 + (double(m) - double(s)) * d;
        return c;
    }

    ImageVolume reconstruct_rma(const EchoTensor &e, const ArrayLayout &layout, const RmaConfig &cfg)
    {
        if (e.layout().radius() != layout.radius() || e.layout().angles(Side::tx) != layout.angles(Side::tx) ||
            e.layout().angles(Side::rx) != layout.angles(Side::rx) || e.layout().heights(Side::tx) != layout.heights(Side::tx) ||
            e.layout().heights(Side::rx) != layout.heights(Side::rx))
            throw validation_error("reconstruct_rma: echo layout does not match the supplied layout");
        cfg.validate(layout);
        const double R0 = layout.radius();
        const FrequencyGrid &fg = e.freqs();
        const std::size_t Nk = fg.count();

        const SpectrumTensor S = vertical_spectra(e, cfg);
        const std::vector<double> &kz = S.axis(AxisLabel::k_zT).coords;
        const std::size_t Nz = kz.size();
        const double dkz = kz[1] - kz[0];

        // per-side k_z support
        auto kz_limit = [&](Side s)
        {
            if (!cfg.spectrum_filter)
                return fg.k_max();
            const auto &h = layout.heights(s);
            return support_bound_kz(R0, h.back() - h.front(), cfg.target_extent, fg.k_max());
        };
        const double kzmaxT = kz_limit(Side::tx), kzmaxR = kz_limit(Side::rx);
        std::vector<std::size_t> keepT, keepR;
        for (std::size_t q = 0; q < Nz; ++q)
        {
            if (std::abs(kz[q]) <= kzmaxT && std::abs(kz[q]) < fg.k_max())
                keepT.push_back(q);
            if (std::abs(kz[q]) <= kzmaxR && std::abs(kz[q]) < fg.k_max())
                keepR.push_back(q);
        }
        if (keepT.empty() || keepR.empty())
            throw numeric_error("reconstruct_rma: empty spectrum (k_z window removed every sample)");

        // angular grids after zero filling and padding
        const std::size_t P_arc = cfg.P_arc(layout);
        const Side sparse_arc = sparse_side_arc(layout);
        AngularOptions aopt;
        aopt.P_T = sparse_arc == Side::tx ? P_arc : 1;
        aopt.P_R = sparse_arc == Side::rx ? P_arc : 1;
        aopt.guard = cfg.evanescent_guard;
        aopt.model = cfg.hankel;
        const std::size_t lenT = layout.angles(Side::tx).size() * aopt.P_T, lenR = layout.angles(Side::rx).size() * aopt.P_R;
        // a scatterer at distance rho from the axis shifts the plane-wave directions by up to asin(rho / R0)
        double rho_max = 0.0;
        for (double sx : {-0.5, 0.5})
            for (double sy : {-0.5, 0.5})
                rho_max = std::max(rho_max, std::hypot(cfg.grid.center[0] + sx * cfg.grid.extent(0),
                                                       cfg.grid.center[1] + sy * cfg.grid.extent(1)));
        const double spread = std::asin(std::min(1.0, rho_max / R0));
        std::size_t M = cfg.angular_fft_size;
        if (M == 0)
        {
            const double dth = layout.spacing_angle(sparse_arc == Side::tx ? Side::rx : Side::tx);
            const std::size_t span = (layout.angles(sparse_arc).size() - 1) * P_arc + 1;
            const std::size_t margin = dth > 0.0 ? std::size_t(std::ceil(spread / dth)) : 0;
            M = next_pow2(std::max({lenT, lenR, span + 2 * margin}));
        }
        if (M < lenT || M < lenR)
            throw validation_error("reconstruct_rma: angular_fft_size is smaller than the zero-filled angular axes");
        aopt.fft_size = M;
        std::vector<double> phiT = angular_coords(layout.angles(Side::tx), aopt.P_T, M);
        std::vector<double> phiR = angular_coords(layout.angles(Side::rx), aopt.P_R, M);
        for (auto &p : phiT)
            p += pi;
        for (auto &p : phiR)
            p += pi;

        // radial grids k_T = k_0/2 + i dk
        const std::vector<double> kv = fg.wavenumbers();
        const double dk = kv[1] - kv[0];
        std::vector<double> khalf(Nk);
        for (std::size_t i = 0; i < Nk; ++i)
            khalf[i] = 0.5 * kv[0] + double(i) * dk;
        auto rho_coords = [&](double kzv)
        {
            std::vector<double> r(Nk);
            for (std::size_t i = 0; i < Nk; ++i)
                r[i] = std::sqrt(std::max(4.0 * khalf[i] * khalf[i] - kzv * kzv, 0.0));
            return r;
        };
        double kz_abs_max = 0.0;
        for (auto q : keepT)
            kz_abs_max = std::max(kz_abs_max, std::abs(kz[q]));
        for (auto q : keepR)
            kz_abs_max = std::max(kz_abs_max, std::abs(kz[q]));
        if (!(4.0 * khalf[0] * khalf[0] > kz_abs_max * kz_abs_max))
            throw numeric_error("reconstruct_rma: retained k_z exceeds the lowest radial wavenumber");

        // Cartesian support: the aperture directions widened by the spread of the output box
        const auto &angT = layout.angles(Side::tx), &angR = layout.angles(Side::rx);
        const double phi_lo = std::max(std::min(phiT.front(), phiR.front()),
                                       std::min(angT.front(), angR.front()) + pi - spread);
        const double phi_hi = std::min(std::max(phiT.back(), phiR.back()),
                                       std::max(angT.back(), angR.back()) + pi + spread);

        // the one-way image of the sparse arc carries grating replicas offset by lambda_max / dtheta_sparse;
        // the Cartesian period must keep them from wrapping back into the output box
        const double box = std::max(cfg.grid.extent(0), cfg.grid.extent(1));
        const double grating_offset = (2.0 * pi / kv.front()) / layout.spacing_angle(sparse_arc);
        const double W = std::max(cfg.interp_oversampling * box, box + grating_offset);
        const double dkc = 2.0 * pi / W;
        const CartesianGrid cg = shared_cartesian_grid(std::sqrt(4.0 * khalf[0] * khalf[0] - kz_abs_max * kz_abs_max),
                                                       2.0 * khalf.back(),
                                                       phi_lo, phi_hi, dkc);
        const std::size_t nx = cg.kx.size(), ny = cg.ky.size();

        // interpolate relative to the image center
        const double xc = cfg.grid.center[0], yc = cfg.grid.center[1];
        std::vector<std::unique_ptr<PolarInterpolator>> interpT(Nz), interpR(Nz);
        for (auto q : keepT)
            interpT[q] = std::make_unique<PolarInterpolator>(rho_coords(kz[q]), phiT, cg.kx, cg.ky, xc, yc);
        for (auto q : keepR)
            interpR[q] = std::make_unique<PolarInterpolator>(rho_coords(kz[q]), phiR, cg.kx, cg.ky, xc, yc);

        // image spectrum G[Kx][Ky][Kz]
        const std::size_t NX = 2 * nx - 1, NY = 2 * ny - 1, NZ = 2 * Nz - 1;
        std::vector<cdouble> G(NX * NY * NZ, cdouble(0.0));

        const auto Sshape = S.shape();
        const std::size_t nthT = Sshape[1], nthR = Sshape[2];
        std::vector<std::size_t> planes;
        for (std::size_t q = 0; q < NZ; ++q)
            planes.push_back(q);

        // deconvolution kernels per retained k_z
        const double dthT = layout.spacing_angle(Side::tx) / double(aopt.P_T), dthR = layout.spacing_angle(Side::rx) / double(aopt.P_R);
        std::vector<std::vector<cdouble>> tabT(Nz), tabR(Nz);
        for (auto q : keepT)
            tabT[q] = detail::angular_kernel_table(kv, kz[q], R0, dthT, M, aopt.guard, aopt.model);
        for (auto q : keepR)
            tabR[q] = detail::angular_kernel_table(kv, kz[q], R0, dthR, M, aopt.guard, aopt.model);

        parallel_chunks(planes.size(), worker_count(), [&](std::size_t, std::size_t b, std::size_t e_)
                        {
            std::vector<cdouble> plane(NX * NY), sl(Nk * nthT * nthR), A;
            for (std::size_t pi_ = b; pi_ < e_; ++pi_)
            {
                const std::size_t q = planes[pi_];
                std::fill(plane.begin(), plane.end(), cdouble(0.0));
                bool touched = false;
                for (auto a : keepT)
                {
                    if (q < a || q - a >= Nz)
                        continue;
                    const std::size_t bq = q - a;
                    if (!interpR[bq])
                        continue;
                    // slice (k, theta_T, theta_R) at (k_zT[a], k_zR[bq])
                    for (std::size_t i = 0; i < Nk; ++i)
                        for (std::size_t tT = 0; tT < nthT; ++tT)
                            for (std::size_t tR = 0; tR < nthR; ++tR)
                                sl[(i * nthT + tT) * nthR + tR] = S.data()[(((i * nthT + tT) * nthR + tR) * Nz + a) * Nz + bq];
                    detail::angular_deconvolve_slice(sl.data(), Nk, nthT, nthR, aopt.P_T, aopt.P_R, M,
                                                     tabT[a].data(), tabR[bq].data(), A);
                    detail::accumulate_slice(A, Nk, M, M, *interpT[a], *interpR[bq], nx, ny, plane.data());
                    touched = true;
                }
                if (!touched)
                    continue;
                // remodulation exp(-j (k_T + k_R) . r_ref), applied once on the summed plane
                for (std::size_t X = 0; X < NX; ++X)
                    for (std::size_t Y = 0; Y < NY; ++Y)
                    {
                        const double KX = 2.0 * cg.kx.front() + double(X) * dkc, KY = 2.0 * cg.ky.front() + double(Y) * dkc;
                        G[(X * NY + Y) * NZ + q] = plane[X * NY + Y] * std::polar(1.0, -(KX * xc + KY * yc));
                    }
            } });

        auto sum_axis = [](AxisLabel l, const std::vector<double> &c, double d)
        {
            return make_uniform_axis(l, 2.0 * c.front(), d, 2 * c.size() - 1);
        };
        SpectrumTensor spec({sum_axis(AxisLabel::k_x, cg.kx, dkc), sum_axis(AxisLabel::k_y, cg.ky, dkc),
                             make_uniform_axis(AxisLabel::k_z, 2.0 * kz.front(), dkz, NZ)},
                            std::move(G));
        if (cfg.spectrum_filter)
        {
            SpectralWindow w;
            w.bands.push_back({AxisLabel::k_z, -(kzmaxT + kzmaxR), kzmaxT + kzmaxR});
            spec = apply_window(spec, w);
        }
        bool any = false;
        for (const auto &v : spec.data())
            if (v != cdouble(0.0))
            {
                any = true;
                break;
            }
        if (!any)
            throw numeric_error("reconstruct_rma: empty spectrum after masking");
        return image_from_spectrum(spec, cfg.grid, "rma", cfg.hash());
    }
}
