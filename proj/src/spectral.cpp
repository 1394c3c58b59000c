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

#include "cylmimo/spectral.hpp"
#include "cylmimo/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cylmimo
{
    std::string to_string(AxisLabel a)
    {
        switch (a)
        {
        case AxisLabel::z_T:
            return "z_T";
        case AxisLabel::z_R:
            return "z_R";
        case AxisLabel::theta_T:
            return "theta_T";
        case AxisLabel::theta_R:
            return "theta_R";
        case AxisLabel::k:
            return "k";
        case AxisLabel::k_zT:
            return "k_zT";
        case AxisLabel::k_zR:
            return "k_zR";
        case AxisLabel::xi_T:
            return "xi_T";
        case AxisLabel::xi_R:
            return "xi_R";
        case AxisLabel::k_T:
            return "k_T";
        case AxisLabel::k_R:
            return "k_R";
        case AxisLabel::k_rhoT:
            return "k_rhoT";
        case AxisLabel::k_rhoR:
            return "k_rhoR";
        case AxisLabel::k_xT:
            return "k_xT";
        case AxisLabel::k_yT:
            return "k_yT";
        case AxisLabel::k_xR:
            return "k_xR";
        case AxisLabel::k_yR:
            return "k_yR";
        case AxisLabel::k_x:
            return "k_x";
        case AxisLabel::k_y:
            return "k_y";
        case AxisLabel::k_z:
            return "k_z";
        }
        return "?";
    }

    AxisLabel fourier_dual(AxisLabel a)
    {
        switch (a)
        {
        case AxisLabel::z_T:
            return AxisLabel::k_zT;
        case AxisLabel::z_R:
            return AxisLabel::k_zR;
        case AxisLabel::theta_T:
            return AxisLabel::xi_T;
        case AxisLabel::theta_R:
            return AxisLabel::xi_R;
        case AxisLabel::k_zT:
            return AxisLabel::z_T;
        case AxisLabel::k_zR:
            return AxisLabel::z_R;
        case AxisLabel::xi_T:
            return AxisLabel::theta_T;
        case AxisLabel::xi_R:
            return AxisLabel::theta_R;
        default:
            throw validation_error("axis '" + to_string(a) + "' has no Fourier dual");
        }
    }

    bool is_spatial(AxisLabel a)
    {
        return a == AxisLabel::z_T || a == AxisLabel::z_R || a == AxisLabel::theta_T || a == AxisLabel::theta_R;
    }

    AxisLabel z_label(Side s) { return s == Side::tx ? AxisLabel::z_T : AxisLabel::z_R; }
    AxisLabel theta_label(Side s) { return s == Side::tx ? AxisLabel::theta_T : AxisLabel::theta_R; }
    AxisLabel kz_label(Side s) { return s == Side::tx ? AxisLabel::k_zT : AxisLabel::k_zR; }
    AxisLabel xi_label(Side s) { return s == Side::tx ? AxisLabel::xi_T : AxisLabel::xi_R; }
    AxisLabel kside_label(Side s) { return s == Side::tx ? AxisLabel::k_T : AxisLabel::k_R; }
    AxisLabel krho_label(Side s) { return s == Side::tx ? AxisLabel::k_rhoT : AxisLabel::k_rhoR; }
    AxisLabel kx_label(Side s) { return s == Side::tx ? AxisLabel::k_xT : AxisLabel::k_xR; }
    AxisLabel ky_label(Side s) { return s == Side::tx ? AxisLabel::k_yT : AxisLabel::k_yR; }

    // ---------------------------------------------------------------------------------------------
    // Axis / SpectrumTensor

    double Axis::spacing() const
    {
        if (coords.size() < 2)
            throw validation_error("axis '" + to_string(label) + "' needs at least two samples to define a spacing");
        return (coords.back() - coords.front()) / double(coords.size() - 1);
    }

    Axis make_axis(AxisLabel label, std::vector<double> coords)
    {
        if (coords.empty())
            throw validation_error("axis '" + to_string(label) + "' is empty");
        for (std::size_t i = 1; i < coords.size(); ++i)
            if (!(coords[i] > coords[i - 1]))
                throw validation_error("axis '" + to_string(label) + "' coordinates are not strictly increasing");
        Axis a;
        a.label = label;
        a.coords = std::move(coords);
        return a;
    }

    Axis make_uniform_axis(AxisLabel label, double first, double spacing, std::size_t n)
    {
        std::vector<double> c(n);
        for (std::size_t i = 0; i < n; ++i)
            c[i] = first + spacing * double(i);
        return make_axis(label, std::move(c));
    }

    static std::size_t shape_product(const std::vector<Axis> &axes)
    {
        std::size_t n = 1;
        for (const auto &a : axes)
            n *= a.size();
        return n;
    }

    static void check_axes(const std::vector<Axis> &axes)
    {
        for (std::size_t i = 0; i < axes.size(); ++i)
        {
            if (axes[i].coords.empty())
                throw validation_error("SpectrumTensor: axis '" + to_string(axes[i].label) + "' is empty");
            for (std::size_t j = 1; j < axes[i].coords.size(); ++j)
                if (!(axes[i].coords[j] > axes[i].coords[j - 1]))
                    throw validation_error("SpectrumTensor: axis '" + to_string(axes[i].label) +
                                           "' is not strictly increasing");
            for (std::size_t j = 0; j < i; ++j)
                if (axes[j].label == axes[i].label)
                    throw validation_error("SpectrumTensor: duplicate axis '" + to_string(axes[i].label) + "'");
        }
    }

    SpectrumTensor::SpectrumTensor(std::vector<Axis> axes) : ax(std::move(axes))
    {
        check_axes(ax);
        buf.assign(shape_product(ax), cdouble(0.0));
    }

    SpectrumTensor::SpectrumTensor(std::vector<Axis> axes, std::vector<cdouble> data)
        : ax(std::move(axes)), buf(std::move(data))
    {
        check_axes(ax);
        if (buf.size() != shape_product(ax))
            throw validation_error("SpectrumTensor: data size does not match axes");
    }

    SpectrumTensor::SpectrumTensor(std::vector<Axis> axes, std::vector<cdouble> data, std::vector<std::uint8_t> m)
        : SpectrumTensor(std::move(axes), std::move(data))
    {
        set_mask(std::move(m));
    }

    void SpectrumTensor::set_mask(std::vector<std::uint8_t> m)
    {
        if (!m.empty() && m.size() != buf.size())
            throw validation_error("SpectrumTensor: mask size does not match data");
        valid = std::move(m);
    }

    std::size_t SpectrumTensor::axis_index(AxisLabel l) const
    {
        for (std::size_t i = 0; i < ax.size(); ++i)
            if (ax[i].label == l)
                return i;
        throw validation_error("SpectrumTensor: missing axis '" + to_string(l) + "'");
    }

    bool SpectrumTensor::has_axis(AxisLabel l) const
    {
        return std::any_of(ax.begin(), ax.end(), [l](const Axis &a)
                           { return a.label == l; });
    }

    std::vector<std::size_t> SpectrumTensor::shape() const
    {
        std::vector<std::size_t> s(ax.size());
        for (std::size_t i = 0; i < ax.size(); ++i)
            s[i] = ax[i].size();
        return s;
    }

    std::vector<std::size_t> SpectrumTensor::strides() const
    {
        std::vector<std::size_t> s(ax.size(), 1);
        for (std::size_t i = ax.size(); i-- > 1;)
            s[i - 1] = s[i] * ax[i].size();
        return s;
    }

    std::size_t SpectrumTensor::flat_index(std::span<const std::size_t> idx) const
    {
        if (idx.size() != ax.size())
            throw validation_error("SpectrumTensor: index rank mismatch");
        std::size_t f = 0;
        for (std::size_t i = 0; i < ax.size(); ++i)
        {
            if (idx[i] >= ax[i].size())
                throw validation_error("SpectrumTensor: index out of range");
            f = f * ax[i].size() + idx[i];
        }
        return f;
    }

    cdouble SpectrumTensor::at(std::initializer_list<std::size_t> idx) const
    {
        return buf[flat_index(std::span<const std::size_t>(idx.begin(), idx.size()))];
    }

    cdouble &SpectrumTensor::at(std::initializer_list<std::size_t> idx)
    {
        return buf[flat_index(std::span<const std::size_t>(idx.begin(), idx.size()))];
    }

    void SpectrumTensor::replace_axis(std::size_t i, Axis a)
    {
        if (i >= ax.size() || a.size() != ax[i].size())
            throw validation_error("SpectrumTensor: replacement axis must have the same length");
        std::vector<Axis> tmp = ax;
        tmp[i] = std::move(a);
        check_axes(tmp);
        ax = std::move(tmp);
    }

    // ---------------------------------------------------------------------------------------------
    // Line iteration: every 1-D fibre along axis a is (base, stride, n)

    namespace
    {
        struct Fibres
        {
            std::size_t outer, n, inner;
            std::size_t count() const { return outer * inner; }
            std::size_t base(std::size_t line) const { return (line / inner) * n * inner + line % inner; }
        };

        Fibres fibres(const std::vector<std::size_t> &shape, std::size_t a)
        {
            Fibres f{1, shape[a], 1};
            for (std::size_t i = 0; i < a; ++i)
                f.outer *= shape[i];
            for (std::size_t i = a + 1; i < shape.size(); ++i)
                f.inner *= shape[i];
            return f;
        }

        void require_uniform(const Axis &a)
        {
            if (a.size() < 2 || !is_uniform(a.coords, 1e-9))
                throw validation_error("axis '" + to_string(a.label) + "' is not uniformly sampled");
        }
    }

    SpectrumTensor dft_axis(const SpectrumTensor &t, AxisLabel label, Direction dir, const DftOptions &opt)
    {
        const std::size_t ia = t.axis_index(label);
        const Axis &in_axis = t.axes()[ia];
        require_uniform(in_axis);
        const std::size_t N = in_axis.size();
        const double d = in_axis.spacing();

        std::vector<Axis> axes = t.axes();
        Axis out_axis;
        std::size_t M = 0, N_out = 0;
        std::vector<cdouble> phase; // per output (forward) / input (inverse) sample

        if (dir == Direction::forward)
        {
            M = opt.fft_size == 0 ? N : opt.fft_size;
            if (M < N)
                throw validation_error("dft_axis: fft_size smaller than the axis length");
            if (opt.pad_pow2)
                M = next_pow2(M);
            const std::size_t h = M / 2;
            const double dk = 2.0 * pi / (double(M) * d);
            std::vector<double> kc(M);
            for (std::size_t m = 0; m < M; ++m)
                kc[m] = (double(m) - double(h)) * dk;
            out_axis = make_axis(fourier_dual(label), kc);
            out_axis.dual_origin = in_axis.coords.front();
            out_axis.dual_spacing = d;
            out_axis.dual_count = N;
            out_axis.padding = M - N;
            out_axis.phase_referenced = opt.phase_reference;
            if (opt.phase_reference)
            {
                phase.resize(M);
                for (std::size_t m = 0; m < M; ++m)
                    phase[m] = std::polar(1.0, -kc[m] * out_axis.dual_origin);
            }
            N_out = M;
        }
        else
        {
            if (is_spatial(label))
                throw validation_error("dft_axis: inverse transform requested on spatial axis '" + to_string(label) + "'");
            M = N;
            const double dx = in_axis.dual_spacing > 0.0 ? in_axis.dual_spacing : 2.0 * pi / (double(M) * d);
            if (std::abs(d - 2.0 * pi / (double(M) * dx)) > 1e-9 * d)
                throw validation_error("dft_axis: axis spacing inconsistent with its recorded transform");
            const double x0 = in_axis.dual_spacing > 0.0 ? in_axis.dual_origin : 0.0;
            std::size_t count = in_axis.dual_count > 0 ? in_axis.dual_count : M;
            if (opt.keep_padding || count > M)
                count = M;
            std::vector<double> xc(count);
            for (std::size_t n = 0; n < count; ++n)
                xc[n] = x0 + double(n) * dx;
            out_axis = make_axis(fourier_dual(label), xc);
            if (in_axis.phase_referenced)
            {
                phase.resize(M);
                for (std::size_t m = 0; m < M; ++m)
                    phase[m] = std::polar(1.0, in_axis.coords[m] * x0);
            }
            N_out = count;
        }

        axes[ia] = out_axis;
        SpectrumTensor out(axes);
        const Fibres fi = fibres(t.shape(), ia);
        const Fibres fo = fibres(out.shape(), ia);
        const std::size_t h = M / 2;
        const double inv_m = 1.0 / double(M);
        const auto &src = t.data();
        auto &dst = out.data();

        parallel_chunks(fi.count(), worker_count(), [&](std::size_t, std::size_t b, std::size_t e)
                        {
            std::vector<cdouble> work(M);
            for (std::size_t line = b; line < e; ++line)
            {
                const std::size_t bi = fi.base(line), bo = fo.base(line);
                if (dir == Direction::forward)
                {
                    std::fill(work.begin(), work.end(), cdouble(0.0));
                    for (std::size_t n = 0; n < N; ++n)
                        work[n] = src[bi + n * fi.inner];
                    fft_inplace(work, false);
                    for (std::size_t m = 0; m < M; ++m)
                    {
                        cdouble v = work[(m + M - h) % M];
                        dst[bo + m * fo.inner] = phase.empty() ? v : v * phase[m];
                    }
                }
                else
                {
                    for (std::size_t m = 0; m < M; ++m)
                    {
                        cdouble v = src[bi + m * fi.inner];
                        work[(m + M - h) % M] = phase.empty() ? v : v * phase[m];
                    }
                    fft_inplace(work, true);
                    for (std::size_t n = 0; n < N_out; ++n)
                        dst[bo + n * fo.inner] = work[n] * inv_m;
                }
            } });
        return out;
    }

    static SpectrumTensor resample_axis(const SpectrumTensor &t, AxisLabel label, std::size_t n_out,
                                        std::size_t stride_P, double new_spacing)
    {
        const std::size_t ia = t.axis_index(label);
        const Axis &a = t.axes()[ia];
        std::vector<Axis> axes = t.axes();
        axes[ia] = make_uniform_axis(label, a.coords.front(), new_spacing, n_out);
        SpectrumTensor out(axes);
        const Fibres fi = fibres(t.shape(), ia);
        const Fibres fo = fibres(out.shape(), ia);
        for (std::size_t line = 0; line < fi.count(); ++line)
        {
            const std::size_t bi = fi.base(line), bo = fo.base(line);
            for (std::size_t n = 0; n < a.size(); ++n)
                out.data()[bo + n * stride_P * fo.inner] = t.data()[bi + n * fi.inner];
        }
        return out;
    }

    SpectrumTensor zero_fill(const SpectrumTensor &t, AxisLabel label, std::size_t P)
    {
        if (P < 1)
            throw validation_error("zero_fill: factor P must be >= 1");
        const Axis &a = t.axis(label);
        require_uniform(a);
        return resample_axis(t, label, a.size() * P, P, a.spacing() / double(P));
    }

    SpectrumTensor pad_axis(const SpectrumTensor &t, AxisLabel label, std::size_t n)
    {
        const Axis &a = t.axis(label);
        require_uniform(a);
        if (n < a.size())
            throw validation_error("pad_axis: target length smaller than the axis");
        return resample_axis(t, label, n, 1, a.spacing());
    }

    cdouble hankel_factor(double xi, double k_rho, double R0)
    {
        const double z = k_rho * R0;
        const double q = z * z - xi * xi;
        if (!(q > 0.0))
            return cdouble(0.0, 0.0);
        return std::polar(1.0, std::sqrt(q)) * std::polar(1.0, -pi * xi / 2.0);
    }

    double SpectralWindow::weight(const Band &b, Taper taper, double rolloff, double x)
    {
        if (x < b.lo || x > b.hi)
            return 0.0;
        if (taper == Taper::rectangular || rolloff <= 0.0)
            return 1.0;
        const double r = rolloff * (b.hi - b.lo);
        const double d = std::min(x - b.lo, b.hi - x);
        if (d >= r)
            return 1.0;
        return 0.5 * (1.0 - std::cos(pi * d / r));
    }

    SpectrumTensor apply_window(const SpectrumTensor &t, const SpectralWindow &w)
    {
        if (!(w.rolloff >= 0.0 && w.rolloff <= 0.5))
            throw validation_error("apply_window: roll-off fraction must lie in [0, 0.5]");
        SpectrumTensor out = t;
        const auto shape = t.shape();
        const auto strides = t.strides();
        for (const auto &b : w.bands)
        {
            if (!(b.lo < b.hi))
                throw validation_error("apply_window: band on '" + to_string(b.axis) + "' has lo >= hi");
            const std::size_t ia = t.axis_index(b.axis);
            const Axis &a = t.axes()[ia];
            if (b.hi < a.coords.front() || b.lo > a.coords.back())
                throw validation_error("apply_window: pass band on '" + to_string(b.axis) + "' is disjoint from the axis range");
            std::vector<double> wt(a.size());
            for (std::size_t i = 0; i < a.size(); ++i)
                wt[i] = SpectralWindow::weight(b, w.taper, w.rolloff, a.coords[i]);
            auto &d = out.data();
            for (std::size_t f = 0; f < d.size(); ++f)
            {
                double v = wt[(f / strides[ia]) % shape[ia]];
                if (v != 1.0)
                    d[f] *= v;
            }
        }
        return out;
    }

    double support_bound_kz(double R0, double L, double D, double k)
    {
        if (!(R0 > 0.0) || !(k > 0.0) || L < 0.0 || D < 0.0)
            throw validation_error("support_bound_kz: requires R0 > 0, k > 0, L >= 0, D >= 0");
        const double a = L + D;
        return k * a / 2.0 / std::sqrt(R0 * R0 + a * a / 4.0);
    }

    // ---------------------------------------------------------------------------------------------
    // Polar -> Cartesian

    static std::size_t bracket(const std::vector<double> &c, double x)
    {
        // index i with c[i] <= x <= c[i+1], i in [0, n-2]; caller guarantees c.front() <= x <= c.back()
        auto it = std::upper_bound(c.begin(), c.end(), x);
        std::size_t i = std::size_t(it - c.begin());
        i = i == 0 ? 0 : i - 1;
        return std::min(i, c.size() - 2);
    }

    PolarInterpolator::PolarInterpolator(const std::vector<double> &k_rho, const std::vector<double> &phi,
                                         const std::vector<double> &kx, const std::vector<double> &ky,
                                         double x_ref, double y_ref)
        : n_rho(k_rho.size()), n_phi(phi.size()), nx(kx.size()), ny(ky.size())
    {
        if (n_rho < 2 || n_phi < 2)
            throw validation_error("interp_polar_to_cartesian: polar grid needs at least 2x2 samples");
        if (nx == 0 || ny == 0)
            throw validation_error("interp_polar_to_cartesian: empty output grid");
        const double center = 0.5 * (phi.front() + phi.back());
        row_ptr.assign(nx * ny + 1, 0);
        ok.assign(nx * ny, 0);
        ent.reserve(4 * nx * ny);
        for (std::size_t ix = 0; ix < nx; ++ix)
            for (std::size_t iy = 0; iy < ny; ++iy)
            {
                const std::size_t c = ix * ny + iy;
                const double r = std::hypot(kx[ix], ky[iy]);
                double p = std::atan2(kx[ix], -ky[iy]);
                p += 2.0 * pi * std::round((center - p) / (2.0 * pi));
                if (r >= k_rho.front() && r <= k_rho.back() && p >= phi.front() && p <= phi.back())
                {
                    const std::size_t i = bracket(k_rho, r), j = bracket(phi, p);
                    const double a = (r - k_rho[i]) / (k_rho[i + 1] - k_rho[i]);
                    const double b = (p - phi[j]) / (phi[j + 1] - phi[j]);
                    const double w[4] = {(1.0 - a) * (1.0 - b), (1.0 - a) * b, a * (1.0 - b), a * b};
                    const std::size_t ri[4] = {i, i, i + 1, i + 1}, pj[4] = {j, j + 1, j, j + 1};
                    for (int q = 0; q < 4; ++q)
                        if (w[q] != 0.0)
                            ent.push_back({std::uint32_t(ri[q] * n_phi + pj[q]), w[q]});
                    ok[c] = 1;
                }
                row_ptr[c + 1] = std::uint32_t(ent.size());
            }
        if (x_ref != 0.0 || y_ref != 0.0)
        {
            // a spectrum exp(-j k . r) is demodulated at the polar sample and remodulated at the cell
            src_rot.resize(n_rho * n_phi);
            for (std::size_t i = 0; i < n_rho; ++i)
                for (std::size_t j = 0; j < n_phi; ++j)
                    src_rot[i * n_phi + j] = std::polar(1.0, k_rho[i] * (std::sin(phi[j]) * x_ref - std::cos(phi[j]) * y_ref));
            dst_rot.resize(nx * ny);
            for (std::size_t ix = 0; ix < nx; ++ix)
                for (std::size_t iy = 0; iy < ny; ++iy)
                    dst_rot[ix * ny + iy] = std::polar(1.0, -(kx[ix] * x_ref + ky[iy] * y_ref));
        }
    }

    std::size_t PolarInterpolator::n_valid() const
    {
        return std::size_t(std::count(ok.begin(), ok.end(), std::uint8_t(1)));
    }

    void PolarInterpolator::apply(const cdouble *src, cdouble *dst, const std::uint8_t *src_valid,
                                  std::uint8_t *dst_valid) const
    {
        for (std::size_t c = 0; c < nx * ny; ++c)
        {
            cdouble acc(0.0);
            bool good = ok[c] != 0;
            for (std::uint32_t e = row_ptr[c]; good && e < row_ptr[c + 1]; ++e)
            {
                if (src_valid && !src_valid[ent[e].src])
                    good = false;
                else if (src_rot.empty())
                    acc += ent[e].w * src[ent[e].src];
                else
                    acc += ent[e].w * (src_rot[ent[e].src] * src[ent[e].src]);
            }
            if (good && !dst_rot.empty())
                acc *= dst_rot[c];
            dst[c] = good ? acc : cdouble(0.0);
            if (dst_valid)
                dst_valid[c] = good ? 1 : 0;
        }
    }

    SpectrumTensor interp_polar_to_cartesian(const SpectrumTensor &t, Side which,
                                             const std::vector<double> &kx, const std::vector<double> &ky)
    {
        if (!is_uniform(kx, 1e-9) || !is_uniform(ky, 1e-9) || kx.empty() || ky.empty())
            throw validation_error("interp_polar_to_cartesian: output grid must be uniform");
        const std::size_t ir = t.axis_index(krho_label(which));
        const std::size_t ip = t.axis_index(theta_label(which));
        const PolarInterpolator interp(t.axes()[ir].coords, t.axes()[ip].coords, kx, ky);
        if (interp.n_valid() == 0)
            throw validation_error("interp_polar_to_cartesian: output grid does not overlap the polar support");

        std::vector<Axis> axes = t.axes();
        axes[ir] = make_axis(kx_label(which), kx);
        axes[ip] = make_axis(ky_label(which), ky);
        SpectrumTensor out(axes);
        std::vector<std::uint8_t> out_mask(out.size(), 0);

        const auto si = t.strides(), so = out.strides();
        const auto shape = t.shape();
        // enumerate all index combinations of the remaining axes
        std::vector<std::size_t> others;
        for (std::size_t i = 0; i < shape.size(); ++i)
            if (i != ir && i != ip)
                others.push_back(i);
        std::size_t n_other = 1;
        for (auto i : others)
            n_other *= shape[i];

        const std::size_t nr = shape[ir], np = shape[ip], nx = kx.size(), ny = ky.size();
        std::vector<cdouble> plane(nr * np), res(nx * ny);
        std::vector<std::uint8_t> pmask(nr * np), rmask(nx * ny);
        for (std::size_t o = 0; o < n_other; ++o)
        {
            std::size_t bi = 0, bo = 0, rem = o;
            for (std::size_t q = others.size(); q-- > 0;)
            {
                const std::size_t ax_i = others[q];
                const std::size_t v = rem % shape[ax_i];
                rem /= shape[ax_i];
                bi += v * si[ax_i];
                bo += v * so[ax_i];
            }
            for (std::size_t r = 0; r < nr; ++r)
                for (std::size_t p = 0; p < np; ++p)
                {
                    const std::size_t f = bi + r * si[ir] + p * si[ip];
                    plane[r * np + p] = t.data()[f];
                    pmask[r * np + p] = t.is_valid(f) ? 1 : 0;
                }
            interp.apply(plane.data(), res.data(), t.mask().empty() ? nullptr : pmask.data(), rmask.data());
            for (std::size_t x = 0; x < nx; ++x)
                for (std::size_t y = 0; y < ny; ++y)
                {
                    const std::size_t f = bo + x * so[ir] + y * so[ip];
                    out.data()[f] = res[x * ny + y];
                    out_mask[f] = rmask[x * ny + y];
                }
        }
        out.set_mask(std::move(out_mask));
        return out;
    }
}
