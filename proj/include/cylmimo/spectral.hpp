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

#ifndef CYLMIMO_SPECTRAL_H
#define CYLMIMO_SPECTRAL_H

#include "cylmimo/geometry.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cylmimo
{
    enum class AxisLabel
    {
        z_T,
        z_R,
        theta_T,
        theta_R,
        k,
        k_zT,
        k_zR,
        xi_T,
        xi_R,
        k_T,
        k_R,
        k_rhoT,
        k_rhoR,
        k_xT,
        k_yT,
        k_xR,
        k_yR,
        k_x,
        k_y,
        k_z
    };

    std::string to_string(AxisLabel a);

    // z_T <-> k_zT, z_R <-> k_zR, theta_T <-> xi_T, theta_R <-> xi_R; throws for other labels
    AxisLabel fourier_dual(AxisLabel a);
    bool is_spatial(AxisLabel a);

    struct Axis
    {
        AxisLabel label = AxisLabel::k;
        std::vector<double> coords; // strictly increasing

        // Bookkeeping of the transform that produced this axis (if any)
        double dual_origin = 0.0;     // first coordinate of the conjugate axis
        double dual_spacing = 0.0;    // sample spacing of the conjugate axis
        std::size_t dual_count = 0;   // samples of the conjugate axis before padding
        std::size_t padding = 0;      // trailing zeros appended before the transform
        bool phase_referenced = false; // spectrum carries exp(-j kappa dual_origin)

        std::size_t size() const { return coords.size(); }
        double spacing() const;
    };

    Axis make_axis(AxisLabel label, std::vector<double> coords);
    Axis make_uniform_axis(AxisLabel label, double first, double spacing, std::size_t n);

    // Dense complex tensor with labelled axes, row-major (last axis fastest)
    class SpectrumTensor
    {
    public:
        SpectrumTensor() = default;
        explicit SpectrumTensor(std::vector<Axis> axes);                              // zeros
        SpectrumTensor(std::vector<Axis> axes, std::vector<cdouble> data);            // checked
        SpectrumTensor(std::vector<Axis> axes, std::vector<cdouble> data, std::vector<std::uint8_t> valid);

        const std::vector<Axis> &axes() const { return ax; }
        const Axis &axis(AxisLabel l) const { return ax[axis_index(l)]; }
        std::size_t axis_index(AxisLabel l) const; // throws validation_error if missing
        bool has_axis(AxisLabel l) const;
        std::size_t rank() const { return ax.size(); }

        std::vector<std::size_t> shape() const;
        std::vector<std::size_t> strides() const;
        std::size_t size() const { return buf.size(); }

        const std::vector<cdouble> &data() const { return buf; }
        std::vector<cdouble> &data() { return buf; }

        // Validity mask; empty means every cell is valid
        const std::vector<std::uint8_t> &mask() const { return valid; }
        bool is_valid(std::size_t flat) const { return valid.empty() || valid[flat] != 0; }
        void set_mask(std::vector<std::uint8_t> m);

        std::size_t flat_index(std::span<const std::size_t> idx) const;
        cdouble at(std::initializer_list<std::size_t> idx) const;
        cdouble &at(std::initializer_list<std::size_t> idx);

        void replace_axis(std::size_t i, Axis a); // coordinate relabelling, same length required

    private:
        std::vector<Axis> ax;
        std::vector<cdouble> buf;
        std::vector<std::uint8_t> valid;
    };

    enum class Direction
    {
        forward,
        inverse
    };

    struct DftOptions
    {
        std::size_t fft_size = 0;     // forward only: 0 = axis length; must be >= axis length
        bool pad_pow2 = false;        // forward only: round fft size up to a power of two
        bool phase_reference = false; // forward only: multiply by exp(-j kappa x0)
        bool keep_padding = false;    // inverse only: keep the padded tail instead of truncating
    };

    // Forward: X(kappa_m) = sum_n x_n exp(-j kappa_m n dx) with kappa_m = (m - floor(M/2)) 2pi/(M dx),
    // optionally times exp(-j kappa_m x0). Inverse undoes it exactly, including the 1/M factor.
    SpectrumTensor dft_axis(const SpectrumTensor &t, AxisLabel axis, Direction dir, const DftOptions &opt = {});

    // Inserts P-1 zeros after every sample; spacing becomes dx/P and length N*P
    SpectrumTensor zero_fill(const SpectrumTensor &t, AxisLabel axis, std::size_t factor_P);

    // Appends zeros so the axis has n samples (n >= current length); coordinates continue uniformly
    SpectrumTensor pad_axis(const SpectrumTensor &t, AxisLabel axis, std::size_t n);

    // Asymptotic cylindrical-wave factor exp(j sqrt(k_rho^2 R0^2 - xi^2)) exp(-j pi xi / 2),
    // exactly 0 for xi^2 >= k_rho^2 R0^2. Accepts non-integer orders.
    cdouble hankel_factor(double xi, double k_rho, double R0);

    enum class Taper
    {
        rectangular,
        raised_cosine
    };

    struct SpectralWindow
    {
        struct Band
        {
            AxisLabel axis;
            double lo, hi;
        };
        std::vector<Band> bands;
        Taper taper = Taper::rectangular;
        double rolloff = 0.0; // fraction of the band width used by each cosine edge, in [0, 0.5]

        // Weight of the band at coordinate x (0 outside)
        static double weight(const Band &b, Taper taper, double rolloff, double x);
    };

    SpectrumTensor apply_window(const SpectrumTensor &t, const SpectralWindow &w);

    // Half-extent of the k_z support seen by an aperture of length L from a target of extent D at range R0
    double support_bound_kz(double R0, double L, double D, double k);

    // Bilinear resampling from a polar (k_rho, phi) grid onto a Cartesian grid with
    // k_x = k_rho sin(phi), k_y = -k_rho cos(phi). The radial grid may be non-uniform.
    // With a reference point (x_ref, y_ref) the linear phase exp(-j k . r_ref) is removed before
    // interpolating and restored afterwards, so spectra of off-center targets are interpolated
    // as slowly varying functions. The bilinear weights stay real; the two phase factors are
    // kept per source sample and per output cell.
    class PolarInterpolator
    {
    public:
        struct Entry
        {
            std::uint32_t src; // radial_index * n_phi + phi_index
            double w;
        };

        PolarInterpolator(const std::vector<double> &k_rho, const std::vector<double> &phi,
                          const std::vector<double> &kx, const std::vector<double> &ky,
                          double x_ref = 0.0, double y_ref = 0.0);

        std::size_t n_src() const { return n_rho * n_phi; }
        std::size_t n_dst() const { return nx * ny; }
        std::size_t n_valid() const;

        // Per output cell (kx-major): begin..end into entries(); empty range = outside polar support
        std::span<const Entry> row(std::size_t dst) const
        {
            return {ent.data() + row_ptr[dst], ent.data() + row_ptr[dst + 1]};
        }
        bool valid(std::size_t dst) const { return ok[dst] != 0; }

        // exp(+j k . r_ref) per source sample and exp(-j k . r_ref) per output cell; empty without reference
        const std::vector<cdouble> &source_phase() const { return src_rot; }
        const std::vector<cdouble> &cell_phase() const { return dst_rot; }

        // dst[c] = sum_w w * src[...]; invalid cells get exactly 0. src_valid (optional) marks usable inputs
        void apply(const cdouble *src, cdouble *dst, const std::uint8_t *src_valid = nullptr,
                   std::uint8_t *dst_valid = nullptr) const;

    private:
        std::size_t n_rho, n_phi, nx, ny;
        std::vector<std::uint32_t> row_ptr;
        std::vector<Entry> ent;
        std::vector<std::uint8_t> ok;
        std::vector<cdouble> src_rot, dst_rot;
    };

    // Replaces the (k_rho, theta) axes of the chosen side by (k_x, k_y) axes of out_grid.
    // Cells whose preimage lies outside the sampled region are 0 and masked.
    SpectrumTensor interp_polar_to_cartesian(const SpectrumTensor &t, Side which,
                                             const std::vector<double> &kx, const std::vector<double> &ky);

    // Helpers for axis labels of a side
    AxisLabel z_label(Side s);
    AxisLabel theta_label(Side s);
    AxisLabel kz_label(Side s);
    AxisLabel xi_label(Side s);
    AxisLabel kside_label(Side s);
    AxisLabel krho_label(Side s);
    AxisLabel kx_label(Side s);
    AxisLabel ky_label(Side s);
}

#endif
