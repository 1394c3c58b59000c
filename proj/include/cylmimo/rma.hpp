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

#ifndef CYLMIMO_RMA_H
#define CYLMIMO_RMA_H

#include "cylmimo/forward_model.hpp"
#include "cylmimo/spectral.hpp"

#include <array>
#include <string>
#include <vector>

namespace cylmimo
{
    // Uniform Cartesian voxel grid, index order [x][y][z]
    struct GridSpec
    {
        Vec3 center{0.0, 0.0, 0.0};
        std::array<std::size_t, 3> n{64, 64, 64};
        Vec3 voxel{0.004, 0.004, 0.004};

        std::vector<double> axis(int dim) const;
        double extent(int dim) const { return double(n[dim]) * voxel[dim]; }
        void validate() const;
    };

    // Voxel = fraction * theoretical resolution per axis, n^3 samples centered on center
    GridSpec default_grid(const ArrayLayout &layout, const FrequencyGrid &freqs,
                          std::size_t n = 64, double fraction = 0.25, Vec3 center = {0.0, 0.0, 0.0});

    class ImageVolume
    {
    public:
        ImageVolume(GridSpec grid, std::string method, std::string config_hash);
        ImageVolume(GridSpec grid, std::string method, std::string config_hash, std::vector<cdouble> data);

        const GridSpec &grid() const { return spec; }
        const std::vector<double> &x() const { return ax[0]; }
        const std::vector<double> &y() const { return ax[1]; }
        const std::vector<double> &z() const { return ax[2]; }
        const std::vector<double> &coords(int dim) const { return ax[dim]; }
        const std::string &method() const { return tag; }
        const std::string &config_hash() const { return hash; }

        std::size_t index(std::size_t ix, std::size_t iy, std::size_t iz) const
        {
            return (ix * spec.n[1] + iy) * spec.n[2] + iz;
        }
        cdouble operator()(std::size_t ix, std::size_t iy, std::size_t iz) const { return buf[index(ix, iy, iz)]; }
        cdouble &operator()(std::size_t ix, std::size_t iy, std::size_t iz) { return buf[index(ix, iy, iz)]; }
        const std::vector<cdouble> &data() const { return buf; }
        std::vector<cdouble> &data() { return buf; }

        // Index and position of the largest magnitude (first occurrence in storage order)
        std::array<std::size_t, 3> peak_index() const;
        Vec3 peak_position() const;
        double max_abs() const;

        // |g| along one axis through the voxel idx (dim 0 = x, 1 = y, 2 = z)
        std::vector<double> profile(int dim, const std::array<std::size_t, 3> &idx) const;

    private:
        GridSpec spec;
        std::array<std::vector<double>, 3> ax;
        std::string tag, hash;
        std::vector<cdouble> buf;
    };

    enum class HankelModel
    {
        asymptotic,       // phase sqrt(z^2 - xi^2) (large-argument Hankel form)
        stationary_phase  // phase sqrt(z^2 - xi^2) + xi asin(xi / z)
    };

    struct RmaConfig
    {
        std::size_t zero_fill_P_vertical = 0; // 0 = take the layout ratio
        std::size_t zero_fill_P_arc = 0;      // 0 = take the layout ratio
        bool spectrum_filter = true;          // automatic support window from support_bound_kz
        double target_extent = 0.1;           // D used by the automatic window (m)
        double evanescent_guard = 0.95;       // keep orders with |xi| < guard * k_rho R0
        HankelModel hankel = HankelModel::stationary_phase;
        double interp_oversampling = 1.75; // image period / largest transverse box extent (lower bound, see below)
        std::size_t angular_fft_size = 0;   // 0 = enough margin for every direction seen from the output box
        GridSpec grid;

        void validate(const ArrayLayout &layout) const;
        std::size_t P_vertical(const ArrayLayout &layout) const;
        std::size_t P_arc(const ArrayLayout &layout) const;
        std::string hash() const; // stable text hash of every field
    };

    // Which side carries the sparse (larger) spacing along z / along the arc
    Side sparse_side_z(const ArrayLayout &layout);
    Side sparse_side_arc(const ArrayLayout &layout);

    // Echo as a labelled tensor with axes (k, theta_T, theta_R, z_T, z_R)
    SpectrumTensor echo_tensor(const EchoTensor &e);

    // Zero-fills the sparse z axis, pads both to a common power of two and transforms to (k_zT, k_zR)
    SpectrumTensor vertical_spectra(const EchoTensor &e, const RmaConfig &cfg);

    struct AngularOptions
    {
        std::size_t P_T = 1, P_R = 1;  // zero-fill factors applied to theta_T / theta_R first
        std::size_t fft_size = 0;      // 0 = next power of two of the longer angular axis
        double guard = 0.95;
        HankelModel model = HankelModel::stationary_phase;
    };

    // Deconvolution kernel for one side: 1 / (k_rho * conj(H e^{j pi xi/2})) or its stationary-phase variant
    cdouble angular_kernel(double xi, double k, double kz, double R0, double guard, HankelModel model);

    SpectrumTensor angular_deconvolve(const SpectrumTensor &t, double R0, const AngularOptions &opt = {});

    // k -> (k_T, k_R) with k_T + k_R = k; cells off the populated anti-diagonals are 0 and masked
    SpectrumTensor dimension_increase(const SpectrumTensor &t);

    // Adjoint companion: average along anti-diagonals back to the k axis
    SpectrumTensor anti_diagonal_reduce(const SpectrumTensor &t);

    // Replaces k_T (k_R) by k_rho = sqrt(4 k_T^2 - k_z^2) (the k_z axis of that side must have one sample)
    // and shifts theta by pi so the axis holds the plane-wave direction phi
    SpectrumTensor to_polar_wavenumber(const SpectrumTensor &t, Side side);

    SpectrumTensor reduce_to_image_spectrum(const SpectrumTensor &t, const RmaConfig &cfg);

    // Inverse transform of a (k_x, k_y, k_z) spectrum evaluated on the voxel grid:
    // g(r) = sum G(K) exp(+j K . r) / (number of spectral cells)
    ImageVolume image_from_spectrum(const SpectrumTensor &G, const GridSpec &grid,
                                    const std::string &method, const std::string &hash);

    // Shared Cartesian wavenumber grid of both sides for a given reconstruction
    struct CartesianGrid
    {
        std::vector<double> kx, ky;
    };

    CartesianGrid shared_cartesian_grid(double rho_min, double rho_max, double phi_min, double phi_max, double dk);

    namespace detail
    {
        // Fused dimension increase + both interpolations + pairwise reduction for one (k_zT, k_zR) slice.
        // A: deconvolved slice [k][theta_T][theta_R]; interpolators map (k_T or k_R index, theta index)
        // to the shared (k_x, k_y) grid of size nx * ny; plane has (2nx-1)(2ny-1) cells, k_x-major.
        // Source phases of the interpolators are applied here, cell phases are left to the caller.
        void accumulate_slice(const std::vector<cdouble> &A, std::size_t Nk, std::size_t MT, std::size_t MR,
                              const PolarInterpolator &interpT, const PolarInterpolator &interpR,
                              std::size_t nx, std::size_t ny, cdouble *plane);

        // Kernel of one side in natural FFT order: entry m belongs to xi = ((m + M/2) mod M - M/2) 2pi / (M dtheta)
        std::vector<cdouble> angular_kernel_table(const std::vector<double> &k, double kz, double R0,
                                                  double dtheta, std::size_t M, double guard, HankelModel model);

        // Same result as angular_deconvolve on one (k_zT, k_zR) slice [k][theta_T][theta_R], written to
        // out[k][M][M]. KT, KR: tables [k][M] from angular_kernel_table.
        void angular_deconvolve_slice(const cdouble *in, std::size_t Nk, std::size_t nT, std::size_t nR,
                                      std::size_t P_T, std::size_t P_R, std::size_t M,
                                      const cdouble *KT, const cdouble *KR, std::vector<cdouble> &out);
    }

    ImageVolume reconstruct_rma(const EchoTensor &e, const ArrayLayout &layout, const RmaConfig &cfg);
}

#endif
