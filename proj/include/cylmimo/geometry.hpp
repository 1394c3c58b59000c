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

#ifndef CYLMIMO_GEOMETRY_H
#define CYLMIMO_GEOMETRY_H

#include "cylmimo/common.hpp"

#include <string>
#include <vector>

namespace cylmimo
{
    enum class Side
    {
        tx,
        rx
    };

    // True when v is strictly increasing and the worst deviation from the mean
    // spacing is below rel_tol * spacing
    bool is_uniform(const std::vector<double> &v, double rel_tol = 1e-9);

    // Uniform grid of n samples centered on zero
    std::vector<double> centered_grid(std::size_t n, double spacing);

    // Integer ratio between two spacings (larger / smaller), or 0 if not an integer within rel_tol
    std::size_t integer_ratio(double a, double b, double rel_tol = 1e-6);

    class ArrayLayout
    {
    public:
        // Angles in radians measured from the -y axis, heights in meters.
        // Throws validation_error if any invariant is violated.
        ArrayLayout(double radius_R0,
                    std::vector<double> tx_angles, std::vector<double> rx_angles,
                    std::vector<double> tx_heights, std::vector<double> rx_heights);

        // Centered aperture from element counts and spacings; arc spacings are arc lengths (m)
        static ArrayLayout centered(double radius_R0,
                                    std::size_t n_tx_arc, double tx_spacing_arc,
                                    std::size_t n_rx_arc, double rx_spacing_arc,
                                    std::size_t n_tx_z, double tx_spacing_z,
                                    std::size_t n_rx_z, double rx_spacing_z);

        double radius() const { return R0; }
        const std::vector<double> &angles(Side s) const { return s == Side::tx ? tx_ang : rx_ang; }
        const std::vector<double> &heights(Side s) const { return s == Side::tx ? tx_z : rx_z; }
        double spacing_angle(Side s) const;
        double spacing_arc(Side s) const { return R0 * spacing_angle(s); }
        double spacing_z(Side s) const;

        // Sparse/dense spacing ratio (integer >= 1) along the arc and along z
        std::size_t ratio_arc() const { return P_arc; }
        std::size_t ratio_z() const { return P_z; }

        // Full angle subtended by the union of both arcs, and by the union of both columns at R0
        double angular_extent() const;
        double height_extent() const;

    private:
        double R0;
        std::vector<double> tx_ang, rx_ang, tx_z, rx_z;
        std::size_t P_arc = 1, P_z = 1;
    };

    struct Scatterer
    {
        Vec3 position;
        cdouble reflectivity;
    };

    class Scene
    {
    public:
        Scene() = default;
        explicit Scene(std::vector<Scatterer> s);

        const std::vector<Scatterer> &scatterers() const { return items; }
        std::size_t size() const { return items.size(); }
        bool empty() const { return items.empty(); }

        // Throws validation_error if any scatterer lies on or outside the cylinder
        void check_inside(double radius_R0) const;

        Scene scaled(cdouble alpha) const;
        Scene merged(const Scene &other) const;

    private:
        std::vector<Scatterer> items;
    };

    // Scene file: one "x,y,z,re,im" per line, '#' starts a comment
    Scene load_scene(const std::string &path);
    void save_scene(const Scene &scene, const std::string &path);

    class FrequencyGrid
    {
    public:
        FrequencyGrid(double start_hz, double stop_hz, std::size_t count);

        double start() const { return f0; }
        double stop() const { return f1; }
        std::size_t count() const { return n; }
        double step_hz() const;
        double frequency(std::size_t i) const;
        double wavenumber(std::size_t i) const;
        std::vector<double> wavenumbers() const;
        double k_min() const { return wavenumber(0); }
        double k_max() const { return wavenumber(n - 1); }
        double k_center() const { return 0.5 * (k_min() + k_max()); }
        double lambda_center() const { return 2.0 * pi / k_center(); }
        double bandwidth() const { return f1 - f0; }

    private:
        double f0, f1;
        std::size_t n;
    };

    Vec3 antenna_position(const ArrayLayout &layout, Side side, std::size_t angle_index, std::size_t height_index);

    double two_way_distance(const Vec3 &tx, const Vec3 &rx, const Vec3 &target);
}

#endif
