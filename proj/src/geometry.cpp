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

#include "cylmimo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace cylmimo
{
    bool is_uniform(const std::vector<double> &v, double rel_tol)
    {
        if (v.size() < 2)
            return true;
        const double d = (v.back() - v.front()) / double(v.size() - 1);
        if (!(d > 0.0))
            return false;
        for (std::size_t i = 0; i < v.size(); ++i)
        {
            if (i > 0 && !(v[i] > v[i - 1]))
                return false;
            if (std::abs(v[i] - (v.front() + d * double(i))) > rel_tol * d)
                return false;
        }
        return true;
    }

    std::vector<double> centered_grid(std::size_t n, double spacing)
    {
        std::vector<double> g(n);
        const double c = 0.5 * double(n - 1);
        for (std::size_t i = 0; i < n; ++i)
            g[i] = (double(i) - c) * spacing;
        return g;
    }

    std::size_t integer_ratio(double a, double b, double rel_tol)
    {
        if (!(a > 0.0) || !(b > 0.0))
            return 0;
        const double r = std::max(a, b) / std::min(a, b);
        const double n = std::round(r);
        if (std::abs(r - n) > rel_tol * n)
            return 0;
        return std::size_t(n);
    }

    static double axis_spacing(const std::vector<double> &v)
    {
        return v.size() < 2 ? 0.0 : (v.back() - v.front()) / double(v.size() - 1);
    }

    static std::size_t checked_ratio(const std::vector<double> &a, const std::vector<double> &b, const char *what)
    {
        const double da = axis_spacing(a), db = axis_spacing(b);
        if (da == 0.0 || db == 0.0)
            return 1; // a single element imposes no constraint
        std::size_t P = integer_ratio(da, db);
        if (P == 0)
            throw validation_error(std::string("ArrayLayout: ") + what +
                                   " spacing ratio between tx and rx is not an integer (zero-filling requires an integer factor)");
        return P;
    }

    ArrayLayout::ArrayLayout(double radius_R0,
                             std::vector<double> tx_angles, std::vector<double> rx_angles,
                             std::vector<double> tx_heights, std::vector<double> rx_heights)
        : R0(radius_R0), tx_ang(std::move(tx_angles)), rx_ang(std::move(rx_angles)),
          tx_z(std::move(tx_heights)), rx_z(std::move(rx_heights))
    {
        if (!(R0 > 0.0) || !std::isfinite(R0))
            throw validation_error("ArrayLayout: radius_R0 must be positive and finite");
        const std::vector<double> *axes[] = {&tx_ang, &rx_ang, &tx_z, &rx_z};
        const char *names[] = {"tx_angles", "rx_angles", "tx_heights", "rx_heights"};
        for (int i = 0; i < 4; ++i)
        {
            if (axes[i]->empty())
                throw validation_error(std::string("ArrayLayout: ") + names[i] + " is empty");
            for (double x : *axes[i])
                if (!std::isfinite(x))
                    throw validation_error(std::string("ArrayLayout: ") + names[i] + " contains non-finite values");
            if (!is_uniform(*axes[i]))
                throw validation_error(std::string("ArrayLayout: ") + names[i] + " is not strictly increasing and uniformly spaced");
        }
        for (double a : tx_ang)
            if (std::abs(a) >= pi)
                throw validation_error("ArrayLayout: tx angle outside (-pi, pi)");
        for (double a : rx_ang)
            if (std::abs(a) >= pi)
                throw validation_error("ArrayLayout: rx angle outside (-pi, pi)");
        P_arc = checked_ratio(tx_ang, rx_ang, "arc");
        P_z = checked_ratio(tx_z, rx_z, "vertical");
    }

    ArrayLayout ArrayLayout::centered(double radius_R0,
                                      std::size_t n_tx_arc, double tx_spacing_arc,
                                      std::size_t n_rx_arc, double rx_spacing_arc,
                                      std::size_t n_tx_z, double tx_spacing_z,
                                      std::size_t n_rx_z, double rx_spacing_z)
    {
        if (!(radius_R0 > 0.0))
            throw validation_error("ArrayLayout: radius_R0 must be positive");
        return ArrayLayout(radius_R0,
                           centered_grid(n_tx_arc, tx_spacing_arc / radius_R0),
                           centered_grid(n_rx_arc, rx_spacing_arc / radius_R0),
                           centered_grid(n_tx_z, tx_spacing_z),
                           centered_grid(n_rx_z, rx_spacing_z));
    }

    double ArrayLayout::spacing_angle(Side s) const
    {
        return axis_spacing(angles(s));
    }

    double ArrayLayout::spacing_z(Side s) const
    {
        return axis_spacing(heights(s));
    }

    double ArrayLayout::angular_extent() const
    {
        double lo = std::min(tx_ang.front(), rx_ang.front());
        double hi = std::max(tx_ang.back(), rx_ang.back());
        return hi - lo;
    }

    double ArrayLayout::height_extent() const
    {
        double lo = std::min(tx_z.front(), rx_z.front());
        double hi = std::max(tx_z.back(), rx_z.back());
        return hi - lo;
    }

    Scene::Scene(std::vector<Scatterer> s) : items(std::move(s))
    {
        for (const auto &sc : items)
        {
            for (double c : sc.position)
                if (!std::isfinite(c))
                    throw validation_error("Scene: non-finite scatterer position");
            if (!std::isfinite(sc.reflectivity.real()) || !std::isfinite(sc.reflectivity.imag()))
                throw validation_error("Scene: non-finite reflectivity");
        }
    }

    void Scene::check_inside(double radius_R0) const
    {
        for (const auto &sc : items)
        {
            double rho = std::hypot(sc.position[0], sc.position[1]);
            if (!(rho < radius_R0))
                throw validation_error("Scene: scatterer at rho = " + std::to_string(rho) +
                                       " m lies outside the cylinder of radius " + std::to_string(radius_R0) + " m");
        }
    }

    Scene Scene::scaled(cdouble alpha) const
    {
        std::vector<Scatterer> out = items;
        for (auto &s : out)
            s.reflectivity *= alpha;
        return Scene(std::move(out));
    }

    Scene Scene::merged(const Scene &other) const
    {
        std::vector<Scatterer> out = items;
        out.insert(out.end(), other.items.begin(), other.items.end());
        return Scene(std::move(out));
    }

    Scene load_scene(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw io_error("cannot open scene file '" + path + "'");
        std::vector<Scatterer> items;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line))
        {
            ++line_no;
            if (auto p = line.find('#'); p != std::string::npos)
                line.erase(p);
            if (line.find_first_not_of(" \t\r") == std::string::npos)
                continue;
            std::replace(line.begin(), line.end(), ',', ' ');
            std::istringstream ss(line);
            double v[5];
            for (double &x : v)
                if (!(ss >> x))
                    throw validation_error("scene file '" + path + "' line " + std::to_string(line_no) +
                                           ": expected x,y,z,re,im");
            std::string extra;
            if (ss >> extra)
                throw validation_error("scene file '" + path + "' line " + std::to_string(line_no) +
                                       ": trailing fields");
            items.push_back({{v[0], v[1], v[2]}, {v[3], v[4]}});
        }
        return Scene(std::move(items));
    }

    void save_scene(const Scene &scene, const std::string &path)
    {
        std::ofstream out(path);
        if (!out)
            throw io_error("cannot write scene file '" + path + "'");
        out << "# x,y,z,re,im\n"
            << std::setprecision(17);
        for (const auto &s : scene.scatterers())
            out << s.position[0] << ',' << s.position[1] << ',' << s.position[2] << ','
                << s.reflectivity.real() << ',' << s.reflectivity.imag() << '\n';
    }

    FrequencyGrid::FrequencyGrid(double start_hz, double stop_hz, std::size_t count)
        : f0(start_hz), f1(stop_hz), n(count)
    {
        if (!(start_hz > 0.0) || !(stop_hz > start_hz) || !std::isfinite(stop_hz))
            throw validation_error("FrequencyGrid: requires stop_hz > start_hz > 0");
        if (count < 2)
            throw validation_error("FrequencyGrid: count must be at least 2");
    }

    double FrequencyGrid::step_hz() const
    {
        return (f1 - f0) / double(n - 1);
    }

    double FrequencyGrid::frequency(std::size_t i) const
    {
        return f0 + step_hz() * double(i);
    }

    double FrequencyGrid::wavenumber(std::size_t i) const
    {
        return 2.0 * pi * frequency(i) / speed_of_light;
    }

    std::vector<double> FrequencyGrid::wavenumbers() const
    {
        std::vector<double> k(n);
        for (std::size_t i = 0; i < n; ++i)
            k[i] = wavenumber(i);
        return k;
    }

    Vec3 antenna_position(const ArrayLayout &layout, Side side, std::size_t angle_index, std::size_t height_index)
    {
        const auto &ang = layout.angles(side);
        const auto &hgt = layout.heights(side);
        if (angle_index >= ang.size() || height_index >= hgt.size())
            throw validation_error("antenna_position: index out of range");
        const double th = ang[angle_index], R0 = layout.radius();
        return {R0 * std::sin(th), -R0 * std::cos(th), hgt[height_index]};
    }

    double two_way_distance(const Vec3 &tx, const Vec3 &rx, const Vec3 &target)
    {
        auto dist = [](const Vec3 &a, const Vec3 &b)
        {
            double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
            return std::sqrt(dx * dx + dy * dy + dz * dz);
        };
        return dist(tx, target) + dist(rx, target);
    }
}
