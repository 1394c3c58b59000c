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

#include "cylmimo/experiment.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace cylmimo
{
    namespace
    {
        namespace pt = boost::property_tree;

        const std::map<std::string, std::set<std::string>> &allowed_keys()
        {
            static const std::map<std::string, std::set<std::string>> keys = {
                {"array", {"radius", "tx_arc_count", "tx_arc_spacing", "rx_arc_count", "rx_arc_spacing", "tx_z_count",
                           "tx_z_spacing", "rx_z_count", "rx_z_spacing"}},
                {"frequency", {"start_hz", "stop_hz", "count"}},
                {"scene", {"file"}},
                {"reconstruction", {"method", "zero_fill_P_vertical", "zero_fill_P_arc", "spectrum_filter", "target_extent",
                                    "evanescent_guard", "hankel_model", "interp_oversampling", "angular_fft_size"}},
                {"grid", {"n", "voxel_fraction", "center_x", "center_y", "center_z", "voxel_x", "voxel_y", "voxel_z"}},
                {"output", {"directory", "format_version"}},
                {"noise", {"sigma", "seed"}},
                {"beampattern", {"length", "radius", "frequency_hz", "method", "mode", "tx_spacing", "rx_spacing", "zero_fill",
                                 "spectrum_filter", "target_extent"}},
            };
            return keys;
        }

        class Reader
        {
        public:
            explicit Reader(const pt::ptree &t) : tree(t) {}

            template <class T>
            void get(const std::string &sec, const std::string &key, T &out) const
            {
                auto v = tree.get_optional<std::string>(pt::ptree::path_type(sec + "." + key, '.'));
                if (!v)
                    return;
                out = convert<T>(*v, sec + "." + key);
            }

        private:
            template <class T>
            static T convert(const std::string &s, const std::string &name)
            {
                if constexpr (std::is_same_v<T, std::string>)
                    return s;
                else if constexpr (std::is_same_v<T, bool>)
                {
                    if (s == "true" || s == "on" || s == "yes" || s == "1")
                        return true;
                    if (s == "false" || s == "off" || s == "no" || s == "0")
                        return false;
                    throw validation_error("config: '" + name + "' must be a boolean, got '" + s + "'");
                }
                else if constexpr (std::is_floating_point_v<T>)
                {
                    char *end = nullptr;
                    double v = std::strtod(s.c_str(), &end);
                    if (s.empty() || *end != '\0' || !std::isfinite(v))
                        throw validation_error("config: '" + name + "' must be a finite number, got '" + s + "'");
                    return T(v);
                }
                else
                {
                    char *end = nullptr;
                    long long v = std::strtoll(s.c_str(), &end, 10);
                    if (s.empty() || *end != '\0' || v < 0)
                        throw validation_error("config: '" + name + "' must be a non-negative integer, got '" + s + "'");
                    return T(v);
                }
            }

            const pt::ptree &tree;
        };
    }

    ExperimentConfig parse_config(const std::string &text, const std::string &base_dir)
    {
        pt::ptree tree;
        try
        {
            std::istringstream in(text);
            pt::ini_parser::read_ini(in, tree);
        }
        catch (const pt::ini_parser_error &e)
        {
            throw validation_error(std::string("config: ") + e.what());
        }

        for (const auto &[sec, body] : tree)
        {
            auto it = allowed_keys().find(sec);
            if (it == allowed_keys().end() || !body.data().empty())
                throw validation_error("config: unknown section or top-level key '" + sec + "'");
            for (const auto &kv : body)
                if (!it->second.count(kv.first))
                    throw validation_error("config: unknown key '" + kv.first + "' in section [" + sec + "]");
        }

        ExperimentConfig c;
        Reader r(tree);
        auto &L = c.layout;
        r.get("array", "radius", L.radius);
        r.get("array", "tx_arc_count", L.tx_arc_count);
        r.get("array", "tx_arc_spacing", L.tx_arc_spacing);
        r.get("array", "rx_arc_count", L.rx_arc_count);
        r.get("array", "rx_arc_spacing", L.rx_arc_spacing);
        r.get("array", "tx_z_count", L.tx_z_count);
        r.get("array", "tx_z_spacing", L.tx_z_spacing);
        r.get("array", "rx_z_count", L.rx_z_count);
        r.get("array", "rx_z_spacing", L.rx_z_spacing);

        r.get("frequency", "start_hz", c.freq_start_hz);
        r.get("frequency", "stop_hz", c.freq_stop_hz);
        r.get("frequency", "count", c.freq_count);

        std::string scene;
        r.get("scene", "file", scene);
        if (!scene.empty())
        {
            std::filesystem::path p(scene);
            c.scene_path = p.is_absolute() ? p.string() : (std::filesystem::path(base_dir) / p).lexically_normal().string();
        }

        r.get("reconstruction", "method", c.method);
        r.get("reconstruction", "zero_fill_P_vertical", c.rma.zero_fill_P_vertical);
        r.get("reconstruction", "zero_fill_P_arc", c.rma.zero_fill_P_arc);
        r.get("reconstruction", "spectrum_filter", c.rma.spectrum_filter);
        r.get("reconstruction", "target_extent", c.rma.target_extent);
        r.get("reconstruction", "evanescent_guard", c.rma.evanescent_guard);
        r.get("reconstruction", "interp_oversampling", c.rma.interp_oversampling);
        r.get("reconstruction", "angular_fft_size", c.rma.angular_fft_size);
        std::string model = "stationary_phase";
        r.get("reconstruction", "hankel_model", model);
        if (model == "stationary_phase")
            c.rma.hankel = HankelModel::stationary_phase;
        else if (model == "asymptotic")
            c.rma.hankel = HankelModel::asymptotic;
        else
            throw validation_error("config: reconstruction.hankel_model must be stationary_phase or asymptotic");

        r.get("grid", "n", c.grid.n);
        r.get("grid", "voxel_fraction", c.grid.voxel_fraction);
        r.get("grid", "center_x", c.grid.center[0]);
        r.get("grid", "center_y", c.grid.center[1]);
        r.get("grid", "center_z", c.grid.center[2]);
        {
            Vec3 v{0.0, 0.0, 0.0};
            const char *names[3] = {"voxel_x", "voxel_y", "voxel_z"};
            int given = 0;
            for (int d = 0; d < 3; ++d)
            {
                double before = v[d];
                r.get("grid", names[d], v[d]);
                given += v[d] != before;
            }
            if (given == 3)
                c.grid.voxel = v;
            else if (given != 0)
                throw validation_error("config: grid.voxel_x/y/z must be given together");
        }

        r.get("output", "directory", c.output_dir);
        r.get("output", "format_version", c.format_version);
        r.get("noise", "sigma", c.noise_sigma);
        r.get("noise", "seed", c.seed);

        auto &B = c.beam;
        r.get("beampattern", "length", B.length);
        r.get("beampattern", "radius", B.radius);
        r.get("beampattern", "frequency_hz", B.frequency_hz);
        r.get("beampattern", "method", B.method);
        r.get("beampattern", "mode", B.mode);
        r.get("beampattern", "tx_spacing", B.tx_spacing);
        r.get("beampattern", "rx_spacing", B.rx_spacing);
        r.get("beampattern", "zero_fill", B.zero_fill);
        r.get("beampattern", "spectrum_filter", B.spectrum_filter);
        r.get("beampattern", "target_extent", B.target_extent);
        return c;
    }

    ExperimentConfig load_config(const std::string &path)
    {
        std::ifstream f(path);
        if (!f)
            throw io_error("cannot open config file '" + path + "'");
        std::stringstream ss;
        ss << f.rdbuf();
        auto dir = std::filesystem::path(path).parent_path();
        ExperimentConfig c = parse_config(ss.str(), dir.empty() ? "." : dir.string());
        c.source = path;
        return c;
    }

    // ---------------------------------------------------------------------------------------------

    ArrayLayout ExperimentConfig::array() const
    {
        const auto &L = layout;
        return ArrayLayout::centered(L.radius, L.tx_arc_count, L.tx_arc_spacing, L.rx_arc_count, L.rx_arc_spacing,
                                     L.tx_z_count, L.tx_z_spacing, L.rx_z_count, L.rx_z_spacing);
    }

    FrequencyGrid ExperimentConfig::frequencies() const
    {
        return FrequencyGrid(freq_start_hz, freq_stop_hz, freq_count);
    }

    GridSpec ExperimentConfig::image_grid() const
    {
        GridSpec g = default_grid(array(), frequencies(), grid.n, grid.voxel_fraction, grid.center);
        if (grid.voxel)
            g.voxel = *grid.voxel;
        return g;
    }

    RmaConfig ExperimentConfig::rma_config() const
    {
        RmaConfig r = rma;
        r.grid = image_grid();
        return r;
    }

    void ExperimentConfig::validate(bool require_scene) const
    {
        if (format_version != 1)
            throw validation_error("config: unsupported format_version " + std::to_string(format_version));
        if (method != "rma" && method != "bp")
            throw validation_error("config: reconstruction.method must be rma or bp");
        if (!(noise_sigma >= 0.0))
            throw validation_error("config: noise.sigma must be non-negative");
        if (grid.n < 2)
            throw validation_error("config: grid.n must be at least 2");
        if (!(grid.voxel_fraction > 0.0))
            throw validation_error("config: grid.voxel_fraction must be positive");

        const auto &L = layout;
        if (!(L.radius > 0.0) || !(L.tx_arc_spacing > 0.0) || !(L.rx_arc_spacing > 0.0) || !(L.tx_z_spacing > 0.0) ||
            !(L.rx_z_spacing > 0.0))
            throw validation_error("config: radius and all spacings must be positive");
        if (L.tx_arc_count == 0 || L.rx_arc_count == 0 || L.tx_z_count == 0 || L.rx_z_count == 0)
            throw validation_error("config: element counts must be positive");

        // Grid matching: the zero-filled sparse axis must land on the dense axis grid
        if (integer_ratio(L.tx_z_spacing, L.rx_z_spacing) == 0)
            throw validation_error("config violates the grid-matching condition: vertical spacings " +
                                   std::to_string(L.tx_z_spacing) + " and " + std::to_string(L.rx_z_spacing) +
                                   " m do not have an integer ratio");
        if (integer_ratio(L.tx_arc_spacing, L.rx_arc_spacing) == 0)
            throw validation_error("config violates the grid-matching condition: arc spacings " +
                                   std::to_string(L.tx_arc_spacing) + " and " + std::to_string(L.rx_arc_spacing) +
                                   " m do not have an integer ratio");

        const FrequencyGrid fg = frequencies();
        const ArrayLayout lay = array();
        const double lambda_min = 2.0 * pi / fg.k_max();
        const double D = rma.target_extent;

        // Dense vertical subarray: no-aliasing spacing bound over the full height extent
        const double dz_dense = std::min(L.tx_z_spacing, L.rx_z_spacing);
        if (L.tx_z_count > 1 || L.rx_z_count > 1)
        {
            const double bound = nyquist_spacing(lambda_min, L.radius, lay.height_extent(), D);
            if (dz_dense > bound * (1.0 + 1e-9))
                throw validation_error("config violates the vertical no-aliasing spacing bound: dense spacing " +
                                       std::to_string(dz_dense) + " m exceeds " + std::to_string(bound) + " m");
        }
        // Dense arc subarray: angular sampling bound
        if ((L.tx_arc_count > 1 || L.rx_arc_count > 1) && D > 0.0)
        {
            const double dtheta = std::min(L.tx_arc_spacing, L.rx_arc_spacing) / L.radius;
            const double bound = angular_sampling_bound(lambda_min, D);
            if (dtheta > bound * (1.0 + 1e-9))
                throw validation_error("config violates the angular sampling bound: dense angular spacing " +
                                       std::to_string(dtheta) + " rad exceeds " + std::to_string(bound) + " rad");
        }

        rma_config().validate(lay);

        if (require_scene)
        {
            if (scene_path.empty())
                throw validation_error("config: scene.file is required");
            if (!std::filesystem::is_regular_file(scene_path))
                throw io_error("config: scene file '" + scene_path + "' does not exist");
        }
    }
}
