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

#include "cylmimo/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace cylmimo
{
    std::string format_double(double v)
    {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return buf;
    }

    namespace
    {
        using Header = std::map<std::string, std::string>;

        void ensure_parent(const std::string &path)
        {
            std::filesystem::path p(path);
            if (p.has_parent_path())
            {
                std::error_code ec;
                std::filesystem::create_directories(p.parent_path(), ec);
                if (ec)
                    throw io_error("cannot create directory '" + p.parent_path().string() + "': " + ec.message());
            }
        }

        std::ofstream open_out(const std::string &path, bool binary = false)
        {
            ensure_parent(path);
            std::ofstream f(path, binary ? std::ios::binary | std::ios::out | std::ios::trunc : std::ios::out | std::ios::trunc);
            if (!f)
                throw io_error("cannot open '" + path + "' for writing");
            return f;
        }

        std::string join(const std::vector<double> &v)
        {
            std::string s;
            for (std::size_t i = 0; i < v.size(); ++i)
            {
                if (i)
                    s += ' ';
                s += format_double(v[i]);
            }
            return s;
        }

        Header read_header(const std::string &path, const std::string &expected_format)
        {
            std::ifstream f(path);
            if (!f)
                throw io_error("cannot open sidecar '" + path + "'");
            Header h;
            std::string line;
            while (std::getline(f, line))
            {
                if (line.empty() || line[0] == '#')
                    continue;
                auto eq = line.find('=');
                if (eq == std::string::npos)
                    throw validation_error("sidecar '" + path + "': malformed line '" + line + "'");
                auto trim = [](std::string s)
                {
                    auto b = s.find_first_not_of(" \t\r"), e = s.find_last_not_of(" \t\r");
                    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
                };
                h[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
            }
            if (h["format"] != expected_format)
                throw validation_error("sidecar '" + path + "': expected format '" + expected_format + "'");
            if (h["version"] != std::to_string(format_version))
                throw validation_error("sidecar '" + path + "': unsupported format version '" + h["version"] + "'");
            return h;
        }

        const std::string &field(const Header &h, const std::string &key, const std::string &path)
        {
            auto it = h.find(key);
            if (it == h.end())
                throw validation_error("sidecar '" + path + "': missing key '" + key + "'");
            return it->second;
        }

        std::vector<double> numbers(const std::string &s, const std::string &what)
        {
            std::istringstream ss(s);
            std::vector<double> v;
            std::string tok;
            while (ss >> tok)
            {
                char *end = nullptr;
                double x = std::strtod(tok.c_str(), &end);
                if (end == tok.c_str() || *end != '\0' || !std::isfinite(x))
                    throw validation_error("sidecar: invalid number '" + tok + "' in '" + what + "'");
                v.push_back(x);
            }
            return v;
        }

        double number(const Header &h, const std::string &key, const std::string &path)
        {
            auto v = numbers(field(h, key, path), key);
            if (v.size() != 1)
                throw validation_error("sidecar '" + path + "': key '" + key + "' must hold one number");
            return v[0];
        }

        std::size_t count(const Header &h, const std::string &key, const std::string &path)
        {
            double v = number(h, key, path);
            if (v < 0.0 || v != std::floor(v))
                throw validation_error("sidecar '" + path + "': key '" + key + "' must be a non-negative integer");
            return std::size_t(v);
        }

        void write_complex_le(const std::vector<cdouble> &data, const std::string &path)
        {
            auto f = open_out(path, true);
            std::vector<std::uint32_t> words(2 * data.size());
            for (std::size_t i = 0; i < data.size(); ++i)
            {
                float re = float(data[i].real()), im = float(data[i].imag());
                std::uint32_t a, b;
                std::memcpy(&a, &re, 4);
                std::memcpy(&b, &im, 4);
                if constexpr (std::endian::native == std::endian::big)
                {
                    a = __builtin_bswap32(a);
                    b = __builtin_bswap32(b);
                }
                words[2 * i] = a;
                words[2 * i + 1] = b;
            }
            f.write(reinterpret_cast<const char *>(words.data()), std::streamsize(words.size() * 4));
            if (!f)
                throw io_error("write failed for '" + path + "'");
        }

        std::vector<cdouble> read_complex_le(const std::string &path, std::size_t n)
        {
            std::ifstream f(path, std::ios::binary);
            if (!f)
                throw io_error("cannot open '" + path + "'");
            f.seekg(0, std::ios::end);
            const auto bytes = std::size_t(f.tellg());
            if (bytes != n * 8)
                throw validation_error("binary '" + path + "' holds " + std::to_string(bytes) + " bytes, expected " +
                                       std::to_string(n * 8));
            f.seekg(0);
            std::vector<std::uint32_t> words(2 * n);
            f.read(reinterpret_cast<char *>(words.data()), std::streamsize(bytes));
            if (!f)
                throw io_error("read failed for '" + path + "'");
            std::vector<cdouble> out(n);
            for (std::size_t i = 0; i < n; ++i)
            {
                std::uint32_t a = words[2 * i], b = words[2 * i + 1];
                if constexpr (std::endian::native == std::endian::big)
                {
                    a = __builtin_bswap32(a);
                    b = __builtin_bswap32(b);
                }
                float re, im;
                std::memcpy(&re, &a, 4);
                std::memcpy(&im, &b, 4);
                out[i] = cdouble(re, im);
            }
            return out;
        }
    }

    // ---------------------------------------------------------------------------------------------

    void write_echo(const EchoTensor &e, const std::string &stem)
    {
        const auto d = e.shape();
        const ArrayLayout &L = e.layout();
        auto f = open_out(stem + ".hdr");
        f << "format = cylmimo-echo\n"
          << "version = " << format_version << "\n"
          << "order = k theta_T theta_R z_T z_R\n"
          << "shape = " << d[0] << ' ' << d[1] << ' ' << d[2] << ' ' << d[3] << ' ' << d[4] << "\n"
          << "sample_type = complex64_le\n"
          << "radius_R0 = " << format_double(L.radius()) << "\n"
          << "freq_start_hz = " << format_double(e.freqs().start()) << "\n"
          << "freq_stop_hz = " << format_double(e.freqs().stop()) << "\n"
          << "freq_count = " << e.freqs().count() << "\n"
          << "tx_spacing_arc = " << format_double(L.spacing_arc(Side::tx)) << "\n"
          << "rx_spacing_arc = " << format_double(L.spacing_arc(Side::rx)) << "\n"
          << "tx_spacing_z = " << format_double(L.spacing_z(Side::tx)) << "\n"
          << "rx_spacing_z = " << format_double(L.spacing_z(Side::rx)) << "\n"
          << "tx_angles = " << join(L.angles(Side::tx)) << "\n"
          << "rx_angles = " << join(L.angles(Side::rx)) << "\n"
          << "tx_heights = " << join(L.heights(Side::tx)) << "\n"
          << "rx_heights = " << join(L.heights(Side::rx)) << "\n";
        if (!f)
            throw io_error("write failed for '" + stem + ".hdr'");
        f.close();
        write_complex_le(e.data(), stem + ".bin");
    }

    EchoTensor read_echo(const std::string &stem)
    {
        const std::string hp = stem + ".hdr";
        const Header h = read_header(hp, "cylmimo-echo");
        if (field(h, "sample_type", hp) != "complex64_le")
            throw validation_error("sidecar '" + hp + "': unsupported sample_type");
        FrequencyGrid fg(number(h, "freq_start_hz", hp), number(h, "freq_stop_hz", hp), count(h, "freq_count", hp));
        ArrayLayout L(number(h, "radius_R0", hp), numbers(field(h, "tx_angles", hp), "tx_angles"),
                      numbers(field(h, "rx_angles", hp), "rx_angles"), numbers(field(h, "tx_heights", hp), "tx_heights"),
                      numbers(field(h, "rx_heights", hp), "rx_heights"));
        const auto shape = numbers(field(h, "shape", hp), "shape");
        EchoTensor probe(fg, L);
        const auto d = probe.shape();
        if (shape.size() != 5)
            throw validation_error("sidecar '" + hp + "': shape must list five sizes");
        for (int i = 0; i < 5; ++i)
            if (shape[i] != double(d[i]))
                throw validation_error("sidecar '" + hp + "': shape does not match the stored axes");
        return EchoTensor(fg, L, read_complex_le(stem + ".bin", probe.size()));
    }

    // ---------------------------------------------------------------------------------------------

    void write_mip_pgm(const ImageVolume &img, const std::string &path)
    {
        const auto &g = img.grid();
        const std::size_t nx = g.n[0], ny = g.n[1], nz = g.n[2];
        std::vector<double> mip(nx * nz, 0.0);
        for (std::size_t ix = 0; ix < nx; ++ix)
            for (std::size_t iy = 0; iy < ny; ++iy)
                for (std::size_t iz = 0; iz < nz; ++iz)
                    mip[ix * nz + iz] = std::max(mip[ix * nz + iz], std::abs(img(ix, iy, iz)));
        const double peak = *std::max_element(mip.begin(), mip.end());
        auto f = open_out(path, true);
        f << "P5\n"
          << nx << ' ' << nz << "\n255\n";
        std::vector<unsigned char> row(nx);
        for (std::size_t r = 0; r < nz; ++r)
        {
            const std::size_t iz = nz - 1 - r;
            for (std::size_t ix = 0; ix < nx; ++ix)
                row[ix] = peak > 0.0 ? (unsigned char)std::lround(255.0 * mip[ix * nz + iz] / peak) : 0;
            f.write(reinterpret_cast<const char *>(row.data()), std::streamsize(nx));
        }
        if (!f)
            throw io_error("write failed for '" + path + "'");
    }

    void write_peak_profiles_csv(const ImageVolume &img, const std::string &path)
    {
        const auto p = img.peak_index();
        const double peak = img.max_abs();
        auto f = open_out(path);
        f << "axis,coordinate_m,magnitude_linear,magnitude_db\n";
        const char *names[3] = {"x", "y", "z"};
        for (int d = 0; d < 3; ++d)
        {
            const auto prof = img.profile(d, p);
            for (std::size_t i = 0; i < prof.size(); ++i)
            {
                const double lin = peak > 0.0 ? prof[i] / peak : 0.0;
                f << names[d] << ',' << format_double(img.coords(d)[i]) << ',' << format_double(lin) << ','
                  << format_double(20.0 * std::log10(std::max(lin, 1e-300))) << '\n';
            }
        }
        if (!f)
            throw io_error("write failed for '" + path + "'");
    }

    void write_image(const ImageVolume &img, const std::string &stem)
    {
        const auto &g = img.grid();
        auto f = open_out(stem + ".hdr");
        f << "format = cylmimo-image\n"
          << "version = " << format_version << "\n"
          << "order = x y z\n"
          << "sample_type = complex64_le\n"
          << "method = " << img.method() << "\n"
          << "config_hash = " << img.config_hash() << "\n"
          << "shape = " << g.n[0] << ' ' << g.n[1] << ' ' << g.n[2] << "\n"
          << "center = " << join({g.center[0], g.center[1], g.center[2]}) << "\n"
          << "voxel = " << join({g.voxel[0], g.voxel[1], g.voxel[2]}) << "\n";
        if (!f)
            throw io_error("write failed for '" + stem + ".hdr'");
        f.close();
        write_complex_le(img.data(), stem + ".bin");
        write_mip_pgm(img, stem + "_mip.pgm");
        write_peak_profiles_csv(img, stem + "_profiles.csv");
    }

    ImageVolume read_image(const std::string &stem)
    {
        const std::string hp = stem + ".hdr";
        const Header h = read_header(hp, "cylmimo-image");
        const auto shape = numbers(field(h, "shape", hp), "shape");
        const auto center = numbers(field(h, "center", hp), "center");
        const auto voxel = numbers(field(h, "voxel", hp), "voxel");
        if (shape.size() != 3 || center.size() != 3 || voxel.size() != 3)
            throw validation_error("sidecar '" + hp + "': shape, center and voxel need three values");
        GridSpec g;
        for (int d = 0; d < 3; ++d)
        {
            if (shape[d] < 1 || shape[d] != std::floor(shape[d]))
                throw validation_error("sidecar '" + hp + "': invalid shape");
            g.n[d] = std::size_t(shape[d]);
            g.center[d] = center[d];
            g.voxel[d] = voxel[d];
        }
        g.validate();
        return ImageVolume(g, field(h, "method", hp), field(h, "config_hash", hp),
                           read_complex_le(stem + ".bin", g.n[0] * g.n[1] * g.n[2]));
    }

    // ---------------------------------------------------------------------------------------------

    void write_pattern_csv(const BeamPatternResult &p, const std::string &path)
    {
        auto f = open_out(path);
        f << "coordinate_m,magnitude_linear,magnitude_db\n";
        for (std::size_t i = 0; i < p.coords.size(); ++i)
            f << format_double(p.coords[i]) << ',' << format_double(p.linear[i]) << ',' << format_double(p.db[i]) << '\n';
        if (!f)
            throw io_error("write failed for '" + path + "'");
    }

    BeamPatternResult read_pattern_csv(const std::string &path)
    {
        std::ifstream f(path);
        if (!f)
            throw io_error("cannot open '" + path + "'");
        std::string line;
        if (!std::getline(f, line) || line.rfind("coordinate_m,magnitude_linear", 0) != 0)
            throw validation_error("profile CSV '" + path + "': expected header coordinate_m,magnitude_linear,...");
        std::vector<double> z;
        std::vector<cdouble> v;
        while (std::getline(f, line))
        {
            if (line.empty())
                continue;
            std::replace(line.begin(), line.end(), ',', ' ');
            std::istringstream ss(line);
            double a, b;
            if (!(ss >> a >> b))
                throw validation_error("profile CSV '" + path + "': malformed row");
            z.push_back(a);
            v.push_back(cdouble(b, 0.0));
        }
        if (!is_uniform(z, 1e-6))
            throw validation_error("profile CSV '" + path + "': coordinates must be uniform");
        return make_pattern(std::move(z), std::move(v), "csv");
    }

    void write_metrics_csv(const QualityMetrics &m, const std::string &path)
    {
        auto f = open_out(path);
        auto opt = [](const std::optional<double> &v)
        { return v ? format_double(*v) : std::string("NA"); };
        f << "resolution_m,pslr_db,grating_lobe_offset_m\n"
          << format_double(m.resolution) << ',' << opt(m.pslr) << ',' << opt(m.grating_lobe_offset) << '\n';
        if (!f)
            throw io_error("write failed for '" + path + "'");
    }
}
