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
#include "cylmimo/experiment.hpp"
#include "cylmimo/io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace cylmimo;

namespace
{
    enum ExitCode
    {
        exit_ok = 0,
        exit_validation = 2,
        exit_numeric = 3,
        exit_io = 4
    };

    std::string join_path(const std::string &dir, const std::string &name)
    {
        return (std::filesystem::path(dir) / name).string();
    }

    // Writes text to a file, or to stdout when path is empty
    void emit(const std::string &text, const std::string &path)
    {
        if (path.empty())
        {
            std::cout << text;
            return;
        }
        std::filesystem::path p(path);
        if (p.has_parent_path())
            std::filesystem::create_directories(p.parent_path());
        std::ofstream f(path, std::ios::trunc);
        if (!f || !(f << text))
            throw io_error("cannot write '" + path + "'");
    }

    std::string fmt(double v, int prec = 6)
    {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.*f", prec, v);
        return buf;
    }

    void check_echo_matches(const EchoTensor &e, const ExperimentConfig &cfg)
    {
        const EchoTensor ref(cfg.frequencies(), cfg.array());
        auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(std::abs(a), std::abs(b)) + 1e-15; };
        auto close_v = [&](const std::vector<double> &a, const std::vector<double> &b)
        {
            if (a.size() != b.size())
                return false;
            for (std::size_t i = 0; i < a.size(); ++i)
                if (!close(a[i], b[i]))
                    return false;
            return true;
        };
        const auto &A = e.layout();
        const auto &B = ref.layout();
        const bool ok = e.shape() == ref.shape() && close(e.freqs().start(), ref.freqs().start()) &&
                        close(e.freqs().stop(), ref.freqs().stop()) && close(A.radius(), B.radius()) &&
                        close_v(A.angles(Side::tx), B.angles(Side::tx)) && close_v(A.angles(Side::rx), B.angles(Side::rx)) &&
                        close_v(A.heights(Side::tx), B.heights(Side::tx)) && close_v(A.heights(Side::rx), B.heights(Side::rx));
        if (!ok)
            throw validation_error("echo sidecar does not match the configured array layout / frequency grid");
    }

    // ---------------------------------------------------------------------------------------------

    int cmd_simulate(const std::string &config_path, std::string out)
    {
        const ExperimentConfig cfg = load_config(config_path);
        cfg.validate();
        const Scene scene = load_scene(cfg.scene_path);
        EchoTensor e = simulate_echo(scene, cfg.array(), cfg.frequencies());
        if (cfg.noise_sigma > 0.0)
            e = add_noise(e, cfg.noise_sigma, cfg.seed);
        if (out.empty())
            out = join_path(cfg.output_dir, "echo");
        write_echo(e, out);
        const auto d = e.shape();
        std::cout << "echo " << out << " shape " << d[0] << 'x' << d[1] << 'x' << d[2] << 'x' << d[3] << 'x' << d[4]
                  << " scatterers " << scene.size() << '\n';
        return exit_ok;
    }

    int cmd_reconstruct(const std::string &config_path, const std::string &echo, std::string method, std::string out)
    {
        const ExperimentConfig cfg = load_config(config_path);
        cfg.validate(false);
        if (method.empty())
            method = cfg.method;
        if (method != "rma" && method != "bp")
            throw validation_error("reconstruct: method must be rma or bp");
        // Everything is read and checked before any output is produced
        const EchoTensor e = read_echo(echo);
        check_echo_matches(e, cfg);
        const RmaConfig rc = cfg.rma_config();
        ImageVolume img = method == "rma" ? reconstruct_rma(e, e.layout(), rc) : reconstruct_bp(e, e.layout(), rc.grid);
        if (out.empty())
            out = join_path(cfg.output_dir, "image_" + method);
        write_image(img, out);
        const auto p = img.peak_position();
        std::cout << "image " << out << " method " << method << " peak " << fmt(p[0]) << ' ' << fmt(p[1]) << ' '
                  << fmt(p[2]) << '\n';
        return exit_ok;
    }

    int cmd_beampattern(const std::string &config_path, std::string out)
    {
        const ExperimentConfig cfg = load_config(config_path);
        const BeamParams &b = cfg.beam;
        BeamMethod method;
        if (b.method == "rma")
            method = BeamMethod::rma;
        else if (b.method == "bp")
            method = BeamMethod::bp;
        else
            throw validation_error("beampattern.method must be rma or bp");

        auto spec = [&](double spacing, ArrayRole role)
        {
            LinearArraySpec s;
            s.length_L = b.length;
            s.spacing = spacing;
            s.role = role;
            s.R0 = b.radius;
            s.frequency_hz = b.frequency_hz;
            s.validate();
            return s;
        };

        BeamPatternResult p;
        if (b.mode == "one_way" || b.mode == "monostatic")
        {
            BeamOptions o;
            o.spectrum_filter = b.spectrum_filter;
            o.target_extent_D = b.target_extent;
            p = beam_pattern(spec(b.tx_spacing, b.mode == "monostatic" ? ArrayRole::monostatic : ArrayRole::tx), method, o);
        }
        else if (b.mode == "two_way")
        {
            const LinearArraySpec tx = spec(b.tx_spacing, ArrayRole::tx), rx = spec(b.rx_spacing, ArrayRole::rx);
            BeamOptions to, ro;
            to.spectrum_filter = ro.spectrum_filter = b.spectrum_filter;
            to.target_extent_D = ro.target_extent_D = b.target_extent;
            if (b.zero_fill && method == BeamMethod::rma)
            {
                const std::size_t P = integer_ratio(std::max(b.tx_spacing, b.rx_spacing), std::min(b.tx_spacing, b.rx_spacing));
                if (P == 0)
                    throw validation_error("beampattern violates the grid-matching condition: spacing ratio is not an integer");
                BeamOptions &sparse = b.tx_spacing >= b.rx_spacing ? to : ro;
                sparse.zero_fill = P > 1;
                sparse.zero_fill_P = P;
            }
            p = beam_pattern(tx, to, rx, ro, method);
        }
        else
            throw validation_error("beampattern.mode must be one_way, two_way or monostatic");

        if (out.empty())
            out = join_path(cfg.output_dir, "beampattern.csv");
        const QualityMetrics m = measure_metrics(p);
        write_pattern_csv(p, out);
        const std::string mpath = std::filesystem::path(out).replace_extension("").string() + "_metrics.csv";
        write_metrics_csv(m, mpath);
        std::cout << "pattern " << out << " resolution_mm " << fmt(m.resolution * 1e3, 3) << " pslr_db "
                  << (m.pslr ? fmt(*m.pslr, 2) : std::string("NA")) << '\n';
        return exit_ok;
    }

    int cmd_design(double lambda0, double R0, double L, double D, const std::string &out)
    {
        if (!(lambda0 > 0.0) || !(R0 > 0.0) || !(L > 0.0) || !(D >= 0.0))
            throw validation_error("design: lambda0, R0, L must be positive and D non-negative");
        std::ostringstream s;
        s << "quantity,value\n";
        s << "nyquist_spacing_m," << format_double(nyquist_spacing(lambda0, R0, L, D)) << '\n';
        if (D > 0.0)
        {
            s << "angular_sampling_bound_rad," << format_double(angular_sampling_bound(lambda0, D)) << '\n';
            s << "grating_lobe_spacing_approx_m," << format_double(grating_lobe_spacing_approx(lambda0, R0, D)) << '\n';
            if (D <= L)
                s << "grating_lobe_spacing_m," << format_double(grating_lobe_spacing(lambda0, R0, L, D)) << '\n';
        }
        emit(s.str(), out);
        return exit_ok;
    }

    int cmd_table1(const std::string &out)
    {
        std::ostringstream s;
        s << "scenario,resolution_mm,pslr_db,grating_lobe_offset_m\n";
        for (const auto &r : table1_scenarios())
        {
            s << '"' << r.label << "\"," << fmt(r.metrics.resolution * 1e3, 3) << ','
              << (r.metrics.pslr ? fmt(*r.metrics.pslr, 2) : std::string("NA")) << ','
              << (r.metrics.grating_lobe_offset ? fmt(*r.metrics.grating_lobe_offset, 4) : std::string("NA")) << '\n';
        }
        emit(s.str(), out);
        return exit_ok;
    }

    int cmd_metrics(const std::string &profile, const std::string &out)
    {
        const BeamPatternResult p = read_pattern_csv(profile);
        const QualityMetrics m = measure_metrics(p);
        if (out.empty())
        {
            std::cout << "resolution_m,pslr_db,grating_lobe_offset_m\n"
                      << format_double(m.resolution) << ',' << (m.pslr ? format_double(*m.pslr) : "NA") << ','
                      << (m.grating_lobe_offset ? format_double(*m.grating_lobe_offset) : "NA") << '\n';
        }
        else
            write_metrics_csv(m, out);
        return exit_ok;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"cylmimo - near-field cylindrical MIMO millimeter-wave imaging"};
    app.require_subcommand(1);
    unsigned workers = 1;
    app.add_option("--workers", workers, "Upper bound on worker threads (results do not depend on it)")
        ->check(CLI::Range(1u, 1024u));

    std::string config, out, echo, method, profile;
    double lambda0 = 0.0, R0 = 0.0, L = 0.0, D = 0.0;

    auto *sim = app.add_subcommand("simulate", "Simulate the multistatic echo of the configured scene");
    sim->add_option("-c,--config", config, "Experiment config file")->required();
    sim->add_option("-o,--out", out, "Output stem (default <output.directory>/echo)");

    auto *rec = app.add_subcommand("reconstruct", "Reconstruct an image volume from an echo file");
    rec->add_option("-c,--config", config, "Experiment config file")->required();
    rec->add_option("-e,--echo", echo, "Echo stem written by simulate")->required();
    rec->add_option("-m,--method", method, "rma or bp (default from config)")->check(CLI::IsMember({"rma", "bp"}));
    rec->add_option("-o,--out", out, "Output stem (default <output.directory>/image_<method>)");

    auto *beam = app.add_subcommand("beampattern", "Linear-array point response from the [beampattern] section");
    beam->add_option("-c,--config", config, "Experiment config file")->required();
    beam->add_option("-o,--out", out, "Output CSV (default <output.directory>/beampattern.csv)");

    auto *des = app.add_subcommand("design", "Sampling bounds and grating-lobe spacing for a linear aperture");
    des->add_option("--lambda0", lambda0, "Wavelength (m)")->required();
    des->add_option("--R0", R0, "Range to the target (m)")->required();
    des->add_option("--L", L, "Aperture length (m)")->required();
    des->add_option("--D", D, "Target extent (m)");
    des->add_option("-o,--out", out, "Output CSV (default stdout)");

    auto *t1 = app.add_subcommand("table1", "Run the nine linear-array comparison scenarios");
    t1->add_option("-o,--out", out, "Output CSV (default stdout)");

    auto *met = app.add_subcommand("metrics", "Resolution / PSLR / grating-lobe offset of a 1-D profile CSV");
    met->add_option("-p,--profile", profile, "CSV with coordinate_m,magnitude_linear[,...] columns")->required();
    met->add_option("-o,--out", out, "Output CSV (default stdout)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_validation;
    }

    try
    {
        set_worker_count(workers);
        if (*sim)
            return cmd_simulate(config, out);
        if (*rec)
            return cmd_reconstruct(config, echo, method, out);
        if (*beam)
            return cmd_beampattern(config, out);
        if (*des)
            return cmd_design(lambda0, R0, L, D, out);
        if (*t1)
            return cmd_table1(out);
        if (*met)
            return cmd_metrics(profile, out);
    }
    catch (const validation_error &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return exit_validation;
    }
    catch (const io_error &e)
    {
        std::cerr << "I/O error: " << e.what() << '\n';
        return exit_io;
    }
    catch (const std::filesystem::filesystem_error &e)
    {
        std::cerr << "I/O error: " << e.what() << '\n';
        return exit_io;
    }
    catch (const std::exception &e)
    {
        std::cerr << "numeric error: " << e.what() << '\n';
        return exit_numeric;
    }
    return exit_validation;
}
