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

#include <catch2/catch_amalgamated.hpp>

#include "cylmimo/io.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

using namespace cylmimo;
namespace fs = std::filesystem;

namespace
{
    const fs::path work = fs::temp_directory_path() / ("cylmimo_test_cli_" + std::to_string(::getpid()));

    struct Run
    {
        int code;
        std::string out, err;
    };

    std::string slurp(const fs::path &p)
    {
        std::ifstream f(p, std::ios::binary);
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
    }

    Run cli(const std::string &args)
    {
        fs::create_directories(work);
        const fs::path o = work / "stdout.txt", e = work / "stderr.txt";
        const std::string cmd = std::string("\"") + CYLMIMO_CLI_PATH + "\" " + args + " >\"" + o.string() + "\" 2>\"" +
                                e.string() + "\"";
        const int st = std::system(cmd.c_str());
        return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, slurp(o), slurp(e)};
    }

    // Reduced array with the reference spacings and a small output grid
    std::string small_config(const std::string &scene_file, const std::string &extra = "")
    {
        std::ostringstream s;
        s << "[array]\nradius = 1.5\ntx_arc_count = 2\ntx_arc_spacing = 0.099\nrx_arc_count = 11\nrx_arc_spacing = 0.0099\n"
          << "tx_z_count = 2\ntx_z_spacing = 0.1\nrx_z_count = 11\nrx_z_spacing = 0.01\n"
          << "[frequency]\nstart_hz = 31e9\nstop_hz = 39e9\ncount = 4\n"
          << "[scene]\nfile = " << scene_file << "\n"
          << "[reconstruction]\nmethod = bp\ntarget_extent = 0.1\n"
          << "[grid]\nn = 8\nvoxel_fraction = 0.25\n"
          << "[output]\ndirectory = " << (work / "out").string() << "\n"
          << extra;
        return s.str();
    }

    // value column of a quantity,value CSV
    double value(const std::string &csv, const std::string &key)
    {
        const auto p = csv.find("\n" + key + ",");
        if (p == std::string::npos)
            return -1.0;
        return std::stod(csv.substr(p + key.size() + 2));
    }

    fs::path write_file(const std::string &name, const std::string &text)
    {
        fs::create_directories(work);
        const fs::path p = work / name;
        std::ofstream(p) << text;
        return p;
    }
}

TEST_CASE("CLI - Usage and exit codes")
{
    CHECK(cli("--help").code == 0);
    CHECK(cli("").code == 2);
    CHECK(cli("no_such_command").code == 2);
    CHECK(cli("design --R0 1 --L 1").code == 2); // missing --lambda0
    CHECK(cli("simulate").code == 2);            // missing -c
    CHECK(cli("design --lambda0 -1 --R0 1 --L 1").code == 2);
    CHECK(cli("simulate -c " + (work / "missing.ini").string()).code == 4);
    CHECK(cli("--workers 0 table1").code == 2);
}

TEST_CASE("CLI - Design and table1")
{
    const Run d = cli("design --lambda0 0.01 --R0 1 --L 1");
    REQUIRE(d.code == 0);
    CHECK(d.out.find("nyquist_spacing_m,0.011180339887498949") != std::string::npos);

    const Run g = cli("design --lambda0 0.01 --R0 1 --L 1 --D 0.1");
    REQUIRE(g.code == 0);
    CHECK(value(g.out, "angular_sampling_bound_rad") == Catch::Approx(0.1).epsilon(1e-12));
    CHECK(value(g.out, "grating_lobe_spacing_approx_m") == Catch::Approx(0.1).epsilon(1e-12));
    CHECK(value(g.out, "grating_lobe_spacing_m") == Catch::Approx(0.13188624379870986).epsilon(1e-12));

    const Run t = cli("table1");
    REQUIRE(t.code == 0);
    std::istringstream s(t.out);
    std::string line;
    std::getline(s, line);
    CHECK(line == "scenario,resolution_mm,pslr_db,grating_lobe_offset_m");
    int rows = 0;
    while (std::getline(s, line))
        rows += line.empty() ? 0 : 1;
    CHECK(rows == 9);
}

TEST_CASE("CLI - Simulate")
{
    const fs::path scene = write_file("point.txt", "0,0,0,1,0\n");
    const fs::path empty = write_file("empty.txt", "# no scatterers\n");

    SECTION("Reference configuration shape")
    {
        std::string cfg = slurp(fs::path(CYLMIMO_SOURCE_DIR) / "tools/configs/table2.ini");
        cfg.replace(cfg.find("file = point_center.txt"), 23, "file = " + scene.string());
        const fs::path c = write_file("table2.ini", cfg);
        const Run r = cli("simulate -c " + c.string() + " -o " + (work / "t2echo").string());
        REQUIRE(r.code == 0);
        CHECK(r.out.find("shape 15x5x41x5x41") != std::string::npos);
        CHECK(read_echo((work / "t2echo").string()).shape() == std::array<std::size_t, 5>{15, 5, 41, 5, 41});
    }

    SECTION("Empty scene gives an all-zero echo")
    {
        const fs::path c = write_file("empty.ini", small_config(empty.string()));
        REQUIRE(cli("simulate -c " + c.string() + " -o " + (work / "zero").string()).code == 0);
        const EchoTensor e = read_echo((work / "zero").string());
        for (const auto &v : e.data())
            CHECK(v == cdouble(0.0));
    }

    SECTION("Output does not depend on the worker count")
    {
        const fs::path c = write_file("point.ini", small_config(scene.string(), "[noise]\nsigma = 0.01\nseed = 7\n"));
        REQUIRE(cli("--workers 1 simulate -c " + c.string() + " -o " + (work / "w1").string()).code == 0);
        REQUIRE(cli("--workers 4 simulate -c " + c.string() + " -o " + (work / "w4").string()).code == 0);
        REQUIRE(cli("--workers 1 simulate -c " + c.string() + " -o " + (work / "w1b").string()).code == 0);
        CHECK(slurp(work / "w1.bin") == slurp(work / "w4.bin"));
        CHECK(slurp(work / "w1.bin") == slurp(work / "w1b.bin"));
        CHECK(slurp(work / "w1.hdr") == slurp(work / "w4.hdr"));
    }

    SECTION("Configuration violating the grid-matching condition")
    {
        std::string text = small_config(scene.string());
        text.replace(text.find("rx_arc_spacing = 0.0099"), 23, "rx_arc_spacing = 0.0133");
        const fs::path c = write_file("mismatch.ini", text);
        const Run r = cli("simulate -c " + c.string() + " -o " + (work / "never").string());
        CHECK(r.code == 2);
        CHECK(r.err.find("grid-matching") != std::string::npos);
        CHECK_FALSE(fs::exists(work / "never.bin"));
    }

    SECTION("Unknown keys are rejected")
    {
        const fs::path c = write_file("typo.ini", small_config(scene.string(), "[grid]\nvoxel_fracton = 0.2\n"));
        CHECK(cli("simulate -c " + c.string()).code == 2);
    }
}

TEST_CASE("CLI - Reconstruct")
{
    const fs::path scene = write_file("point.txt", "0,0,0,1,0\n");
    const fs::path c = write_file("rec.ini", small_config(scene.string()));
    REQUIRE(cli("simulate -c " + c.string() + " -o " + (work / "rec_echo").string()).code == 0);

    SECTION("Back-projection on a small grid")
    {
        const Run r = cli("reconstruct -c " + c.string() + " -e " + (work / "rec_echo").string() + " -m bp -o " +
                          (work / "rec_img").string());
        REQUIRE(r.code == 0);
        const ImageVolume img = read_image((work / "rec_img").string());
        CHECK(img.method() == "bp");
        CHECK(img.grid().n == std::array<std::size_t, 3>{8, 8, 8});
        for (int d = 0; d < 3; ++d)
            CHECK(std::abs(img.peak_position()[d]) <= img.grid().voxel[d]);
        CHECK(fs::exists(work / "rec_img_mip.pgm"));
        CHECK(fs::exists(work / "rec_img_profiles.csv"));
    }

    SECTION("Corrupt sidecar: non-zero exit and nothing written")
    {
        fs::copy_file(work / "rec_echo.bin", work / "bad_echo.bin", fs::copy_options::overwrite_existing);
        std::string hdr = slurp(work / "rec_echo.hdr");
        hdr.replace(hdr.find("version = 1"), 11, "version = 9");
        write_file("bad_echo.hdr", hdr);
        const Run r = cli("reconstruct -c " + c.string() + " -e " + (work / "bad_echo").string() + " -m bp -o " +
                          (work / "bad_img").string());
        CHECK(r.code == 2);
        CHECK_FALSE(fs::exists(work / "bad_img.hdr"));
        CHECK_FALSE(fs::exists(work / "bad_img.bin"));

        fs::resize_file(work / "bad_echo.bin", 16);
        write_file("bad_echo.hdr", slurp(work / "rec_echo.hdr"));
        CHECK(cli("reconstruct -c " + c.string() + " -e " + (work / "bad_echo").string() + " -m bp -o " +
                  (work / "bad_img").string())
                  .code == 2);
        CHECK_FALSE(fs::exists(work / "bad_img.bin"));

        CHECK(cli("reconstruct -c " + c.string() + " -e " + (work / "absent").string() + " -m bp -o " +
                  (work / "bad_img").string())
                  .code == 4);
    }

    SECTION("Echo recorded with another layout")
    {
        std::string text = small_config(scene.string());
        text.replace(text.find("count = 4"), 9, "count = 5");
        const fs::path other = write_file("other.ini", text);
        CHECK(cli("reconstruct -c " + other.string() + " -e " + (work / "rec_echo").string() + " -m bp -o " +
                  (work / "other_img").string())
                  .code == 2);
        CHECK_FALSE(fs::exists(work / "other_img.bin"));
    }
}

TEST_CASE("CLI - Beam pattern and metrics")
{
    const fs::path scene = write_file("point.txt", "0,0,0,1,0\n");
    const fs::path c = write_file("beam.ini", small_config(scene.string(),
                                                          "[beampattern]\nlength = 1.0\nradius = 1.0\nfrequency_hz = 30e9\n"
                                                          "method = bp\nmode = two_way\ntx_spacing = 0.1\n"
                                                          "rx_spacing = 0.011111111111111112\n"));
    const Run r = cli("beampattern -c " + c.string() + " -o " + (work / "beam.csv").string());
    REQUIRE(r.code == 0);
    REQUIRE(fs::exists(work / "beam_metrics.csv"));
    const Run m = cli("metrics -p " + (work / "beam.csv").string());
    REQUIRE(m.code == 0);
    const std::string metrics = slurp(work / "beam_metrics.csv");
    CHECK(m.out == metrics);
    const BeamPatternResult p = read_pattern_csv((work / "beam.csv").string());
    const QualityMetrics q = measure_metrics(p);
    CHECK(q.resolution * 1e3 == Catch::Approx(6.56).epsilon(0.15));
}
