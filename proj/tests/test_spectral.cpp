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

#include "cylmimo/fft.hpp"
#include "cylmimo/spectral.hpp"

#include <cmath>
#include <random>

using namespace cylmimo;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    SpectrumTensor line(const std::vector<cdouble> &v, double dz, double z0 = 0.0)
    {
        return SpectrumTensor({make_uniform_axis(AxisLabel::z_T, z0, dz, v.size())}, v);
    }

    std::vector<cdouble> random_vec(std::size_t n, std::mt19937_64 &rng)
    {
        std::normal_distribution<double> g;
        std::vector<cdouble> v(n);
        for (auto &x : v)
            x = cdouble(g(rng), g(rng));
        return v;
    }
}

TEST_CASE("Spectral - Zero filling by definition")
{
    const SpectrumTensor t = line({1.0, 2.0}, 0.3, -0.15);
    const SpectrumTensor same = zero_fill(t, AxisLabel::z_T, 1);
    CHECK(same.data() == t.data());

    const SpectrumTensor z = zero_fill(t, AxisLabel::z_T, 3);
    const std::vector<cdouble> expect{1.0, 0.0, 0.0, 2.0, 0.0, 0.0};
    CHECK(z.data() == expect);
    const Axis &a = z.axis(AxisLabel::z_T);
    CHECK_THAT(a.spacing(), WithinRel(0.1, 1e-12));
    CHECK_THAT(a.coords.front(), WithinAbs(-0.15, 1e-15));
    CHECK_THROWS_AS(zero_fill(t, AxisLabel::z_T, 0), validation_error);
}

TEST_CASE("Spectral - Zero-filled DFT tiles the original spectrum")
{
    // DFT(zero_fill(s, P))[m] = DFT(s)[m mod N], brute force over all N <= 16 and P <= 8
    std::mt19937_64 rng(7);
    double worst = 0.0;
    for (std::size_t N = 1; N <= 16; ++N)
        for (std::size_t P = 1; P <= 8; ++P)
        {
            const auto s = random_vec(N, rng);
            const auto S = dft_naive(s);
            // a single sample carries no spacing, so that case is filled by hand
            std::vector<cdouble> Z(N * P, 0.0);
            if (N == 1)
                Z[0] = s[0];
            else
                Z = zero_fill(line(s, 0.1), AxisLabel::z_T, P).data();
            REQUIRE(Z.size() == N * P);
            fft_inplace(Z);
            for (std::size_t m = 0; m < N * P; ++m)
                worst = std::max(worst, std::abs(Z[m] - S[m % N]));
        }
    CHECK(worst < 1e-9);
}

TEST_CASE("Spectral - Axis DFT conventions")
{
    // Constant -> single impulse at zero wavenumber of value N c
    const std::size_t N = 12;
    const SpectrumTensor t = line(std::vector<cdouble>(N, cdouble(0.5, 0.25)), 0.01, -0.055);
    const SpectrumTensor S = dft_axis(t, AxisLabel::z_T, Direction::forward);
    const Axis &k = S.axis(AxisLabel::k_zT);
    REQUIRE(k.size() == N);
    for (std::size_t m = 0; m < N; ++m)
    {
        if (std::abs(k.coords[m]) < 1e-9)
            CHECK(std::abs(S.data()[m] - double(N) * cdouble(0.5, 0.25)) < 1e-12);
        else
            CHECK(std::abs(S.data()[m]) < 1e-12);
    }
    CHECK_THAT(k.spacing(), WithinRel(2.0 * pi / (N * 0.01), 1e-12));

    // Round trips with padding and phase referencing
    std::mt19937_64 rng(3);
    const SpectrumTensor x = line(random_vec(41, rng), 0.01, -0.2);
    for (bool ref : {false, true})
    {
        DftOptions o;
        o.pad_pow2 = true;
        o.phase_reference = ref;
        const SpectrumTensor X = dft_axis(x, AxisLabel::z_T, Direction::forward, o);
        CHECK(X.axis(AxisLabel::k_zT).size() == 64);
        const SpectrumTensor y = dft_axis(X, AxisLabel::k_zT, Direction::inverse);
        REQUIRE(y.size() == x.size());
        CHECK(y.axes()[0].label == AxisLabel::z_T);
        for (std::size_t i = 0; i < x.size(); ++i)
            CHECK(std::abs(y.data()[i] - x.data()[i]) < 1e-10);
        CHECK_THAT(y.axes()[0].coords.front(), WithinAbs(-0.2, 1e-12));
    }

    // Phase reference: a tone exp(j kappa z) peaks at +kappa with real positive value
    const double kap = 2.0 * pi / (64 * 0.01) * 5.0;
    std::vector<cdouble> tone(64);
    for (std::size_t n = 0; n < 64; ++n)
        tone[n] = std::polar(1.0, kap * (-0.3 + 0.01 * double(n)));
    DftOptions pr;
    pr.phase_reference = true;
    const SpectrumTensor T = dft_axis(line(tone, 0.01, -0.3), AxisLabel::z_T, Direction::forward, pr);
    const auto &kc = T.axis(AxisLabel::k_zT).coords;
    for (std::size_t m = 0; m < 64; ++m)
        if (std::abs(kc[m] - kap) < 1e-6)
            CHECK(std::abs(T.data()[m] - cdouble(64.0)) < 1e-9);
}

TEST_CASE("Spectral - Hankel factor")
{
    const double kr = 700.0, R0 = 1.5;
    CHECK(std::abs(hankel_factor(0.0, kr, R0) - std::polar(1.0, kr * R0)) < 1e-12);
    for (double xi : {-1000.0, -10.5, 0.3, 500.0, 1049.0})
        CHECK_THAT(std::abs(hankel_factor(xi, kr, R0)), WithinAbs(1.0, 1e-12));
    CHECK(hankel_factor(kr * R0 + 1.0, kr, R0) == cdouble(0.0));
    CHECK(hankel_factor(-kr * R0 - 1.0, kr, R0) == cdouble(0.0));
}

TEST_CASE("Spectral - Windows")
{
    std::mt19937_64 rng(11);
    const SpectrumTensor x = dft_axis(line(random_vec(32, rng), 0.01), AxisLabel::z_T, Direction::forward);
    const auto &k = x.axis(AxisLabel::k_zT).coords;

    SpectralWindow all{{{AxisLabel::k_zT, k.front() - 1.0, k.back() + 1.0}}};
    CHECK(apply_window(x, all).data() == x.data());

    SpectralWindow band{{{AxisLabel::k_zT, -100.0, 150.0}}};
    const SpectrumTensor once = apply_window(x, band);
    CHECK(apply_window(once, band).data() == once.data());
    for (std::size_t m = 0; m < k.size(); ++m)
        CHECK(once.data()[m] == ((k[m] >= -100.0 && k[m] <= 150.0) ? x.data()[m] : cdouble(0.0)));

    SpectralWindow bad{{{AxisLabel::k_zT, 1e6, 2e6}}};
    CHECK_THROWS_AS(apply_window(x, bad), validation_error);
    SpectralWindow inverted{{{AxisLabel::k_zT, 10.0, -10.0}}};
    CHECK_THROWS_AS(apply_window(x, inverted), validation_error);

    // Raised-cosine edges stay within [0, 1] and are 1 in the flat part
    SpectralWindow::Band b{AxisLabel::k_zT, -10.0, 10.0};
    CHECK(SpectralWindow::weight(b, Taper::raised_cosine, 0.25, 0.0) == 1.0);
    const double e = SpectralWindow::weight(b, Taper::raised_cosine, 0.25, -9.0);
    CHECK(e > 0.0);
    CHECK(e < 1.0);
    CHECK(SpectralWindow::weight(b, Taper::raised_cosine, 0.25, 11.0) == 0.0);
}

TEST_CASE("Spectral - Window keeps a single replica of a tiled spectrum")
{
    // Tone on a sparse 0.1 m grid, zero-filled by 4: replicas every 2 pi / 0.1 = 62.8 rad/m
    const double dz = 0.1, kap = 10.0;
    std::vector<cdouble> s(16);
    for (std::size_t n = 0; n < s.size(); ++n)
        s[n] = std::polar(1.0, kap * dz * double(n));
    DftOptions o;
    o.fft_size = 256;
    const SpectrumTensor S = dft_axis(zero_fill(line(s, dz), AxisLabel::z_T, 4), AxisLabel::z_T, Direction::forward, o);

    auto count_peaks = [](const SpectrumTensor &t)
    {
        const auto &d = t.data();
        double mx = 0.0;
        for (auto &v : d)
            mx = std::max(mx, std::abs(v));
        int peaks = 0;
        for (std::size_t i = 0; i < d.size(); ++i)
        {
            const double a = std::abs(d[i]);
            const double l = std::abs(d[(i + d.size() - 1) % d.size()]), r = std::abs(d[(i + 1) % d.size()]);
            peaks += (a > 0.5 * mx && a >= l && a > r);
        }
        return peaks;
    };
    CHECK(count_peaks(S) == 4);
    const double kmax = 25.0; // 2 kmax <= 62.8
    const SpectrumTensor W = apply_window(S, SpectralWindow{{{AxisLabel::k_zT, -kmax, kmax}}});
    CHECK(count_peaks(W) == 1);
}

TEST_CASE("Spectral - Support bound of k_z")
{
    CHECK(support_bound_kz(1.0, 0.0, 0.0, 628.3) == 0.0);
    CHECK_THAT(support_bound_kz(1.0, 1.0, 0.0, 628.3), WithinRel(280.98430205262355, 1e-12));
    double prev = 0.0;
    for (double L = 0.1; L <= 3.0; L += 0.1)
    {
        const double v = support_bound_kz(1.0, L, 0.0, 628.3);
        CHECK(v > prev);
        prev = v;
    }
    CHECK_THROWS_AS(support_bound_kz(0.0, 1.0, 0.0, 1.0), validation_error);
}

TEST_CASE("Spectral - Polar to Cartesian interpolation")
{
    // Annulus 100..200 rad/m, phi around pi (k_y > 0), polar grid 4x finer than the Cartesian grid
    std::vector<double> rho, phi, kx, ky;
    for (int i = 0; i <= 400; ++i)
        rho.push_back(100.0 + 0.25 * i);
    for (int i = 0; i <= 240; ++i)
        phi.push_back(pi - 0.6 + 0.005 * i);
    for (int i = -40; i <= 40; ++i)
        kx.push_back(1.0 * i);
    for (int i = 0; i <= 100; ++i)
        ky.push_back(100.0 + 1.0 * i);

    std::vector<Axis> axes{make_axis(AxisLabel::k_rhoT, rho), make_axis(AxisLabel::theta_T, phi)};
    std::vector<cdouble> one(rho.size() * phi.size(), 1.0), sq(one.size());
    for (std::size_t r = 0; r < rho.size(); ++r)
        for (std::size_t p = 0; p < phi.size(); ++p)
            sq[r * phi.size() + p] = rho[r] * rho[r];

    const SpectrumTensor C = interp_polar_to_cartesian(SpectrumTensor(axes, one), Side::tx, kx, ky);
    const SpectrumTensor Q = interp_polar_to_cartesian(SpectrumTensor(axes, sq), Side::tx, kx, ky);
    CHECK(C.axes()[0].label == AxisLabel::k_xT);
    CHECK(C.axes()[1].label == AxisLabel::k_yT);

    std::size_t valid = 0, invalid = 0;
    double worst = 0.0;
    for (std::size_t i = 0; i < kx.size(); ++i)
        for (std::size_t j = 0; j < ky.size(); ++j)
        {
            const std::size_t f = i * ky.size() + j;
            const double r = std::hypot(kx[i], ky[j]);
            const double ph = std::atan2(kx[i], -ky[j]) + (kx[i] < 0.0 ? 2.0 * pi : 0.0);
            const bool inside = r >= 100.0 && r <= 200.0 && ph >= phi.front() && ph <= phi.back();
            if (!C.is_valid(f))
            {
                ++invalid;
                CHECK(C.data()[f] == cdouble(0.0));
                CHECK_FALSE((r > 101.0 && r < 199.0 && ph > phi.front() + 0.01 && ph < phi.back() - 0.01));
                continue;
            }
            ++valid;
            CHECK(inside);
            CHECK(std::abs(C.data()[f] - 1.0) < 1e-12);
            worst = std::max(worst, std::abs(Q.data()[f].real() - r * r) / (r * r));
        }
    CHECK(valid > 1000);
    CHECK(invalid > 0);
    CHECK(worst < 1e-3);

    // Output grid outside the annulus
    std::vector<double> far{1000.0, 1001.0};
    CHECK_THROWS_AS(interp_polar_to_cartesian(SpectrumTensor(axes, one), Side::tx, far, far), validation_error);
}

TEST_CASE("Spectral - Tensor bookkeeping")
{
    SpectrumTensor t({make_uniform_axis(AxisLabel::k, 1.0, 1.0, 3), make_uniform_axis(AxisLabel::z_R, 0.0, 0.1, 4)});
    CHECK(t.shape() == std::vector<std::size_t>{3, 4});
    CHECK(t.strides() == std::vector<std::size_t>{4, 1});
    t.at({2, 1}) = cdouble(5.0, 1.0);
    CHECK(t.data()[9] == cdouble(5.0, 1.0));
    CHECK(t.has_axis(AxisLabel::z_R));
    CHECK_FALSE(t.has_axis(AxisLabel::z_T));
    CHECK_THROWS_AS(t.axis_index(AxisLabel::k_x), validation_error);
    CHECK(fourier_dual(AxisLabel::theta_R) == AxisLabel::xi_R);
    CHECK(fourier_dual(AxisLabel::k_zT) == AxisLabel::z_T);
    CHECK(to_string(AxisLabel::k_rhoT) == "k_rhoT");
    const SpectrumTensor p = pad_axis(t, AxisLabel::z_R, 8);
    CHECK(p.shape() == std::vector<std::size_t>{3, 8});
    CHECK_THAT(p.axis(AxisLabel::z_R).coords.back(), WithinAbs(0.7, 1e-12));
}
