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

#include <cmath>
#include <random>
#include <vector>

using namespace cylmimo;

static std::vector<cdouble> random_vec(std::size_t n, unsigned seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    std::vector<cdouble> v(n);
    for (auto &x : v)
        x = cdouble(g(rng), g(rng));
    return v;
}

TEST_CASE("FFT - Constant sequence maps to a DC impulse")
{
    for (std::size_t N : {1, 2, 8, 12, 41, 64})
    {
        std::vector<cdouble> v(N, cdouble(2.5, -1.0));
        fft_inplace(v);
        CHECK(std::abs(v[0] - double(N) * cdouble(2.5, -1.0)) < 1e-10 * N);
        for (std::size_t m = 1; m < N; ++m)
            CHECK(std::abs(v[m]) < 1e-10 * N);
    }
}

TEST_CASE("FFT - Round trip is the identity")
{
    for (std::size_t N : {1, 3, 7, 15, 16, 41, 100, 128, 410})
    {
        const auto x = random_vec(N, unsigned(N));
        auto y = x;
        fft_inplace(y);
        fft_inplace(y, true);
        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i)
            err = std::max(err, std::abs(y[i] / double(N) - x[i]));
        CHECK(err < 1e-10);
    }
}

TEST_CASE("FFT - Pure tone lands in a single bin")
{
    for (std::size_t N : {16, 20})
        for (std::size_t m : {0, 1, 5, 11})
        {
            std::vector<cdouble> v(N);
            for (std::size_t n = 0; n < N; ++n)
                v[n] = std::polar(1.0, 2.0 * pi * double(m * n) / double(N));
            fft_inplace(v);
            for (std::size_t q = 0; q < N; ++q)
                CHECK(std::abs(v[q] - (q == m ? cdouble(double(N)) : cdouble(0.0))) < 1e-9);
        }
}

TEST_CASE("FFT - Matches the naive DFT for every length up to 40")
{
    for (std::size_t N = 1; N <= 40; ++N)
        for (bool inv : {false, true})
        {
            const auto x = random_vec(N, unsigned(100 + N));
            auto y = x;
            fft_inplace(y, inv);
            const auto r = dft_naive(x, inv);
            for (std::size_t i = 0; i < N; ++i)
                CHECK(std::abs(y[i] - r[i]) < 1e-9 * double(N));
        }
}

TEST_CASE("FFT - Power-of-two helpers")
{
    CHECK(is_pow2(1));
    CHECK(is_pow2(64));
    CHECK_FALSE(is_pow2(0));
    CHECK_FALSE(is_pow2(96));
    CHECK(next_pow2(1) == 1);
    CHECK(next_pow2(41) == 64);
    CHECK(next_pow2(410) == 512);
    CHECK(next_pow2(512) == 512);
}
