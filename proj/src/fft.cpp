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

#include "cylmimo/fft.hpp"

#include <cmath>
#include <memory>
#include <unordered_map>

namespace cylmimo
{
    bool is_pow2(std::size_t n)
    {
        return n != 0 && (n & (n - 1)) == 0;
    }

    std::size_t next_pow2(std::size_t n)
    {
        std::size_t p = 1;
        while (p < n)
            p <<= 1;
        return p;
    }

    namespace
    {
        struct Radix2Plan
        {
            std::size_t n = 0;
            std::vector<cdouble> twiddle; // exp(-j 2 pi i / n), i < n/2
            std::vector<std::size_t> bitrev;
        };

        struct BluesteinPlan
        {
            std::size_t n = 0, m = 0;
            std::vector<cdouble> chirp;    // exp(-j pi i^2 / n)
            std::vector<cdouble> kernel_f; // FFT of the conjugate chirp, length m
        };

        const Radix2Plan &radix2_plan(std::size_t n)
        {
            thread_local std::unordered_map<std::size_t, std::unique_ptr<Radix2Plan>> cache;
            auto &slot = cache[n];
            if (!slot)
            {
                slot = std::make_unique<Radix2Plan>();
                slot->n = n;
                slot->twiddle.resize(n / 2);
                for (std::size_t i = 0; i < n / 2; ++i)
                    slot->twiddle[i] = std::polar(1.0, -2.0 * pi * (double(i) / double(n)));
                slot->bitrev.resize(n);
                std::size_t bits = 0;
                while ((std::size_t(1) << bits) < n)
                    ++bits;
                for (std::size_t i = 0; i < n; ++i)
                {
                    std::size_t r = 0;
                    for (std::size_t b = 0; b < bits; ++b)
                        if (i & (std::size_t(1) << b))
                            r |= std::size_t(1) << (bits - 1 - b);
                    slot->bitrev[i] = r;
                }
            }
            return *slot;
        }

        // Iterative decimation-in-time; the twiddle of a stage of length len is taken from
        // the size-n table at stride n/len, so a zero-filled input reproduces its spectrum
        // bit-for-bit in every replica (the odd half of each butterfly is exactly zero).
        void radix2(std::span<cdouble> x, bool inverse)
        {
            const std::size_t n = x.size();
            if (n < 2)
                return;
            const Radix2Plan &plan = radix2_plan(n);
            for (std::size_t i = 0; i < n; ++i)
                if (i < plan.bitrev[i])
                    std::swap(x[i], x[plan.bitrev[i]]);

            for (std::size_t len = 2; len <= n; len <<= 1)
            {
                const std::size_t half = len / 2, stride = n / len;
                for (std::size_t start = 0; start < n; start += len)
                {
                    for (std::size_t k = 0; k < half; ++k)
                    {
                        cdouble w = plan.twiddle[k * stride];
                        if (inverse)
                            w = std::conj(w);
                        cdouble a = x[start + k];
                        cdouble b = w * x[start + k + half];
                        x[start + k] = a + b;
                        x[start + k + half] = a - b;
                    }
                }
            }
        }

        const BluesteinPlan &bluestein_plan(std::size_t n)
        {
            thread_local std::unordered_map<std::size_t, std::unique_ptr<BluesteinPlan>> cache;
            auto &slot = cache[n];
            if (!slot)
            {
                slot = std::make_unique<BluesteinPlan>();
                slot->n = n;
                slot->m = next_pow2(2 * n - 1);
                slot->chirp.resize(n);
                for (std::size_t i = 0; i < n; ++i)
                {
                    // i^2 mod 2n keeps the argument small and exact
                    std::size_t q = (i * i) % (2 * n);
                    slot->chirp[i] = std::polar(1.0, -pi * double(q) / double(n));
                }
                slot->kernel_f.assign(slot->m, cdouble(0.0));
                slot->kernel_f[0] = std::conj(slot->chirp[0]);
                for (std::size_t i = 1; i < n; ++i)
                {
                    slot->kernel_f[i] = std::conj(slot->chirp[i]);
                    slot->kernel_f[slot->m - i] = std::conj(slot->chirp[i]);
                }
                radix2(slot->kernel_f, false);
            }
            return *slot;
        }

        void bluestein(std::span<cdouble> x, bool inverse)
        {
            const std::size_t n = x.size();
            const BluesteinPlan &plan = bluestein_plan(n);
            std::vector<cdouble> a(plan.m, cdouble(0.0));
            for (std::size_t i = 0; i < n; ++i)
            {
                cdouble c = inverse ? std::conj(plan.chirp[i]) : plan.chirp[i];
                a[i] = x[i] * c;
            }
            radix2(a, false);
            for (std::size_t i = 0; i < plan.m; ++i)
                a[i] *= inverse ? std::conj(plan.kernel_f[(plan.m - i) % plan.m]) : plan.kernel_f[i];
            radix2(a, true);
            const double scale = 1.0 / double(plan.m);
            for (std::size_t i = 0; i < n; ++i)
            {
                cdouble c = inverse ? std::conj(plan.chirp[i]) : plan.chirp[i];
                x[i] = a[i] * c * scale;
            }
        }
    }

    void fft_inplace(std::span<cdouble> x, bool inverse)
    {
        if (x.size() < 2)
            return;
        if (is_pow2(x.size()))
            radix2(x, inverse);
        else
            bluestein(x, inverse);
    }

    std::vector<cdouble> dft_naive(std::span<const cdouble> x, bool inverse)
    {
        const std::size_t n = x.size();
        std::vector<cdouble> out(n, cdouble(0.0));
        const double sgn = inverse ? 1.0 : -1.0;
        for (std::size_t m = 0; m < n; ++m)
        {
            cdouble acc(0.0);
            for (std::size_t i = 0; i < n; ++i)
                acc += x[i] * std::polar(1.0, sgn * 2.0 * pi * double((m * i) % n) / double(n));
            out[m] = acc;
        }
        return out;
    }
}
