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

#ifndef CYLMIMO_FFT_H
#define CYLMIMO_FFT_H

#include "cylmimo/common.hpp"

#include <span>
#include <vector>

namespace cylmimo
{
    // In-place unnormalized DFT of any length: X[m] = sum_n x[n] exp(-+ j 2 pi m n / N).
    // Power-of-two lengths use radix-2; other lengths use Bluestein's algorithm.
    // No scaling is applied in either direction.
    void fft_inplace(std::span<cdouble> x, bool inverse = false);

    // Reference O(N^2) DFT (used by tests and for tiny lengths)
    std::vector<cdouble> dft_naive(std::span<const cdouble> x, bool inverse = false);

    bool is_pow2(std::size_t n);
    std::size_t next_pow2(std::size_t n);
}

#endif
