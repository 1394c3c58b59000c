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

#ifndef CYLMIMO_COMMON_H
#define CYLMIMO_COMMON_H

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

namespace cylmimo
{
    using cdouble = std::complex<double>;
    using Vec3 = std::array<double, 3>;

    inline constexpr double pi = 3.14159265358979323846;
    inline constexpr double speed_of_light = 299792458.0;

    // Error classes, mapped to CLI exit status 2 / 3 / 4
    struct validation_error : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };
    struct numeric_error : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };
    struct io_error : std::runtime_error
    {
        using std::runtime_error::runtime_error;
    };

    // Global bound on internal parallelism (>= 1). Results never depend on it.
    void set_worker_count(unsigned n);
    unsigned worker_count();

    // Runs body(i) for i in [0, n) with static contiguous partitioning.
    // The body must only write outputs owned by index i.
    void parallel_for(std::size_t n, const std::function<void(std::size_t)> &body);

    // Runs body(worker, begin, end) on contiguous ranges; worker ids are 0..(returned count - 1).
    // Partition depends only on n and the number of chunks requested.
    void parallel_chunks(std::size_t n, std::size_t chunks,
                         const std::function<void(std::size_t, std::size_t, std::size_t)> &body);
}

#endif
