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

#include "cylmimo/common.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cylmimo
{
    static std::atomic<unsigned> g_workers{1};

    void set_worker_count(unsigned n)
    {
        g_workers = std::max(1u, n);
    }

    unsigned worker_count()
    {
        return g_workers.load();
    }

    void parallel_chunks(std::size_t n, std::size_t chunks,
                         const std::function<void(std::size_t, std::size_t, std::size_t)> &body)
    {
        if (n == 0)
            return;
        chunks = std::max<std::size_t>(1, std::min(chunks, n));
        if (chunks == 1)
        {
            body(0, 0, n);
            return;
        }

        std::exception_ptr first_error;
        std::mutex err_lock;
        std::vector<std::thread> pool;
        pool.reserve(chunks);
        for (std::size_t c = 0; c < chunks; ++c)
        {
            std::size_t b = n * c / chunks, e = n * (c + 1) / chunks;
            pool.emplace_back([&, c, b, e]()
                              {
                try
                {
                    body(c, b, e);
                }
                catch (...)
                {
                    std::lock_guard<std::mutex> g(err_lock);
                    if (!first_error)
                        first_error = std::current_exception();
                } });
        }
        for (auto &t : pool)
            t.join();
        if (first_error)
            std::rethrow_exception(first_error);
    }

    void parallel_for(std::size_t n, const std::function<void(std::size_t)> &body)
    {
        parallel_chunks(n, worker_count(), [&](std::size_t, std::size_t b, std::size_t e)
                        {
            for (std::size_t i = b; i < e; ++i)
                body(i); });
    }
}
