// SPDX-License-Identifier: Apache-2.0
//
// mimoeff - MIMO efficiency evaluation and antenna optimization toolkit
// Copyright (C) 2026 The mimoeff authors
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

#ifndef MIMOEFF_PARALLEL_HPP
#define MIMOEFF_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mimoeff
{
    // Calls body(i) for i in [0, count) using up to n_threads workers (0 = hardware concurrency).
    // Work is split into contiguous blocks; callers write results by index, so the outcome
    // does not depend on the thread count. The first exception thrown by any worker is rethrown.
    template <class Body>
    void parallel_for(std::size_t count, unsigned n_threads, Body &&body)
    {
        if (n_threads == 0)
            n_threads = std::max(1u, std::thread::hardware_concurrency());
        n_threads = unsigned(std::min<std::size_t>(n_threads, count));
        if (n_threads <= 1)
        {
            for (std::size_t i = 0; i < count; ++i)
                body(i);
            return;
        }

        std::exception_ptr error;
        std::mutex error_mutex;
        std::vector<std::thread> workers;
        workers.reserve(n_threads);
        const std::size_t block = (count + n_threads - 1) / n_threads;
        for (unsigned t = 0; t < n_threads; ++t)
        {
            const std::size_t begin = t * block;
            const std::size_t end = std::min(count, begin + block);
            if (begin >= end)
                break;
            workers.emplace_back([&, begin, end]
                                 {
                try
                {
                    for (std::size_t i = begin; i < end; ++i)
                        body(i);
                }
                catch (...)
                {
                    std::lock_guard lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                } });
        }
        for (auto &w : workers)
            w.join();
        if (error)
            std::rethrow_exception(error);
    }
}

#endif
