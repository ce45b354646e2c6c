// SPDX-License-Identifier: Apache-2.0
//
// relaydiv: diversity analysis toolkit for half-duplex linear relay networks
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

#pragma once

#include "random.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace relaydiv
{

// Trials are grouped into fixed blocks; block b always draws from substream
// (seed, stream, b). Any assignment of blocks to workers yields the same counts.
inline constexpr std::uint64_t kTrialBlock = 1024;

// 0 means "use RELAYDIV_THREADS, else hardware concurrency".
inline unsigned resolve_threads(unsigned requested)
{
    if (requested > 0)
        return requested;
    if (const char *env = std::getenv("RELAYDIV_THREADS"))
    {
        try
        {
            const long v = std::stol(env);
            if (v > 0)
                return static_cast<unsigned>(v);
        }
        catch (const std::exception &)
        {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

inline std::uint64_t round_up_to_block(std::uint64_t n)
{
    return (n + kTrialBlock - 1) / kTrialBlock * kTrialBlock;
}

// Counts trials in [begin, end) for which `trial(rng)` returns true. `begin` must
// be block aligned. `trial` is copied once per worker so it may own scratch state.
template <class Trial>
std::uint64_t count_events(std::uint64_t begin, std::uint64_t end, std::uint64_t seed, std::uint64_t stream,
                           unsigned threads, const Trial &trial)
{
    if (begin % kTrialBlock != 0)
        throw InvalidParameter("trial range must start on a block boundary");
    if (end <= begin)
        return 0;

    const std::uint64_t first_block = begin / kTrialBlock;
    const std::uint64_t n_blocks = (end - begin + kTrialBlock - 1) / kTrialBlock;
    std::vector<std::uint64_t> block_events(n_blocks, 0);
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&]() {
        Trial local = trial;
        try
        {
            for (std::uint64_t b = next.fetch_add(1); b < n_blocks; b = next.fetch_add(1))
            {
                const std::uint64_t block = first_block + b;
                const std::uint64_t start = block * kTrialBlock;
                const std::uint64_t stop = std::min(end, start + kTrialBlock);
                RandomSource rng(seed, stream, block);
                std::uint64_t events = 0;
                for (std::uint64_t t = start; t < stop; ++t)
                    events += local(rng) ? 1 : 0;
                block_events[b] = events;
            }
        }
        catch (...)
        {
            std::lock_guard lock(failure_mutex);
            if (!failure)
                failure = std::current_exception();
            next.store(n_blocks);
        }
    };

    const unsigned n_workers =
        static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, threads), n_blocks));
    if (n_workers == 1)
        work();
    else
    {
        std::vector<std::jthread> pool;
        pool.reserve(n_workers);
        for (unsigned w = 0; w < n_workers; ++w)
            pool.emplace_back(work);
    }
    if (failure)
        std::rethrow_exception(failure);

    std::uint64_t total = 0;
    for (auto e : block_events)
        total += e;
    return total;
}

} // namespace relaydiv
