/*
 * SPDX-License-Identifier: Apache-2.0
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Parallel helpers with a deterministic reduction order.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace alphainfo {

/// Worker count: `requested` if positive, else ALPHAINFO_THREADS if set and
/// positive, else the hardware concurrency.
inline unsigned resolve_threads(unsigned requested = 0) {
    if (requested > 0)
        return requested;
    if (const char *env = std::getenv("ALPHAINFO_THREADS")) {
        char *end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v > 0)
            return unsigned(std::min<unsigned long>(v, 1024));
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// SplitMix64 finalizer.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seed of stream `index` within `domain`, derived from one master seed.
/// Independent of how streams are later distributed over workers.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t domain,
                                 std::uint64_t index) {
    return mix64(mix64(master ^ mix64(domain)) + index);
}

/// Runs fn(begin, end) over fixed-size chunks of [0, n) on up to `threads`
/// workers and returns the per-chunk results in chunk order. Chunk
/// boundaries depend only on n and chunk, so any reduction over the result
/// is identical for every worker count.
template <typename Fn>
auto parallel_chunks(std::size_t n, std::size_t chunk, unsigned threads,
                     Fn fn) {
    using Acc = decltype(fn(std::size_t{}, std::size_t{}));
    chunk = std::max<std::size_t>(chunk, 1);
    const std::size_t n_chunks = (n + chunk - 1) / chunk;
    std::vector<Acc> out(n_chunks);
    std::vector<std::exception_ptr> errors(n_chunks);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t c; (c = next.fetch_add(1)) < n_chunks;) {
            try {
                out[c] = fn(c * chunk, std::min(n, (c + 1) * chunk));
            } catch (...) {
                errors[c] = std::current_exception();
            }
        }
    };
    auto rethrow_first = [&] {
        for (auto &e : errors)
            if (e)
                std::rethrow_exception(e);
    };
    const unsigned w = unsigned(std::min<std::size_t>(threads, n_chunks));
    if (w <= 1) {
        work();
        rethrow_first();
        return out;
    }
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < w; ++i)
        pool.emplace_back(work);
    for (auto &t : pool)
        t.join();
    rethrow_first();
    return out;
}

} // namespace alphainfo
