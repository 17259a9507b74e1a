// Copyright Contributors to the splatflow Project
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace splat {

/// Runs fn(begin, end) over a static partition of [0, n). The partition depends
/// only on (n, threads), so work assignment is deterministic; callers must
/// keep the chunks independent.
template <class F>
void parallel_chunks(int n, int threads, F&& fn) {
    threads = std::max(1, threads);
    if (threads == 1 || n < 2 * threads) {
        if (n > 0) fn(0, n);
        return;
    }
    const int chunk = (n + threads - 1) / threads;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int t = 0; t < threads; ++t) {
        const int begin = t * chunk;
        const int end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace splat
