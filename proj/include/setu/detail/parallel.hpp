// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 SETU Contributors

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace setu::detail {

// Runs fn(i) for i in [0, n). Each index is visited exactly once; callers
// write results into per-index slots so output does not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn, std::size_t max_threads = 0) {
    if (n == 0) {
        return;
    }
    std::size_t workers = max_threads != 0 ? max_threads : std::thread::hardware_concurrency();
    workers = std::clamp<std::size_t>(workers, 1, n);
    if (workers == 1 || n < 4) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) {
                return;
            }
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) {
                    first_error = std::current_exception();
                }
                next.store(n);
                return;
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers - 1);
        for (std::size_t t = 0; t + 1 < workers; ++t) {
            pool.emplace_back(body);
        }
        body();
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
}

}  // namespace setu::detail
