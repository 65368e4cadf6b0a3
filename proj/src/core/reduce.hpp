#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace cfv {

// Chunk size for pairwise reductions. Fixed so that the summation tree depends
// only on the element count, never on thread count.
inline constexpr std::size_t kReduceChunk = 256;

// Pairwise (tree) summation over row ranges. `add_range(i0, i1, acc)` must add
// the contribution of rows [i0, i1) into `acc` (a zeroed buffer of length
// `width`). Chunks are combined binary-counter style, which keeps the tree
// shape a pure function of `n`.
template <typename AddRange>
void pairwise_accumulate(std::size_t n, std::size_t width, double* out, AddRange&& add_range,
                         std::size_t chunk = kReduceChunk) {
    std::vector<std::vector<double>> stack;   // partial sums, one per binary level
    std::vector<int> level;
    std::size_t nchunks = 0;
    for (std::size_t i0 = 0; i0 < n; i0 += chunk) {
        std::size_t i1 = std::min(n, i0 + chunk);
        std::vector<double> part(width, 0.0);
        add_range(i0, i1, part.data());
        int lv = 0;
        while (!stack.empty() && level.back() == lv) {
            for (std::size_t j = 0; j < width; ++j) part[j] += stack.back()[j];
            stack.pop_back();
            level.pop_back();
            ++lv;
        }
        stack.push_back(std::move(part));
        level.push_back(lv);
        ++nchunks;
    }
    for (std::size_t j = 0; j < width; ++j) out[j] = 0.0;
    // Collapse remaining levels from the top of the stack (fixed order).
    for (auto it = stack.rbegin(); it != stack.rend(); ++it)
        for (std::size_t j = 0; j < width; ++j) out[j] += (*it)[j];
    (void)nchunks;
}

// Static block partition of [0, n) over `workers` threads. fn(i) must be safe
// to call concurrently for distinct i and must not touch shared mutable state.
// workers <= 1 runs inline. Outputs written per-index are identical regardless
// of thread count.
inline void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::size_t nthreads = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) {
        threads.emplace_back([&, t] {
            std::size_t lo = n * t / nthreads;
            std::size_t hi = n * (t + 1) / nthreads;
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : threads) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace cfv
