#include "hmera/util.hpp"

#include <algorithm>
#include <thread>

namespace hmera {

double pairwise_sum(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double acc = 0.0;
        for (double v : values) acc += v;
        return acc;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(values.subspan(0, half)) + pairwise_sum(values.subspan(half));
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
    if (count == 0) return;
    std::size_t n_threads = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    n_threads = std::min(n_threads, count);
    if (n_threads == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(n_threads);
    const std::size_t chunk = (count + n_threads - 1) / n_threads;
    for (std::size_t t = 0; t < n_threads; ++t) {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        workers.emplace_back([&fn, begin, end] {
            for (std::size_t i = begin; i < end; ++i) fn(i);
        });
    }
    for (auto& w : workers) w.join();
}

}  // namespace hmera
