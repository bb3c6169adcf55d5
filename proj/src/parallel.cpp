#include "hmlab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace hmlab {

namespace {
std::atomic<int> forced_workers{0};
}

void set_worker_count(int workers) { forced_workers = std::max(0, workers); }

int worker_count() {
    if (int w = forced_workers.load(); w > 0) return w;
    if (const char* env = std::getenv("HMLAB_WORKERS")) {
        try {
            int w = std::stoi(env);
            if (w > 0) return w;
        } catch (...) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

namespace {
thread_local bool inside_worker = false;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    std::size_t workers = inside_worker ? 1 : std::min<std::size_t>(worker_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&] {
        bool outer = inside_worker;
        inside_worker = true;
        try {
            for (std::size_t i = next++; i < n; i = next++) body(i);
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = n;
        }
        inside_worker = outer;
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

void parallel_chunks(std::size_t n, std::size_t chunk, const std::function<void(std::size_t, std::size_t)>& body) {
    if (chunk == 0) chunk = 1;
    std::size_t blocks = (n + chunk - 1) / chunk;
    parallel_for(blocks, [&](std::size_t b) { body(b * chunk, std::min(n, (b + 1) * chunk)); });
}

}  // namespace hmlab
