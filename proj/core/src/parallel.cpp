#include "homoglab/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace homoglab::parallel {
namespace {

std::atomic<int> override_threads{0};

int default_threads() {
    if (const char* env = std::getenv("HOMOGLAB_THREADS")) {
        try {
            const int t = std::stoi(env);
            if (t > 0) return t;
        } catch (const std::exception&) {
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : int(hw);
}

} // namespace

int thread_limit() {
    const int t = override_threads.load();
    return t > 0 ? t : default_threads();
}

void set_thread_limit(int threads) { override_threads.store(threads > 0 ? threads : 0); }

void for_each_index(std::size_t count, const std::function<void(std::size_t)>& body) {
    if (count == 0) return;
    const std::size_t workers = std::min<std::size_t>(count, std::size_t(thread_limit()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex failure_mutex;
    std::size_t failed_index = count;
    std::exception_ptr failure;
    auto run = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (i < failed_index) {
                    failed_index = i;
                    failure = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

} // namespace homoglab::parallel
