#include "plq/util.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace plq {

namespace {

int pool_size(int n) {
    int threads = static_cast<int>(std::thread::hardware_concurrency());
    if (const char* env = std::getenv("PLQ_THREADS")) threads = std::atoi(env);
    return std::max(1, std::min(threads, n));
}

} // namespace

void parallel_for(int n, const std::function<void(int)>& body) {
    if (n <= 0) return;
    const int threads = pool_size(n);
    if (threads == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (int i = next++; i < n; i = next++) {
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace plq
