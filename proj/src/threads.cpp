#include "qce/threads.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "qce/types.hpp"

#ifdef QCE_HAVE_OPENBLAS
extern "C" void openblas_set_num_threads(int);
#endif

namespace qce {

namespace {

std::atomic<int>& configured()
{
    static std::atomic<int> n{0};
    return n;
}

} // namespace

int thread_count()
{
    if (const int n = configured().load(); n > 0) return n;
    return std::max(1u, std::thread::hardware_concurrency());
}

void set_thread_count(int n)
{
    require(n >= 1, "thread count must be at least 1");
    configured().store(n);
#ifdef QCE_HAVE_OPENBLAS
    openblas_set_num_threads(n);
#endif
}

void configure_threads_from_env()
{
    const char* env = std::getenv("QCE_THREADS");
    if (env == nullptr || *env == '\0') return;
    int n = 0;
    try {
        n = std::stoi(env);
    } catch (const std::exception&) {
        throw DomainError(std::string("QCE_THREADS is not an integer: ") + env);
    }
    set_thread_count(n);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body)
{
    const auto workers = std::min<std::size_t>(n, static_cast<std::size_t>(thread_count()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace qce
