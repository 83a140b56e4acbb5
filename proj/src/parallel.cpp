#include "pmlab/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <mutex>
#include <thread>

namespace pmlab {

namespace {

std::atomic<int> g_workers{0};

int default_workers() {
    if (const char* env = std::getenv("PMLAB_WORKERS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? int(hc) : 1;
}

}  // namespace

int worker_count() {
    int w = g_workers.load();
    if (w <= 0) {
        w = default_workers();
        g_workers.store(w);
    }
    return w;
}

void set_worker_count(int n) { g_workers.store(n > 0 ? n : default_workers()); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    if (n == 0) return;
    std::size_t workers = std::min<std::size_t>(std::size_t(worker_count()), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

void Moments::add(double v) {
    if (n == 0) {
        lo = hi = v;
    } else {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    sum += v;
    sum_sq += v * v;
    ++n;
}

void Moments::merge(const Moments& o) {
    if (o.n == 0) return;
    if (n == 0) {
        lo = o.lo;
        hi = o.hi;
    } else {
        lo = std::min(lo, o.lo);
        hi = std::max(hi, o.hi);
    }
    sum += o.sum;
    sum_sq += o.sum_sq;
    n += o.n;
}

double Moments::stderr_of_mean() const {
    if (n < 2 || lo == hi) return 0.0;
    double m = sum / double(n);
    double var = (sum_sq - double(n) * m * m) / double(n - 1);
    if (var < 0.0) var = 0.0;
    return std::sqrt(var / double(n));
}

std::vector<Moments> chunked_moments(
    std::size_t n_samples, std::size_t outputs,
    const std::function<void(std::size_t, double*)>& sample) {
    std::size_t chunks = (n_samples + kChunkSize - 1) / kChunkSize;
    std::vector<Moments> partial(chunks * outputs);
    parallel_for(chunks, [&](std::size_t c) {
        std::vector<double> out(outputs);
        std::size_t lo = c * kChunkSize, hi = std::min(n_samples, lo + kChunkSize);
        Moments* acc = &partial[c * outputs];
        for (std::size_t i = lo; i < hi; ++i) {
            sample(i, out.data());
            for (std::size_t k = 0; k < outputs; ++k) acc[k].add(out[k]);
        }
    });
    std::vector<Moments> total(outputs);
    for (std::size_t c = 0; c < chunks; ++c)
        for (std::size_t k = 0; k < outputs; ++k) total[k].merge(partial[c * outputs + k]);
    return total;
}

std::uint64_t hash_double(double v) {
    if (v == 0.0) v = 0.0;  // fold -0
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    return splitmix64(bits);
}

}  // namespace pmlab
