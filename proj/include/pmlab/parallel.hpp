#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace pmlab {

// Worker count: PMLAB_WORKERS if set, else hardware concurrency.
int worker_count();
void set_worker_count(int n);

// Runs body(i) for i in [0, n). Indices are split into contiguous blocks, one per worker.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// Fixed chunk size for Monte Carlo reductions. Results never depend on the worker count.
constexpr std::size_t kChunkSize = 256;

struct Moments {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t n = 0;
    double lo = 0.0;
    double hi = 0.0;

    // Exact for constant samples.
    double mean() const { return n == 0 ? 0.0 : (lo == hi ? lo : sum / double(n)); }
    void add(double v);
    void merge(const Moments& o);
    double stderr_of_mean() const;
};

// sample(i, out) writes `outputs` values for sample i. Sums are formed per chunk in index
// order and chunks are combined in order.
std::vector<Moments> chunked_moments(
    std::size_t n_samples, std::size_t outputs,
    const std::function<void(std::size_t, double*)>& sample);

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t salt = 0) {
    return splitmix64(splitmix64(seed ^ splitmix64(salt)) + index);
}

using Rng = std::mt19937_64;

inline Rng sample_rng(std::uint64_t seed, std::uint64_t index, std::uint64_t salt = 0) {
    return Rng(stream_seed(seed, index, salt));
}

// Hash helper for combining keys into derived seeds.
inline std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
    return splitmix64(h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
}

std::uint64_t hash_double(double v);

}  // namespace pmlab
