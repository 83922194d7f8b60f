#pragma once

#include <atomic>
#include <cstdint>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace banditlab {

// Deterministic 64-bit mixer (splitmix64 finalizer). Used for stream
// derivation and for counter-based draws that must be replayable by index.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
    return mix64(mix64(a) ^ (b + 0x9e3779b97f4a7c15ULL));
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix64(mix64(a, b) ^ (c + 0x632be59bd9b4e019ULL));
}

inline double u01_from_bits(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;  // [0,1)
}

// Reproducible per-replication random stream. Identical (master_seed,
// stream_id) pairs replay the exact same draw sequence; distinct stream ids
// are decorrelated through the mixer.
class RngStream {
  public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
        : master_seed_(master_seed), stream_id_(stream_id),
          engine_(mix64(master_seed, stream_id)) {}

    std::uint64_t master_seed() const { return master_seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    std::uint64_t next_bits() { return engine_(); }

    // One uniform draw in [0,1).
    double next_u01() { return u01_from_bits(engine_()); }

    // Standard normal, Box-Muller on two draws (no state across calls).
    double next_gauss() {
        double u1 = next_u01(), u2 = next_u01();
        while (u1 <= 0.0) u1 = next_u01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
    }

  private:
    std::uint64_t master_seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
};

// FNV-1a over bytes; stable across platforms (std::hash is not).
inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

// Primitive of x^{-alpha}: x^{1-alpha}/(1-alpha) for alpha != 1, log(x) else.
// Only differences of psi_alpha are ever meaningful.
inline double psi_alpha(double x, double alpha) {
    if (x <= 0.0) throw std::domain_error("psi_alpha: x must be positive");
    if (alpha == 1.0) return std::log(x);
    return std::pow(x, 1.0 - alpha) / (1.0 - alpha);
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Callers write results
// into pre-sized slots indexed by i, so aggregation order stays deterministic.
template <typename F>
void parallel_for_ordered(long long n, int jobs, F&& fn) {
    if (jobs <= 1 || n <= 1) {
        for (long long i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<long long> next{0};
    auto worker = [&]() {
        for (;;) {
            long long i = next.fetch_add(1);
            if (i >= n) return;
            fn(i);
        }
    };
    int nthreads = static_cast<int>(std::min<long long>(jobs, n));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(nthreads));
    for (int w = 0; w < nthreads; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

// Streaming mean/variance combiner (Welford).
struct RunningStat {
    long long n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }
    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
    double stderr_mean() const {
        return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
    }
};

}  // namespace banditlab
