#pragma once

#include <cstdint>
#include <cstdlib>
#include <cmath>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace gpe {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NearSingular : Error { using Error::Error; };
struct Singular : Error { using Error::Error; };
struct DegenerateCloud : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct NonFinite : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };
struct DomainViolation : Error { using Error::Error; };

struct ParseError : Error {
    int line;
    ParseError(int line_, const std::string& msg)
        : Error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

// Deterministic RNG. mt19937_64 output is fixed by the standard and all
// derived draws below avoid std::*_distribution, whose sequences are
// implementation-defined, so streams reproduce bit-exactly across toolchains.
class Rng {
public:
    explicit Rng(uint64_t seed) : eng_(seed) {}

    uint64_t next_u64() { return eng_(); }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // standard normal via Box-Muller (no state caching: one value per call,
    // two uniforms consumed)
    double normal() {
        double u1 = 1.0 - uniform();  // (0, 1]
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // uniform integer in [0, n)
    uint64_t uniform_int(uint64_t n) { return eng_() % n; }

private:
    std::mt19937_64 eng_;
};

// Multiply-accumulate counter threaded through the compute kernels. Only
// multiply-adds are counted (one per fused pair); exp, compares, and plain
// adds are free under this convention.
struct MacCounter {
    uint64_t macs = 0;
};

// splitmix64, used to derive independent stream seeds from (seed, index...)
inline uint64_t mix_seed(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline uint64_t mix_seed(uint64_t a, uint64_t b) { return mix_seed(a ^ mix_seed(b)); }

// Thread count: GPE_THREADS env var wins, otherwise 1 (single-threaded runs
// are the reproducibility baseline).
inline int thread_count() {
    if (const char* env = std::getenv("GPE_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return 1;
}

// Chunked parallel-for. fn(begin, end, chunk_index) over [0, n). Chunk
// boundaries depend only on (n, threads), so any per-chunk results can be
// reduced in chunk order for a schedule-independent total.
inline void parallel_for(int64_t n, int threads,
                         const std::function<void(int64_t, int64_t, int)>& fn) {
    if (n <= 0) return;
    if (threads <= 1 || n == 1) {
        fn(0, n, 0);
        return;
    }
    int chunks = static_cast<int>(std::min<int64_t>(threads, n));
    std::vector<std::thread> pool;
    pool.reserve(chunks);
    int64_t per = (n + chunks - 1) / chunks;
    for (int c = 0; c < chunks; ++c) {
        int64_t b = c * per, e = std::min<int64_t>(n, b + per);
        if (b >= e) break;
        pool.emplace_back([&fn, b, e, c] { fn(b, e, c); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace gpe
