#pragma once

#include <bit>
#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace hmlab {

inline constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 finalizer; also used as the fixed task-index hash for seed derivation.
inline uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Independent stream seed for task `task` under root seed `root`.
inline uint64_t derive_seed(uint64_t root, uint64_t task) {
    return mix64(root + kGolden * (task + 1));
}

/// Small deterministic PRNG (SplitMix64). Every stochastic routine in this
/// project takes its seed explicitly so runs are reproducible bit for bit.
class Rng {
  public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t u64() {
        state_ += kGolden;
        return mix64(state_);
    }

    /// Unbiased draw from [0, n).
    uint64_t below(uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
        uint64_t threshold = (0 - n) % n;
        for (;;) {
            uint64_t r = u64();
            if (r >= threshold) return r % n;
        }
    }

    double unit() { return static_cast<double>(u64() >> 11) * 0x1.0p-53; }

    bool coin() { return (u64() >> 63) != 0; }

  private:
    uint64_t state_;
};

inline uint64_t fnv1a64(std::string_view s) {
    uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline std::string to_hex(uint64_t v) {
    char buf[17];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, 16);
    return std::string(buf, ptr);
}

/// Shortest round-trippable decimal form; stable across runs of the same binary.
inline std::string fmt_double(double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

inline int bit_at(uint64_t x, int i) { return static_cast<int>((x >> i) & 1u); }

/// Runs fn(chunk_index) for chunk_index in [0, chunks). Results must not depend
/// on execution order; callers merge per-chunk outputs in chunk order.
template <typename Fn>
void parallel_chunks(int chunks, int threads, Fn fn) {
    if (threads <= 1 || chunks <= 1) {
        for (int c = 0; c < chunks; ++c) fn(c);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    int workers = std::min(threads, chunks);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                int c = next.fetch_add(1);
                if (c >= chunks) return;
                fn(c);
            }
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace hmlab
