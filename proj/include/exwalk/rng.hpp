#pragma once

#include <cstdint>
#include <string_view>

// Counter-based pseudorandomness. Every random quantity in the project is a
// pure function of (master seed, task name, trial index, counter), so trials
// can run on any number of threads, in any order, with bit-identical results.

namespace exwalk::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

/// SplitMix64 finalizer (Steele-Lea-Flood). Bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// FNV-1a over a string, used to key task-specific streams.
constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

/// Value of stream `key` at position `counter`.
constexpr std::uint64_t at(std::uint64_t key, std::uint64_t counter) noexcept {
    return mix64(key + (counter + 1) * kGolden);
}

/// Derivation documented in the README: task streams never collide with the
/// master stream and are stable across reorderings of the task list.
constexpr std::uint64_t derive_key(std::uint64_t master, std::string_view task,
                                   std::uint64_t trial) noexcept {
    return mix64(mix64(master ^ fnv1a64(task)) ^ (trial * kGolden));
}

/// Stateless-restartable stream of i.i.d. uniform u64 blocks.
class Stream {
public:
    explicit Stream(std::uint64_t key, std::uint64_t counter = 0) noexcept
        : key_(key), counter_(counter) {}

    std::uint64_t next() noexcept { return at(key_, counter_++); }

    /// Uniform double in [0,1).
    double next_unit() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    std::uint64_t key() const noexcept { return key_; }
    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_;
};

/// +/-1 increments, 64 per block. Block b of stream `key` is rng::at(key, b),
/// bit i (LSB first) giving the increment at time b*64 + i.
class IncrementStream {
public:
    explicit IncrementStream(std::uint64_t key) noexcept : key_(key) {}

    int next() noexcept {
        if (bit_ == 64) {
            block_ = at(key_, block_index_++);
            bit_ = 0;
        }
        int inc = (block_ >> bit_) & 1 ? +1 : -1;
        ++bit_;
        return inc;
    }

private:
    std::uint64_t key_;
    std::uint64_t block_ = 0;
    std::uint64_t block_index_ = 0;
    unsigned bit_ = 64;
};

}  // namespace exwalk::rng
