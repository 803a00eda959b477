#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "exwalk/rng.hpp"
#include "exwalk/two_sided.hpp"

namespace exwalk {

/// Streaming view of a +/-1 walk: position, extrema and range in O(1) state.
/// Pure function of (key, number of steps taken).
class WalkCursor {
public:
    explicit WalkCursor(std::uint64_t key) : inc_(key) {}

    std::int64_t step() {
        pos_ += inc_.next();
        ++t_;
        if (pos_ < min_) min_ = pos_;
        if (pos_ > max_) max_ = pos_;
        return pos_;
    }

    std::uint64_t time() const { return t_; }
    std::int64_t position() const { return pos_; }
    std::int64_t min() const { return min_; }
    std::int64_t max() const { return max_; }
    std::uint64_t range() const { return static_cast<std::uint64_t>(max_ - min_) + 1; }

private:
    rng::IncrementStream inc_;
    std::uint64_t t_ = 0;
    std::int64_t pos_ = 0;
    std::int64_t min_ = 0;
    std::int64_t max_ = 0;
};

/// Visit counts L(x,n), stored over the visited interval.
struct LocalTimeField {
    std::int64_t lo = 0;                 // site of counts[0]
    std::vector<std::uint64_t> counts;   // contiguous over [lo, lo+size)

    std::uint64_t at(std::int64_t x) const {
        std::int64_t i = x - lo;
        if (i < 0 || i >= static_cast<std::int64_t>(counts.size())) return 0;
        return counts[static_cast<std::size_t>(i)];
    }
    std::uint64_t total() const {
        std::uint64_t s = 0;
        for (auto c : counts) s += c;
        return s;
    }
    std::uint64_t max_count() const {
        std::uint64_t m = 0;
        for (auto c : counts) m = c > m ? c : m;
        return m;
    }
};

/// Materialized trajectory: increments plus prefix positions and running
/// extrema. Intended for moderate n; long runs go through WalkCursor and the
/// streaming trackers instead.
class Trajectory {
public:
    // Beyond this, materializing positions is a bug in the caller.
    static constexpr std::uint64_t kMaterializeLimit = 1ull << 24;

    static Trajectory generate(std::uint64_t seed, std::uint64_t n) {
        check_length(n);
        Trajectory t;
        t.seed_ = seed;
        rng::IncrementStream inc(seed);
        t.increments_.reserve(n);
        for (std::uint64_t i = 0; i < n; ++i)
            t.increments_.push_back(static_cast<std::int8_t>(inc.next()));
        t.build_prefix();
        return t;
    }

    static Trajectory from_increments(std::vector<std::int8_t> increments,
                                      std::uint64_t seed = 0) {
        check_length(increments.size());
        for (auto d : increments)
            if (d != 1 && d != -1)
                throw std::invalid_argument("increments must be +/-1");
        Trajectory t;
        t.seed_ = seed;
        t.increments_ = std::move(increments);
        t.build_prefix();
        return t;
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t length() const { return increments_.size(); }
    const std::vector<std::int8_t>& increments() const { return increments_; }
    const std::vector<std::int64_t>& positions() const { return positions_; }
    std::int64_t position(std::uint64_t t) const { return positions_[t]; }
    std::int64_t min_prefix(std::uint64_t t) const { return min_prefix_[t]; }
    std::int64_t max_prefix(std::uint64_t t) const { return max_prefix_[t]; }

    void check_time(std::uint64_t n) const {
        if (n > length())
            throw std::out_of_range("time " + std::to_string(n) +
                                    " exceeds trajectory length " +
                                    std::to_string(length()));
    }

    /// Number of distinct sites visited by time n.
    std::uint64_t range_size(std::uint64_t n) const {
        check_time(n);
        return static_cast<std::uint64_t>(max_prefix_[n] - min_prefix_[n]) + 1;
    }

    std::pair<std::int64_t, std::int64_t> running_extrema(std::uint64_t n) const {
        check_time(n);
        return {min_prefix_[n], max_prefix_[n]};
    }

    LocalTimeField local_times(std::uint64_t n) const {
        check_time(n);
        LocalTimeField f;
        f.lo = min_prefix_[n];
        f.counts.assign(range_size(n), 0);
        for (std::uint64_t t = 0; t <= n; ++t)
            ++f.counts[static_cast<std::size_t>(positions_[t] - f.lo)];
        return f;
    }

    /// Flat record for JSON/CSV: {seed, n, final_position, min, max, range}.
    struct Summary {
        std::uint64_t seed;
        std::uint64_t n;
        std::int64_t final_position;
        std::int64_t min;
        std::int64_t max;
        std::uint64_t range;
    };
    Summary summary() const {
        std::uint64_t n = length();
        return {seed_, n, positions_[n], min_prefix_[n], max_prefix_[n],
                range_size(n)};
    }

private:
    static void check_length(std::uint64_t n) {
        if (n > kMaterializeLimit)
            throw std::length_error("trajectory too long to materialize; use WalkCursor");
    }

    void build_prefix() {
        std::uint64_t n = increments_.size();
        positions_.resize(n + 1);
        min_prefix_.resize(n + 1);
        max_prefix_.resize(n + 1);
        positions_[0] = min_prefix_[0] = max_prefix_[0] = 0;
        for (std::uint64_t t = 0; t < n; ++t) {
            positions_[t + 1] = positions_[t] + increments_[t];
            min_prefix_[t + 1] = std::min(min_prefix_[t], positions_[t + 1]);
            max_prefix_[t + 1] = std::max(max_prefix_[t], positions_[t + 1]);
        }
    }

    std::uint64_t seed_ = 0;
    std::vector<std::int8_t> increments_;
    std::vector<std::int64_t> positions_;
    std::vector<std::int64_t> min_prefix_;
    std::vector<std::int64_t> max_prefix_;
};

inline Trajectory generate_walk(std::uint64_t seed, std::uint64_t n) {
    return Trajectory::generate(seed, n);
}

}  // namespace exwalk
