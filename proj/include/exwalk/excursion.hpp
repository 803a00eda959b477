#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "exwalk/two_sided.hpp"
#include "exwalk/walk.hpp"

// k-excursion statistics. An excursion from x begins at a visit to x after
// which the walk reaches x-k before returning to x; it is counted at the time
// the walk returns to x. (The return-time convention is the one under which
// the reflection identity Pr(T(k,0,n)>=a) = Pr(max S >= 2ka) is an exact
// path-count identity; see the tests.)

namespace exwalk {

inline constexpr std::uint64_t kNoCap = std::numeric_limits<std::uint64_t>::max();

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b, r = a % b;
    return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}
inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
    return -floor_div(-a, b);
}

inline void check_depth(std::int64_t k) {
    if (k <= 0) throw std::invalid_argument("excursion depth k must be >= 1");
}

/// Half-depth rule: k/2 for even k, floor(k/2) for odd, never below 1.
inline std::int64_t half_depth(std::int64_t k) {
    return k >= 2 ? k / 2 : 1;
}

/// Sparse map x -> T(k,x,n) over the visited interval.
struct ExcursionTally {
    std::int64_t k = 1;
    std::uint64_t n = 0;
    std::int64_t lo = 0;
    std::vector<std::uint64_t> counts;  // site lo + i

    std::uint64_t at(std::int64_t x) const {
        std::int64_t i = x - lo;
        if (i < 0 || i >= static_cast<std::int64_t>(counts.size())) return 0;
        return counts[static_cast<std::size_t>(i)];
    }

    /// Pointwise sum; for aggregating statistics across independent trials
    /// only. Concatenated path segments must not be merged this way.
    void merge(const ExcursionTally& other) {
        if (other.counts.empty()) return;
        if (counts.empty()) {
            *this = other;
            return;
        }
        if (k != other.k) throw std::invalid_argument("tally merge: depth mismatch");
        std::int64_t new_lo = std::min(lo, other.lo);
        std::int64_t new_hi =
            std::max(lo + static_cast<std::int64_t>(counts.size()),
                     other.lo + static_cast<std::int64_t>(other.counts.size()));
        std::vector<std::uint64_t> merged(static_cast<std::size_t>(new_hi - new_lo), 0);
        for (std::size_t i = 0; i < counts.size(); ++i)
            merged[static_cast<std::size_t>(lo - new_lo) + i] += counts[i];
        for (std::size_t i = 0; i < other.counts.size(); ++i)
            merged[static_cast<std::size_t>(other.lo - new_lo) + i] += other.counts[i];
        lo = new_lo;
        counts = std::move(merged);
        n = std::max(n, other.n);
    }
};

/// T(k,n) = k * sum over the lattice kZ of T(k,kx,n).
inline std::uint64_t weighted_total(const ExcursionTally& tally) {
    std::uint64_t sum = 0;
    if (tally.counts.empty()) return 0;
    std::int64_t hi = tally.lo + static_cast<std::int64_t>(tally.counts.size()) - 1;
    for (std::int64_t x = ceil_div(tally.lo, tally.k) * tally.k; x <= hi; x += tally.k)
        sum += tally.at(x);
    return static_cast<std::uint64_t>(tally.k) * sum;
}

/// sum_x min{T(k,x,n), l}; cap == kNoCap means the plain sum.
inline std::uint64_t truncated_sum(const ExcursionTally& tally, std::uint64_t cap) {
    std::uint64_t sum = 0;
    for (auto c : tally.counts) sum += std::min(c, cap);
    return sum;
}

inline std::uint64_t max_excursions(const ExcursionTally& tally) {
    std::uint64_t m = 0;
    for (auto c : tally.counts) m = std::max(m, c);
    return m;
}

/// Streaming per-site excursion state machine for one depth k.
/// Feed positions in order; counts are exact at every prefix.
class ExcursionTracker {
public:
    explicit ExcursionTracker(std::int64_t k) : k_(k) { check_depth(k); }

    std::int64_t depth() const { return k_; }

    /// Mark the interval [lo,hi] as visited-and-armed. Exact initialization
    /// when tracking starts lazily: while max-min < k no site can have hit
    /// x-k after its last visit, so every visited site is simply armed.
    void arm_interval(std::int64_t lo, std::int64_t hi) {
        state_.ensure(lo);
        state_.ensure(hi);
        for (std::int64_t x = lo; x <= hi; ++x) state_.ref(x) = kArmed;
    }

    void feed(std::int64_t p, std::int64_t cur_max) {
        // Visiting p is the x-k event for site p+k, if that site is live.
        std::int64_t above = p + k_;
        if (above <= cur_max && state_.get(above) == kArmed)
            state_.ref(above) = kAwaitReturn;
        state_.ensure(p);
        counts_.ensure(p);
        std::uint8_t& st = state_.ref(p);
        if (st == kAwaitReturn) ++counts_.ref(p);
        st = kArmed;
    }

    ExcursionTally snapshot(std::uint64_t n, std::int64_t lo, std::int64_t hi) const {
        ExcursionTally t;
        t.k = k_;
        t.n = n;
        t.lo = lo;
        t.counts.resize(static_cast<std::size_t>(hi - lo + 1));
        for (std::int64_t x = lo; x <= hi; ++x)
            t.counts[static_cast<std::size_t>(x - lo)] = counts_.get(x);
        return t;
    }

    std::uint64_t count_at(std::int64_t x) const { return counts_.get(x); }

private:
    static constexpr std::uint8_t kIdle = 0;  // default: not visited / armed
    static constexpr std::uint8_t kArmed = 0;
    static constexpr std::uint8_t kAwaitReturn = 1;

    std::int64_t k_;
    TwoSided<std::uint8_t> state_;
    TwoSided<std::uint64_t> counts_;
};

/// T(k,x,n) for all x in one pass.
inline ExcursionTally excursion_field(const Trajectory& traj, std::int64_t k,
                                      std::uint64_t n) {
    check_depth(k);
    traj.check_time(n);
    ExcursionTracker tracker(k);
    tracker.arm_interval(0, 0);
    std::int64_t mx = 0;
    for (std::uint64_t t = 1; t <= n; ++t) {
        std::int64_t p = traj.position(t);
        tracker.feed(p, mx);
        if (p > mx) mx = p;
    }
    auto [lo, hi] = traj.running_extrema(n);
    return tracker.snapshot(n, lo, hi);
}

/// Single-site count, by direct scan of visits to x. Agrees with
/// excursion_field pointwise; kept as an independent route.
inline std::uint64_t count_excursions(const Trajectory& traj, std::int64_t k,
                                      std::int64_t x, std::uint64_t n) {
    check_depth(k);
    traj.check_time(n);
    std::uint64_t count = 0;
    bool armed = false;        // last event at x was a visit
    bool await_return = false; // x-k seen since last visit to x
    for (std::uint64_t t = 0; t <= n; ++t) {
        std::int64_t p = traj.position(t);
        if (p == x) {
            if (await_return) ++count;
            armed = true;
            await_return = false;
        } else if (p == x - k && armed) {
            armed = false;
            await_return = true;
        }
    }
    return count;
}

/// The k-induced walk: S observed at successive first passages to +/-k
/// relative displacement. Y_j = S_{n_j}/k lives on Z.
struct InducedWalk {
    std::int64_t k = 1;
    std::vector<std::uint64_t> jump_times;  // n_0 = 0 first
    std::vector<std::int64_t> positions;    // Y_j
    std::uint64_t steps = 0;                // N_k(n)
    TwoSided<std::uint64_t> local;          // L^(k)(x,n)
    TwoSided<std::uint64_t> down_steps;     // l^(k)(x,n)
};

inline InducedWalk induce_walk(const Trajectory& traj, std::int64_t k,
                               std::uint64_t n) {
    check_depth(k);
    traj.check_time(n);
    InducedWalk w;
    w.k = k;
    w.jump_times.push_back(0);
    w.positions.push_back(0);
    w.local.ensure(0);
    ++w.local.ref(0);
    std::int64_t anchor = 0, y = 0;
    for (std::uint64_t t = 1; t <= n; ++t) {
        std::int64_t p = traj.position(t);
        if (p - anchor == k || anchor - p == k) {
            if (p < anchor) {
                w.down_steps.ensure(y);
                ++w.down_steps.ref(y);
                --y;
            } else {
                ++y;
            }
            anchor = p;
            w.jump_times.push_back(t);
            w.positions.push_back(y);
            w.local.ensure(y);
            ++w.local.ref(y);
            ++w.steps;
        }
    }
    return w;
}

struct SandwichResult {
    std::int64_t lower;   // l^(2k)(ceil(x/2k), n) - 1
    std::uint64_t mid;    // T(k,x,n)
    std::uint64_t upper;  // L^(half)(floor(x/half), n)
    bool ok;              // lower <= mid <= upper
};

/// Both sides of the induced-walk sandwich around T(k,x,n). The lower bound
/// is a theorem only for x on the k-lattice; callers probing other x get the
/// raw evaluation.
inline SandwichResult sandwich_check(const Trajectory& traj, std::int64_t k,
                                     std::int64_t x, std::uint64_t n) {
    if (k < 2) throw std::invalid_argument("sandwich_check requires k >= 2");
    traj.check_time(n);
    std::int64_t h = half_depth(k);
    InducedWalk twice = induce_walk(traj, 2 * k, n);
    InducedWalk half = induce_walk(traj, h, n);
    SandwichResult r{};
    r.lower =
        static_cast<std::int64_t>(twice.down_steps.get(ceil_div(x, 2 * k))) - 1;
    r.mid = count_excursions(traj, k, x, n);
    r.upper = half.local.get(floor_div(x, h));
    r.ok = r.lower <= static_cast<std::int64_t>(r.mid) && r.mid <= r.upper;
    return r;
}

}  // namespace exwalk
