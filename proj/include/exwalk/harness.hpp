#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "exwalk/distance.hpp"
#include "exwalk/excursion.hpp"
#include "exwalk/layers.hpp"
#include "exwalk/rng.hpp"
#include "exwalk/walk.hpp"

// Multi-trajectory experiment over the exponential checkpoint grid t_m = 2^m.
// Each trial is one streaming pass: a WalkCursor drives excursion trackers for
// every depth the distance bounds will need, and each checkpoint snapshots
// the per-layer bounds, scaling functions and their ratios.

namespace exwalk {

struct ExperimentConfig {
    std::uint64_t seed = 1;
    std::uint64_t trials = 8;
    std::uint64_t n_max = 1u << 20;
    double checkpoint_base = 2.0;
    LayerParams layers;
    double r = 0.125;
    DistanceConstants dist;
    std::uint64_t m_burnin = 10;
    std::uint64_t threads = 0;  // 0: hardware concurrency

    void validate() const {
        if (trials < 1) throw std::invalid_argument("trials must be >= 1");
        if (n_max < 16) throw std::invalid_argument("n_max must be >= 16");
        if (checkpoint_base <= 1.0)
            throw std::invalid_argument("checkpoint_base must be > 1");
        layers.validate();
    }
};

/// Checkpoint times base^m with 16 <= t_m <= n_max, as (m, t_m) pairs.
inline std::vector<std::pair<std::uint64_t, std::uint64_t>> checkpoint_grid(
    double base, std::uint64_t n_max) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> grid;
    for (std::uint64_t m = 0;; ++m) {
        double tv = std::pow(base, static_cast<double>(m));
        if (tv > static_cast<double>(n_max) * (1.0 + 1e-9)) break;
        auto t = static_cast<std::uint64_t>(std::llround(tv));
        if (t < 16 || t > n_max) continue;
        if (!grid.empty() && grid.back().second == t) continue;
        grid.emplace_back(m, t);
    }
    return grid;
}

enum class RangeTag { low, high, neutral };

inline const char* tag_name(RangeTag t) {
    switch (t) {
        case RangeTag::low: return "range-low";
        case RangeTag::high: return "range-high";
        default: return "neutral";
    }
}

/// Regime classification of a checkpoint. The low test comes first; at desk
/// scale the two thresholds overlap and low is the rarer regime.
inline RangeTag classify_range(std::uint64_t range, std::uint64_t n) {
    double nn = static_cast<double>(n);
    double ll = loglog(nn);
    double rr = static_cast<double>(range);
    if (rr <= 2.0 * std::sqrt(nn) / std::sqrt(ll)) return RangeTag::low;
    if (rr >= 0.25 * std::sqrt(nn * ll)) return RangeTag::high;
    return RangeTag::neutral;
}

struct LilRecord {
    std::uint64_t trial = 0;
    std::uint64_t m = 0;
    std::uint64_t n = 0;
    std::uint64_t range = 0;
    std::size_t s0 = 0, s0p = 0, s1 = 0, s2 = 0, s3 = 0, s3t = 0;
    double d_up = 0.0;       // 500 sum_{s<=s0} per-layer upper
    double d_lo = 0.0;       // critical-pair lower proxy at the h-critical layer
    double g = 0.0, h = 0.0;
    double fs_limsup = 0.0, fs_liminf = 0.0;
    double r_up_g = 0.0, r_lo_h = 0.0;
    RangeTag tag = RangeTag::neutral;
};

/// Excursion trackers for a set of depths, spawned lazily once the walk's
/// range reaches each depth. While max-min < k no excursion state exists, so
/// arming the visited interval at spawn time is exact.
class MultiDepthTracker {
public:
    explicit MultiDepthTracker(std::vector<std::int64_t> depths) {
        std::sort(depths.begin(), depths.end());
        depths.erase(std::unique(depths.begin(), depths.end()), depths.end());
        pending_ = std::move(depths);
    }

    void step(std::int64_t p, std::int64_t min_before, std::int64_t max_before,
              std::int64_t min_after, std::int64_t max_after) {
        while (!pending_.empty() && max_after - min_after >= pending_.front()) {
            auto t = std::make_unique<ExcursionTracker>(pending_.front());
            t->arm_interval(min_before, max_before);
            live_.push_back(std::move(t));
            pending_.erase(pending_.begin());
        }
        for (auto& t : live_) t->feed(p, max_before);
    }

    /// Tally for one depth over [lo,hi]; empty (all zero) if never spawned.
    ExcursionTally tally(std::int64_t k, std::uint64_t n, std::int64_t lo,
                         std::int64_t hi) const {
        for (const auto& t : live_)
            if (t->depth() == k) return t->snapshot(n, lo, hi);
        ExcursionTally empty;
        empty.k = k;
        empty.n = n;
        empty.lo = lo;
        return empty;
    }

private:
    std::vector<std::int64_t> pending_;  // ascending; front spawns next
    std::vector<std::unique_ptr<ExcursionTracker>> live_;
};

namespace detail {

/// Depths the distance bounds evaluate: k_s and its half-depth for every
/// finite layer.
inline std::vector<std::int64_t> needed_depths(const LayerParams& layers) {
    std::vector<std::int64_t> d;
    for (std::size_t s = 0; s < layers.size(); ++s) {
        if (layers.k[s].inf) continue;
        auto k = static_cast<std::int64_t>(layers.k[s].value);
        d.push_back(k);
        d.push_back(half_depth(k));
    }
    return d;
}

inline double critical_pair_from_tallies(const MultiDepthTracker& tracker,
                                         const ExperimentConfig& cfg,
                                         std::size_t s, std::uint64_t n,
                                         std::int64_t lo, std::int64_t hi) {
    auto proxy = [&](std::size_t idx) -> double {
        if (idx >= cfg.layers.size() || cfg.layers.k[idx].inf) return 0.0;
        auto k = static_cast<std::int64_t>(cfg.layers.k[idx].value);
        ExcursionTally t = tracker.tally(k, n, lo, hi);
        return layer_lower_core(t, cfg.layers.l[idx].to_double(), cfg.dist.sigma,
                                cfg.dist.c0);
    };
    return 0.5 * (proxy(s) + proxy(s + 1));
}

inline void run_trial(const ExperimentConfig& cfg, std::uint64_t trial,
                      std::vector<LilRecord>& out) {
    auto grid = checkpoint_grid(cfg.checkpoint_base, cfg.n_max);
    MultiDepthTracker tracker(needed_depths(cfg.layers));
    WalkCursor cursor(rng::derive_key(cfg.seed, "lil", trial));
    const SpeedFunction& f = *cfg.layers.source;
    std::size_t next_cp = 0;
    while (next_cp < grid.size()) {
        std::int64_t min_b = cursor.min(), max_b = cursor.max();
        std::int64_t p = cursor.step();
        tracker.step(p, min_b, max_b, cursor.min(), cursor.max());
        if (cursor.time() != grid[next_cp].second) continue;

        std::uint64_t n = cursor.time();
        std::int64_t lo = cursor.min(), hi = cursor.max();
        LilRecord rec;
        rec.trial = trial;
        rec.m = grid[next_cp].first;
        rec.n = n;
        rec.range = cursor.range();
        CriticalLayers crit = critical_layers(cfg.layers, n, cfg.r, rec.range);
        rec.s0 = crit.s0;
        rec.s0p = crit.s0_prime;
        rec.s1 = crit.s1;
        rec.s2 = crit.s2;
        rec.s3 = crit.s3;
        rec.s3t = crit.s3_tilde;

        double up_sum = 0.0;
        for (std::size_t s = 0; s <= crit.s0; ++s) {
            if (cfg.layers.k[s].inf) continue;
            auto ks = static_cast<std::int64_t>(cfg.layers.k[s].value);
            ExcursionTally half = tracker.tally(half_depth(ks), n, lo, hi);
            up_sum += layer_upper_core(half, ks, cfg.layers.l[s].to_double(),
                                       rec.range);
        }
        rec.d_up = 500.0 * up_sum;
        rec.d_lo = critical_pair_from_tallies(tracker, cfg, crit.s3_tilde, n, lo, hi);
        rec.g = scaling_g(cfg.layers, n, cfg.r);
        rec.h = scaling_h(cfg.layers, n, cfg.r);
        rec.fs_limsup = scaling_from_f(f, n, ScalingMode::limsup);
        rec.fs_liminf = scaling_from_f(f, n, ScalingMode::liminf);
        rec.r_up_g = rec.d_up / rec.g;
        rec.r_lo_h = rec.d_lo / rec.h;
        rec.tag = classify_range(rec.range, n);
        out.push_back(rec);
        ++next_cp;
    }
}

}  // namespace detail

/// All records, ordered by (trial, m). Deterministic in cfg; independent of
/// the thread count.
inline std::vector<LilRecord> run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    if (!cfg.layers.source)
        throw std::invalid_argument("experiment layers need a speed function");
    // Fail before simulating if the layer horizon cannot serve n_max.
    scaling_g(cfg.layers, cfg.n_max, cfg.r);
    scaling_h(cfg.layers, cfg.n_max, cfg.r);

    std::vector<std::vector<LilRecord>> per_trial(cfg.trials);
    std::uint64_t nthreads = cfg.threads ? cfg.threads
                                         : std::max(1u, std::thread::hardware_concurrency());
    nthreads = std::min<std::uint64_t>(nthreads, cfg.trials);
    std::vector<std::thread> pool;
    for (std::uint64_t w = 0; w < nthreads; ++w)
        pool.emplace_back([&, w] {
            for (std::uint64_t t = w; t < cfg.trials; t += nthreads)
                detail::run_trial(cfg, t, per_trial[t]);
        });
    for (auto& th : pool) th.join();

    std::vector<LilRecord> all;
    for (auto& v : per_trial)
        all.insert(all.end(), v.begin(), v.end());
    return all;
}

struct BandSummary {
    std::vector<std::uint64_t> m;        // distinct checkpoint indices, ascending
    std::vector<double> running_sup;     // cumulative max across trials up to m
    std::vector<double> running_inf;     // cumulative min across trials up to m
    double final_sup = 0.0;
    double final_inf = 0.0;
    std::uint64_t m_burnin = 0;
};

/// Running extrema of one ratio across trials and m, over m >= m_burnin.
/// select picks the ratio (and may exclude a record by returning nullopt).
template <class Select>
BandSummary band_summary(const std::vector<LilRecord>& records,
                         std::uint64_t m_burnin, Select&& select) {
    std::map<std::uint64_t, std::pair<double, double>> by_m;  // m -> (max, min)
    for (const auto& rec : records) {
        if (rec.m < m_burnin) continue;
        auto v = select(rec);
        if (!v) continue;
        auto [it, fresh] = by_m.try_emplace(rec.m, *v, *v);
        if (!fresh) {
            it->second.first = std::max(it->second.first, *v);
            it->second.second = std::min(it->second.second, *v);
        }
    }
    if (by_m.empty()) throw std::invalid_argument("band_summary: no records selected");
    BandSummary b;
    b.m_burnin = m_burnin;
    double sup = -std::numeric_limits<double>::infinity();
    double inf = std::numeric_limits<double>::infinity();
    for (auto& [m, mm] : by_m) {
        sup = std::max(sup, mm.first);
        inf = std::min(inf, mm.second);
        b.m.push_back(m);
        b.running_sup.push_back(sup);
        b.running_inf.push_back(inf);
    }
    b.final_sup = sup;
    b.final_inf = inf;
    return b;
}

inline BandSummary band_summary_up_g(const std::vector<LilRecord>& records,
                                     std::uint64_t m_burnin) {
    return band_summary(records, m_burnin, [](const LilRecord& r) {
        return std::optional<double>(r.r_up_g);
    });
}

inline BandSummary band_summary_lo_h_rangelow(const std::vector<LilRecord>& records,
                                              std::uint64_t m_burnin) {
    return band_summary(records, m_burnin, [](const LilRecord& r) {
        return r.tag == RangeTag::low ? std::optional<double>(r.r_lo_h)
                                      : std::nullopt;
    });
}

struct ExtremalMarks {
    std::vector<std::size_t> low;      // indices into the record vector
    std::vector<std::size_t> high;
    std::vector<std::size_t> neutral;
};

inline ExtremalMarks extremal_time_marks(const std::vector<LilRecord>& records) {
    ExtremalMarks marks;
    for (std::size_t i = 0; i < records.size(); ++i) {
        switch (records[i].tag) {
            case RangeTag::low: marks.low.push_back(i); break;
            case RangeTag::high: marks.high.push_back(i); break;
            default: marks.neutral.push_back(i); break;
        }
    }
    return marks;
}

}  // namespace exwalk
