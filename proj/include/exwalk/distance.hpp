#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "exwalk/excursion.hpp"
#include "exwalk/layers.hpp"
#include "exwalk/walk.hpp"

// Computable proxies for the per-layer and total word-distance bounds. Every
// bound is a function of (excursion tallies, range, layer parameters), so the
// same cores serve both materialized trajectories and streaming snapshots.

namespace exwalk {

struct DistanceConstants {
    double sigma = 1.0;  // lamp-group linear-speed constant, (0,1]
    double c0 = 1.0;     // truncation constant, (0,1]
    double d2 = 0.25;    // validity threshold for the lower proxy
};

/// Upper bound for layer s: 11 min{k_s sum_j T(half, j half, n) + range,
/// range l_s}, the sum running over the half-depth lattice.
inline double layer_upper_core(const ExcursionTally& half_tally, std::int64_t k_s,
                               double l_s, std::uint64_t range) {
    std::int64_t half = half_tally.k;
    std::uint64_t lattice_sum = 0;
    if (!half_tally.counts.empty()) {
        std::int64_t hi =
            half_tally.lo + static_cast<std::int64_t>(half_tally.counts.size()) - 1;
        for (std::int64_t x = ceil_div(half_tally.lo, half) * half; x <= hi; x += half)
            lattice_sum += half_tally.at(x);
    }
    double first = static_cast<double>(k_s) * static_cast<double>(lattice_sum) +
                   static_cast<double>(range);
    double second = static_cast<double>(range) * l_s;
    return 11.0 * std::min(first, second);
}

/// Lower proxy for layer s: (sigma c0 / 16) sum_x min{T(k_s,x,n), ceil(c0 l_s)}.
inline double layer_lower_core(const ExcursionTally& tally, double l_s,
                               double sigma, double c0) {
    std::uint64_t cap = kNoCap;
    if (std::isfinite(l_s)) {
        double c = std::ceil(c0 * l_s);
        cap = c < 0 ? 0 : static_cast<std::uint64_t>(c);
    }
    return sigma * c0 / 16.0 * static_cast<double>(truncated_sum(tally, cap));
}

/// Validity of the lower proxy at layer s: k_s <= d2 sqrt(n)/sqrt(loglog n).
inline bool lower_proxy_valid(double k_s, std::uint64_t n, double d2) {
    if (n < 16) return false;
    double nn = static_cast<double>(n);
    return k_s <= d2 * std::sqrt(nn) / std::sqrt(loglog(nn));
}

struct LayerDistanceBounds {
    std::size_t s = 0;
    std::uint64_t n = 0;
    double upper = 0.0;
    double lower_proxy = 0.0;
    bool lower_valid = false;
};

inline LayerDistanceBounds layer_bounds(const Trajectory& traj,
                                        const LayerParams& layers, std::size_t s,
                                        std::uint64_t n,
                                        const DistanceConstants& c = {}) {
    LayerDistanceBounds b;
    b.s = s;
    b.n = n;
    if (layers.k[s].inf) return b;  // infinite lamp offset: no activity
    std::int64_t ks = static_cast<std::int64_t>(layers.k[s].value);
    double ls = layers.l[s].to_double();
    std::uint64_t range = traj.range_size(n);
    ExcursionTally half = excursion_field(traj, half_depth(ks), n);
    b.upper = layer_upper_core(half, ks, ls, range);
    ExcursionTally full = excursion_field(traj, ks, n);
    b.lower_proxy = layer_lower_core(full, ls, c.sigma, c.c0);
    b.lower_valid = lower_proxy_valid(static_cast<double>(ks), n, c.d2);
    return b;
}

inline double layer_upper(const Trajectory& traj, const LayerParams& layers,
                          std::size_t s, std::uint64_t n) {
    return layer_bounds(traj, layers, s, n).upper;
}

inline double layer_lower_proxy(const Trajectory& traj, const LayerParams& layers,
                                std::size_t s, std::uint64_t n,
                                const DistanceConstants& c = {}) {
    return layer_bounds(traj, layers, s, n, c).lower_proxy;
}

struct TotalDistanceBounds {
    std::uint64_t n = 0;
    double upper = 0.0;          // 500 sum_{s <= s0} layer upper
    double lower = 0.0;          // max over valid layers s <= s0' of the proxy
    std::vector<std::size_t> layers_evaluated;
};

inline double total_upper(const Trajectory& traj, const LayerParams& layers,
                          std::uint64_t n) {
    std::uint64_t range = traj.range_size(n);
    std::size_t s0 = layer_index_for_range(layers, range);
    double sum = 0.0;
    for (std::size_t s = 0; s <= s0; ++s)
        sum += layer_bounds(traj, layers, s, n).upper;
    return 500.0 * sum;
}

inline TotalDistanceBounds total_bounds(const Trajectory& traj,
                                        const LayerParams& layers, std::uint64_t n,
                                        const DistanceConstants& c = {}) {
    TotalDistanceBounds t;
    t.n = n;
    std::uint64_t range = traj.range_size(n);
    std::size_t s0 = layer_index_for_range(layers, range);
    CriticalLayers crit = critical_layers(layers, std::max<std::uint64_t>(n, 16), 0.125);
    double sum = 0.0;
    for (std::size_t s = 0; s <= s0; ++s) {
        auto b = layer_bounds(traj, layers, s, n, c);
        sum += b.upper;
        t.layers_evaluated.push_back(s);
    }
    t.upper = 500.0 * sum;
    for (std::size_t s = 0; s <= crit.s0_prime; ++s) {
        auto b = layer_bounds(traj, layers, s, n, c);
        if (b.lower_valid && b.lower_proxy > t.lower) t.lower = b.lower_proxy;
    }
    return t;
}

inline double total_lower(const Trajectory& traj, const LayerParams& layers,
                          std::uint64_t n, const DistanceConstants& c = {}) {
    return total_bounds(traj, layers, n, c).lower;
}

/// The averaged pair (1/2)(D_s + D_{s+1}) at a critical layer, the shape
/// used by the liminf-side propositions.
inline double critical_pair_lower(const Trajectory& traj, const LayerParams& layers,
                                  std::size_t s, std::uint64_t n,
                                  const DistanceConstants& c = {}) {
    double a = layer_bounds(traj, layers, s, n, c).lower_proxy;
    double b = s + 1 < layers.size() && !layers.k[s + 1].inf
                   ? layer_bounds(traj, layers, s + 1, n, c).lower_proxy
                   : 0.0;
    return 0.5 * (a + b);
}

}  // namespace exwalk
