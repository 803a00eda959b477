#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Diagonal-product parameter model: the group is represented entirely by the
// sequences (k_s, l_s) built from a target speed function, together with the
// critical-layer indices and the scaling functions g, h they induce.

namespace exwalk {

using BigInt = boost::multiprecision::cpp_int;

/// Natural log of log; every loglog in the project is ln ln.
inline double loglog(double x) { return std::log(std::log(x)); }

/// Nonnegative integer extended with an infinity sentinel.
struct ExtInt {
    BigInt value = 0;
    bool inf = false;

    static ExtInt infinity() { return {0, true}; }
    static ExtInt of(BigInt v) { return {std::move(v), false}; }

    double to_double() const {
        return inf ? std::numeric_limits<double>::infinity()
                   : static_cast<double>(value);
    }
    std::string str() const { return inf ? "inf" : value.str(); }
};

/// Target speed function f on [1,inf): either x^alpha or a piecewise-linear
/// interpolation in log-log coordinates.
class SpeedFunction {
public:
    static SpeedFunction powerlaw(double alpha, double epsilon = 0.0) {
        SpeedFunction f;
        f.alpha_ = alpha;
        f.epsilon_ = epsilon;
        return f;
    }

    /// Table of (x, f(x)) points, interpolated linearly in (log x, log f);
    /// the last segment's slope extrapolates beyond the table.
    static SpeedFunction table(std::vector<std::pair<double, double>> pts,
                               double epsilon = 0.0) {
        if (pts.size() < 2) throw std::invalid_argument("speed table needs >= 2 points");
        SpeedFunction f;
        f.epsilon_ = epsilon;
        for (auto& [x, y] : pts) {
            if (x < 1.0 || y <= 0.0)
                throw std::invalid_argument("speed table points need x >= 1, f > 0");
            f.log_x_.push_back(std::log(x));
            f.log_f_.push_back(std::log(y));
        }
        for (std::size_t i = 1; i < f.log_x_.size(); ++i)
            if (f.log_x_[i] <= f.log_x_[i - 1])
                throw std::invalid_argument("speed table x values must increase");
        return f;
    }

    double operator()(double x) const {
        if (x < 1.0) throw std::domain_error("speed function defined on [1,inf)");
        if (log_x_.empty()) return std::pow(x, alpha_);
        double lx = std::log(x);
        std::size_t i = 1;
        while (i + 1 < log_x_.size() && log_x_[i] < lx) ++i;
        double t = (lx - log_x_[i - 1]) / (log_x_[i] - log_x_[i - 1]);
        return std::exp(log_f_[i - 1] + t * (log_f_[i] - log_f_[i - 1]));
    }

    double epsilon() const { return epsilon_; }
    bool is_powerlaw() const { return log_x_.empty(); }
    double alpha() const { return alpha_; }

private:
    double alpha_ = 0.5;
    double epsilon_ = 0.0;
    std::vector<double> log_x_;
    std::vector<double> log_f_;
};

struct SpeedValidation {
    struct Violation {
        std::string check;
        double x_prev, x_next;
    };
    bool accepted = false;
    std::string rejection;  // empty unless rejected outright
    std::vector<Violation> violations;
};

/// Grid checks of the theorem hypotheses: f(1)=1, x/f and f/sqrt(x)
/// nondecreasing, and when epsilon > 0 the super-diffusivity margin.
inline SpeedValidation validate_speed(const SpeedFunction& f, double x_max,
                                      std::size_t grid_points = 256) {
    SpeedValidation report;
    if (std::abs(f(1.0) - 1.0) > 1e-9) {
        report.rejection = "f(1) != 1";
        return report;
    }
    const double tol = 1e-9;
    double ratio = std::pow(x_max, 1.0 / static_cast<double>(grid_points));
    double ee = std::exp(std::exp(1.0));
    double prev_x = 1.0;
    for (std::size_t i = 1; i <= grid_points; ++i) {
        double x = std::pow(ratio, static_cast<double>(i));
        double fx = f(x), fp = f(prev_x);
        if (x / fx < prev_x / fp * (1.0 - tol))
            report.violations.push_back({"x/f nondecreasing", prev_x, x});
        if (fx / std::sqrt(x) < fp / std::sqrt(prev_x) * (1.0 - tol))
            report.violations.push_back({"f/sqrt(x) nondecreasing", prev_x, x});
        if (f.epsilon() > 0.0 && prev_x >= ee) {
            double e1 = f.epsilon();
            double mx = fx / (std::sqrt(x) * std::pow(loglog(x), 1.0 + e1));
            double mp = fp / (std::sqrt(prev_x) * std::pow(loglog(prev_x), 1.0 + e1));
            if (mx < mp * (1.0 - tol))
                report.violations.push_back({"epsilon margin nondecreasing", prev_x, x});
        }
        prev_x = x;
    }
    report.accepted = report.violations.empty();
    if (!report.accepted && report.rejection.empty())
        report.rejection = "monotonicity violation on grid";
    return report;
}

/// The sequences (k_s, l_s), with at most one infinite tail entry.
struct LayerParams {
    double m0 = 2.0;
    std::vector<ExtInt> k;
    std::vector<ExtInt> l;
    std::optional<SpeedFunction> source;
    // First index from which loglog(k_s) <= l_s holds through the end;
    // -1 when it never does.
    std::int64_t loglog_index = -1;
    // Continuation of the construction one step past the horizon, so fbar
    // can evaluate the top bracket. Not part of the public sequence.
    std::optional<ExtInt> bracket_k, bracket_l;
    bool diffusive_tail = false;  // builder found no feasible branch

    std::size_t size() const { return k.size(); }

    void validate() const {
        if (k.empty() || k.size() != l.size())
            throw std::invalid_argument("layer sequences empty or mismatched");
        if (k[0].inf || l[0].inf || k[0].value != 1 || l[0].value != 1)
            throw std::invalid_argument("layers must start at k_0 = l_0 = 1");
        std::size_t infs = 0;
        for (std::size_t s = 0; s < k.size(); ++s) infs += k[s].inf || l[s].inf;
        if (infs > 1) throw std::invalid_argument("only the last layer may be infinite");
    }

    void compute_loglog_index() {
        loglog_index = -1;
        for (std::int64_t s = static_cast<std::int64_t>(size()) - 1; s >= 0; --s) {
            const auto& ks = k[static_cast<std::size_t>(s)];
            const auto& ls = l[static_cast<std::size_t>(s)];
            double lhs = ks.inf ? std::numeric_limits<double>::infinity()
                                : (ks.value <= 15 ? 0.0 : loglog(ks.to_double()));
            if (ls.inf || lhs <= ls.to_double())
                loglog_index = s;
            else
                break;
        }
    }
};

namespace detail {

inline BigInt ceil_big(double v) {
    if (v <= 0) return 0;
    BigInt b(static_cast<boost::multiprecision::cpp_int>(std::ceil(v)));
    return b;
}

// g(x) = f(x^2)/x, evaluated in doubles; monotone nondecreasing when f
// satisfies the hypotheses, as is x/g(x).
inline double eval_g(const SpeedFunction& f, const BigInt& x) {
    double xd = static_cast<double>(x);
    return f(xd * xd) / xd;
}

}  // namespace detail

/// Inductive construction of (k_s, l_s) from f. Follows the feasible-window
/// search: minimal integer y >= m0^2 k_s l_s with m0 l_s <= g(y) <= y/(m0 k_s),
/// branching on which constraint binds (ties grow l). Halts once
/// (k_s l_s)^2 > x_max.
inline LayerParams build_layers(const SpeedFunction& f, double m0, double x_max) {
    if (m0 <= 1.0) throw std::invalid_argument("m0 must be > 1");
    if (x_max < 1.0) throw std::invalid_argument("x_max must be >= 1");
    auto report = validate_speed(f, std::max(4.0, x_max));
    if (!report.accepted)
        throw std::invalid_argument("speed function rejected: " + report.rejection);

    const double rel_tol = 1e-12;
    LayerParams layers;
    layers.m0 = m0;
    layers.source = f;
    layers.k.push_back(ExtInt::of(1));
    layers.l.push_back(ExtInt::of(1));

    auto within_horizon = [&](const ExtInt& ks, const ExtInt& ls) {
        if (ks.inf || ls.inf) return false;
        double kl = static_cast<double>(ks.value * ls.value);
        return kl * kl <= x_max;
    };

    while (true) {
        const ExtInt& kc = layers.k.back();
        const ExtInt& lc = layers.l.back();
        if (!within_horizon(kc, lc)) break;
        BigInt ks = kc.value, ls = lc.value;

        auto cond_low = [&](const BigInt& y) {  // g(y) >= m0 l_s
            return detail::eval_g(f, y) >= m0 * static_cast<double>(ls) * (1.0 - rel_tol);
        };
        auto cond_high = [&](const BigInt& y) {  // g(y) <= y/(m0 k_s)
            return detail::eval_g(f, y) * m0 * static_cast<double>(ks) <=
                   static_cast<double>(y) * (1.0 + rel_tol);
        };

        BigInt y_min = detail::ceil_big(m0 * m0 * static_cast<double>(ks * ls));
        if (y_min < 1) y_min = 1;
        // Feasible set of each condition is an upper ray (g and x/g are
        // nondecreasing), so double to bracket, then bisect for the minimum.
        BigInt y_hi = y_min;
        BigInt horizon_y = detail::ceil_big(std::min(x_max * x_max, 1e300));
        bool found = false;
        while (y_hi <= horizon_y) {
            if (cond_low(y_hi) && cond_high(y_hi)) {
                found = true;
                break;
            }
            y_hi *= 2;
        }
        if (!found) {
            // No feasible window below the horizon: decide which branch the
            // tail follows from which condition failed at the horizon.
            if (!cond_high(horizon_y)) {
                // g(x) > x/(m0 k_s) throughout: l escapes.
                layers.k.push_back(ExtInt::of(detail::ceil_big(
                    m0 * static_cast<double>(ks))));
                layers.l.push_back(ExtInt::infinity());
            } else {
                // g bounded below m0 l_s: diffusive tail, k escapes.
                layers.k.push_back(ExtInt::infinity());
                layers.l.push_back(ExtInt::of(detail::ceil_big(
                    m0 * static_cast<double>(ls))));
                layers.diffusive_tail = true;
            }
            break;
        }
        BigInt lo = y_min, hi = y_hi;
        while (lo < hi) {
            BigInt mid = (lo + hi) / 2;
            if (cond_low(mid) && cond_high(mid))
                hi = mid;
            else
                lo = mid + 1;
        }
        BigInt y = lo;
        double gy = detail::eval_g(f, y);
        ExtInt next_k, next_l;
        if (gy <= m0 * static_cast<double>(ls) * (1.0 + rel_tol)) {
            // g(y) = m0 l_s binds (ties land here): l grows by m0, k takes y.
            BigInt nl = detail::ceil_big(m0 * static_cast<double>(ls));
            BigInt nk = y / nl;
            BigInt floor_k = detail::ceil_big(m0 * static_cast<double>(ks));
            next_k = ExtInt::of(nk < floor_k ? floor_k : nk);
            next_l = ExtInt::of(nl);
        } else {
            // g(y) = y/(m0 k_s) binds: k grows by m0, l takes g(y).
            BigInt nk = detail::ceil_big(m0 * static_cast<double>(ks));
            BigInt nl = y / nk;
            BigInt floor_l = detail::ceil_big(m0 * static_cast<double>(ls));
            next_l = ExtInt::of(nl < floor_l ? floor_l : nl);
            next_k = ExtInt::of(nk);
        }
        if (within_horizon(next_k, next_l)) {
            layers.k.push_back(next_k);
            layers.l.push_back(next_l);
        } else {
            layers.bracket_k = next_k;
            layers.bracket_l = next_l;
            break;
        }
    }

    layers.compute_loglog_index();
    layers.validate();
    return layers;
}

/// Piecewise surrogate fbar(x) = sqrt(x) l_s + x/k_{s+1} on the bracket
/// (k_s l_s)^2 <= x < (k_{s+1} l_{s+1})^2. Infinite k contributes 0.
inline double fbar(const LayerParams& layers, double x) {
    if (x < 1.0) throw std::out_of_range("fbar domain is x >= 1");
    auto kl2 = [&](std::size_t s) -> double {
        double kl = layers.k[s].to_double() * layers.l[s].to_double();
        return kl * kl;
    };
    std::size_t last = layers.size() - 1;
    std::size_t s = 0;
    while (s < last && kl2(s + 1) <= x) ++s;
    if (s == last && !(layers.k[s].inf || layers.l[s].inf)) {
        // Top finite bracket: the hidden continuation supplies k_{s+1}.
        if (!layers.bracket_k || kl2(s) > x)
            if (kl2(s) > x)
                throw std::out_of_range("fbar: x below the base bracket");
        double next_k = layers.bracket_k ? layers.bracket_k->to_double()
                                         : std::numeric_limits<double>::infinity();
        double bound = layers.bracket_k
                           ? layers.bracket_k->to_double() * layers.bracket_l->to_double()
                           : std::numeric_limits<double>::infinity();
        if (x >= bound * bound)
            throw std::out_of_range("fbar: x beyond construction horizon");
        return std::sqrt(x) * layers.l[s].to_double() + x / next_k;
    }
    if (layers.l[s].inf)
        throw std::out_of_range("fbar: bracket has infinite l");
    double next_k = s + 1 < layers.size()
                        ? layers.k[s + 1].to_double()
                        : std::numeric_limits<double>::infinity();
    return std::sqrt(x) * layers.l[s].to_double() + x / next_k;
}

/// The critical-layer indices at time n. Each is the largest s whose
/// defining inequality holds, clamped to 0 (the base layer k_0 l_0 = 1 is
/// always considered in range).
struct CriticalLayers {
    std::uint64_t n = 0;
    double r = 0.125;
    std::size_t s0 = 0;        // k_s <= range (per-trajectory; set by overload)
    bool s0_set = false;
    std::size_t s0_prime = 0;  // k_s <= r sqrt(n)/sqrt(loglog n)
    std::size_t s1 = 0;        // k_s l_s <= sqrt(n)
    std::size_t s2 = 0;        // k_s l_s <= r sqrt(n)/sqrt(loglog n)
    std::size_t s3 = 0;        // k_s l_s <= sqrt(n loglog n)
    std::size_t s3_tilde = 0;  // min(s0_prime, s3)
};

namespace detail {

template <class Pred>
std::size_t max_index(const LayerParams& layers, Pred&& holds) {
    std::size_t best = 0;
    for (std::size_t s = 0; s < layers.size(); ++s) {
        if (layers.k[s].inf || layers.l[s].inf) break;
        if (holds(s)) best = s;
    }
    return best;
}

}  // namespace detail

inline std::size_t layer_index_for_range(const LayerParams& layers,
                                         std::uint64_t range) {
    return detail::max_index(layers, [&](std::size_t s) {
        return layers.k[s].value <= range;
    });
}

inline CriticalLayers critical_layers(const LayerParams& layers, std::uint64_t n,
                                      double r) {
    if (n < 16) throw std::invalid_argument("critical_layers requires n >= 16");
    if (!(r > 0.0 && r <= 1.0)) throw std::invalid_argument("band constant r in (0,1]");
    CriticalLayers c;
    c.n = n;
    c.r = r;
    double nn = static_cast<double>(n);
    double ll = loglog(nn);
    double thr_narrow = r * std::sqrt(nn) / std::sqrt(ll);
    double thr_sqrt = std::sqrt(nn);
    double thr_wide = std::sqrt(nn * ll);
    auto kd = [&](std::size_t s) { return layers.k[s].to_double(); };
    auto kld = [&](std::size_t s) {
        return layers.k[s].to_double() * layers.l[s].to_double();
    };
    c.s0_prime = detail::max_index(layers, [&](std::size_t s) { return kd(s) <= thr_narrow; });
    c.s1 = detail::max_index(layers, [&](std::size_t s) { return kld(s) <= thr_sqrt; });
    c.s2 = detail::max_index(layers, [&](std::size_t s) { return kld(s) <= thr_narrow; });
    c.s3 = detail::max_index(layers, [&](std::size_t s) { return kld(s) <= thr_wide; });
    c.s3_tilde = std::min(c.s0_prime, c.s3);
    return c;
}

inline CriticalLayers critical_layers(const LayerParams& layers, std::uint64_t n,
                                      double r, std::uint64_t range) {
    CriticalLayers c = critical_layers(layers, n, r);
    c.s0 = layer_index_for_range(layers, range);
    c.s0_set = true;
    return c;
}

namespace detail {

inline double n_over_k(const LayerParams& layers, std::size_t s, double n) {
    if (s >= layers.size())
        throw std::out_of_range("layer horizon too small for scaling function");
    if (layers.k[s].inf) return 0.0;
    return n / layers.k[s].to_double();
}

}  // namespace detail

/// g(n) = n/k_{s2+1} + sqrt(n loglog n) l_{s2}.
inline double scaling_g(const LayerParams& layers, std::uint64_t n, double r) {
    CriticalLayers c = critical_layers(layers, n, r);
    double nn = static_cast<double>(n);
    return detail::n_over_k(layers, c.s2 + 1, nn) +
           std::sqrt(nn * loglog(nn)) * layers.l[c.s2].to_double();
}

/// h(n): two cases split on s3 < s0'.
inline double scaling_h(const LayerParams& layers, std::uint64_t n, double r) {
    CriticalLayers c = critical_layers(layers, n, r);
    double nn = static_cast<double>(n);
    double root = std::sqrt(nn) / std::sqrt(loglog(nn));
    if (c.s3 < c.s0_prime)
        return detail::n_over_k(layers, c.s3 + 1, nn) +
               root * layers.l[c.s3].to_double();
    return root * layers.l[c.s0_prime].to_double();
}

enum class ScalingMode { limsup, liminf };

/// Theorem denominators: loglog(n) f(n/loglog n) and f(n loglog n)/loglog(n).
inline double scaling_from_f(const SpeedFunction& f, std::uint64_t n,
                             ScalingMode mode) {
    if (n < 16) throw std::invalid_argument("scaling_from_f requires n >= 16");
    double nn = static_cast<double>(n);
    double ll = loglog(nn);
    if (mode == ScalingMode::limsup) return ll * f(nn / ll);
    return f(nn * ll) / ll;
}

}  // namespace exwalk
