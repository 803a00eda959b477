#include <catch2/catch_amalgamated.hpp>

#include "exwalk/distance.hpp"
#include "exwalk/layers.hpp"
#include "exwalk/walk.hpp"

using namespace exwalk;

namespace {

Trajectory path(std::initializer_list<int> incs) {
    std::vector<std::int8_t> v;
    for (int d : incs) v.push_back(static_cast<std::int8_t>(d));
    return Trajectory::from_increments(std::move(v));
}

LayerParams manual_layers(std::vector<std::int64_t> k, std::vector<double> l) {
    LayerParams layers;
    layers.m0 = 2.0;
    for (auto v : k) layers.k.push_back(ExtInt::of(BigInt(v)));
    for (auto v : l)
        layers.l.push_back(std::isinf(v) ? ExtInt::infinity()
                                         : ExtInt::of(BigInt(static_cast<long>(v))));
    layers.compute_loglog_index();
    layers.validate();
    return layers;
}

}  // namespace

TEST_CASE("empty walk gives the trivial upper bound") {
    auto t = Trajectory::generate(1, 0);
    auto layers = manual_layers({1, 2}, {1, 2});
    CHECK(layer_upper(t, layers, 0, 0) == 11.0);
    CHECK(layer_upper(t, layers, 1, 0) == 11.0);
    CHECK(layer_lower_proxy(t, layers, 0, 0) == 0.0);
    CHECK(total_upper(t, layers, 0) == 500.0 * 11.0);
}

TEST_CASE("double tent layer upper at depth two by hand") {
    auto t = path({+1, +1, -1, -1, -1, -1, +1, +1});
    auto layers = manual_layers({1, 2}, {1, 1});
    // Half depth of 2 is 1. Completed depth-1 round trips on this path sit
    // at 0 and -1, so the first branch is 2*(1+1)+5 = 9; the second is 5*1.
    CHECK(layer_upper(t, layers, 1, 8) == 11.0 * 5.0);
    auto wide = manual_layers({1, 2}, {1, 3});
    CHECK(layer_upper(t, wide, 1, 8) == 11.0 * 9.0);
}

TEST_CASE("infinite l selects the excursion branch") {
    auto t = path({+1, +1, -1, -1, -1, -1, +1, +1});
    auto layers = manual_layers({1, 2}, {1, std::numeric_limits<double>::infinity()});
    CHECK(layer_upper(t, layers, 1, 8) == 11.0 * 9.0);
}

TEST_CASE("infinite k contributes nothing") {
    auto t = path({+1, +1, -1, -1, -1, -1, +1, +1});
    LayerParams layers = manual_layers({1}, {1});
    layers.k.push_back(ExtInt::infinity());
    layers.l.push_back(ExtInt::of(BigInt(2)));
    auto b = layer_bounds(t, layers, 1, 8);
    CHECK(b.upper == 0.0);
    CHECK(b.lower_proxy == 0.0);
}

TEST_CASE("lower proxy core substitutes the truncation formula") {
    ExcursionTally tally;
    tally.k = 1;
    tally.lo = 0;
    tally.counts = {5, 0, 0, 2};
    CHECK(layer_lower_core(tally, 3.0, 1.0, 1.0) ==
          Catch::Approx((std::min<std::uint64_t>(5, 3) +
                         std::min<std::uint64_t>(2, 3)) / 16.0));
    // Cap above the max degenerates to the plain sum.
    CHECK(layer_lower_core(tally, 100.0, 1.0, 1.0) == Catch::Approx(7.0 / 16.0));
    CHECK(layer_lower_core(tally, std::numeric_limits<double>::infinity(), 1.0,
                           1.0) == Catch::Approx(7.0 / 16.0));
    // Constants scale the value linearly.
    CHECK(layer_lower_core(tally, 100.0, 0.5, 1.0) == Catch::Approx(3.5 / 16.0));
}

TEST_CASE("total upper sums layers up to the range index") {
    auto t = path({+1, +1, -1, -1, -1, -1, +1, +1});  // range 5
    auto layers = manual_layers({1, 2, 4, 8}, {1, 2, 4, 8});
    double expect = 0.0;
    for (std::size_t s = 0; s <= 2; ++s)
        expect += layer_upper(t, layers, s, 8);
    CHECK(total_upper(t, layers, 8) == Catch::Approx(500.0 * expect));
    auto tb = total_bounds(t, layers, 8);
    CHECK(tb.upper == Catch::Approx(500.0 * expect));
    CHECK(tb.layers_evaluated == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("bounds are monotone in time") {
    auto t = Trajectory::generate(17, 4000);
    auto layers = manual_layers({1, 2, 4}, {1, 2, 4});
    double pu = 0.0, pl = 0.0;
    for (std::uint64_t n : {500ull, 1000ull, 2000ull, 4000ull}) {
        double u = layer_upper(t, layers, 2, n);
        double l = layer_lower_proxy(t, layers, 2, n);
        CHECK(u >= pu);
        CHECK(l >= pl);
        pu = u;
        pl = l;
    }
}

TEST_CASE("lower proxy never exceeds the uncapped sum") {
    auto t = Trajectory::generate(23, 2000);
    auto layers = manual_layers({1, 2, 4}, {1, 2, 4});
    for (std::size_t s = 0; s < 3; ++s) {
        auto tally =
            excursion_field(t, static_cast<std::int64_t>(layers.k[s].value), 2000);
        double plain = static_cast<double>(truncated_sum(tally, kNoCap)) / 16.0;
        CHECK(layer_lower_proxy(t, layers, s, 2000) <= plain + 1e-12);
    }
}

TEST_CASE("validity flag follows the threshold") {
    CHECK(lower_proxy_valid(1.0, 1u << 20, 0.25));
    CHECK_FALSE(lower_proxy_valid(1000.0, 1u << 20, 0.25));
    CHECK_FALSE(lower_proxy_valid(1.0, 4, 0.25));
}

TEST_CASE("critical pair averages adjacent layers") {
    auto t = Trajectory::generate(31, 4000);
    auto layers = manual_layers({1, 2, 4}, {1, 2, 4});
    double a = layer_lower_proxy(t, layers, 1, 4000);
    double b = layer_lower_proxy(t, layers, 2, 4000);
    CHECK(critical_pair_lower(t, layers, 1, 4000) == Catch::Approx(0.5 * (a + b)));
    // Past the top layer, the missing neighbour counts as zero.
    double c = layer_lower_proxy(t, layers, 2, 4000);
    CHECK(critical_pair_lower(t, layers, 2, 4000) == Catch::Approx(0.5 * c));
}

TEST_CASE("total lower is the best valid proxy") {
    auto t = Trajectory::generate(41, 8000);
    auto layers = manual_layers({1, 2, 4}, {1, 2, 4});
    auto tb = total_bounds(t, layers, 8000);
    double best = 0.0;
    for (std::size_t s = 0; s < 3; ++s)
        best = std::max(best, layer_lower_proxy(t, layers, s, 8000));
    CHECK(tb.lower == Catch::Approx(best));
    CHECK(tb.lower >= 0.0);
    CHECK(tb.upper >= 0.0);
}
