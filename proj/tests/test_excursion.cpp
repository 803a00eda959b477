#include <catch2/catch_amalgamated.hpp>

#include "exwalk/excursion.hpp"
#include "exwalk/verify.hpp"
#include "exwalk/walk.hpp"

using namespace exwalk;

namespace {

Trajectory path(std::initializer_list<int> incs) {
    std::vector<std::int8_t> v;
    for (int d : incs) v.push_back(static_cast<std::int8_t>(d));
    return Trajectory::from_increments(std::move(v));
}

Trajectory from_bits(std::uint64_t bits, std::uint64_t n) {
    std::vector<std::int8_t> v;
    for (std::uint64_t i = 0; i < n; ++i)
        v.push_back((bits >> i) & 1 ? 1 : -1);
    return Trajectory::from_increments(std::move(v));
}

}  // namespace

TEST_CASE("single excursion on the tent path") {
    auto t = path({+1, -1, -1, +1});  // 0 1 0 -1 0
    CHECK(count_excursions(t, 1, 0, 4) == 1);
    CHECK(count_excursions(t, 1, -1, 4) == 0);
    CHECK(count_excursions(t, 1, 0, 0) == 0);
    CHECK(count_excursions(t, 1, 0, 3) == 0);  // round not yet closed
}

TEST_CASE("field on the tent path counts completed round trips only") {
    auto t = path({+1, -1, -1, +1});
    auto f = excursion_field(t, 1, 4);
    CHECK(f.at(0) == 1);
    // The dip from 1 to 0 never returns to 1, so no excursion is credited
    // at site 1.
    CHECK(f.at(1) == 0);
    CHECK(f.at(-1) == 0);
}

TEST_CASE("field on the double tent at depth two") {
    auto t = path({+1, +1, -1, -1, -1, -1, +1, +1});
    auto f = excursion_field(t, 2, 8);
    CHECK(f.at(0) == 1);
    CHECK(f.at(1) == 0);
    CHECK(f.at(2) == 0);
    CHECK(f.at(-2) == 0);
}

TEST_CASE("aggregates evaluate their defining sums") {
    ExcursionTally t;
    t.k = 1;
    t.lo = 0;
    t.counts = {1, 1};
    CHECK(weighted_total(t) == 2);

    ExcursionTally u;
    u.k = 2;
    u.lo = 0;
    u.counts = {1};
    CHECK(weighted_total(u) == 2);

    ExcursionTally e;
    e.k = 3;
    CHECK(weighted_total(e) == 0);
    CHECK(max_excursions(e) == 0);

    ExcursionTally v;
    v.k = 1;
    v.lo = 0;
    v.counts = {5, 0, 0, 2};
    CHECK(truncated_sum(v, 3) == 5);
    CHECK(truncated_sum(v, 0) == 0);
    CHECK(truncated_sum(v, kNoCap) == 7);
    CHECK(max_excursions(v) == 5);
}

TEST_CASE("weighted total only sums the lattice") {
    ExcursionTally t;
    t.k = 2;
    t.lo = -2;
    t.counts = {3, 9, 1, 9, 2};  // sites -2..2, odd sites must not count
    CHECK(weighted_total(t) == 2 * (3 + 1 + 2));
}

TEST_CASE("merge is a pointwise sum for trial aggregation") {
    ExcursionTally a, b;
    a.k = b.k = 1;
    a.lo = 0;
    a.counts = {1, 2};
    b.lo = -1;
    b.counts = {4, 8};
    a.merge(b);
    CHECK(a.lo == -1);
    CHECK(a.at(-1) == 4);
    CHECK(a.at(0) == 9);
    CHECK(a.at(1) == 2);
}

TEST_CASE("induced walk of the double tent") {
    auto t = path({+1, +1, -1, -1, -1, -1, +1, +1});
    auto w = induce_walk(t, 2, 8);
    CHECK(w.jump_times == std::vector<std::uint64_t>{0, 2, 4, 6, 8});
    CHECK(w.positions == std::vector<std::int64_t>{0, 1, 0, -1, 0});
    CHECK(w.steps == 4);
    CHECK(w.down_steps.get(1) == 1);
    CHECK(w.down_steps.get(0) == 1);
    CHECK(w.down_steps.get(-1) == 0);
    CHECK(w.local.get(0) == 3);
    CHECK(w.local.get(1) == 1);
    CHECK(w.local.get(-1) == 1);
}

TEST_CASE("depth one induces the walk itself") {
    auto t = Trajectory::generate(11, 500);
    auto w = induce_walk(t, 1, 500);
    CHECK(w.steps == 500);
    CHECK(w.positions == t.positions());
}

TEST_CASE("oscillation below the depth induces nothing") {
    auto t = path({+1, -1, +1, -1});
    auto w = induce_walk(t, 2, 4);
    CHECK(w.steps == 0);
    CHECK(w.jump_times == std::vector<std::uint64_t>{0});
}

TEST_CASE("induced steps are unit and jump times increase") {
    auto t = Trajectory::generate(21, 5000);
    for (std::int64_t k : {2, 3, 5}) {
        auto w = induce_walk(t, k, 5000);
        for (std::size_t j = 1; j < w.positions.size(); ++j) {
            CHECK(std::abs(w.positions[j] - w.positions[j - 1]) == 1);
            CHECK(w.jump_times[j] > w.jump_times[j - 1]);
        }
        std::uint64_t total = 0, down = 0;
        for (std::int64_t x = w.local.lo(); x <= w.local.hi(); ++x)
            total += w.local.get(x);
        for (std::int64_t x = w.down_steps.lo(); x <= w.down_steps.hi(); ++x)
            down += w.down_steps.get(x);
        CHECK(total == w.steps + 1);
        CHECK(down <= w.steps);
    }
}

TEST_CASE("sandwich at time zero is trivially ordered") {
    auto t = Trajectory::generate(3, 10);
    auto r = sandwich_check(t, 4, 0, 0);
    CHECK(r.lower == -1);
    CHECK(r.mid == 0);
    CHECK(r.ok);
    CHECK_THROWS_AS(sandwich_check(t, 1, 0, 0), std::invalid_argument);
}

TEST_CASE("exhaustive agreement with the brute force oracle") {
    const std::uint64_t n = 10;
    for (std::uint64_t bits = 0; bits < (1ull << n); ++bits) {
        auto t = from_bits(bits, n);
        for (std::int64_t k : {1, 2, 3}) {
            auto f = excursion_field(t, k, n);
            for (std::int64_t x = -10; x <= 10; ++x) {
                auto expect = brute_force_excursion_oracle(t.positions(), k, x, n);
                REQUIRE(f.at(x) == expect);
                REQUIRE(count_excursions(t, k, x, n) == expect);
            }
        }
    }
}

TEST_CASE("exhaustive sandwich on small paths") {
    const std::uint64_t n = 10;
    for (std::uint64_t bits = 0; bits < (1ull << n); ++bits) {
        auto t = from_bits(bits, n);
        for (std::int64_t k : {2, 4}) {
            // The lower side is a theorem on the k-lattice; the upper side
            // holds everywhere.
            for (std::int64_t x = -10; x <= 10; ++x) {
                auto r = sandwich_check(t, k, x, n);
                REQUIRE(r.mid <= r.upper);
                if (x % k == 0)
                    REQUIRE(r.ok);
            }
        }
    }
}

TEST_CASE("two-sided total bounds and factor-three monotonicity") {
    for (std::uint64_t trial = 0; trial < 50; ++trial) {
        auto t = Trajectory::generate(rng::derive_key(7, "ineq", trial), 1000);
        std::uint64_t tk[17] = {};
        std::uint64_t plain_sum[17] = {};
        for (std::int64_t k : {1, 2, 4, 8, 16}) {
            auto f = excursion_field(t, k, 1000);
            tk[k] = weighted_total(f);
            plain_sum[k] = truncated_sum(f, kNoCap);
        }
        for (std::int64_t k : {2, 4, 8}) {
            CHECK(tk[2 * k] <= 2 * plain_sum[k]);
            CHECK(plain_sum[k] <= tk[k / 2]);
        }
        CHECK(tk[2] <= 3 * tk[1]);
        CHECK(tk[4] <= 3 * tk[2]);
        CHECK(tk[8] <= 3 * tk[4]);
        CHECK(tk[8] <= 3 * tk[2]);
    }
}

TEST_CASE("counts never decrease in time") {
    auto t = Trajectory::generate(13, 2000);
    for (std::int64_t k : {1, 3}) {
        auto early = excursion_field(t, k, 1000);
        auto late = excursion_field(t, k, 2000);
        for (std::int64_t x = -100; x <= 100; ++x)
            CHECK(early.at(x) <= late.at(x));
    }
}

TEST_CASE("invalid depth is rejected") {
    auto t = Trajectory::generate(1, 10);
    CHECK_THROWS_AS(count_excursions(t, 0, 0, 5), std::invalid_argument);
    CHECK_THROWS_AS(excursion_field(t, -1, 5), std::invalid_argument);
}

TEST_CASE("half depth rule") {
    CHECK(half_depth(1) == 1);
    CHECK(half_depth(2) == 1);
    CHECK(half_depth(7) == 3);
    CHECK(half_depth(8) == 4);
}
