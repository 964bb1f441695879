#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <set>

#include "oracles.hpp"
#include "pursuit/mc.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("seed streams", "[mc]")
{
    std::set<std::uint64_t> seen;
    for (std::uint64_t r = 0; r < 1000; ++r)
        seen.insert(pursuit::stream_seed(42, r));
    CHECK(seen.size() == 1000);
    CHECK(pursuit::stream_seed(1, 0) != pursuit::stream_seed(2, 0));
    CHECK(pursuit::stream_seed(7, 3) == pursuit::stream_seed(7, 3));
    // first splitmix64 output from state 0
    CHECK(pursuit::mix64(0) == 0xE220A8397B1DCDAFull);
}

TEST_CASE("for_each_rep visits every replication once", "[mc]")
{
    for (int workers : {1, 2, 5, 64}) {
        std::vector<int> count(37, 0);
        pursuit::for_each_rep(37, workers, [&](int r) { ++count[static_cast<std::size_t>(r)]; });
        for (int c : count)
            CHECK(c == 1);
    }
    CHECK_THROWS_AS(pursuit::for_each_rep(0, 1, [](int) {}), std::invalid_argument);
}

TEST_CASE("limit simulation", "[mc]")
{
    pursuit::McConfig cfg;
    cfg.reps = 200;
    cfg.seed = 5;
    auto const a = pursuit::simulate_limit_max(2, cfg);
    REQUIRE(a.values.size() == 200);
    CHECK(a.nonconverged == 0);

    // every sample dominates the field index at the coordinate axes
    for (int r = 0; r < 200; ++r) {
        std::mt19937_64 rng(pursuit::stream_seed(cfg.seed, static_cast<std::uint64_t>(r)));
        auto const c = pursuit::sample_coefficients(2, rng);
        pursuit::FieldIndex const fi(c);
        double const at_axes = std::max(fi.value(pursuit::UnitDirection::axis(2, 0)),
                                        fi.value(pursuit::UnitDirection::axis(2, 1)));
        CHECK(a.values[static_cast<std::size_t>(r)] >= at_axes - 1e-12);
    }

    SECTION("identical across worker counts")
    {
        for (int w : {2, 3, 8}) {
            auto c2 = cfg;
            c2.workers = w;
            CHECK(pursuit::simulate_limit_max(2, c2).values == a.values);
        }
        auto c3 = cfg;
        c3.reps = 40;
        auto const s1 = pursuit::simulate_limit_max(3, c3);
        c3.workers = 4;
        CHECK(pursuit::simulate_limit_max(3, c3).values == s1.values);
    }

    SECTION("distribution is invariant under rotating the coefficients")
    {
        auto const Q = oracle::orthogonal(2, 11);
        std::vector<double> plain, rotated;
        for (int r = 0; r < 400; ++r) {
            std::mt19937_64 rng(pursuit::stream_seed(99, static_cast<std::uint64_t>(r)));
            auto const c = pursuit::sample_coefficients(2, rng);
            plain.push_back(pursuit::max_field_index(c, {}, 1).value);
            std::mt19937_64 rng2(pursuit::stream_seed(1099, static_cast<std::uint64_t>(r)));
            auto const d = pursuit::sample_coefficients(2, rng2);
            rotated.push_back(pursuit::max_field_index(pursuit::rotate_coefficients(d, Q), {}, 1).value);
        }
        CHECK(oracle::ks_statistic(plain, rotated) < oracle::ks_critical_1pct(400, 400));
    }

    SECTION("rotating one draw leaves its maximum unchanged")
    {
        auto const Q = oracle::orthogonal(3, 12);
        std::mt19937_64 rng(3);
        auto const c = pursuit::sample_coefficients(3, rng);
        double const m = pursuit::max_field_index(c, {}, 1).value;
        CHECK_THAT(pursuit::max_field_index(pursuit::rotate_coefficients(c, Q), {}, 1).value, WithinRel(m, 1e-8));
    }
}

TEST_CASE("finite-sample simulation", "[mc]")
{
    pursuit::McConfig cfg;
    cfg.reps = 30;
    cfg.seed = 8;
    auto const s = pursuit::simulate_finite_max(2, 100, cfg);
    REQUIRE(s.values.size() == 30);
    for (double v : s.values)
        CHECK(v >= 0.0);
    cfg.workers = 3;
    CHECK(pursuit::simulate_finite_max(2, 100, cfg).values == s.values);
}

TEST_CASE("empirical tail", "[mc]")
{
    std::vector<double> const s{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    auto const t = pursuit::empirical_tail(s, {11.0, 0.0, 5.5, 10.0, 1.0});
    REQUIRE(t.thresholds == std::vector<double>{0.0, 1.0, 5.5, 10.0, 11.0});
    CHECK(t.probabilities == std::vector<double>{1.0, 1.0, 0.5, 0.1, 0.0});
    CHECK(t.se[0] == 0.0);
    CHECK_THAT(t.se[2], WithinRel(std::sqrt(0.25 / 10.0), 1e-15));
    CHECK(t.reps == 10);
    CHECK_THROWS_AS(pursuit::empirical_tail({}, {1.0}), std::invalid_argument);
}

TEST_CASE("tube volume Monte Carlo", "[mc]")
{
    pursuit::McConfig cfg;
    cfg.reps = 20000;
    cfg.seed = 4;
    double prev = -1.0;
    long prev_cand = -1;
    for (double th : {0.3, 0.5, 0.6435}) {
        auto const e = pursuit::tube_volume_mc(2, th, cfg);
        CHECK(e.fraction >= prev);
        CHECK(e.candidates >= prev_cand);
        CHECK(e.hits <= e.candidates);
        CHECK(e.points == 20000);
        prev = e.fraction;
        prev_cand = e.candidates;
    }
    CHECK_THROWS_AS(pursuit::tube_volume_mc(2, 0.7, cfg), std::domain_error);
    CHECK_THROWS_AS(pursuit::tube_volume_mc(2, 0.0, cfg), std::domain_error);
}

TEST_CASE("CLT marginal moments", "[mc]")
{
    pursuit::McConfig cfg;
    cfg.reps = 2000;
    cfg.seed = 6;
    auto const h = pursuit::UnitDirection::normalize(oracle::unit_vector(3, 1));
    auto const m = pursuit::clt_marginal_check(h, 1000, cfg);
    CHECK(m.reps == 2000);
    // sqrt(n) B1 ~ N(0, 6), sqrt(n) B2 ~ N(0, 24) in the limit
    CHECK(std::abs(m.mean_b1_scaled) < 4.0 * std::sqrt(6.0 / 2000.0));
    CHECK(std::abs(m.mean_b2_scaled) < 4.0 * std::sqrt(24.0 / 2000.0) + 0.25);
    CHECK_THAT(m.var_b1_scaled, WithinRel(6.0, 0.12));
    CHECK_THAT(m.var_b2_scaled, WithinRel(24.0, 0.2));
    CHECK_THROWS_AS(pursuit::clt_marginal_check(h, 4, cfg), std::invalid_argument);
}
