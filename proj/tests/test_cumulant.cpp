#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "pursuit/cumulant.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using pursuit::CumulantConvention;
using pursuit::DataMatrix;
using pursuit::UnitDirection;

namespace {

DataMatrix make_data(std::size_t n, std::size_t q, std::uint64_t seed, bool skew = false)
{
    auto v = oracle::normal_vector(n * q, seed);
    if (skew)
        for (std::size_t t = 0; t < n; ++t)
            v[t * q] = std::exp(0.6 * v[t * q]);
    return DataMatrix(n, q, std::move(v));
}

// independent reference: two-pass cumulants straight from the definition
double reference_index(DataMatrix const& d, std::vector<double> const& h)
{
    std::vector<double> z(d.n());
    for (std::size_t t = 0; t < d.n(); ++t)
        for (std::size_t j = 0; j < d.q(); ++j)
            z[t] += d(t, j) * h[j];
    double mean = 0.0;
    for (double x : z)
        mean += x;
    mean /= z.size();
    double m2 = 0, m3 = 0, m4 = 0;
    for (double x : z) {
        m2 += std::pow(x - mean, 2);
        m3 += std::pow(x - mean, 3);
        m4 += std::pow(x - mean, 4);
    }
    m2 /= z.size();
    m3 /= z.size();
    m4 /= z.size();
    double const b1 = m3 / std::pow(m2, 1.5), b2 = (m4 - 3 * m2 * m2) / (m2 * m2);
    return z.size() / 6.0 * b1 * b1 + z.size() / 24.0 * b2 * b2;
}

}  // namespace

TEST_CASE("DataMatrix invariants", "[cumulant]")
{
    CHECK_THROWS_AS(DataMatrix(4, 2, std::vector<double>(8)), std::invalid_argument);
    CHECK_THROWS_AS(DataMatrix(5, 1, std::vector<double>(5)), std::invalid_argument);
    CHECK_THROWS_AS(DataMatrix(5, 2, std::vector<double>(9)), std::invalid_argument);
    std::vector<double> v(10, 1.0);
    v[3] = std::nan("");
    CHECK_THROWS_AS(DataMatrix(5, 2, v), std::invalid_argument);
}

TEST_CASE("project", "[cumulant]")
{
    DataMatrix const id(5, 2, {1, 0, 0, 1, 2, 3, 4, 5, 6, 7});
    auto const z = pursuit::project(id, UnitDirection::axis(2, 0));
    CHECK(z[0] == 1.0);
    CHECK(z[1] == 0.0);

    auto const d = make_data(30, 3, 7);
    for (std::size_t j = 0; j < 3; ++j) {
        auto const col = pursuit::project(d, UnitDirection::axis(3, j));
        for (std::size_t t = 0; t < d.n(); ++t)
            CHECK(col[t] == d(t, j));
    }

    DataMatrix const pair(5, 2, {1, 1, -1, 1, 0, 0, 0, 0, 0, 0});
    double const s = 1.0 / std::sqrt(2.0);
    auto const zp = pursuit::project(pair, UnitDirection({s, s}));
    CHECK_THAT(zp[0], WithinRel(std::sqrt(2.0), 1e-15));
    CHECK_THAT(zp[1], WithinAbs(0.0, 1e-15));

    CHECK_THROWS_AS(pursuit::project(pair, UnitDirection::axis(3, 0)), std::invalid_argument);
}

TEST_CASE("sample_cumulants", "[cumulant]")
{
    std::vector<double> const z{-1.0, 0.0, 1.0};
    auto const c = pursuit::sample_cumulants(z);
    CHECK_THAT(c.k2, WithinRel(2.0 / 3.0, 1e-15));
    CHECK_THAT(c.k3, WithinAbs(0.0, 1e-15));
    CHECK_THAT(c.k4, WithinRel(-2.0 / 3.0, 1e-14));
    CHECK_THAT(c.b1, WithinAbs(0.0, 1e-15));
    CHECK_THAT(c.b2, WithinRel(-1.5, 1e-14));
    CHECK_THAT(pursuit::index_from_cumulants(c, 3), WithinRel(0.28125, 1e-14));

    auto const base = oracle::normal_vector(200, 11);
    auto const c0 = pursuit::sample_cumulants(base);
    SECTION("translation invariance")
    {
        auto shifted = base;
        for (auto& x : shifted)
            x += 3.7;
        auto const c1 = pursuit::sample_cumulants(shifted);
        CHECK_THAT(c1.k2, WithinRel(c0.k2, 1e-12));
        CHECK_THAT(c1.k3, WithinAbs(c0.k3, 1e-12));
        CHECK_THAT(c1.k4, WithinAbs(c0.k4, 1e-12));
    }
    SECTION("scale invariance of skewness and kurtosis")
    {
        auto scaled = base;
        for (auto& x : scaled)
            x *= 4.2;
        auto const c1 = pursuit::sample_cumulants(scaled);
        CHECK_THAT(c1.b1, WithinAbs(c0.b1, 1e-13));
        CHECK_THAT(c1.b2, WithinAbs(c0.b2, 1e-13));
    }
    SECTION("constant sample is degenerate")
    {
        std::vector<double> const flat(10, 2.5);
        CHECK_THROWS_AS(pursuit::sample_cumulants(flat), pursuit::DegenerateSampleError);
    }
    SECTION("k-statistics differ from moments by their bias factors")
    {
        auto const k = pursuit::sample_cumulants(base, CumulantConvention::k_statistics);
        double const n = 200.0;
        CHECK_THAT(k.k2, WithinRel(c0.k2 * n / (n - 1), 1e-13));
        CHECK_THAT(k.k3, WithinRel(c0.k3 * n * n / ((n - 1) * (n - 2)), 1e-12));
    }
    SECTION("standard normal skewness and kurtosis vanish at large n")
    {
        auto const big = oracle::normal_vector(100000, 99);
        auto const cb = pursuit::sample_cumulants(big);
        CHECK(std::abs(cb.b1) < 3.0 * std::sqrt(6.0 / 1e5));
        CHECK(std::abs(cb.b2) < 3.0 * std::sqrt(24.0 / 1e5));
    }
}

TEST_CASE("moment_index", "[cumulant]")
{
    std::vector<double> v;
    for (int t = 0; t < 10; ++t) {
        v.push_back(t % 2 ? 1.0 : -1.0);
        v.push_back(0.1 * t);
    }
    DataMatrix const pm(10, 2, v);
    CHECK_THAT(pursuit::moment_index(pm, UnitDirection::axis(2, 0)), WithinRel(5.0 / 3.0, 1e-13));

    auto const d = make_data(80, 3, 5, true);
    for (std::uint64_t s = 0; s < 20; ++s) {
        auto const h = oracle::unit_vector(3, 1000 + s);
        UnitDirection const u(h);
        double const I = pursuit::moment_index(d, u);
        CHECK(I >= 0.0);
        CHECK_THAT(I, WithinRel(reference_index(d, h), 1e-10));
        CHECK_THAT(pursuit::moment_index(d, -u), WithinRel(I, 1e-12));
    }

    SECTION("tensor evaluation matches the projected sample")
    {
        pursuit::MomentIndex const mi(d);
        for (std::uint64_t s = 0; s < 20; ++s) {
            UnitDirection const u(oracle::unit_vector(3, 2000 + s));
            CHECK_THAT(mi.value(u), WithinRel(pursuit::moment_index(d, u), 1e-9));
        }
        pursuit::MomentIndex const mk(d, CumulantConvention::k_statistics);
        UnitDirection const u(oracle::unit_vector(3, 3000));
        CHECK_THAT(mk.value(u), WithinRel(pursuit::moment_index(d, u, CumulantConvention::k_statistics), 1e-9));
    }

    SECTION("rotation invariance")
    {
        auto const Q = oracle::orthogonal(3, 17);
        std::vector<double> rotated(d.n() * 3);
        for (std::size_t t = 0; t < d.n(); ++t)
            for (std::size_t i = 0; i < 3; ++i)
                for (std::size_t j = 0; j < 3; ++j)
                    rotated[t * 3 + i] += Q[i * 3 + j] * d(t, j);
        DataMatrix const dq(d.n(), 3, rotated);
        for (std::uint64_t s = 0; s < 10; ++s) {
            auto const h = oracle::unit_vector(3, 4000 + s);
            std::vector<double> qh(3, 0.0);
            for (std::size_t i = 0; i < 3; ++i)
                for (std::size_t j = 0; j < 3; ++j)
                    qh[i] += Q[i * 3 + j] * h[j];
            CHECK_THAT(pursuit::moment_index(dq, UnitDirection::normalize(qh)),
                       WithinRel(pursuit::moment_index(d, UnitDirection(h)), 1e-10));
        }
    }

    SECTION("rank-deficient data are degenerate")
    {
        std::vector<double> line;
        for (int t = 0; t < 12; ++t) {
            line.push_back(t);
            line.push_back(2.0 * t - 1.0);
        }
        CHECK_THROWS_AS(pursuit::MomentIndex(DataMatrix(12, 2, line)), pursuit::DegenerateSampleError);
    }
}

TEST_CASE("moment_index_gradient matches central differences", "[cumulant]")
{
    int checked = 0;
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
        auto const d = make_data(50, 3, 500 + trial, trial % 2 == 0);
        auto const h = oracle::unit_vector(3, 900 + trial);
        UnitDirection const u(h);
        auto const g = pursuit::moment_index_gradient(d, u);
        CHECK_THAT(pursuit::dot(g, h), WithinAbs(0.0, 1e-10));

        // derivative along tangent directions of the curve cos(s) h + sin(s) w
        for (std::uint64_t k = 0; k < 2; ++k) {
            auto w = oracle::normal_vector(3, 7000 + 10 * trial + k);
            double const c = pursuit::dot(w, h);
            for (std::size_t i = 0; i < 3; ++i)
                w[i] -= c * h[i];
            double const wn = pursuit::norm2(w);
            for (auto& x : w)
                x /= wn;
            auto at = [&](double s) {
                std::vector<double> p(3);
                for (std::size_t i = 0; i < 3; ++i)
                    p[i] = std::cos(s) * h[i] + std::sin(s) * w[i];
                return pursuit::moment_index(d, UnitDirection::normalize(p));
            };
            constexpr double step = 1e-5;
            double const fd = (at(step) - at(-step)) / (2 * step);
            double const an = pursuit::dot(g, w);
            double const scale = std::max(1.0, pursuit::norm2(g));
            CHECK(std::abs(fd - an) <= 1e-5 * scale);
            ++checked;
        }
    }
    CHECK(checked == 200);

    SECTION("antipodal symmetry")
    {
        auto const d = make_data(60, 3, 31, true);
        UnitDirection const u(oracle::unit_vector(3, 32));
        auto const gp = pursuit::moment_index_gradient(d, u);
        auto const gm = pursuit::moment_index_gradient(d, -u);
        for (std::size_t i = 0; i < 3; ++i)
            CHECK_THAT(gm[i], WithinAbs(-gp[i], 1e-9 * std::max(1.0, pursuit::norm2(gp))));
    }
}
