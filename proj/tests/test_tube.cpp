#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "pursuit/tube.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

constexpr double pi = std::numbers::pi;

namespace {

double closed_form_q2(double c)
{
    double const w = 2.0 * oracle::elliptic_E(0.25);
    return w * std::sqrt(2.0 / pi) * c * std::exp(-0.5 * c * c);
}

double surface(double m) { return 2.0 * std::pow(pi, m / 2.0) / std::tgamma(m / 2.0); }
double ball(double k) { return std::pow(pi, k / 2.0) / std::tgamma(k / 2.0 + 1.0); }

}  // namespace

TEST_CASE("weyl coefficients", "[tube]")
{
    auto const& w2 = pursuit::weyl_coefficients(2);
    double const vol2 = 8.0 * pi * oracle::elliptic_E(0.25);
    CHECK_THAT(w2.kappa(0), WithinRel(vol2, 1e-10));
    CHECK_THAT(w2.kappa(0), WithinRel(36.88135, 1e-6));
    CHECK_THAT(w2.kappa(2), WithinRel(-vol2, 1e-10));
    CHECK(w2.kappas.size() == 2);
    CHECK_THROWS_AS(w2.kappa(1), std::out_of_range);
    CHECK_THROWS_AS(w2.kappa(4), std::out_of_range);

    auto const& w3 = pursuit::weyl_coefficients(3);
    CHECK_THAT(w3.kappa(0), WithinRel(14.0 * pi * pi, 1e-12));
    CHECK(w3.kappas.size() == 2);

    for (int q = 2; q <= 6; ++q) {
        auto const& w = pursuit::weyl_coefficients(q);
        double const vol = surface(q) * oracle::elliptic_moment(0.5 * (q - 1));
        CHECK_THAT(w.kappa(0), WithinRel(vol, 1e-9));
        CHECK(w.kappas.size() == static_cast<std::size_t>(q / 2 + 1));
        for (auto const& [e, k] : w.kappas)
            CHECK(std::isfinite(k));
    }
    CHECK(&pursuit::weyl_coefficients(4) == &pursuit::weyl_coefficients(4));
}

TEST_CASE("psi_term", "[tube]")
{
    // d = 2: Gamma(3/2) / (2 pi^{3/2}) = 1 / (4 pi), Gamma(1/2) / (4 pi^{3/2}) = 1 / (4 pi)
    for (double c2 : {0.0, 1.0, 4.0, 9.0, 25.0}) {
        CHECK_THAT(pursuit::psi_term(2, 0, c2), WithinAbs(oracle::chisq3_upper(c2) / (4.0 * pi), 1e-15));
        CHECK_THAT(pursuit::psi_term(2, 2, c2), WithinAbs(oracle::chisq1_upper(c2) / (4.0 * pi), 1e-15));
        CHECK_THAT(pursuit::psi_term(1, 0, c2), WithinAbs(oracle::chisq2_upper(c2) / (2.0 * pi), 1e-15));
    }
    CHECK_THROWS(pursuit::psi_term(2, 1, 1.0));
    CHECK_THROWS(pursuit::psi_term(2, 4, 1.0));
}

TEST_CASE("tail approximation", "[tube]")
{
    for (int c = 1; c <= 6; ++c) {
        double const c2 = c * c;
        CHECK_THAT(pursuit::tail_approx(2, c2).value, WithinRel(closed_form_q2(c), 1e-9));
        CHECK_THAT(pursuit::tail_approx(2, c2).value, WithinRel(pursuit::tail_approx_q2(c2), 1e-12));
    }
    CHECK_THAT(pursuit::tail_approx(2, 9.0).value, WithinAbs(0.078043, 1e-6));
    CHECK_THAT(pursuit::tail_approx(2, 0.0).value, WithinAbs(0.0, 1e-14));

    auto const t = pursuit::tail_approx(3, 16.0);
    REQUIRE(t.terms.size() == 2);
    CHECK(t.terms[0].first == 0);
    CHECK(t.terms[1].first == 2);
    CHECK_THAT(t.terms[0].second + t.terms[1].second, WithinRel(t.value, 1e-15));

    for (int q = 2; q <= 5; ++q) {
        double prev = pursuit::tail_approx(q, 9.0).value;
        for (double c2 = 10.0; c2 <= 60.0; c2 += 1.0) {
            double const v = pursuit::tail_approx(q, c2).value;
            CHECK(v < prev);
            CHECK(v > 0.0);
            prev = v;
        }
        // leading term dominates for large c
        auto const big = pursuit::tail_approx(q, 100.0);
        CHECK(std::abs(big.terms.back().second) < big.terms.front().second);
    }

    CHECK_THROWS_AS(pursuit::tail_approx(1, 1.0), std::domain_error);
    CHECK_THROWS_AS(pursuit::tail_approx(2, -1.0), std::domain_error);
    CHECK_THROWS_AS(pursuit::tail_approx_q2(-1.0), std::domain_error);
}

TEST_CASE("p-values", "[tube]")
{
    auto const p9 = pursuit::pvalue(2, 9.0);
    CHECK_THAT(p9.value.value(), WithinAbs(0.0780, 5e-5));
    CHECK_FALSE(p9.clamped);
    CHECK(p9.raw == p9.value.value());

    CHECK_THAT(pursuit::pvalue(2, 25.0).value.value(), WithinRel(closed_form_q2(5.0), 1e-9));

    // near zero the asymptotic expansion leaves [0, 1] for larger q
    bool saw_clamp = false;
    for (int q = 2; q <= 5; ++q)
        for (double c2 : {0.5, 1.0, 2.0, 4.0}) {
            auto const p = pursuit::pvalue(q, c2);
            CHECK(p.value.value() >= 0.0);
            CHECK(p.value.value() <= 1.0);
            CHECK(p.clamped == (p.raw < 0.0 || p.raw > 1.0));
            saw_clamp = saw_clamp || p.clamped;
        }
    CHECK(saw_clamp);
    CHECK_THROWS_AS(pursuit::pvalue(2, -0.1), std::domain_error);
}

TEST_CASE("critical radius constants", "[tube]")
{
    auto const c = pursuit::critical_radius_constants();
    CHECK_THAT(std::tan(c.theta_c), WithinRel(0.75, 1e-15));
    CHECK_THAT(c.rho_c, WithinRel(1.0 + std::pow(std::tan(c.theta_c), 2), 1e-15));
    CHECK(c.rho_c == 1.5625);
}

TEST_CASE("tube volume fraction", "[tube]")
{
    double const theta_c = pursuit::critical_radius_constants().theta_c;
    for (int q = 2; q <= 4; ++q) {
        CHECK(pursuit::tube_volume_fraction(q, 0.0) == 0.0);
        double prev = 0.0;
        for (double th : {0.2, 0.3, 0.4, 0.5, 0.6, theta_c}) {
            double const f = pursuit::tube_volume_fraction(q, th);
            CHECK(f > prev);
            CHECK(f <= 1.0);
            prev = f;
        }
        CHECK_THROWS_AS(pursuit::tube_volume_fraction(q, theta_c + 1e-9), std::domain_error);
        CHECK_THROWS_AS(pursuit::tube_volume_fraction(q, -0.1), std::domain_error);
    }

    // small radius: volume of M times the volume of a normal (p - 1 - d)-ball
    for (int q : {2, 3}) {
        double const p = std::pow(q, 3) + std::pow(q, 4);
        double const k = p - 1.0 - q;
        double const vol = surface(q) * oracle::elliptic_moment(0.5 * (q - 1));
        double const theta = 1e-2;
        double const leading = vol * ball(k) * std::pow(theta, k) / surface(p);
        CHECK_THAT(pursuit::tube_volume_fraction(q, theta), WithinRel(leading, 5e-3));
    }
}
