#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "pursuit/specfun.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using pursuit::HalfInt;

constexpr double pi = std::numbers::pi;

TEST_CASE("HalfInt round trip and ordering", "[specfun]")
{
    for (int t = -20; t <= 20; ++t) {
        HalfInt const h(t);
        CHECK(HalfInt::from_real(h.value()) == h);
        CHECK(h.is_integer() == (t % 2 == 0));
        CHECK(HalfInt(t) < HalfInt(t + 1));
    }
    CHECK(HalfInt::from_integer(3).value() == 3.0);
    CHECK((HalfInt(1) + 1).value() == 1.5);
    CHECK_THROWS_AS(HalfInt::from_real(0.3), std::domain_error);
}

TEST_CASE("Probability rejects values outside the unit interval", "[specfun]")
{
    CHECK(pursuit::Probability(0.0).value() == 0.0);
    CHECK(pursuit::Probability(1.0).value() == 1.0);
    CHECK_THROWS_AS(pursuit::Probability(-1e-12), std::domain_error);
    CHECK_THROWS_AS(pursuit::Probability(1.0 + 1e-12), std::domain_error);
    CHECK_THROWS_AS(pursuit::Probability(std::nan("")), std::domain_error);
}

TEST_CASE("sphere_surface", "[specfun]")
{
    CHECK_THAT(pursuit::sphere_surface(1), WithinRel(2.0, 1e-15));
    CHECK_THAT(pursuit::sphere_surface(2), WithinRel(2.0 * pi, 1e-15));
    CHECK_THAT(pursuit::sphere_surface(3), WithinRel(4.0 * pi, 1e-15));
    CHECK_THAT(pursuit::sphere_surface(4), WithinRel(2.0 * pi * pi, 1e-15));
    CHECK_THROWS_AS(pursuit::sphere_surface(0), std::domain_error);
}

TEST_CASE("chisq_upper", "[specfun]")
{
    CHECK(pursuit::chisq_upper(3, 0.0).value() == 1.0);
    CHECK_THAT(pursuit::chisq_upper(2, 9.0).value(), WithinRel(std::exp(-4.5), 1e-13));
    CHECK_THAT(pursuit::chisq_upper(2, 9.0).value(), WithinAbs(0.0111090, 1e-7));
    CHECK_THAT(pursuit::chisq_upper(1, 9.0).value(), WithinRel(oracle::chisq1_upper(9.0), 1e-12));
    CHECK_THAT(pursuit::chisq_upper(1, 9.0).value(), WithinAbs(0.0026998, 1e-7));
    CHECK_THROWS_AS(pursuit::chisq_upper(2, -1.0), std::domain_error);

    SECTION("two degrees of freedom is an exponential")
    {
        for (double x = 0.0; x <= 40.0; x += 0.25)
            CHECK_THAT(pursuit::chisq_upper(2, x).value(), WithinRel(oracle::chisq2_upper(x), 1e-12));
    }
    SECTION("three degrees of freedom against the erfc closed form")
    {
        for (double x = 0.5; x <= 40.0; x += 0.5)
            CHECK_THAT(pursuit::chisq_upper(3, x).value(), WithinRel(oracle::chisq3_upper(x), 1e-10));
    }
    SECTION("nonincreasing in the threshold")
    {
        for (int nu : {1, 2, 3, 5, 9, 25}) {
            double prev = 1.0;
            for (double x = 0.0; x <= 80.0; x += 0.5) {
                double const v = pursuit::chisq_upper(nu, x).value();
                CHECK(v <= prev);
                prev = v;
            }
        }
    }
}

TEST_CASE("beta_upper", "[specfun]")
{
    CHECK_THAT(pursuit::beta_upper(1.0, 1.0, 0.3).value(), WithinRel(0.7, 1e-14));
    CHECK(pursuit::beta_upper(2.5, 7.0, 0.0).value() == 1.0);
    CHECK(pursuit::beta_upper(2.5, 7.0, 1.0).value() == 0.0);
    CHECK_THAT(pursuit::beta_upper(2.0, 1.0, 0.5).value(), WithinRel(0.75, 1e-14));
    // 1 - I_x(2,3) with I_x(2,3) = 6x^2 - 8x^3 + 3x^4
    double const x = 0.4;
    CHECK_THAT(pursuit::beta_upper(2.0, 3.0, x).value(), WithinRel(1.0 - (6 * x * x - 8 * x * x * x + 3 * x * x * x * x), 1e-13));
    CHECK_THROWS_AS(pursuit::beta_upper(1.0, 1.0, 1.5), std::domain_error);
    CHECK_THROWS_AS(pursuit::beta_upper(1.0, 1.0, -0.1), std::domain_error);
    CHECK_THROWS_AS(pursuit::beta_upper(0.0, 1.0, 0.5), std::domain_error);

    for (double a : {0.5, 1.5, 12.0})
        for (double b : {1.0, 165.0}) {
            double prev = 1.0;
            for (double c = 0.0; c <= 1.0; c += 0.01) {
                double const v = pursuit::beta_upper(a, b, c).value();
                CHECK(v <= prev);
                prev = v;
            }
        }
}

TEST_CASE("elliptic_KE", "[specfun]")
{
    auto const zero = pursuit::elliptic_KE(0.0);
    CHECK_THAT(zero.K, WithinRel(pi / 2, 1e-15));
    CHECK_THAT(zero.E, WithinRel(pi / 2, 1e-15));

    auto const q = pursuit::elliptic_KE(0.25);
    CHECK_THAT(q.K, WithinAbs(1.68575, 5e-6));
    CHECK_THAT(q.E, WithinAbs(1.46746, 5e-6));
    CHECK_THAT(q.K, WithinRel(oracle::elliptic_K(0.25), 1e-12));
    CHECK_THAT(q.E, WithinRel(oracle::elliptic_E(0.25), 1e-12));
    CHECK(q.E > 1.4674);
    CHECK(q.E < 1.4675);
    CHECK(q.K > 1.6857);
    CHECK(q.K < 1.6858);

    CHECK_THAT(pursuit::elliptic_KE(0.5).K, WithinAbs(1.8540747, 1e-7));
    CHECK_THAT(pursuit::elliptic_KE(0.5).K, WithinRel(oracle::elliptic_K(0.5), 1e-12));
    CHECK_THROWS_AS(pursuit::elliptic_KE(1.0), std::domain_error);
}

TEST_CASE("elliptic_moment_quad", "[specfun]")
{
    CHECK_THAT(pursuit::elliptic_moment_quad(0.0), WithinRel(pi, 1e-12));
    CHECK_THAT(pursuit::elliptic_moment_quad(-1.0), WithinRel(pi / (2.0 * std::sqrt(3.0)), 1e-12));
    CHECK_THAT(pursuit::elliptic_moment_quad(1.0), WithinRel(3.5 * pi, 1e-12));
    CHECK_THAT(pursuit::elliptic_moment_quad(0.37), WithinRel(oracle::elliptic_moment(0.37), 1e-10));
}

TEST_CASE("elliptic_moment", "[specfun]")
{
    auto const E = [](int twice) { return pursuit::elliptic_moment(HalfInt(twice)); };
    double const e14 = oracle::elliptic_E(0.25);

    CHECK_THAT(E(4), WithinRel(99.0 * pi / 8.0, 1e-13));
    CHECK_THAT(E(4), WithinAbs(38.877, 5e-4));
    CHECK_THAT(E(1), WithinRel(4.0 * e14, 1e-12));
    CHECK_THAT(E(1), WithinAbs(5.8698488, 1e-7));
    CHECK_THAT(E(-3), WithinRel(e14 / 3.0, 1e-12));
    CHECK_THAT(E(-3), WithinAbs(0.4891541, 1e-7));
    CHECK_THAT(E(1) / 4.0, WithinAbs(1.46746, 5e-6));
    CHECK_THAT(E(-1), WithinAbs(1.68575, 5e-6));

    SECTION("recurrences agree with quadrature on [-4, 8]")
    {
        for (int twice = -8; twice <= 16; ++twice) {
            double const k = 0.5 * twice;
            CHECK_THAT(E(twice), WithinRel(pursuit::elliptic_moment_quad(k), 1e-9));
            CHECK_THAT(E(twice), WithinRel(oracle::elliptic_moment(k), 1e-9));
        }
    }
    SECTION("three-term identity")
    {
        for (int twice = 2; twice <= 16; ++twice) {
            double const k = 0.5 * twice;
            double const lhs = 2.0 * k * E(twice);
            double const rhs = 7.0 * (2.0 * k - 1.0) * E(twice - 2) - 24.0 * (k - 1.0) * E(twice - 4);
            CHECK_THAT(lhs, WithinRel(rhs, 1e-9));
        }
    }
    SECTION("positivity and integrand bounds")
    {
        for (int twice = -8; twice <= 16; ++twice) {
            double const k = 0.5 * twice;
            CHECK(E(twice) > 0.0);
            if (k >= 0.0) {
                CHECK(E(twice) >= pi * std::pow(3.0, k) * (1 - 1e-14));
                CHECK(E(twice) <= pi * std::pow(4.0, k) * (1 + 1e-14));
            }
        }
    }
}
