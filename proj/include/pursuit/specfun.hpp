#ifndef PURSUIT_SPECFUN_HPP_INCLUDED
#define PURSUIT_SPECFUN_HPP_INCLUDED

// Special functions behind the tube formula: sphere areas, chi-square and
// beta upper tails, complete elliptic integrals (AGM) and the elliptic
// moments E_k = \int_{-pi/2}^{pi/2} (3 cos^2 t + 4 sin^2 t)^k dt.

#include <cmath>
#include <compare>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace pursuit {

/// An integer or half-integer index, stored as twice its value.
class HalfInt {
public:
    constexpr HalfInt() = default;
    constexpr explicit HalfInt(int twice) : twice_(twice) {}

    static constexpr HalfInt from_integer(int k) { return HalfInt(2 * k); }

    /// Throws when `k` is not a multiple of 1/2.
    static HalfInt from_real(double k)
    {
        double const twice = 2.0 * k;
        if (std::nearbyint(twice) != twice)
            throw std::domain_error("HalfInt: " + std::to_string(k) + " is not a half-integer");
        return HalfInt(static_cast<int>(twice));
    }

    constexpr int twice() const { return twice_; }
    constexpr double value() const { return twice_ / 2.0; }
    constexpr bool is_integer() const { return twice_ % 2 == 0; }

    constexpr HalfInt operator-(int k) const { return HalfInt(twice_ - 2 * k); }
    constexpr HalfInt operator+(int k) const { return HalfInt(twice_ + 2 * k); }
    constexpr auto operator<=>(HalfInt const&) const = default;

private:
    int twice_ = 0;
};

/// A value in [0, 1].
class Probability {
public:
    constexpr Probability() = default;
    explicit Probability(double v) : value_(v)
    {
        if (!(v >= 0.0 && v <= 1.0))
            throw std::domain_error("Probability: value " + std::to_string(v) + " outside [0,1]");
    }
    constexpr double value() const { return value_; }
    constexpr operator double() const { return value_; }

private:
    double value_ = 0.0;
};

/// (m-1)-dimensional surface area of the unit sphere in R^m, 2 pi^{m/2} / Gamma(m/2).
inline double sphere_surface(int m)
{
    if (m < 1)
        throw std::domain_error("sphere_surface: dimension must be >= 1");
    double const half = 0.5 * m;
    return 2.0 * std::exp(half * std::log(std::numbers::pi) - std::lgamma(half));
}

/// Upper tail P(chi^2_nu >= c).
inline Probability chisq_upper(int nu, double c)
{
    if (nu < 1)
        throw std::domain_error("chisq_upper: degrees of freedom must be >= 1");
    if (!(c >= 0.0))
        throw std::domain_error("chisq_upper: threshold must be nonnegative");
    if (c == 0.0)
        return Probability(1.0);
    return Probability(boost::math::gamma_q(0.5 * nu, 0.5 * c));
}

/// Upper tail of the Beta(a, b) distribution at c.
inline Probability beta_upper(double a, double b, double c)
{
    if (!(a > 0.0 && b > 0.0))
        throw std::domain_error("beta_upper: shape parameters must be positive");
    if (!(c >= 0.0 && c <= 1.0))
        throw std::domain_error("beta_upper: threshold must lie in [0,1]");
    if (c == 0.0)
        return Probability(1.0);
    if (c == 1.0)
        return Probability(0.0);
    return Probability(boost::math::ibetac(a, b, c));
}

struct EllipticKE {
    double K;
    double E;
};

/// Complete elliptic integrals K(m), E(m) in the parameter convention
/// (integrand sqrt(1 - m sin^2 t)), by the arithmetic-geometric mean.
inline EllipticKE elliptic_KE(double m)
{
    if (!(m >= 0.0 && m < 1.0))
        throw std::domain_error("elliptic_KE: parameter must lie in [0,1)");
    long double a = 1.0L;
    long double b = std::sqrt(1.0L - m);
    long double c = std::sqrt(static_cast<long double>(m));
    long double sum = 0.5L * c * c;  // sum of 2^{n-1} c_n^2 from n = 0
    long double pow2 = 0.5L;
    for (int it = 0; it < 64 && std::fabs(c) > 1e-19L * a; ++it) {
        long double const an = 0.5L * (a + b);
        long double const bn = std::sqrt(a * b);
        c = 0.5L * (a - b);
        a = an;
        b = bn;
        pow2 *= 2.0L;
        sum += pow2 * c * c;
    }
    long double const K = std::numbers::pi_v<long double> / (2.0L * a);
    return {static_cast<double>(K), static_cast<double>(K * (1.0L - sum))};
}

/// E_k by adaptive Gauss-Kronrod quadrature. Independent of the recurrences.
inline double elliptic_moment_quad(double k)
{
    auto integrand = [k](double t) {
        double const s = std::sin(t);
        return std::pow(3.0 + s * s, k);
    };
    constexpr double half_pi = std::numbers::pi / 2.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, -half_pi, half_pi, 15, 1e-14);
}

namespace detail {

struct EllipticBoundary {
    double e_half;        // E_{1/2}  = 4 E(1/4)
    double e_zero;        // E_0      = pi
    double e_minus_half;  // E_{-1/2} = K(1/4)
    double e_minus_one;   // E_{-1}   = pi / (2 sqrt 3)
};

inline EllipticBoundary const& elliptic_boundary()
{
    static EllipticBoundary const b = [] {
        EllipticKE const ke = elliptic_KE(0.25);
        return EllipticBoundary{4.0 * ke.E, std::numbers::pi, ke.K,
                                std::numbers::pi / (2.0 * std::sqrt(3.0))};
    }();
    return b;
}

}  // namespace detail

/// E_k for integer or half-integer k. Ascends with the forward recurrence
/// for k >= 1 and descends with the backward recurrence for k <= -3/2,
/// starting from the boundary pair of matching parity.
inline double elliptic_moment(HalfInt k)
{
    auto const& bd = detail::elliptic_boundary();
    bool const integer = k.is_integer();
    // hi = E_{k0}, lo = E_{k0-1} for k0 in {0, 1/2}
    double hi = integer ? bd.e_zero : bd.e_half;
    double lo = integer ? bd.e_minus_one : bd.e_minus_half;
    HalfInt const top = integer ? HalfInt(0) : HalfInt(1);

    if (k == top)
        return hi;
    if (k == top - 1)
        return lo;

    if (k > top) {
        // 2j E_j = 7(2j-1) E_{j-1} - 24(j-1) E_{j-2}
        for (HalfInt j = top + 1; j <= k; j = j + 1) {
            double const jv = j.value();
            double const next = (7.0 * (2.0 * jv - 1.0) * hi - 24.0 * (jv - 1.0) * lo) / (2.0 * jv);
            lo = hi;
            hi = next;
        }
        return hi;
    }

    // Descend: E_j = 7(2j+3)/(24(j+1)) E_{j+1} - (j+2)/(12(j+1)) E_{j+2}
    double up1 = lo;  // E_{j+1}
    double up2 = hi;  // E_{j+2}
    for (HalfInt j = top - 2; j >= k; j = j - 1) {
        double const jv = j.value();
        double const next = 7.0 * (2.0 * jv + 3.0) / (24.0 * (jv + 1.0)) * up1
                          - (jv + 2.0) / (12.0 * (jv + 1.0)) * up2;
        up2 = up1;
        up1 = next;
    }
    return up1;
}

}  // namespace pursuit

#endif  // PURSUIT_SPECFUN_HPP_INCLUDED
