#pragma once

// Test-side reference computations, written independently of the library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

// composite Simpson with n (even) panels
template <class F>
double simpson(F&& f, double a, double b, int n = 20000)
{
    double const h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i)
        s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

inline double elliptic_moment(double k)
{
    constexpr double pi = std::numbers::pi;
    return simpson([k](double t) { return std::pow(3.0 + std::sin(t) * std::sin(t), k); }, -pi / 2, pi / 2);
}

inline double elliptic_K(double m)
{
    constexpr double pi = std::numbers::pi;
    return simpson([m](double t) { return 1.0 / std::sqrt(1.0 - m * std::sin(t) * std::sin(t)); }, 0.0, pi / 2);
}

inline double elliptic_E(double m)
{
    constexpr double pi = std::numbers::pi;
    return simpson([m](double t) { return std::sqrt(1.0 - m * std::sin(t) * std::sin(t)); }, 0.0, pi / 2);
}

// chi-square upper tails with 1, 2, 3 degrees of freedom in closed form
inline double chisq1_upper(double x) { return std::erfc(std::sqrt(x / 2.0)); }
inline double chisq2_upper(double x) { return std::exp(-x / 2.0); }
inline double chisq3_upper(double x)
{
    return std::erfc(std::sqrt(x / 2.0)) + std::sqrt(2.0 * x / std::numbers::pi) * std::exp(-x / 2.0);
}

inline std::vector<double> normal_vector(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    std::vector<double> v(n);
    for (auto& x : v)
        x = z(rng);
    return v;
}

inline std::vector<double> unit_vector(std::size_t q, std::uint64_t seed)
{
    auto v = normal_vector(q, seed);
    double s = 0.0;
    for (double x : v)
        s += x * x;
    s = std::sqrt(s);
    for (auto& x : v)
        x /= s;
    return v;
}

// random q x q orthogonal matrix (row-major) by Gram-Schmidt on a Gaussian matrix
inline std::vector<double> orthogonal(std::size_t q, std::uint64_t seed)
{
    auto a = normal_vector(q * q, seed);
    for (std::size_t i = 0; i < q; ++i) {
        for (std::size_t k = 0; k < i; ++k) {
            double d = 0.0;
            for (std::size_t j = 0; j < q; ++j)
                d += a[i * q + j] * a[k * q + j];
            for (std::size_t j = 0; j < q; ++j)
                a[i * q + j] -= d * a[k * q + j];
        }
        double s = 0.0;
        for (std::size_t j = 0; j < q; ++j)
            s += a[i * q + j] * a[i * q + j];
        s = std::sqrt(s);
        for (std::size_t j = 0; j < q; ++j)
            a[i * q + j] /= s;
    }
    return a;
}

// two-sample Kolmogorov-Smirnov statistic
inline double ks_statistic(std::vector<double> a, std::vector<double> b)
{
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double const x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x)
            ++i;
        while (j < b.size() && b[j] <= x)
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
    }
    return d;
}

// 1% critical value of the two-sample KS statistic
inline double ks_critical_1pct(std::size_t n, std::size_t m)
{
    return 1.628 * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * static_cast<double>(m)));
}

}  // namespace oracle
