#ifndef PURSUIT_FIELD_HPP_INCLUDED
#define PURSUIT_FIELD_HPP_INCLUDED

// The limiting Gaussian random field of the moment index,
//
//   Z1(h) = <h (x) h (x) h, xi1>,   Z2(h) = <h (x) h (x) h (x) h, xi2>,
//   I(h)  = Z1(h)^2 + Z2(h)^2,
//
// and the index manifold M = {(cos t h^{(x)3}, sin t h^{(x)4})} in R^p,
// p = q^3 + q^4. All tensors use row-major lexicographic layout: entry
// (i,j,k) of a q^3 block sits at (i*q + j)*q + k, and likewise for q^4.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pursuit/direction.hpp"

namespace pursuit {

inline std::size_t cube(std::size_t q) { return q * q * q; }
inline std::size_t quart(std::size_t q) { return q * q * q * q; }
inline std::size_t ambient_dimension(std::size_t q) { return cube(q) + quart(q); }

/// One draw (xi1, xi2) of the field's Karhunen-Loeve coefficients.
struct FieldCoefficients {
    std::size_t q = 0;
    std::vector<double> xi1;  // q^3
    std::vector<double> xi2;  // q^4

    FieldCoefficients() = default;
    FieldCoefficients(std::size_t q_, std::vector<double> a, std::vector<double> b)
        : q(q_), xi1(std::move(a)), xi2(std::move(b))
    {
        if (xi1.size() != cube(q) || xi2.size() != quart(q))
            throw std::invalid_argument("FieldCoefficients: block lengths must be q^3 and q^4");
    }

    static FieldCoefficients zero(std::size_t q) { return {q, std::vector<double>(cube(q)), std::vector<double>(quart(q))}; }
};

/// Draws q^3 + q^4 iid N(0,1): all of xi1 in layout order, then all of xi2.
template <class URBG>
FieldCoefficients sample_coefficients(std::size_t q, URBG& rng)
{
    if (q < 2)
        throw std::invalid_argument("sample_coefficients: q must be >= 2");
    std::normal_distribution<double> normal;
    FieldCoefficients c = FieldCoefficients::zero(q);
    for (auto& x : c.xi1)
        x = normal(rng);
    for (auto& x : c.xi2)
        x = normal(rng);
    return c;
}

struct FieldValue {
    double z1;
    double z2;
    double i_value;
};

/// Direct contraction of the coefficient tensors with h.
inline FieldValue eval_Z(FieldCoefficients const& c, UnitDirection const& h)
{
    std::size_t const q = c.q;
    if (h.q() != q)
        throw std::invalid_argument("eval_Z: coefficient dimension " + std::to_string(q)
                                    + " does not match direction dimension " + std::to_string(h.q()));
    double z1 = 0.0, z2 = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
        for (std::size_t j = 0; j < q; ++j) {
            double const hij = h[i] * h[j];
            for (std::size_t k = 0; k < q; ++k) {
                std::size_t const ijk = (i * q + j) * q + k;
                double const hijk = hij * h[k];
                z1 += c.xi1[ijk] * hijk;
                double const* row = &c.xi2[ijk * q];
                for (std::size_t l = 0; l < q; ++l)
                    z2 += row[l] * hijk * h[l];
            }
        }
    }
    return {z1, z2, z1 * z1 + z2 * z2};
}

inline bool angle_in_chart(double theta)
{
    constexpr double half_pi = std::numbers::pi / 2.0;
    return theta > -half_pi && theta <= half_pi;
}

/// Z(h, theta) = cos(theta) Z1(h) + sin(theta) Z2(h)
inline double eval_Z_angle(FieldCoefficients const& c, UnitDirection const& h, double theta)
{
    if (!angle_in_chart(theta))
        throw std::domain_error("eval_Z_angle: theta outside (-pi/2, pi/2]");
    auto const v = eval_Z(c, h);
    return std::cos(theta) * v.z1 + std::sin(theta) * v.z2;
}

namespace detail {

// h^{(x)r} in row-major layout
inline std::vector<double> tensor_power(std::span<double const> h, int r)
{
    std::vector<double> out{1.0};
    for (int step = 0; step < r; ++step) {
        std::vector<double> next;
        next.reserve(out.size() * h.size());
        for (double a : out)
            for (double b : h)
                next.push_back(a * b);
        out.swap(next);
    }
    return out;
}

}  // namespace detail

/// A point of M together with its chart coordinates.
struct ManifoldPoint {
    UnitDirection h;
    double theta;
    std::vector<double> embedding;  // length p = q^3 + q^4
};

/// x(h, theta) = (cos(theta) h^{(x)3}, sin(theta) h^{(x)4}).
inline ManifoldPoint embed(UnitDirection const& h, double theta)
{
    if (!angle_in_chart(theta))
        throw std::domain_error("embed: theta outside (-pi/2, pi/2]");
    auto const h3 = detail::tensor_power(h.components(), 3);
    auto const h4 = detail::tensor_power(h.components(), 4);
    std::vector<double> x;
    x.reserve(h3.size() + h4.size());
    double const ct = std::cos(theta), st = std::sin(theta);
    for (double v : h3)
        x.push_back(ct * v);
    for (double v : h4)
        x.push_back(st * v);
    return {h, theta, std::move(x)};
}

/// <x, x~> computed in the ambient space.
inline double manifold_inner(ManifoldPoint const& a, ManifoldPoint const& b)
{
    if (a.h.q() != b.h.q())
        throw std::invalid_argument("manifold_inner: points live in different dimensions");
    return dot(a.embedding, b.embedding);
}

/// cos t cos t~ cos^3 psi + sin t sin t~ cos^4 psi, with cos psi = <h, h~>.
inline double manifold_covariance(double cos_psi, double theta, double theta_tilde)
{
    double const c3 = cos_psi * cos_psi * cos_psi;
    return std::cos(theta) * std::cos(theta_tilde) * c3 + std::sin(theta) * std::sin(theta_tilde) * c3 * cos_psi;
}

/// Squared norm of the orthogonal projection of (xi1, xi2) onto symmetric
/// tensors. Every point of M is symmetric, so <x, xi> is bounded by the
/// square root of this times |x| = 1.
inline double symmetric_norm2(FieldCoefficients const& c)
{
    auto block = [q = c.q](std::span<double const> t, int order) {
        // group flat indices by their sorted multi-index
        std::vector<std::size_t> key(t.size());
        std::vector<std::size_t> digits(static_cast<std::size_t>(order));
        for (std::size_t flat = 0; flat < t.size(); ++flat) {
            std::size_t rest = flat;
            for (int d = order - 1; d >= 0; --d) {
                digits[static_cast<std::size_t>(d)] = rest % q;
                rest /= q;
            }
            std::sort(digits.begin(), digits.end());
            std::size_t k = 0;
            for (auto dgt : digits)
                k = k * q + dgt;
            key[flat] = k;
        }
        std::vector<double> sum(t.size(), 0.0);
        std::vector<double> count(t.size(), 0.0);
        for (std::size_t flat = 0; flat < t.size(); ++flat) {
            sum[key[flat]] += t[flat];
            count[key[flat]] += 1.0;
        }
        double s = 0.0;
        for (std::size_t k = 0; k < t.size(); ++k)
            if (count[k] > 0.0)
                s += sum[k] * sum[k] / count[k];
        return s;
    };
    return block(c.xi1, 3) + block(c.xi2, 4);
}

/// Coefficients of the field h -> Z(R' h) for a q x q orthogonal R (row-major):
/// each tensor index is transformed by R.
inline FieldCoefficients rotate_coefficients(FieldCoefficients const& c, std::span<double const> rot)
{
    std::size_t const q = c.q;
    if (rot.size() != q * q)
        throw std::invalid_argument("rotate_coefficients: rotation must be q x q");
    auto apply = [&](std::vector<double> t, int order) {
        // contract one tensor slot at a time
        std::size_t const total = t.size();
        for (int slot = 0; slot < order; ++slot) {
            std::size_t stride = 1;
            for (int s = slot + 1; s < order; ++s)
                stride *= q;
            std::vector<double> out(total, 0.0);
            for (std::size_t flat = 0; flat < total; ++flat) {
                std::size_t const i = (flat / stride) % q;
                std::size_t const base = flat - i * stride;
                double v = 0.0;
                for (std::size_t a = 0; a < q; ++a)
                    v += rot[i * q + a] * t[base + a * stride];
                out[flat] = v;
            }
            t.swap(out);
        }
        return t;
    };
    return {q, apply(c.xi1, 3), apply(c.xi2, 4)};
}

/// I(.) for a fixed coefficient draw, with symmetrized tensors so the
/// gradient is 3 S1[h,h,.] and 4 S2[h,h,h,.].
class FieldIndex {
public:
    explicit FieldIndex(FieldCoefficients const& c) : q_(c.q), s1_(symmetrize(c.xi1, 3)), s2_(symmetrize(c.xi2, 4)) {}

    std::size_t q() const { return q_; }

    FieldValue evaluate(UnitDirection const& h) const
    {
        auto const p = partials(h);
        double const z1 = dot(p.v1, h.components());
        double const z2 = dot(p.v2, h.components());
        return {z1, z2, z1 * z1 + z2 * z2};
    }

    double value(UnitDirection const& h) const { return evaluate(h).i_value; }

    std::vector<double> gradient(UnitDirection const& h) const
    {
        auto const p = partials(h);
        double const z1 = dot(p.v1, h.components());
        double const z2 = dot(p.v2, h.components());
        std::vector<double> g(q_);
        for (std::size_t i = 0; i < q_; ++i)
            g[i] = 2.0 * z1 * 3.0 * p.v1[i] + 2.0 * z2 * 4.0 * p.v2[i];
        return tangent_projection(h, g);
    }

private:
    struct Partials {
        std::vector<double> v1;  // S1[i, h, h]
        std::vector<double> v2;  // S2[i, h, h, h]
    };

    Partials partials(UnitDirection const& h) const
    {
        if (h.q() != q_)
            throw std::invalid_argument("FieldIndex: direction dimension mismatch");
        std::size_t const q = q_;
        Partials p{std::vector<double>(q, 0.0), std::vector<double>(q, 0.0)};
        for (std::size_t i = 0; i < q; ++i) {
            double a1 = 0.0, a2 = 0.0;
            for (std::size_t j = 0; j < q; ++j) {
                double b1 = 0.0, b2 = 0.0;
                for (std::size_t k = 0; k < q; ++k) {
                    std::size_t const ijk = (i * q + j) * q + k;
                    b1 += s1_[ijk] * h[k];
                    double const* row = &s2_[ijk * q];
                    double c2 = 0.0;
                    for (std::size_t l = 0; l < q; ++l)
                        c2 += row[l] * h[l];
                    b2 += c2 * h[k];
                }
                a1 += b1 * h[j];
                a2 += b2 * h[j];
            }
            p.v1[i] = a1;
            p.v2[i] = a2;
        }
        return p;
    }

    std::vector<double> symmetrize(std::vector<double> const& t, int order) const
    {
        std::size_t const q = q_;
        std::vector<double> out(t.size(), 0.0);
        std::vector<std::size_t> idx(static_cast<std::size_t>(order));
        for (std::size_t flat = 0; flat < t.size(); ++flat) {
            std::size_t rest = flat;
            for (int d = order - 1; d >= 0; --d) {
                idx[static_cast<std::size_t>(d)] = rest % q;
                rest /= q;
            }
            std::sort(idx.begin(), idx.end());
            double perms = 0.0;
            double sum = 0.0;
            do {
                std::size_t k = 0;
                for (auto d : idx)
                    k = k * q + d;
                sum += t[k];
                perms += 1.0;
            } while (std::next_permutation(idx.begin(), idx.end()));
            out[flat] = sum / perms;
        }
        return out;
    }

    std::size_t q_;
    std::vector<double> s1_;
    std::vector<double> s2_;
};

}  // namespace pursuit

#endif  // PURSUIT_FIELD_HPP_INCLUDED
