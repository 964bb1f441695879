#ifndef PURSUIT_DIRECTION_HPP_INCLUDED
#define PURSUIT_DIRECTION_HPP_INCLUDED

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace pursuit {

inline double dot(std::span<double const> a, std::span<double const> b)
{
    if (a.size() != b.size())
        throw std::invalid_argument("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

inline double norm2(std::span<double const> a) { return std::sqrt(dot(a, a)); }

/// A point on the unit sphere S^{q-1}.
class UnitDirection {
public:
    static constexpr double tolerance = 1e-12;

    /// Takes an already normalized vector; throws if |h| differs from 1.
    explicit UnitDirection(std::vector<double> components) : h_(std::move(components))
    {
        if (h_.size() < 1)
            throw std::invalid_argument("UnitDirection: empty vector");
        if (std::abs(norm2(h_) - 1.0) > tolerance)
            throw std::invalid_argument("UnitDirection: vector is not of unit length");
    }

    /// Scales `v` to unit length.
    static UnitDirection normalize(std::vector<double> v)
    {
        double const r = norm2(v);
        if (!(r > 0.0) || !std::isfinite(r))
            throw std::invalid_argument("UnitDirection: cannot normalize a zero or non-finite vector");
        for (auto& x : v)
            x /= r;
        return UnitDirection(std::move(v));
    }

    static UnitDirection axis(std::size_t q, std::size_t j)
    {
        std::vector<double> v(q, 0.0);
        v.at(j) = 1.0;
        return UnitDirection(std::move(v));
    }

    /// (cos phi, sin phi)
    static UnitDirection from_angle(double phi) { return UnitDirection({std::cos(phi), std::sin(phi)}); }

    std::size_t q() const { return h_.size(); }
    double operator[](std::size_t i) const { return h_[i]; }
    std::span<double const> components() const { return h_; }
    std::vector<double> const& vector() const { return h_; }

    UnitDirection operator-() const
    {
        auto v = h_;
        for (auto& x : v)
            x = -x;
        return UnitDirection(std::move(v));
    }

    /// Representative of {h, -h} whose first nonzero component is positive.
    UnitDirection canonical() const
    {
        for (double x : h_) {
            if (std::abs(x) > tolerance)
                return x > 0.0 ? *this : -*this;
        }
        return *this;
    }

private:
    std::vector<double> h_;
};

/// (I - h h') g
inline std::vector<double> tangent_projection(UnitDirection const& h, std::span<double const> g)
{
    double const c = dot(h.components(), g);
    std::vector<double> out(g.begin(), g.end());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] -= c * h[i];
    return out;
}

}  // namespace pursuit

#endif  // PURSUIT_DIRECTION_HPP_INCLUDED
