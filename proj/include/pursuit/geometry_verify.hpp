#ifndef PURSUIT_GEOMETRY_VERIFY_HPP_INCLUDED
#define PURSUIT_GEOMETRY_VERIFY_HPP_INCLUDED

// Numerical checks of the differential geometry of the index manifold
// M = {(cos t h^{(x)3}, sin t h^{(x)4})}: metric, volume element, curvature,
// and the critical radius. Everything here works from the embedding alone
// (finite differences, Gram matrices, quadrature) so it can be compared
// against the closed forms in tube.hpp.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include "pursuit/detail/small_matrix.hpp"
#include "pursuit/direction.hpp"
#include "pursuit/field.hpp"
#include "pursuit/specfun.hpp"

namespace pursuit::geometry {

/// v(t) = 3 cos^2 t + 4 sin^2 t
inline double v_theta(double theta)
{
    double const s = std::sin(theta);
    return 3.0 + s * s;
}

/// alpha = -6/v + 12/v^2, the sphere-pair entries of H = R - J.
inline double alpha(double theta)
{
    double const v = v_theta(theta);
    return -6.0 / v + 12.0 / (v * v);
}

/// beta = -12/v^2, the entries of H mixing theta with a sphere direction.
inline double beta(double theta)
{
    double const v = v_theta(theta);
    return -12.0 / (v * v);
}

/// H_2 = C(q-1, 2) alpha + (q-1) beta
inline double h2_closed(int q, double theta)
{
    return 0.5 * (q - 1) * (q - 2) * alpha(theta) + (q - 1) * beta(theta);
}

/// Hyperspherical coordinates t (q-1 angles) plus the manifold angle theta.
struct ChartPoint {
    std::vector<double> t;
    double theta;
};

/// h_1 = cos t_1, h_k = sin t_1 ... sin t_{k-1} cos t_k, h_q = sin t_1 ... sin t_{q-1}.
inline std::vector<double> sphere_chart(std::span<double const> t)
{
    std::size_t const q = t.size() + 1;
    std::vector<double> h(q);
    double prod = 1.0;
    for (std::size_t k = 0; k + 1 < q; ++k) {
        h[k] = prod * std::cos(t[k]);
        prod *= std::sin(t[k]);
    }
    h[q - 1] = prod;
    return h;
}

namespace detail {

using pursuit::detail::SmallMatrix;

inline void check_chart(ChartPoint const& cp)
{
    // every angle but the last is a polar angle; its sine vanishing is a pole
    for (std::size_t i = 0; i + 1 < cp.t.size(); ++i)
        if (std::abs(std::sin(cp.t[i])) < 1e-6)
            throw std::domain_error("chart point sits on a pole of the hyperspherical chart");
}

// embedding without the chart-range check, so stencils may step past pi/2
inline std::vector<double> embedding_at(std::span<double const> u)
{
    std::vector<double> const h = sphere_chart(u.first(u.size() - 1));
    double const theta = u.back();
    auto const h3 = pursuit::detail::tensor_power(h, 3);
    auto const h4 = pursuit::detail::tensor_power(h, 4);
    std::vector<double> x;
    x.reserve(h3.size() + h4.size());
    double const c = std::cos(theta), s = std::sin(theta);
    for (double a : h3)
        x.push_back(c * a);
    for (double a : h4)
        x.push_back(s * a);
    return x;
}

inline std::vector<double> coordinates(ChartPoint const& cp)
{
    auto u = cp.t;
    u.push_back(cp.theta);
    return u;
}

inline std::vector<double> axpy(std::vector<double> x, double a, std::vector<double> const& y)
{
    for (std::size_t i = 0; i < x.size(); ++i)
        x[i] += a * y[i];
    return x;
}

template <class F>
std::vector<double> shifted(F const& f, std::vector<double> u, std::size_t i, double di, std::size_t j = 0, double dj = 0.0)
{
    u[i] += di;
    u[j] += dj;
    return f(u);
}

// first derivatives: 2-point central (order 2) or 5-point (order 4)
template <class F>
std::vector<std::vector<double>> jacobian(F const& f, std::vector<double> const& u, double step, bool high_order)
{
    std::vector<std::vector<double>> cols;
    for (std::size_t i = 0; i < u.size(); ++i) {
        auto const p1 = shifted(f, u, i, step);
        auto const m1 = shifted(f, u, i, -step);
        std::vector<double> d(p1.size());
        if (high_order) {
            auto const p2 = shifted(f, u, i, 2.0 * step);
            auto const m2 = shifted(f, u, i, -2.0 * step);
            for (std::size_t k = 0; k < d.size(); ++k)
                d[k] = (-p2[k] + 8.0 * p1[k] - 8.0 * m1[k] + m2[k]) / (12.0 * step);
        } else {
            for (std::size_t k = 0; k < d.size(); ++k)
                d[k] = (p1[k] - m1[k]) / (2.0 * step);
        }
        cols.push_back(std::move(d));
    }
    return cols;
}

inline SmallMatrix gram(std::vector<std::vector<double>> const& cols)
{
    SmallMatrix g(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j)
            g(i, j) = dot(cols[i], cols[j]);
    return g;
}

inline auto const embed_fn = [](std::vector<double> const& u) { return embedding_at(u); };

}  // namespace detail

/// Metric of M in the chart (t, theta) next to the closed-form block structure.
struct MetricBlock {
    double theta;
    double v;
    pursuit::detail::SmallMatrix gbar;  // (q-1) x (q-1) sphere metric
    pursuit::detail::SmallMatrix full;  // q x q, theta last
    double block_error;                 // max |full - blockdiag(v gbar, 1)|
};

/// Gram matrix of central-difference tangent vectors (step 1e-5).
inline MetricBlock metric_numeric(int q, ChartPoint const& cp)
{
    if (q != 2 && q != 3)
        throw std::domain_error("metric_numeric: supported for q = 2, 3");
    if (cp.t.size() != static_cast<std::size_t>(q - 1))
        throw std::invalid_argument("metric_numeric: chart point needs q-1 sphere angles");
    detail::check_chart(cp);
    constexpr double step = 1e-5;

    auto const full = detail::gram(detail::jacobian(detail::embed_fn, detail::coordinates(cp), step, false));
    auto const sphere_fn = [](std::vector<double> const& t) { return sphere_chart(t); };
    auto const gbar = detail::gram(detail::jacobian(sphere_fn, cp.t, step, false));

    double const v = v_theta(cp.theta);
    double err = 0.0;
    std::size_t const d = static_cast<std::size_t>(q);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            double expected = 0.0;
            if (i + 1 < d && j + 1 < d)
                expected = v * gbar(i, j);
            else if (i == j)
                expected = 1.0;
            err = std::max(err, std::abs(full(i, j) - expected));
        }
    }
    return {cp.theta, v, gbar, full, err};
}

/// Scalar curvature of M at a chart point, from the Gauss equation for
/// M in flat R^p: R_{ijkl} = <II_il, II_jk> - <II_ik, II_jl>, with the
/// second fundamental form II_ij the normal part of d^2 x / du_i du_j.
inline double scalar_curvature_numeric(ChartPoint const& cp)
{
    detail::check_chart(cp);
    auto const u = detail::coordinates(cp);
    std::size_t const d = u.size();
    auto const& f = detail::embed_fn;

    auto const tangents = detail::jacobian(f, u, 1e-3, true);
    auto const g = detail::gram(tangents);
    auto const ginv = pursuit::detail::inverse(g);

    constexpr double h = 1e-4;
    auto const x0 = f(u);
    std::vector<std::vector<std::vector<double>>> second(d, std::vector<std::vector<double>>(d));
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            std::vector<double> dd(x0.size());
            if (i == j) {
                auto const p = detail::shifted(f, u, i, h);
                auto const m = detail::shifted(f, u, i, -h);
                for (std::size_t k = 0; k < dd.size(); ++k)
                    dd[k] = (p[k] - 2.0 * x0[k] + m[k]) / (h * h);
            } else {
                auto const pp = detail::shifted(f, u, i, h, j, h);
                auto const pm = detail::shifted(f, u, i, h, j, -h);
                auto const mp = detail::shifted(f, u, i, -h, j, h);
                auto const mm = detail::shifted(f, u, i, -h, j, -h);
                for (std::size_t k = 0; k < dd.size(); ++k)
                    dd[k] = (pp[k] - pm[k] - mp[k] + mm[k]) / (4.0 * h * h);
            }
            // strip the tangential part: sum_ab X_a g^{ab} <X_b, dd>
            std::vector<double> proj(d);
            for (std::size_t b = 0; b < d; ++b)
                proj[b] = dot(tangents[b], dd);
            for (std::size_t a = 0; a < d; ++a) {
                double coef = 0.0;
                for (std::size_t b = 0; b < d; ++b)
                    coef += ginv(a, b) * proj[b];
                dd = detail::axpy(std::move(dd), -coef, tangents[a]);
            }
            second[i][j] = dd;
            second[j][i] = std::move(dd);
        }
    }

    double scalar = 0.0;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            for (std::size_t k = 0; k < d; ++k)
                for (std::size_t l = 0; l < d; ++l) {
                    double const w = ginv(i, l) * ginv(j, k);
                    if (w == 0.0)
                        continue;
                    double const rm = dot(second[i][l], second[j][k]) - dot(second[i][k], second[j][l]);
                    scalar += w * rm;
                }
    return scalar;
}

/// H_2 = (scalar curvature - d(d-1)) / 2, from the embedding alone.
inline double h2_numeric(ChartPoint const& cp)
{
    double const d = static_cast<double>(cp.t.size() + 1);
    return 0.5 * (scalar_curvature_numeric(cp) - d * (d - 1.0));
}

struct CurvatureData {
    double theta;
    double alpha;
    double beta;
    double h2_closed;
    double gauss_curv_fd;        // Brioschi formula on the numeric metric
    double gauss_curv_embedded;  // Gauss equation on the embedding
};

/// Gauss curvature of the 2-dimensional M (q = 2) at angle theta, two ways,
/// against the closed form K - 1 = beta.
inline CurvatureData curvature_check_q2(double theta, double phi = 0.3)
{
    // metric entries from 5-point tangents, so the 1e-4 second differences
    // of E, F, G are not swamped by rounding
    auto metric = [](double a, double b) {
        std::vector<double> const u{a, b};
        auto const g = detail::gram(detail::jacobian(detail::embed_fn, u, 1e-3, true));
        return std::array<double, 3>{g(0, 0), g(0, 1), g(1, 1)};
    };
    constexpr double h = 1e-4;
    auto const c = metric(phi, theta);
    auto const up = metric(phi + h, theta), um = metric(phi - h, theta);
    auto const vp = metric(phi, theta + h), vm = metric(phi, theta - h);
    auto const pp = metric(phi + h, theta + h), pm = metric(phi + h, theta - h);
    auto const mp = metric(phi - h, theta + h), mm = metric(phi - h, theta - h);

    double const E = c[0], F = c[1], G = c[2];
    auto du = [&](int k) { return (up[k] - um[k]) / (2.0 * h); };
    auto dv = [&](int k) { return (vp[k] - vm[k]) / (2.0 * h); };
    auto duu = [&](int k) { return (up[k] - 2.0 * c[k] + um[k]) / (h * h); };
    auto dvv = [&](int k) { return (vp[k] - 2.0 * c[k] + vm[k]) / (h * h); };
    auto duv = [&](int k) { return (pp[k] - pm[k] - mp[k] + mm[k]) / (4.0 * h * h); };

    pursuit::detail::SmallMatrix a(3), b(3);
    a(0, 0) = -0.5 * dvv(0) + duv(1) - 0.5 * duu(2);
    a(0, 1) = 0.5 * du(0);
    a(0, 2) = du(1) - 0.5 * dv(0);
    a(1, 0) = dv(1) - 0.5 * du(2);
    a(1, 1) = E;
    a(1, 2) = F;
    a(2, 0) = 0.5 * dv(2);
    a(2, 1) = F;
    a(2, 2) = G;
    b(0, 1) = 0.5 * dv(0);
    b(0, 2) = 0.5 * du(2);
    b(1, 0) = 0.5 * dv(0);
    b(1, 1) = E;
    b(1, 2) = F;
    b(2, 0) = 0.5 * du(2);
    b(2, 1) = F;
    b(2, 2) = G;
    double const w = E * G - F * F;
    double const k_brioschi = (pursuit::detail::determinant(a) - pursuit::detail::determinant(b)) / (w * w);
    if (!std::isfinite(k_brioschi))
        throw std::runtime_error("curvature_check_q2: finite differences produced a non-finite curvature");

    double const k_embedded = 0.5 * scalar_curvature_numeric({{phi}, theta});
    return {theta, alpha(theta), beta(theta), h2_closed(2, theta), k_brioschi, k_embedded};
}

namespace detail {

// sqrt(det g) / sqrt(det gbar) at a fixed sphere chart point
inline double volume_density(std::vector<double> const& t, double theta)
{
    auto u = t;
    u.push_back(theta);
    double const det_g = determinant(gram(jacobian(embed_fn, u, 1e-3, true)));
    auto const sphere_fn = [](std::vector<double> const& s) { return sphere_chart(s); };
    double const det_gbar = determinant(gram(jacobian(sphere_fn, t, 1e-3, true)));
    return std::sqrt(det_g / det_gbar);
}

inline std::vector<double> reference_chart(int q)
{
    // away from every pole; the integrands do not depend on h
    std::vector<double> t;
    for (int i = 0; i + 1 < q; ++i)
        t.push_back(1.1 - 0.17 * i);
    return t;
}

template <class F>
double integrate_theta(F const& f)
{
    constexpr double half_pi = std::numbers::pi / 2.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, -half_pi, half_pi, 8, 1e-12);
}

}  // namespace detail

/// Volume of M: Omega_q times the integral over theta of the numeric volume density.
inline double manifold_volume_numeric(int q)
{
    if (q < 2 || q > 4)
        throw std::domain_error("manifold_volume_numeric: supported for q = 2, 3, 4");
    auto const t = detail::reference_chart(q);
    return sphere_surface(q) * detail::integrate_theta([&](double th) { return detail::volume_density(t, th); });
}

/// kappa_e for e in {0, 2}, integrating numeric curvature over M.
inline double weyl_invariant_numeric(int q, int e)
{
    if (e != 0 && e != 2)
        throw std::domain_error("weyl_invariant_numeric: only e = 0 and e = 2 are verified numerically");
    if (q != 2 && q != 3)
        throw std::domain_error("weyl_invariant_numeric: supported for q = 2, 3");
    if (e == 0)
        return manifold_volume_numeric(q);
    auto const t = detail::reference_chart(q);
    return sphere_surface(q) * detail::integrate_theta([&](double th) {
               return h2_numeric({t, th}) * detail::volume_density(t, th);
           });
}

/// Tangent space basis of M at x(h, theta): derivatives along an orthonormal
/// basis of h-perp, then along theta. Exact product-rule formulas.
inline std::vector<std::vector<double>> tangent_basis(UnitDirection const& h, double theta)
{
    std::size_t const q = h.q();
    // orthonormal basis of h-perp by Gram-Schmidt on the coordinate axes
    std::vector<std::vector<double>> perp;
    for (std::size_t j = 0; j < q && perp.size() + 1 < q; ++j) {
        std::vector<double> e(q, 0.0);
        e[j] = 1.0;
        for (int pass = 0; pass < 2; ++pass) {
            e = detail::axpy(std::move(e), -dot(e, h.components()), h.vector());
            for (auto const& b : perp)
                e = detail::axpy(std::move(e), -dot(e, b), b);
        }
        double const r = norm2(e);
        if (r < 1e-8)
            continue;
        for (auto& x : e)
            x /= r;
        perp.push_back(std::move(e));
    }

    auto sym_derivative = [&](std::vector<double> const& dir, int order) {
        // sum over positions of h (x) ... dir ... (x) h
        std::vector<double> out(static_cast<std::size_t>(std::pow(q, order)), 0.0);
        for (int pos = 0; pos < order; ++pos) {
            std::vector<double> term{1.0};
            for (int k = 0; k < order; ++k) {
                auto const& f = (k == pos) ? dir : h.vector();
                std::vector<double> next;
                next.reserve(term.size() * q);
                for (double a : term)
                    for (double b : f)
                        next.push_back(a * b);
                term.swap(next);
            }
            for (std::size_t i = 0; i < out.size(); ++i)
                out[i] += term[i];
        }
        return out;
    };

    double const c = std::cos(theta), s = std::sin(theta);
    std::vector<std::vector<double>> basis;
    for (auto const& dir : perp) {
        auto const d3 = sym_derivative(dir, 3);
        auto const d4 = sym_derivative(dir, 4);
        std::vector<double> x;
        for (double a : d3)
            x.push_back(c * a);
        for (double a : d4)
            x.push_back(s * a);
        basis.push_back(std::move(x));
    }
    auto const h3 = pursuit::detail::tensor_power(h.components(), 3);
    auto const h4 = pursuit::detail::tensor_power(h.components(), 4);
    std::vector<double> dtheta;
    for (double a : h3)
        dtheta.push_back(-s * a);
    for (double a : h4)
        dtheta.push_back(c * a);
    basis.push_back(std::move(dtheta));
    return basis;
}

/// h(x, y) = (1 - <y, P_x y>) / (1 - <x, y>)^2 with P_x the projection onto span{x} + T_x M.
inline double h_func(ManifoldPoint const& x, ManifoldPoint const& y)
{
    double const r = manifold_inner(x, y);
    if (!(r < 1.0 - 1e-12))
        throw std::domain_error("h_func: points coincide; use the local (u, k) limit instead");

    std::vector<std::vector<double>> span{x.embedding};
    for (auto& b : tangent_basis(x.h, x.theta))
        span.push_back(std::move(b));
    // modified Gram-Schmidt, two passes
    std::vector<std::vector<double>> ortho;
    for (auto v : span) {
        for (int pass = 0; pass < 2; ++pass)
            for (auto const& b : ortho)
                v = detail::axpy(std::move(v), -dot(v, b), b);
        double const n = norm2(v);
        for (auto& a : v)
            a /= n;
        ortho.push_back(std::move(v));
    }
    double proj = 0.0;
    for (auto const& b : ortho) {
        double const c = dot(y.embedding, b);
        proj += c * c;
    }
    double const denom = 1.0 - r;
    return (1.0 - proj) / (denom * denom);
}

struct FG {
    double f;
    double g;
};

/// The reduction of h(x, y) to (psi, theta, theta~): h = f / g.
inline FG fg_reduced(double psi, double theta, double theta_tilde)
{
    using ld = long double;
    ld const cp = std::cos(static_cast<ld>(psi)), sp = std::sin(static_cast<ld>(psi));
    ld const ct = std::cos(static_cast<ld>(theta)), st = std::sin(static_cast<ld>(theta));
    ld const cu = std::cos(static_cast<ld>(theta_tilde)), su = std::sin(static_cast<ld>(theta_tilde));
    ld const c2 = cp * cp, c3 = c2 * cp, c4 = c2 * c2;
    ld const w = 3.0L * c2 * cu * ct + 4.0L * c3 * su * st;
    ld const v = 3.0L * ct * ct + 4.0L * st * st;
    ld const f = 1.0L - c3 * c3 * cu * cu - c4 * c4 * su * su - w * w / v * sp * sp;
    ld const gr = 1.0L - c3 * cu * ct - c4 * su * st;
    return {static_cast<double>(f), static_cast<double>(gr * gr)};
}

/// 12 [(1+u)(3+u) + 4k] / [(3+u)(k+3+u)^2]: the coincidence limit of f/g with
/// u = sin^2 theta and delta^2 ~ k psi^2.
inline double local_ratio(double u, double k)
{
    return 12.0 * ((1.0 + u) * (3.0 + u) + 4.0 * k) / ((3.0 + u) * (k + 3.0 + u) * (k + 3.0 + u));
}

struct CriticalValue {
    double r;
    double half_angle;  // acos(r) / 2
};

struct CriticalPointsReport {
    std::vector<CriticalValue> families;  // distinct critical values of r off the diagonal
    std::vector<CriticalValue> spurious;  // anything other than r = 0 or r = -1
};

namespace detail {

inline std::array<double, 3> r_gradient(std::array<double, 3> const& z)
{
    double const cp = std::cos(z[0]), sp = std::sin(z[0]);
    double const ct = std::cos(z[1]), st = std::sin(z[1]);
    double const cu = std::cos(z[2]), su = std::sin(z[2]);
    double const c2 = cp * cp, c3 = c2 * cp, c4 = c2 * c2;
    return {-sp * (3.0 * ct * cu * c2 + 4.0 * st * su * c3),
            -st * cu * c3 + ct * su * c4,
            -ct * su * c3 + st * cu * c4};
}

inline double r_value(std::array<double, 3> const& z)
{
    return manifold_covariance(std::cos(z[0]), z[1], z[2]);
}

}  // namespace detail

/// Solves grad r(psi, theta, theta~) = 0 by Levenberg-Marquardt from a grid
/// of starts and collects the distinct off-diagonal critical values.
inline CriticalPointsReport critical_points_check(int starts_per_axis = 9)
{
    using detail::r_gradient;
    std::vector<double> found;
    constexpr double pi = std::numbers::pi;
    for (int a = 0; a < starts_per_axis; ++a)
        for (int b = 0; b < starts_per_axis; ++b)
            for (int c = 0; c < starts_per_axis; ++c) {
                std::array<double, 3> z{pi * (a + 0.5) / starts_per_axis,
                                        -pi / 2 + pi * (b + 0.5) / starts_per_axis,
                                        -pi / 2 + pi * (c + 0.5) / starts_per_axis};
                double lambda = 1e-3;
                auto F = r_gradient(z);
                auto norm = [](std::array<double, 3> const& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); };
                for (int it = 0; it < 200 && norm(F) > 1e-13; ++it) {
                    // Jacobian of the gradient (the Hessian of r) by central differences
                    pursuit::detail::SmallMatrix J(3);
                    for (std::size_t j = 0; j < 3; ++j) {
                        auto zp = z, zm = z;
                        zp[j] += 1e-6;
                        zm[j] -= 1e-6;
                        auto const fp = r_gradient(zp), fm = r_gradient(zm);
                        for (std::size_t i = 0; i < 3; ++i)
                            J(i, j) = (fp[i] - fm[i]) / 2e-6;
                    }
                    bool improved = false;
                    for (int tries = 0; tries < 30 && !improved; ++tries) {
                        pursuit::detail::SmallMatrix A(3);
                        std::vector<double> rhs(3, 0.0);
                        for (std::size_t i = 0; i < 3; ++i) {
                            for (std::size_t j = 0; j < 3; ++j) {
                                double s = 0.0;
                                for (std::size_t k = 0; k < 3; ++k)
                                    s += J(k, i) * J(k, j);
                                A(i, j) = s + (i == j ? lambda : 0.0);
                            }
                            for (std::size_t k = 0; k < 3; ++k)
                                rhs[i] -= J(k, i) * F[k];
                        }
                        auto const step = pursuit::detail::solve(A, rhs);
                        std::array<double, 3> zn{z[0] + step[0], z[1] + step[1], z[2] + step[2]};
                        auto const Fn = r_gradient(zn);
                        if (norm(Fn) < norm(F)) {
                            z = zn;
                            F = Fn;
                            lambda = std::max(lambda * 0.3, 1e-15);
                            improved = true;
                        } else {
                            lambda *= 10.0;
                        }
                    }
                    if (!improved)
                        break;
                }
                if (norm(F) > 1e-10)
                    continue;
                double const r = detail::r_value(z);
                if (1.0 - r < 1e-8)
                    continue;  // diagonal: x = x~
                found.push_back(r);
            }

    std::sort(found.begin(), found.end());
    CriticalPointsReport report;
    for (double r : found) {
        if (!report.families.empty() && std::abs(report.families.back().r - r) < 1e-6)
            continue;
        double const rc = std::clamp(r, -1.0, 1.0);
        CriticalValue const cv{rc, 0.5 * std::acos(rc)};
        report.families.push_back(cv);
        if (std::abs(rc) > 1e-6 && std::abs(rc + 1.0) > 1e-6)
            report.spurious.push_back(cv);
    }
    for (auto& cv : report.families) {
        // snap to the exact values once the family is identified
        if (std::abs(cv.r) <= 1e-6)
            cv = {0.0, std::numbers::pi / 4.0};
        else if (std::abs(cv.r + 1.0) <= 1e-6)
            cv = {-1.0, std::numbers::pi / 2.0};
    }
    return report;
}

struct ScanLocation {
    double psi;
    double theta;
    double theta_tilde;
    double u;  // sin^2 theta, for the local limit
    double k;  // delta^2 / psi^2, for the local limit
};

struct CriticalScanResult {
    double sup_fg;      // max of the local limit and the global scan
    double local_sup;   // max over (u, k) of the coincidence-limit ratio
    double global_sup;  // max of f/g over the grid, coincidence excluded
    ScanLocation attained_at;
    ScanLocation global_at;
    std::vector<CriticalValue> critical_values;
    std::vector<CriticalValue> spurious;
    double theta_c;
};

struct ScanConfig {
    int resolution = 128;   // grid points per axis
    double epsilon = 1e-2;  // coincidence exclusion radius
};

/// cot^2 theta_c = sup f/g: the analytic local limit maximized over (u, k),
/// a grid scan of f/g away from coincidence, and the critical-point families.
inline CriticalScanResult sup_fg_scan(ScanConfig const& cfg = {})
{
    if (cfg.resolution < 64)
        throw std::invalid_argument("sup_fg_scan: resolution must be >= 64 per axis");
    constexpr double pi = std::numbers::pi;
    constexpr int bits = std::numeric_limits<double>::digits;

    // local limit: inner max over k in [0, 50], outer over u in [0, 1]
    auto best_k = [&](double u) {
        auto const r = boost::math::tools::brent_find_minima([u](double k) { return -local_ratio(u, k); }, 0.0, 50.0, bits);
        return std::pair<double, double>{r.first, -r.second};
    };
    auto const ur = boost::math::tools::brent_find_minima([&](double u) { return -best_k(u).second; }, 0.0, 1.0, bits);
    double u_star = ur.first;
    double local_sup = -ur.second;
    if (double const at0 = best_k(0.0).second; at0 >= local_sup) {
        u_star = 0.0;
        local_sup = at0;
    }
    double const k_star = best_k(u_star).first;

    // global scan over psi in [0, pi], theta, theta~ in (-pi/2, pi/2]
    int const n = cfg.resolution;
    double global_sup = 0.0;
    ScanLocation global_at{};
    double const eps2 = cfg.epsilon * cfg.epsilon;
    for (int a = 0; a <= n; ++a) {
        double const psi = pi * a / n;
        for (int b = 1; b <= n; ++b) {
            double const th = -pi / 2 + pi * b / n;
            for (int c = 1; c <= n; ++c) {
                double const tt = -pi / 2 + pi * c / n;
                double const delta = tt - th;
                double const r = manifold_covariance(std::cos(psi), th, tt);
                // exclude both the chart-coordinate ball and the chordal ball, the
                // latter also covering x(h, pi/2) = x(-h, pi/2)
                if (psi * psi + delta * delta < eps2 || 2.0 * (1.0 - r) < eps2)
                    continue;
                auto const fg = fg_reduced(psi, th, tt);
                double const ratio = fg.f / fg.g;
                if (ratio > global_sup) {
                    global_sup = ratio;
                    double const s = std::sin(th);
                    global_at = {psi, th, tt, s * s, psi > 0 ? delta * delta / (psi * psi) : 0.0};
                }
            }
        }
    }

    auto const crit = critical_points_check();
    double const sup_fg = std::max(local_sup, global_sup);
    double theta_c = std::atan(1.0 / std::sqrt(sup_fg));
    for (auto const& cv : crit.families)
        theta_c = std::min(theta_c, cv.half_angle);

    ScanLocation const local_at{0.0, std::asin(std::sqrt(u_star)), std::asin(std::sqrt(u_star)), u_star, k_star};
    return {sup_fg, local_sup, global_sup, local_sup >= global_sup ? local_at : global_at, global_at,
            crit.families, crit.spurious, theta_c};
}

}  // namespace pursuit::geometry

#endif  // PURSUIT_GEOMETRY_VERIFY_HPP_INCLUDED
