#ifndef PURSUIT_SPHERE_OPT_HPP_INCLUDED
#define PURSUIT_SPHERE_OPT_HPP_INCLUDED

// Maximization of even objectives f(h) = f(-h) over the unit sphere.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "pursuit/cumulant.hpp"
#include "pursuit/detail/small_matrix.hpp"
#include "pursuit/direction.hpp"

namespace pursuit {

/// A smooth function on S^{q-1}. `grad`, when set, returns the tangent gradient.
struct Objective {
    std::size_t q = 0;
    std::function<double(UnitDirection const&)> eval;
    std::function<std::vector<double>(UnitDirection const&)> grad;
};

struct OptResult {
    UnitDirection h_star;
    double value;
    int starts_used;
    bool converged;
    double best_gradient_norm;
};

/// Tangent gradient: uses obj.grad when present, otherwise central
/// differences of f(v / |v|), whose Euclidean gradient at h is tangent.
inline std::vector<double> tangent_gradient(Objective const& obj, UnitDirection const& h)
{
    if (obj.grad)
        return obj.grad(h);
    constexpr double step = 1e-6;
    std::vector<double> g(h.q());
    for (std::size_t i = 0; i < h.q(); ++i) {
        auto plus = h.vector();
        auto minus = h.vector();
        plus[i] += step;
        minus[i] -= step;
        g[i] = (obj.eval(UnitDirection::normalize(plus)) - obj.eval(UnitDirection::normalize(minus))) / (2.0 * step);
    }
    return tangent_projection(h, g);
}

namespace detail {

// true when (va, a) beats (vb, b): larger value, then smaller canonical h
inline bool better(double va, UnitDirection const& a, double vb, UnitDirection const& b)
{
    if (va != vb)
        return va > vb;
    return std::lexicographical_compare(a.vector().begin(), a.vector().end(), b.vector().begin(), b.vector().end());
}

inline OptResult finish(Objective const& obj, UnitDirection const& h, double value, int starts, double tol)
{
    auto const canon = h.canonical();
    double const gn = norm2(tangent_gradient(obj, canon));
    return {canon, value, starts, gn <= tol, gn};
}

// Near an optimum f is flat below its evaluation noise (~1e-14 relative for
// data-sized sums); polishing steps may lose this much while the gradient drops.
inline double flat_tolerance(double val) { return 1e-12 * std::max(1.0, std::abs(val)); }

// Newton steps on d f / d phi, kept while f holds to flat_tolerance and the slope halves
inline void polish_angle(Objective const& obj, double& phi, double& val, double tol)
{
    auto slope = [&](double a) {
        auto const g = tangent_gradient(obj, UnitDirection::from_angle(a));
        return -std::sin(a) * g[0] + std::cos(a) * g[1];
    };
    constexpr double delta = 1e-5;
    for (int it = 0; it < 8; ++it) {
        double const d = slope(phi);
        if (std::abs(d) <= 0.25 * tol)
            return;
        double const curv = (slope(phi + delta) - slope(phi - delta)) / (2.0 * delta);
        if (!(curv < 0.0))
            return;
        double const next = phi - d / curv;
        double const v = obj.eval(UnitDirection::from_angle(next));
        if (!(v >= val - flat_tolerance(val)) || !(std::abs(slope(next)) < 0.5 * std::abs(d)))
            return;
        phi = next;
        val = v;
    }
}

}  // namespace detail

/// Best of f at phi_i = pi i / resolution on the half circle; no refinement.
inline OptResult grid_search_q2(Objective const& obj, int resolution)
{
    if (obj.q != 2)
        throw std::invalid_argument("grid_search_q2: objective must be defined on S^1");
    if (resolution < 8)
        throw std::invalid_argument("grid_search_q2: resolution must be >= 8");
    std::optional<UnitDirection> best;
    double best_value = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < resolution; ++i) {
        auto const h = UnitDirection::from_angle(std::numbers::pi * i / resolution).canonical();
        double const v = obj.eval(h);
        if (!best || detail::better(v, h, best_value, *best)) {
            best = h;
            best_value = v;
        }
    }
    double const gn = obj.grad ? norm2(obj.grad(*best)) : std::numeric_limits<double>::quiet_NaN();
    return {*best, best_value, 1, false, gn};
}

/// Grid search on the half circle, then Brent refinement of every discrete
/// local maximum inside its grid bracket.
inline OptResult grid_refine_q2(Objective const& obj, int resolution, double tol = 1e-10)
{
    if (obj.q != 2)
        throw std::invalid_argument("grid_refine_q2: objective must be defined on S^1");
    if (resolution < 8)
        throw std::invalid_argument("grid_refine_q2: resolution must be >= 8");
    double const step = std::numbers::pi / resolution;
    std::vector<double> values(static_cast<std::size_t>(resolution));
    for (int i = 0; i < resolution; ++i)
        values[static_cast<std::size_t>(i)] = obj.eval(UnitDirection::from_angle(step * i));

    auto f_of = [&](double phi) { return obj.eval(UnitDirection::from_angle(phi)); };
    std::optional<UnitDirection> best;
    double best_value = -std::numeric_limits<double>::infinity();
    int refined = 0;
    auto const n = static_cast<std::size_t>(resolution);
    for (std::size_t i = 0; i < n; ++i) {
        // f has period pi in phi, so the grid wraps around
        double const left = values[(i + n - 1) % n];
        double const right = values[(i + 1) % n];
        double const mid = values[i];
        if (!(mid >= left && mid >= right))
            continue;
        double const centre = step * static_cast<double>(i);
        auto const r = boost::math::tools::brent_find_minima(
            [&](double phi) { return -f_of(phi); }, centre - step, centre + step, std::numeric_limits<double>::digits / 2 + 4);
        double phi = r.first;
        double val = -r.second;
        if (mid > val) {
            phi = centre;
            val = mid;
        }
        detail::polish_angle(obj, phi, val, tol);
        ++refined;
        auto const h = UnitDirection::from_angle(phi).canonical();
        if (!best || detail::better(val, h, best_value, *best)) {
            best = h;
            best_value = val;
        }
    }
    if (!best) {
        // constant objective: every grid point is a tie
        best = UnitDirection::from_angle(0.0);
        best_value = values[0];
    }
    auto out = detail::finish(obj, *best, best_value, std::max(refined, 1), tol);
    return out;
}

struct AscentOptions {
    double tol = 1e-10;
    int max_iter = 500;
};

namespace detail {

struct AscentResult {
    UnitDirection h;
    double value;
    bool finite;
};

inline AscentResult ascend(Objective const& obj, UnitDirection h, AscentOptions const& opt)
{
    double f = obj.eval(h);
    if (!std::isfinite(f))
        return {h, f, false};
    auto g = tangent_gradient(obj, h);
    double gn = norm2(g);
    double s = 1.0 / std::max(gn, 1.0);
    UnitDirection best_h = h;
    double best_f = f;
    double const f0 = f;
    constexpr double eps = std::numeric_limits<double>::epsilon();

    for (int iter = 0; iter < opt.max_iter && gn > opt.tol; ++iter) {
        bool accepted = false;
        while (s * gn > 1e-15) {
            std::vector<double> trial(h.q());
            for (std::size_t i = 0; i < h.q(); ++i)
                trial[i] = h[i] + s * g[i];
            auto const hn = UnitDirection::normalize(std::move(trial));
            double const fn = obj.eval(hn);
            if (!std::isfinite(fn))
                return {best_h, best_f, false};
            bool const armijo = fn >= f + 1e-4 * s * gn * gn;
            std::vector<double> gnew;
            bool roundoff_ok = false;
            if (!armijo && fn >= f - 8.0 * eps * std::abs(f)) {
                // objective flat to rounding; accept if the gradient shrinks
                gnew = tangent_gradient(obj, hn);
                roundoff_ok = norm2(gnew) < gn;
            }
            if (armijo || roundoff_ok) {
                if (gnew.empty())
                    gnew = tangent_gradient(obj, hn);
                // Barzilai-Borwein step for the next iteration
                double sy = 0.0, ss = 0.0;
                for (std::size_t i = 0; i < h.q(); ++i) {
                    double const dh = hn[i] - h[i];
                    ss += dh * dh;
                    sy += dh * (gnew[i] - g[i]);
                }
                h = hn;
                f = fn;
                if (f > best_f) {
                    best_h = h;
                    best_f = f;
                }
                g = std::move(gnew);
                gn = norm2(g);
                s = sy < 0.0 ? std::min(-ss / sy, 1e6) : 2.0 * s;
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        if (!accepted)
            break;  // step collapse
    }
    // the last iterate has the smallest gradient; keep it unless rounding-level
    // acceptances drifted it below a better point seen earlier
    if (f >= best_f - 8.0 * eps * std::abs(best_f) && f >= f0)
        return {h, f, true};
    return {best_h, best_f, true};
}

// orthonormal basis of the tangent space at h
inline std::vector<std::vector<double>> tangent_frame(UnitDirection const& h)
{
    std::size_t const q = h.q();
    std::size_t skip = 0;
    for (std::size_t j = 1; j < q; ++j)
        if (std::abs(h[j]) > std::abs(h[skip]))
            skip = j;
    std::vector<std::vector<double>> frame;
    for (std::size_t j = 0; j < q; ++j) {
        if (j == skip)
            continue;
        std::vector<double> e(q, 0.0);
        e[j] = 1.0;
        for (int pass = 0; pass < 2; ++pass) {
            double const a = dot(e, h.components());
            for (std::size_t i = 0; i < q; ++i)
                e[i] -= a * h[i];
            for (auto const& b : frame) {
                double const c = dot(e, b);
                for (std::size_t i = 0; i < q; ++i)
                    e[i] -= c * b[i];
            }
        }
        double const n = norm2(e);
        for (auto& x : e)
            x /= n;
        frame.push_back(std::move(e));
    }
    return frame;
}

// Newton steps in the tangent space, Hessian by differences of the gradient;
// a step is kept when f holds to flat_tolerance and the gradient halves
inline void polish_tangent(Objective const& obj, UnitDirection& h, double& val, double tol)
{
    constexpr double delta = 1e-5;
    std::size_t const m = h.q() - 1;
    for (int it = 0; it < 8; ++it) {
        auto const frame = tangent_frame(h);
        auto const g = tangent_gradient(obj, h);
        double const gn = norm2(g);
        if (gn <= 0.25 * tol)
            return;
        auto at = [&](std::size_t k, double t) {
            std::vector<double> v(h.q());
            for (std::size_t i = 0; i < h.q(); ++i)
                v[i] = std::cos(t) * h[i] + std::sin(t) * frame[k][i];
            return UnitDirection::normalize(std::move(v));
        };
        SmallMatrix H(m);
        std::vector<double> rhs(m);
        for (std::size_t k = 0; k < m; ++k) {
            rhs[k] = -dot(g, frame[k]);
            auto const gp = tangent_gradient(obj, at(k, delta));
            auto const gm = tangent_gradient(obj, at(k, -delta));
            for (std::size_t l = 0; l < m; ++l)
                H(l, k) = (dot(gp, frame[l]) - dot(gm, frame[l])) / (2.0 * delta);
        }
        for (std::size_t k = 0; k < m; ++k)
            for (std::size_t l = k + 1; l < m; ++l)
                H(k, l) = H(l, k) = 0.5 * (H(k, l) + H(l, k));
        std::vector<double> step;
        try {
            step = solve(H, rhs);
        } catch (std::exception const&) {
            return;
        }
        double descent = 0.0;
        for (std::size_t k = 0; k < m; ++k)
            descent += step[k] * rhs[k];
        if (!(descent < 0.0))
            return;  // not a local maximum model
        std::vector<double> v = h.vector();
        for (std::size_t k = 0; k < m; ++k)
            for (std::size_t i = 0; i < h.q(); ++i)
                v[i] += step[k] * frame[k][i];
        auto const hn = UnitDirection::normalize(std::move(v));
        double const fn = obj.eval(hn);
        if (!(fn >= val - flat_tolerance(val)))
            return;
        if (!(norm2(tangent_gradient(obj, hn)) < 0.5 * gn))
            return;
        h = hn;
        val = fn;
    }
}

}  // namespace detail

/// Multi-start projected gradient ascent with backtracking line search.
/// Starts are the q coordinate axes followed by `starts` uniform draws from `seed`.
inline OptResult maximize(Objective const& obj, int starts, std::uint64_t seed, AscentOptions const& opt = {})
{
    if (starts < 1)
        throw std::invalid_argument("maximize: need at least one start");
    if (!(opt.tol > 0.0))
        throw std::invalid_argument("maximize: tolerance must be positive");
    std::size_t const q = obj.q;

    std::vector<UnitDirection> inits;
    for (std::size_t j = 0; j < q; ++j)
        inits.push_back(UnitDirection::axis(q, j));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    for (int s = 0; s < starts; ++s) {
        std::vector<double> v(q);
        for (auto& x : v)
            x = normal(rng);
        inits.push_back(UnitDirection::normalize(std::move(v)));
    }

    std::optional<UnitDirection> best;
    double best_value = -std::numeric_limits<double>::infinity();
    for (auto const& h0 : inits) {
        auto const r = detail::ascend(obj, h0, opt);
        if (!r.finite)
            continue;
        auto const h = r.h.canonical();
        if (!best || detail::better(r.value, h, best_value, *best)) {
            best = h;
            best_value = r.value;
        }
    }
    if (!best)
        throw std::runtime_error("maximize: objective was non-finite at every start");
    detail::polish_tangent(obj, *best, best_value, opt.tol);
    return detail::finish(obj, *best, best_value, static_cast<int>(inits.size()), opt.tol);
}

struct PursuitConfig {
    int starts = 32;
    std::uint64_t seed = 0;
    double tol = 1e-10;
    int max_iter = 500;
    int grid_resolution = 4096;
    CumulantConvention convention = CumulantConvention::moments;
};

inline Objective index_objective(MomentIndex const& index)
{
    return {index.q(), [&index](UnitDirection const& h) { return index.value(h); },
            [&index](UnitDirection const& h) { return index.gradient(h); }};
}

/// max_h I_n(h): grid plus refinement for q = 2, multi-start ascent otherwise.
inline OptResult max_index_value(DataMatrix const& data, PursuitConfig const& cfg = {})
{
    MomentIndex const index(data, cfg.convention);
    auto const obj = index_objective(index);
    if (data.q() == 2)
        return grid_refine_q2(obj, cfg.grid_resolution, cfg.tol);
    return maximize(obj, cfg.starts, cfg.seed, {cfg.tol, cfg.max_iter});
}

}  // namespace pursuit

#endif  // PURSUIT_SPHERE_OPT_HPP_INCLUDED
