#ifndef PURSUIT_MC_HPP_INCLUDED
#define PURSUIT_MC_HPP_INCLUDED

// Monte Carlo engines: maxima of the limiting field and of the finite-sample
// index, uniform-point tube volumes, and the marginal CLT scaling.
//
// Replication r draws from std::mt19937_64 seeded with stream_seed(seed, r),
// so each replication is the same no matter which worker runs it or how many
// workers there are. Results are stored by replication index.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "pursuit/cumulant.hpp"
#include "pursuit/field.hpp"
#include "pursuit/sphere_opt.hpp"
#include "pursuit/tube.hpp"

namespace pursuit {

/// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t z)
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of replication `rep` under master seed `seed`: mix64(mix64(seed) ^ rep).
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t rep) { return mix64(mix64(seed) ^ rep); }

struct McConfig {
    int reps = 10000;
    std::uint64_t seed = 0;
    int workers = 1;
    PursuitConfig opt{};
};

/// Runs body(rep) for rep in [0, reps) on up to `workers` threads, striding by worker.
template <class Body>
void for_each_rep(int reps, int workers, Body&& body)
{
    if (reps < 1)
        throw std::invalid_argument("Monte Carlo: reps must be >= 1");
    int const w = std::clamp(workers, 1, reps);
    if (w == 1) {
        for (int r = 0; r < reps; ++r)
            body(r);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(w));
    for (int k = 0; k < w; ++k)
        pool.emplace_back([&, k] {
            for (int r = k; r < reps; r += w)
                body(r);
        });
    for (auto& t : pool)
        t.join();
}

struct McSamples {
    std::vector<double> values;
    int nonconverged = 0;  // optimizer did not reach tolerance (value still recorded)
    int resampled = 0;     // degenerate samples redrawn
};

/// max_h I(h) for one coefficient draw.
inline OptResult max_field_index(FieldCoefficients const& c, PursuitConfig const& opt, std::uint64_t start_seed)
{
    FieldIndex const index(c);
    Objective const obj{index.q(), [&index](UnitDirection const& h) { return index.value(h); },
                        [&index](UnitDirection const& h) { return index.gradient(h); }};
    if (c.q == 2)
        return grid_refine_q2(obj, opt.grid_resolution, opt.tol);
    return maximize(obj, opt.starts, start_seed, {opt.tol, opt.max_iter});
}

/// Samples of max_h I(h) for the limiting Gaussian field.
inline McSamples simulate_limit_max(int q, McConfig const& cfg)
{
    if (q < 2)
        throw std::invalid_argument("simulate_limit_max: q must be >= 2");
    McSamples out;
    out.values.assign(static_cast<std::size_t>(cfg.reps), 0.0);
    std::vector<char> conv(static_cast<std::size_t>(cfg.reps), 1);
    for_each_rep(cfg.reps, cfg.workers, [&](int r) {
        std::uint64_t const s = stream_seed(cfg.seed, static_cast<std::uint64_t>(r));
        std::mt19937_64 rng(s);
        auto const coeffs = sample_coefficients(static_cast<std::size_t>(q), rng);
        auto const res = max_field_index(coeffs, cfg.opt, mix64(s));
        out.values[static_cast<std::size_t>(r)] = res.value;
        conv[static_cast<std::size_t>(r)] = res.converged ? 1 : 0;
    });
    out.nonconverged = static_cast<int>(std::count(conv.begin(), conv.end(), 0));
    return out;
}

/// n x q iid standard normal data.
template <class URBG>
DataMatrix standard_normal_data(std::size_t n, std::size_t q, URBG& rng)
{
    std::normal_distribution<double> normal;
    std::vector<double> v(n * q);
    for (auto& x : v)
        x = normal(rng);
    return DataMatrix(n, q, std::move(v));
}

/// Samples of max_h I_n(h) for n iid N_q(0, I) observations.
inline McSamples simulate_finite_max(int q, int n, McConfig const& cfg)
{
    if (q < 2)
        throw std::invalid_argument("simulate_finite_max: q must be >= 2");
    if (n < 5)
        throw std::invalid_argument("simulate_finite_max: n must be >= 5");
    McSamples out;
    out.values.assign(static_cast<std::size_t>(cfg.reps), 0.0);
    std::vector<char> conv(static_cast<std::size_t>(cfg.reps), 1);
    std::vector<int> redraws(static_cast<std::size_t>(cfg.reps), 0);
    for_each_rep(cfg.reps, cfg.workers, [&](int r) {
        std::uint64_t const s = stream_seed(cfg.seed, static_cast<std::uint64_t>(r));
        std::mt19937_64 rng(s);
        for (;;) {
            try {
                auto const data = standard_normal_data(static_cast<std::size_t>(n), static_cast<std::size_t>(q), rng);
                PursuitConfig opt = cfg.opt;
                opt.seed = mix64(s);
                auto const res = max_index_value(data, opt);
                out.values[static_cast<std::size_t>(r)] = res.value;
                conv[static_cast<std::size_t>(r)] = res.converged ? 1 : 0;
                return;
            } catch (DegenerateSampleError const&) {
                ++redraws[static_cast<std::size_t>(r)];
            }
        }
    });
    out.nonconverged = static_cast<int>(std::count(conv.begin(), conv.end(), 0));
    for (int k : redraws)
        out.resampled += k;
    return out;
}

struct TailCurve {
    std::vector<double> thresholds;
    std::vector<double> probabilities;
    std::vector<double> se;
    int reps = 0;
};

/// p(c) = #{samples >= c} / reps, with binomial standard errors.
inline TailCurve empirical_tail(std::vector<double> samples, std::vector<double> thresholds)
{
    if (samples.empty())
        throw std::invalid_argument("empirical_tail: no samples");
    std::sort(samples.begin(), samples.end());
    std::sort(thresholds.begin(), thresholds.end());
    TailCurve tc;
    tc.reps = static_cast<int>(samples.size());
    double const n = static_cast<double>(samples.size());
    for (double c : thresholds) {
        auto const first = std::lower_bound(samples.begin(), samples.end(), c);
        double const p = static_cast<double>(samples.end() - first) / n;
        tc.thresholds.push_back(c);
        tc.probabilities.push_back(p);
        tc.se.push_back(std::sqrt(p * (1.0 - p) / n));
    }
    return tc;
}

struct TubeVolumeEstimate {
    double fraction;
    double se;       // binomial, from the estimate itself
    long hits;
    long points;
    long candidates;  // points that needed the inner maximization
    int nonconverged;
};

/// Fraction of uniform points y on S^{p-1} with dist(y, M) <= theta.
///
/// max over (h, t) of <y, x(h, t)> equals sqrt(max_h I_y(h)) with y read as
/// field coefficients, and is bounded by the norm of y's symmetric part, so
/// only points with that norm >= cos(theta) are maximized.
inline TubeVolumeEstimate tube_volume_mc(int q, double theta, McConfig const& cfg)
{
    double const theta_c = critical_radius_constants().theta_c;
    if (!(theta > 0.0 && theta <= theta_c))
        throw std::domain_error("tube_volume_mc: radius must lie in (0, atan(3/4)]");
    double const cos_t = std::cos(theta);
    std::size_t const qq = static_cast<std::size_t>(q);

    std::vector<char> hit(static_cast<std::size_t>(cfg.reps), 0);
    std::vector<char> cand(static_cast<std::size_t>(cfg.reps), 0);
    std::vector<char> conv(static_cast<std::size_t>(cfg.reps), 1);
    for_each_rep(cfg.reps, cfg.workers, [&](int r) {
        std::uint64_t const s = stream_seed(cfg.seed, static_cast<std::uint64_t>(r));
        std::mt19937_64 rng(s);
        auto c = sample_coefficients(qq, rng);
        double const len = std::sqrt(dot(c.xi1, c.xi1) + dot(c.xi2, c.xi2));
        for (auto& x : c.xi1)
            x /= len;
        for (auto& x : c.xi2)
            x /= len;
        if (symmetric_norm2(c) < cos_t * cos_t)
            return;
        cand[static_cast<std::size_t>(r)] = 1;
        auto const res = max_field_index(c, cfg.opt, mix64(s));
        conv[static_cast<std::size_t>(r)] = res.converged ? 1 : 0;
        if (std::sqrt(res.value) >= cos_t)
            hit[static_cast<std::size_t>(r)] = 1;
    });
    long const hits = std::count(hit.begin(), hit.end(), 1);
    double const n = static_cast<double>(cfg.reps);
    double const p = static_cast<double>(hits) / n;
    return {p,
            std::sqrt(p * (1.0 - p) / n),
            hits,
            static_cast<long>(cfg.reps),
            static_cast<long>(std::count(cand.begin(), cand.end(), 1)),
            static_cast<int>(std::count(conv.begin(), conv.end(), 0))};
}

struct MarginalCheck {
    double var_b1_scaled;   // Var(sqrt(n) B1), target 3! = 6
    double var_b2_scaled;   // Var(sqrt(n) B2), target 4! = 24
    double mean_b1_scaled;
    double mean_b2_scaled;
    int reps;
};

/// Sample moments of sqrt(n) B1(h) and sqrt(n) B2(h) over replications of N_q(0, I) data.
inline MarginalCheck clt_marginal_check(UnitDirection const& h, int n, McConfig const& cfg)
{
    if (n < 5)
        throw std::invalid_argument("clt_marginal_check: n must be >= 5");
    std::vector<double> b1(static_cast<std::size_t>(cfg.reps)), b2(static_cast<std::size_t>(cfg.reps));
    double const root_n = std::sqrt(static_cast<double>(n));
    for_each_rep(cfg.reps, cfg.workers, [&](int r) {
        std::mt19937_64 rng(stream_seed(cfg.seed, static_cast<std::uint64_t>(r)));
        auto const data = standard_normal_data(static_cast<std::size_t>(n), h.q(), rng);
        auto const c = sample_cumulants(project(data, h), cfg.opt.convention);
        b1[static_cast<std::size_t>(r)] = root_n * c.b1;
        b2[static_cast<std::size_t>(r)] = root_n * c.b2;
    });
    auto mean_var = [](std::vector<double> const& v) {
        double m = 0.0;
        for (double x : v)
            m += x;
        m /= static_cast<double>(v.size());
        double s = 0.0;
        for (double x : v)
            s += (x - m) * (x - m);
        return std::pair<double, double>{m, s / static_cast<double>(v.size() - 1)};
    };
    auto const [m1, v1] = mean_var(b1);
    auto const [m2, v2] = mean_var(b2);
    return {v1, v2, m1, m2, cfg.reps};
}

}  // namespace pursuit

#endif  // PURSUIT_MC_HPP_INCLUDED
