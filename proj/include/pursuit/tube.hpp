#ifndef PURSUIT_TUBE_HPP_INCLUDED
#define PURSUIT_TUBE_HPP_INCLUDED

// Tube-method quantities for the index manifold M of dimension d = q in
// S^{p-1}, p = q^3 + q^4:
//
//   kappa_e = Omega_q (-3)^{e/2} (q-1)!/(q-e)!
//             * sum_{j=0}^{e/2} (q-e-2j)/((e/2-j)! j!) (-2)^j E_{(q-1-e)/2-j}
//
//   P(max I >= c^2) ~ sum_{e even} kappa_e psi_e(c),
//   psi_e(c) = Gamma((d+1-e)/2) / (2^{1+e/2} pi^{(d+1)/2}) * Gbar_{d+1-e}(c^2)
//
//   Vol(Tube(M, t)) / Omega_p = sum_e kappa_e J_e(t), valid for t <= theta_c,
//   J_e(t) = Gamma((d+1-e)/2) / (2^{1+e/2} pi^{(d+1)/2})
//            * Bbar_{(d+1-e)/2, (p-d-1+e)/2}(cos^2 t)

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pursuit/field.hpp"
#include "pursuit/specfun.hpp"

namespace pursuit {

struct WeylCoefficients {
    int q = 0;
    int d = 0;
    std::map<int, double> kappas;  // even e in [0, q]

    double kappa(int e) const
    {
        auto it = kappas.find(e);
        if (it == kappas.end())
            throw std::out_of_range("WeylCoefficients: no kappa_" + std::to_string(e) + " for q = " + std::to_string(q));
        return it->second;
    }
};

namespace detail {

inline double factorial(int k) { return std::exp(std::lgamma(k + 1.0)); }

inline WeylCoefficients compute_weyl(int q)
{
    WeylCoefficients w{q, q, {}};
    double const omega = sphere_surface(q);
    for (int e = 0; e <= q; e += 2) {
        int const half = e / 2;
        double sum = 0.0;
        for (int j = 0; j <= half; ++j) {
            double const coef = (q - e - 2 * j) / (factorial(half - j) * factorial(j)) * std::pow(-2.0, j);
            if (coef == 0.0)
                continue;
            // index (q-1-e)/2 - j, stored as twice its value
            sum += coef * elliptic_moment(HalfInt(q - 1 - e - 2 * j));
        }
        w.kappas[e] = omega * std::pow(-3.0, half) * factorial(q - 1) / factorial(q - e) * sum;
    }
    return w;
}

}  // namespace detail

/// Weyl curvature invariants of M, computed once per q and cached.
inline WeylCoefficients const& weyl_coefficients(int q)
{
    if (q < 2)
        throw std::domain_error("weyl_coefficients: q must be >= 2");
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<WeylCoefficients const>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[q];
    if (!slot)
        slot = std::make_unique<WeylCoefficients const>(detail::compute_weyl(q));
    return *slot;
}

namespace detail {

// Gamma((d+1-e)/2) / (2^{1+e/2} pi^{(d+1)/2}) via log-gamma
inline double tube_weight(int d, int e)
{
    double const a = 0.5 * (d + 1 - e);
    return std::exp(std::lgamma(a) - (1.0 + 0.5 * e) * std::numbers::ln2 - 0.5 * (d + 1) * std::log(std::numbers::pi));
}

inline void check_term_index(int d, int e)
{
    if (e < 0 || e % 2 != 0)
        throw std::domain_error("tube term index e must be even and nonnegative");
    if (d + 1 - e <= 0)
        throw std::domain_error("tube term index e = " + std::to_string(e) + " exceeds dimension d = " + std::to_string(d));
}

}  // namespace detail

/// psi_e(c) with c^2 given.
inline double psi_term(int d, int e, double c_squared)
{
    detail::check_term_index(d, e);
    return detail::tube_weight(d, e) * chisq_upper(d + 1 - e, c_squared);
}

struct TailApprox {
    double c_squared;
    double value;                          // raw asymptotic value; may leave [0,1]
    std::vector<std::pair<int, double>> terms;  // (e, kappa_e psi_e(c))
};

/// Tube approximation to P(max_h I(h) >= c^2).
inline TailApprox tail_approx(int q, double c_squared)
{
    if (q < 2)
        throw std::domain_error("tail_approx: q must be >= 2");
    if (!(c_squared >= 0.0))
        throw std::domain_error("tail_approx: threshold must be nonnegative");
    auto const& w = weyl_coefficients(q);
    TailApprox out{c_squared, 0.0, {}};
    for (auto const& [e, kappa] : w.kappas) {
        double const term = kappa * psi_term(q, e, c_squared);
        out.terms.emplace_back(e, term);
        out.value += term;
    }
    return out;
}

/// 2 E(1/4) sqrt(2/pi) c exp(-c^2/2): the q = 2 case in closed form.
inline double tail_approx_q2(double c_squared)
{
    if (!(c_squared >= 0.0))
        throw std::domain_error("tail_approx_q2: threshold must be nonnegative");
    double const w = 2.0 * elliptic_KE(0.25).E;
    double const c = std::sqrt(c_squared);
    return w * std::sqrt(2.0 / std::numbers::pi) * c * std::exp(-0.5 * c_squared);
}

struct CriticalRadiusInfo {
    double theta_c;
    double rho_c;
};

/// theta_c = atan(3/4) and rho_c = 1 + tan^2 theta_c = 25/16, for every q.
inline CriticalRadiusInfo critical_radius_constants() { return {std::atan(0.75), 25.0 / 16.0}; }

/// Vol(Tube(M, theta)) / Omega_p for 0 <= theta <= theta_c.
inline double tube_volume_fraction(int q, double theta)
{
    if (q < 2)
        throw std::domain_error("tube_volume_fraction: q must be >= 2");
    double const theta_c = critical_radius_constants().theta_c;
    if (!(theta >= 0.0))
        throw std::domain_error("tube_volume_fraction: radius must be nonnegative");
    if (theta > theta_c)
        throw std::domain_error("tube_volume_fraction: radius exceeds the critical radius atan(3/4); formula invalid");
    if (theta == 0.0)
        return 0.0;
    int const d = q;
    double const p = static_cast<double>(ambient_dimension(static_cast<std::size_t>(q)));
    double const c2 = std::cos(theta) * std::cos(theta);
    double total = 0.0;
    for (auto const& [e, kappa] : weyl_coefficients(q).kappas) {
        double const a = 0.5 * (d + 1 - e);
        double const b = 0.5 * (p - d - 1 + e);
        total += kappa * detail::tube_weight(d, e) * beta_upper(a, b, c2);
    }
    return total;
}

struct PValue {
    Probability value;
    double raw;    // the unclamped tail approximation
    bool clamped;  // raw fell outside [0, 1]
};

/// p-value of an observed max_h I_n(h) under the limiting null distribution.
inline PValue pvalue(int q, double observed_max)
{
    if (!(observed_max >= 0.0))
        throw std::domain_error("pvalue: observed maximum must be nonnegative");
    double const raw = tail_approx(q, observed_max).value;
    double const clipped = std::clamp(raw, 0.0, 1.0);
    return {Probability(clipped), raw, clipped != raw};
}

}  // namespace pursuit

#endif  // PURSUIT_TUBE_HPP_INCLUDED
