#ifndef PURSUIT_VERIFY_HPP_INCLUDED
#define PURSUIT_VERIFY_HPP_INCLUDED

// Invariant batteries behind `pursuit verify`. Each check records what was
// expected, what was computed, and the tolerance it was held to.

#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pursuit/geometry_verify.hpp"
#include "pursuit/mc.hpp"
#include "pursuit/specfun.hpp"
#include "pursuit/tube.hpp"

namespace pursuit {

namespace detail {

inline std::string format_angle(double x)
{
    char buf[32];
    auto const r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

}  // namespace detail

enum class CheckMode { absolute, relative, at_most, at_least };

struct CheckRecord {
    std::string name;
    double expected;
    double got;
    double tolerance;
    CheckMode mode;
    bool pass;
};

class VerifyReport {
public:
    void add(std::string name, double expected, double got, double tolerance, CheckMode mode)
    {
        bool pass = false;
        switch (mode) {
        case CheckMode::absolute:
            pass = std::abs(got - expected) <= tolerance;
            break;
        case CheckMode::relative:
            pass = std::abs(got - expected) <= tolerance * std::abs(expected);
            break;
        case CheckMode::at_most:
            pass = got <= expected + tolerance;
            break;
        case CheckMode::at_least:
            pass = got >= expected - tolerance;
            break;
        }
        records_.push_back({std::move(name), expected, got, tolerance, mode, pass});
    }

    void flag(std::string name, bool ok) { add(std::move(name), 1.0, ok ? 1.0 : 0.0, 0.0, CheckMode::absolute); }

    std::vector<CheckRecord> const& records() const { return records_; }

    bool pass() const
    {
        for (auto const& r : records_)
            if (!r.pass)
                return false;
        return true;
    }

    nlohmann::ordered_json to_json(std::string_view suite) const
    {
        auto mode_name = [](CheckMode m) {
            switch (m) {
            case CheckMode::absolute: return "abs";
            case CheckMode::relative: return "rel";
            case CheckMode::at_most: return "le";
            case CheckMode::at_least: return "ge";
            }
            return "abs";
        };
        nlohmann::ordered_json checks = nlohmann::ordered_json::array();
        for (auto const& r : records_)
            checks.push_back({{"name", r.name},
                              {"expected", r.expected},
                              {"got", r.got},
                              {"tolerance", r.tolerance},
                              {"mode", mode_name(r.mode)},
                              {"pass", r.pass}});
        return {{"schema_version", 1}, {"suite", suite}, {"pass", pass()}, {"checks", checks}};
    }

private:
    std::vector<CheckRecord> records_;
};

inline void verify_specfun(VerifyReport& rep)
{
    auto const ke = elliptic_KE(0.25);
    rep.add("E_{1/2}/4 = E(1/4) to 5 decimals", 1.46746, elliptic_moment(HalfInt(1)) / 4.0, 5e-6, CheckMode::absolute);
    rep.add("E_{-1/2} = K(1/4) to 5 decimals", 1.68575, elliptic_moment(HalfInt(-1)), 5e-6, CheckMode::absolute);
    rep.add("E_{1/2} = 4 E(1/4)", 4.0 * ke.E, elliptic_moment(HalfInt(1)), 1e-14, CheckMode::relative);
    rep.add("E_0 = pi", std::numbers::pi, elliptic_moment(HalfInt(0)), 1e-15, CheckMode::relative);
    rep.add("E_{-1} = pi/(2 sqrt 3)", std::numbers::pi / (2.0 * std::sqrt(3.0)), elliptic_moment(HalfInt(-2)), 1e-14,
            CheckMode::relative);
    for (int twice = -8; twice <= 16; ++twice)
        rep.add("recurrence E_{" + std::to_string(twice) + "/2} vs quadrature", elliptic_moment_quad(0.5 * twice),
                elliptic_moment(HalfInt(twice)), 1e-9, CheckMode::relative);
    rep.add("Omega_2 = 2 pi", 2.0 * std::numbers::pi, sphere_surface(2), 1e-15, CheckMode::relative);
    rep.add("Omega_3 = 4 pi", 4.0 * std::numbers::pi, sphere_surface(3), 1e-15, CheckMode::relative);
    rep.add("chi2_2 upper tail at 3 = exp(-3/2)", std::exp(-1.5), chisq_upper(2, 3.0).value(), 1e-14, CheckMode::relative);
    rep.add("chi2_1 upper tail at 1.96^2", 0.04999579029644087, chisq_upper(1, 1.96 * 1.96).value(), 1e-12,
            CheckMode::relative);
    rep.add("beta(1,1) upper tail at 0.3", 0.7, beta_upper(1.0, 1.0, 0.3).value(), 1e-14, CheckMode::relative);
    rep.add("beta(2,3) upper tail at 0.4", 0.4752, beta_upper(2.0, 3.0, 0.4).value(), 1e-13, CheckMode::relative);
}

inline void verify_tube(VerifyReport& rep)
{
    double const e14 = elliptic_KE(0.25).E;
    for (int q = 2; q <= 5; ++q)
        rep.add("kappa_0(q=" + std::to_string(q) + ") = Omega_q E_{(q-1)/2}",
                sphere_surface(q) * elliptic_moment(HalfInt(q - 1)), weyl_coefficients(q).kappa(0), 1e-13,
                CheckMode::relative);
    rep.add("kappa_0(q=2) = 8 pi E(1/4)", 8.0 * std::numbers::pi * e14, weyl_coefficients(2).kappa(0), 1e-13,
            CheckMode::relative);
    rep.add("kappa_2(q=2) = -kappa_0(q=2)", -weyl_coefficients(2).kappa(0), weyl_coefficients(2).kappa(2), 1e-13,
            CheckMode::relative);
    for (int c = 1; c <= 6; ++c)
        rep.add("tail_approx(2, " + std::to_string(c * c) + ") closed form", tail_approx_q2(c * c),
                tail_approx(2, c * c).value, 1e-12, CheckMode::relative);
    rep.add("tail_approx(2, 9)", 0.078043, tail_approx(2, 9.0).value, 1e-6, CheckMode::absolute);
    auto const crc = critical_radius_constants();
    rep.add("theta_c = atan(3/4)", std::atan(0.75), crc.theta_c, 1e-15, CheckMode::relative);
    rep.add("rho_c = 25/16", 25.0 / 16.0, crc.rho_c, 1e-15, CheckMode::relative);
    rep.add("rho_c = 1 + tan^2 theta_c", 1.0 + std::pow(std::tan(crc.theta_c), 2), crc.rho_c, 1e-14, CheckMode::relative);
    for (int q = 2; q <= 4; ++q) {
        double prev = 0.0;
        bool monotone = true;
        for (double t : {0.2, 0.3, 0.4, 0.5, 0.6, crc.theta_c}) {
            double const f = tube_volume_fraction(q, t);
            monotone = monotone && f > prev && f < 1.0;
            prev = f;
        }
        rep.flag("tube volume fraction increasing in (0, theta_c], q=" + std::to_string(q), monotone);
    }
    bool rejected = false;
    try {
        (void)tube_volume_fraction(2, 0.7);
    } catch (std::domain_error const&) {
        rejected = true;
    }
    rep.flag("tube volume rejects radius 0.7 > theta_c", rejected);
}

inline void verify_geometry(VerifyReport& rep)
{
    using namespace geometry;
    for (int q = 2; q <= 4; ++q)
        rep.add("numeric volume = kappa_0, q=" + std::to_string(q), weyl_coefficients(q).kappa(0),
                manifold_volume_numeric(q), 1e-6, CheckMode::relative);
    for (int q = 2; q <= 3; ++q)
        rep.add("numeric kappa_2 = formula, q=" + std::to_string(q), weyl_coefficients(q).kappa(2),
                weyl_invariant_numeric(q, 2), 1e-6, CheckMode::relative);
    for (double th : {-1.0, -0.3, 0.2, 0.9}) {
        auto const cd = curvature_check_q2(th);
        rep.add("Gauss curvature (Brioschi) = 1 + beta at theta=" + pursuit::detail::format_angle(th), 1.0 + cd.beta, cd.gauss_curv_fd, 1e-4,
                CheckMode::absolute);
        rep.add("Gauss curvature (embedded) = 1 + beta at theta=" + pursuit::detail::format_angle(th), 1.0 + cd.beta, cd.gauss_curv_embedded, 1e-6,
                CheckMode::absolute);
    }
    for (double th : {-0.8, 0.1, 0.7}) {
        ChartPoint const cp{{0.9, 0.4}, th};
        rep.add("H_2 numeric = closed form, q=3, theta=" + pursuit::detail::format_angle(th), h2_closed(3, th), h2_numeric(cp), 1e-5,
                CheckMode::absolute);
        rep.add("metric block structure, q=3, theta=" + pursuit::detail::format_angle(th), 0.0, metric_numeric(3, cp).block_error, 1e-7,
                CheckMode::absolute);
    }
    auto const scan = sup_fg_scan();
    rep.add("local sup f/g = 16/9", 16.0 / 9.0, scan.local_sup, 1e-9, CheckMode::absolute);
    rep.add("local sup attained at u = 0", 0.0, scan.attained_at.u, 1e-6, CheckMode::absolute);
    rep.add("local sup attained at k = 3/2", 1.5, scan.attained_at.k, 1e-6, CheckMode::absolute);
    rep.add("global scan f/g <= 16/9 + 1e-3", 16.0 / 9.0, scan.global_sup, 1e-3, CheckMode::at_most);
    rep.add("theta_c = atan(3/4)", std::atan(0.75), scan.theta_c, 1e-9, CheckMode::absolute);
    rep.add("rho_c = 1 + tan^2 theta_c = 25/16", 25.0 / 16.0, 1.0 + std::pow(std::tan(scan.theta_c), 2), 1e-9,
            CheckMode::absolute);
    bool has_r0 = false, has_rm1 = false;
    for (auto const& cv : scan.critical_values) {
        if (std::abs(cv.r) < 1e-9 && std::abs(cv.half_angle - std::numbers::pi / 4) < 1e-9)
            has_r0 = true;
        if (std::abs(cv.r + 1.0) < 1e-9 && std::abs(cv.half_angle - std::numbers::pi / 2) < 1e-9)
            has_rm1 = true;
    }
    rep.flag("critical family r = 0, half-angle pi/4", has_r0);
    rep.flag("critical family r = -1, half-angle pi/2", has_rm1);
    rep.add("no other critical families", 0.0, static_cast<double>(scan.spurious.size()), 0.0, CheckMode::absolute);
}

/// Reduced-scale Monte Carlo checks (a few seconds).
inline void verify_mc(VerifyReport& rep, std::uint64_t seed = 20240601)
{
    McConfig cfg;
    cfg.seed = seed;
    cfg.reps = 3000;
    auto const a = simulate_limit_max(2, cfg);
    auto const tc = empirical_tail(a.values, {9.0});
    double const approx = tail_approx(2, 9.0).value;
    rep.add("limit max, q=2: P(max >= 9) within 3 SE of tube approximation", approx, tc.probabilities[0], 3.0 * tc.se[0],
            CheckMode::absolute);
    rep.add("limit max, q=2: optimizer non-convergence", 0.0, a.nonconverged, 0.0, CheckMode::absolute);

    McConfig par = cfg;
    par.reps = 500;
    par.workers = 1;
    auto const s1 = simulate_limit_max(2, par);
    par.workers = 3;
    auto const s3 = simulate_limit_max(2, par);
    rep.flag("limit max identical for 1 and 3 workers", s1.values == s3.values);

    McConfig clt = cfg;
    clt.reps = 5000;
    auto const m = clt_marginal_check(UnitDirection::axis(2, 0), 2000, clt);
    rep.add("Var(sqrt(n) B1) near 6", 6.0, m.var_b1_scaled, 0.5, CheckMode::absolute);
    rep.add("Var(sqrt(n) B2) near 24", 24.0, m.var_b2_scaled, 2.5, CheckMode::absolute);

    double const theta_c = critical_radius_constants().theta_c;
    McConfig tube = cfg;
    tube.reps = 100000;
    auto const v = tube_volume_mc(2, theta_c, tube);
    double const f = tube_volume_fraction(2, theta_c);
    double const se = std::sqrt(f * (1.0 - f) / tube.reps);
    rep.add("tube volume MC at theta_c within 3 SE, q=2", f, v.fraction, 3.0 * se, CheckMode::absolute);
}

inline std::vector<std::string> const& verify_suites()
{
    static std::vector<std::string> const names{"specfun", "geometry", "tube", "mc", "all"};
    return names;
}

inline VerifyReport run_verify(std::string_view suite)
{
    VerifyReport rep;
    bool const all = suite == "all";
    bool known = all;
    if (all || suite == "specfun") {
        verify_specfun(rep);
        known = true;
    }
    if (all || suite == "geometry") {
        verify_geometry(rep);
        known = true;
    }
    if (all || suite == "tube") {
        verify_tube(rep);
        known = true;
    }
    if (all || suite == "mc") {
        verify_mc(rep);
        known = true;
    }
    if (!known)
        throw std::invalid_argument("unknown verification suite '" + std::string(suite) + "'");
    return rep;
}

}  // namespace pursuit

#endif  // PURSUIT_VERIFY_HPP_INCLUDED
