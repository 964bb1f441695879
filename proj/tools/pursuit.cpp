#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pursuit/io.hpp"
#include "pursuit/mc.hpp"
#include "pursuit/tube.hpp"
#include "pursuit/verify.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_verify_failed = 1;
constexpr int exit_usage = 2;
constexpr int exit_degenerate = 3;

std::uint64_t default_seed()
{
    if (char const* env = std::getenv("PURSUIT_SEED")) {
        try {
            std::size_t used = 0;
            auto const v = std::stoull(env, &used);
            if (used == std::string(env).size())
                return v;
        } catch (std::exception const&) {
        }
        throw pursuit::InputError("PURSUIT_SEED is not an unsigned integer: '" + std::string(env) + "'");
    }
    return 0;
}

// "a,b,c" or "a:b:step" (inclusive, step > 0)
std::vector<double> parse_values(std::string const& text, std::string const& flag)
{
    std::vector<double> out;
    auto bad = [&] { return pursuit::InputError(flag + ": cannot parse '" + text + "'"); };
    if (text.find(':') != std::string::npos) {
        auto parts = pursuit::detail::split_commas(std::string_view(text));
        if (parts.size() != 1)
            throw bad();
        std::vector<double> abc;
        std::string_view rest = text;
        for (;;) {
            auto const pos = rest.find(':');
            double v = 0.0;
            if (!pursuit::detail::parse_number(rest.substr(0, pos), v))
                throw bad();
            abc.push_back(v);
            if (pos == std::string_view::npos)
                break;
            rest.remove_prefix(pos + 1);
        }
        if (abc.size() != 3 || !(abc[2] > 0.0) || abc[1] < abc[0])
            throw bad();
        auto const count = static_cast<long>(std::floor((abc[1] - abc[0]) / abc[2] + 1e-9));
        for (long i = 0; i <= count; ++i)
            out.push_back(abc[0] + static_cast<double>(i) * abc[2]);
        return out;
    }
    for (auto f : pursuit::detail::split_commas(std::string_view(text))) {
        double v = 0.0;
        if (!pursuit::detail::parse_number(f, v))
            throw bad();
        out.push_back(v);
    }
    return out;
}

void print_json(nlohmann::ordered_json const& j) { std::cout << j.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Projection pursuit with tube-method p-values for the moment index"};
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    int workers = 1;

    // pursue
    auto* pursue = app.add_subcommand("pursue", "maximize the moment index over directions and report its p-value");
    std::string data_path;
    bool header = false, as_json = false, as_csv = false, kstat = false;
    int starts = 32;
    pursue->add_option("--data", data_path, "CSV file, one observation per row")->required();
    pursue->add_flag("--header", header, "first row is a header");
    pursue->add_option("--starts", starts, "random starts for q >= 3")->check(CLI::PositiveNumber);
    pursue->add_option("--seed", seed, "seed for random starts (default $PURSUIT_SEED or 0)");
    pursue->add_flag("--kstat", kstat, "use k-statistics instead of moment cumulants");
    auto* pj = pursue->add_flag("--json", as_json, "JSON output (default)");
    auto* pc = pursue->add_flag("--csv", as_csv, "CSV output");
    pj->excludes(pc);

    // tail-table
    auto* tail = app.add_subcommand("tail-table", "tube approximation of P(max I >= c^2)");
    int q = 2;
    std::string c2_list, c2_range;
    bool tail_json = false;
    tail->add_option("--q", q, "dimension")->required()->check(CLI::Range(2, 64));
    auto* c2o = tail->add_option("--c2", c2_list, "comma-separated thresholds c^2");
    auto* rgo = tail->add_option("--range", c2_range, "A:B:STEP thresholds c^2");
    c2o->excludes(rgo);
    tail->add_flag("--json", tail_json, "JSON output instead of CSV");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Monte Carlo tail curve of max I (limit field or finite samples)");
    std::string mode = "limit", thresholds = "4:20:1";
    int n_obs = 300, reps = 10000;
    bool approx = false, sim_json = false;
    sim->add_option("--mode", mode, "limit or finite")->check(CLI::IsMember({"limit", "finite"}));
    sim->add_option("--q", q, "dimension")->check(CLI::Range(2, 5));
    sim->add_option("--n", n_obs, "observations per replication (finite mode)")->check(CLI::Range(5, 10000000));
    sim->add_option("--reps", reps, "replications")->check(CLI::Range(1, 100000000));
    sim->add_option("--seed", seed, "master seed (default $PURSUIT_SEED or 0)");
    sim->add_option("--thresholds", thresholds, "comma list or A:B:STEP of thresholds c^2");
    sim->add_option("--starts", starts, "random starts per replication for q >= 3")->check(CLI::PositiveNumber);
    sim->add_option("--workers", workers, "worker threads")->check(CLI::Range(1, 1024));
    sim->add_flag("--approx", approx, "append the tube approximation column");
    sim->add_flag("--json", sim_json, "JSON output instead of CSV");

    // verify
    auto* ver = app.add_subcommand("verify", "run invariant batteries; exit 1 on any failure");
    std::string suite = "all";
    ver->add_option("--suite", suite, "specfun, geometry, tube, mc or all")
        ->check(CLI::IsMember(pursuit::verify_suites()));

    // tube-volume
    auto* tv = app.add_subcommand("tube-volume", "tube volume fraction: formula and optional Monte Carlo");
    double theta = 0.2;
    int mc_reps = 0;
    bool tv_csv = false;
    tv->add_option("--q", q, "dimension")->check(CLI::Range(2, 5));
    tv->add_option("--theta", theta, "tube radius (angle), 0 < theta <= atan(3/4)")->required();
    tv->add_option("--mc-reps", mc_reps, "uniform points for the Monte Carlo estimate (0 = formula only)")
        ->check(CLI::NonNegativeNumber);
    tv->add_option("--seed", seed, "master seed (default $PURSUIT_SEED or 0)");
    tv->add_option("--workers", workers, "worker threads")->check(CLI::Range(1, 1024));
    tv->add_flag("--csv", tv_csv, "CSV output instead of JSON");

    // fixtures
    auto* fx = app.add_subcommand("fixtures", "regenerate the fixture CSVs and manifest");
    std::string out_dir = "fixtures";
    std::uint64_t fixture_seed = 20240611;
    fx->add_option("--seed", fixture_seed, "generation seed");
    fx->add_option("--out", out_dir, "output directory");

    try {
        seed = default_seed();
    } catch (pursuit::InputError const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    }

    try {
        app.parse(argc, argv);
    } catch (CLI::ParseError const& e) {
        int const rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*pursue) {
            pursuit::PursuitConfig cfg;
            cfg.starts = starts;
            cfg.seed = seed;
            cfg.convention = kstat ? pursuit::CumulantConvention::k_statistics : pursuit::CumulantConvention::moments;
            auto const data = pursuit::read_csv(data_path, {header});
            auto const rep = pursuit::pursue(data, cfg);
            if (as_csv)
                std::cout << pursuit::to_csv(rep);
            else
                print_json(pursuit::to_json(rep));
            return exit_ok;
        }

        if (*tail) {
            if (c2_list.empty() && c2_range.empty())
                throw pursuit::InputError("tail-table: give --c2 or --range");
            auto const cs = c2_list.empty() ? parse_values(c2_range, "--range") : parse_values(c2_list, "--c2");
            auto const& kappas = pursuit::weyl_coefficients(q).kappas;
            if (tail_json) {
                nlohmann::ordered_json rows = nlohmann::ordered_json::array();
                for (double c2 : cs) {
                    auto const t = pursuit::tail_approx(q, c2);
                    nlohmann::ordered_json terms = nlohmann::ordered_json::object();
                    for (auto const& [e, v] : t.terms)
                        terms["e" + std::to_string(e)] = v;
                    rows.push_back({{"c2", c2}, {"tail", t.value}, {"clamped", t.value < 0.0 || t.value > 1.0},
                                    {"terms", terms}});
                }
                print_json({{"schema_version", 1}, {"q", q}, {"rows", rows}});
                return exit_ok;
            }
            std::string head = "c2,tail,clamped";
            for (auto const& kv : kappas)
                head += ",term_e" + std::to_string(kv.first);
            std::cout << head << '\n';
            for (double c2 : cs) {
                auto const t = pursuit::tail_approx(q, c2);
                std::string row = pursuit::format_double(c2) + ',' + pursuit::format_double(t.value) + ','
                                  + ((t.value < 0.0 || t.value > 1.0) ? "1" : "0");
                for (auto const& term : t.terms)
                    row += ',' + pursuit::format_double(term.second);
                std::cout << row << '\n';
            }
            return exit_ok;
        }

        if (*sim) {
            auto const ths = parse_values(thresholds, "--thresholds");
            pursuit::McConfig cfg;
            cfg.reps = reps;
            cfg.seed = seed;
            cfg.workers = workers;
            cfg.opt.starts = starts;
            auto const samples = mode == "limit" ? pursuit::simulate_limit_max(q, cfg)
                                                 : pursuit::simulate_finite_max(q, n_obs, cfg);
            auto const tc = pursuit::empirical_tail(samples.values, ths);
            if (samples.nonconverged > 0)
                std::cerr << "note: optimizer did not reach tolerance in " << samples.nonconverged << " of " << reps
                          << " replications\n";
            if (sim_json) {
                nlohmann::ordered_json rows = nlohmann::ordered_json::array();
                for (std::size_t i = 0; i < tc.thresholds.size(); ++i) {
                    nlohmann::ordered_json r = {{"threshold", tc.thresholds[i]}, {"p_hat", tc.probabilities[i]}, {"se", tc.se[i]}};
                    if (approx)
                        r["tail_approx"] = pursuit::tail_approx(q, tc.thresholds[i]).value;
                    rows.push_back(r);
                }
                print_json({{"schema_version", 1},
                            {"mode", mode},
                            {"q", q},
                            {"n", mode == "finite" ? nlohmann::ordered_json(n_obs) : nlohmann::ordered_json(nullptr)},
                            {"reps", reps},
                            {"seed", seed},
                            {"nonconverged", samples.nonconverged},
                            {"resampled", samples.resampled},
                            {"rows", rows}});
            } else {
                std::cout << pursuit::to_csv(tc, approx ? q : 0);
            }
            return exit_ok;
        }

        if (*ver) {
            auto const rep = pursuit::run_verify(suite);
            print_json(rep.to_json(suite));
            return rep.pass() ? exit_ok : exit_verify_failed;
        }

        if (*tv) {
            double const theta_c = pursuit::critical_radius_constants().theta_c;
            if (!(theta > 0.0 && theta <= theta_c))
                throw pursuit::InputError("--theta must lie in (0, atan(3/4) = " + pursuit::format_double(theta_c)
                                          + "]; the volume formula does not hold beyond the critical radius");
            double const formula = pursuit::tube_volume_fraction(q, theta);
            std::optional<pursuit::TubeVolumeEstimate> est;
            double z = 0.0, se_formula = 0.0;
            if (mc_reps > 0) {
                pursuit::McConfig cfg;
                cfg.reps = mc_reps;
                cfg.seed = seed;
                cfg.workers = workers;
                est = pursuit::tube_volume_mc(q, theta, cfg);
                se_formula = std::sqrt(formula * (1.0 - formula) / mc_reps);
                z = se_formula > 0.0 ? (est->fraction - formula) / se_formula : 0.0;
            }
            if (tv_csv) {
                std::cout << "q,theta,formula,mc_estimate,se,z,reps,seed\n"
                          << q << ',' << pursuit::format_double(theta) << ',' << pursuit::format_double(formula) << ','
                          << (est ? pursuit::format_double(est->fraction) : "") << ','
                          << (est ? pursuit::format_double(se_formula) : "") << ','
                          << (est ? pursuit::format_double(z) : "") << ',' << mc_reps << ',' << seed << '\n';
            } else {
                nlohmann::ordered_json j = {{"schema_version", 1}, {"q", q}, {"theta", theta}, {"formula", formula}};
                if (est) {
                    j["mc_estimate"] = est->fraction;
                    j["se"] = se_formula;
                    j["se_empirical"] = est->se;
                    j["z"] = z;
                    j["hits"] = est->hits;
                    j["candidates"] = est->candidates;
                    j["nonconverged"] = est->nonconverged;
                    j["reps"] = mc_reps;
                    j["seed"] = seed;
                }
                print_json(j);
            }
            return exit_ok;
        }

        if (*fx) {
            for (auto const& p : pursuit::regenerate_fixtures(fixture_seed, out_dir))
                std::cerr << "wrote " << p.string() << '\n';
            return exit_ok;
        }
    } catch (pursuit::DegenerateSampleError const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_degenerate;
    } catch (pursuit::InputError const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (std::invalid_argument const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (std::domain_error const& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    }
    return exit_ok;
}
