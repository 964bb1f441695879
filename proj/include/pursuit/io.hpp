#ifndef PURSUIT_IO_HPP_INCLUDED
#define PURSUIT_IO_HPP_INCLUDED

// CSV ingestion, number formatting, report serialization and fixture files.
// Numbers are parsed with std::from_chars and printed with std::to_chars
// (shortest round-trip form), so neither depends on the C locale.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "pursuit/cumulant.hpp"
#include "pursuit/mc.hpp"
#include "pursuit/sphere_opt.hpp"
#include "pursuit/tube.hpp"

namespace pursuit {

inline constexpr int report_schema_version = 1;

/// Malformed or unreadable input; the CLI maps this to exit code 2.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string format_double(double x)
{
    char buf[64];
    auto const r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

namespace detail {

inline std::string_view trim(std::string_view s)
{
    auto const ws = " \t\r";
    auto const b = s.find_first_not_of(ws);
    if (b == std::string_view::npos)
        return {};
    auto const e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

inline bool parse_number(std::string_view field, double& out)
{
    field = trim(field);
    if (field.empty())
        return false;
    if (field.front() == '+')
        field.remove_prefix(1);
    auto const r = std::from_chars(field.data(), field.data() + field.size(), out);
    return r.ec == std::errc{} && r.ptr == field.data() + field.size();
}

inline std::vector<std::string_view> split_commas(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        auto const pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

}  // namespace detail

struct CsvOptions {
    bool header = false;  // skip the first non-empty line
};

/// Parses comma-separated numeric rows; q is the column count. Blank lines are ignored.
/// A non-numeric first row is accepted as a header even without `header`.
inline DataMatrix parse_csv(std::string_view text, CsvOptions const& opt = {})
{
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF")
        text.remove_prefix(3);
    std::vector<double> values;
    std::size_t cols = 0, rows = 0, line_no = 0;
    bool first = true;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto const nl = text.find('\n', pos);
        auto const line = detail::trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++line_no;
        if (line.empty())
            continue;
        auto const fields = detail::split_commas(line);
        if (first) {
            first = false;
            bool numeric = true;
            double tmp = 0.0;
            for (auto f : fields)
                numeric = numeric && detail::parse_number(f, tmp);
            if (opt.header || !numeric)
                continue;
        }
        if (cols == 0)
            cols = fields.size();
        if (fields.size() != cols)
            throw InputError("line " + std::to_string(line_no) + ": expected " + std::to_string(cols) + " fields, found "
                             + std::to_string(fields.size()));
        for (std::size_t j = 0; j < fields.size(); ++j) {
            double v = 0.0;
            if (!detail::parse_number(fields[j], v))
                throw InputError("line " + std::to_string(line_no) + ", column " + std::to_string(j + 1)
                                 + ": not a number: '" + std::string(detail::trim(fields[j])) + "'");
            if (!std::isfinite(v))
                throw InputError("line " + std::to_string(line_no) + ", column " + std::to_string(j + 1)
                                 + ": non-finite value");
            values.push_back(v);
        }
        ++rows;
    }
    if (rows == 0)
        throw InputError("no data rows");
    if (cols < 2)
        throw InputError("need at least 2 columns, found " + std::to_string(cols));
    if (rows < 5)
        throw InputError("need at least 5 rows, found " + std::to_string(rows));
    return DataMatrix(rows, cols, std::move(values));
}

inline std::string read_file(std::filesystem::path const& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InputError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline DataMatrix read_csv(std::filesystem::path const& path, CsvOptions const& opt = {})
{
    return parse_csv(read_file(path), opt);
}

inline std::string write_csv(DataMatrix const& data)
{
    std::string out;
    for (std::size_t t = 0; t < data.n(); ++t) {
        for (std::size_t j = 0; j < data.q(); ++j) {
            if (j)
                out += ',';
            out += format_double(data(t, j));
        }
        out += '\n';
    }
    return out;
}

struct PursuitReport {
    std::vector<double> h_star;
    double max_index = 0.0;
    double p_value = 0.0;
    double p_value_raw = 0.0;
    bool clamped = false;
    std::size_t q = 0;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    int starts_used = 0;
    bool converged = false;
    double gradient_norm = 0.0;
    std::string convention = "moments";
};

/// max_h I_n(h) and its tail-approximation p-value.
inline PursuitReport pursue(DataMatrix const& data, PursuitConfig const& cfg)
{
    auto const opt = max_index_value(data, cfg);
    auto const pv = pvalue(static_cast<int>(data.q()), opt.value);
    PursuitReport r;
    r.h_star = opt.h_star.vector();
    r.max_index = opt.value;
    r.p_value = pv.value.value();
    r.p_value_raw = pv.raw;
    r.clamped = pv.clamped;
    r.q = data.q();
    r.n = data.n();
    r.seed = cfg.seed;
    r.starts_used = opt.starts_used;
    r.converged = opt.converged;
    r.gradient_norm = opt.best_gradient_norm;
    r.convention = cfg.convention == CumulantConvention::moments ? "moments" : "k-statistics";
    return r;
}

inline nlohmann::ordered_json to_json(PursuitReport const& r)
{
    return {{"schema_version", report_schema_version},
            {"q", r.q},
            {"n", r.n},
            {"seed", r.seed},
            {"convention", r.convention},
            {"h_star", r.h_star},
            {"max_index", r.max_index},
            {"p_value", r.p_value},
            {"p_value_raw", r.p_value_raw},
            {"clamped", r.clamped},
            {"optimizer", {{"starts_used", r.starts_used}, {"converged", r.converged}, {"gradient_norm", r.gradient_norm}}}};
}

inline PursuitReport report_from_json(nlohmann::json const& j)
{
    if (j.at("schema_version").get<int>() != report_schema_version)
        throw InputError("unsupported report schema version");
    PursuitReport r;
    r.q = j.at("q").get<std::size_t>();
    r.n = j.at("n").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.convention = j.at("convention").get<std::string>();
    r.h_star = j.at("h_star").get<std::vector<double>>();
    r.max_index = j.at("max_index").get<double>();
    r.p_value = j.at("p_value").get<double>();
    r.p_value_raw = j.at("p_value_raw").get<double>();
    r.clamped = j.at("clamped").get<bool>();
    auto const& o = j.at("optimizer");
    r.starts_used = o.at("starts_used").get<int>();
    r.converged = o.at("converged").get<bool>();
    r.gradient_norm = o.at("gradient_norm").get<double>();
    return r;
}

inline std::string to_csv(PursuitReport const& r)
{
    std::string out = "q,n,seed,max_index,p_value,p_value_raw,clamped,converged";
    for (std::size_t j = 0; j < r.h_star.size(); ++j)
        out += ",h" + std::to_string(j + 1);
    out += '\n';
    out += std::to_string(r.q) + ',' + std::to_string(r.n) + ',' + std::to_string(r.seed) + ',' + format_double(r.max_index)
           + ',' + format_double(r.p_value) + ',' + format_double(r.p_value_raw) + ',' + (r.clamped ? "1" : "0") + ','
           + (r.converged ? "1" : "0");
    for (double x : r.h_star)
        out += ',' + format_double(x);
    out += '\n';
    return out;
}

/// threshold,p_hat,se[,tail_approx]
inline std::string to_csv(TailCurve const& tc, int approx_q = 0)
{
    std::string out = approx_q ? "threshold,p_hat,se,tail_approx\n" : "threshold,p_hat,se\n";
    for (std::size_t i = 0; i < tc.thresholds.size(); ++i) {
        out += format_double(tc.thresholds[i]) + ',' + format_double(tc.probabilities[i]) + ',' + format_double(tc.se[i]);
        if (approx_q)
            out += ',' + format_double(tail_approx(approx_q, tc.thresholds[i]).value);
        out += '\n';
    }
    return out;
}

// ---------------------------------------------------------------- fixtures

struct FixtureSpec {
    std::string file;
    std::string description;
    std::uint64_t seed;
    double p_value_low;   // expected p_value in [low, high]
    double p_value_high;
};

inline constexpr std::size_t fixture_rows = 500;

/// null: two independent N(0,1) columns. planted: column 1 is z^3 for z ~ N(0,1).
inline DataMatrix fixture_data(bool planted, std::uint64_t seed)
{
    std::mt19937_64 rng(stream_seed(seed, planted ? 1 : 0));
    std::normal_distribution<double> normal;
    std::vector<double> v(fixture_rows * 2);
    for (std::size_t t = 0; t < fixture_rows; ++t) {
        double const a = normal(rng);
        double const b = normal(rng);
        v[2 * t] = planted ? a * a * a : a;
        v[2 * t + 1] = b;
    }
    return DataMatrix(fixture_rows, 2, std::move(v));
}

inline std::vector<FixtureSpec> fixture_specs(std::uint64_t seed)
{
    return {{"null_n500_q2.csv", "500 x 2 iid standard normal", seed, 0.05, 1.0},
            {"planted_n500_q2.csv", "500 x 2; column 1 is a cubed standard normal, column 2 standard normal", seed, 0.0,
             0.01}};
}

inline std::string fixture_manifest(std::uint64_t seed)
{
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (auto const& f : fixture_specs(seed))
        files.push_back({{"file", f.file},
                         {"description", f.description},
                         {"seed", f.seed},
                         {"header", true},
                         {"expected", {{"p_value", {{"low", f.p_value_low}, {"high", f.p_value_high}}}}}});
    nlohmann::ordered_json m = {{"schema_version", report_schema_version},
                                {"generator", "pursuit fixtures --seed " + std::to_string(seed)},
                                {"files", files}};
    return m.dump(2) + "\n";
}

/// Writes the fixture CSVs (with an "x1,x2" header) and manifest.json into `dir`.
inline std::vector<std::filesystem::path> regenerate_fixtures(std::uint64_t seed, std::filesystem::path const& dir)
{
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    auto put = [&](std::string const& name, std::string const& body) {
        auto const path = dir / name;
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw InputError("cannot write '" + path.string() + "'");
        out << body;
        written.push_back(path);
    };
    auto const specs = fixture_specs(seed);
    put(specs[0].file, "x1,x2\n" + write_csv(fixture_data(false, seed)));
    put(specs[1].file, "x1,x2\n" + write_csv(fixture_data(true, seed)));
    put("manifest.json", fixture_manifest(seed));
    return written;
}

}  // namespace pursuit

#endif  // PURSUIT_IO_HPP_INCLUDED
