#pragma once

// Batch sweep over (curve, supersingular prime): builds the plus symbol per
// curve (with an on-disk cache), computes signed invariants and the bound
// audit per prime, and renders rows as CSV, JSON or a table.

#include <ssiw/curves.hpp>
#include <ssiw/mazur_tate.hpp>
#include <ssiw/modsym.hpp>

#include "json.hpp"

#include <array>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace ssiw {

enum class OutputFormat { csv, json, table };

struct RunConfig {
    std::string curve_file;
    std::uint64_t pmin = 5;
    std::uint64_t pmax = 60;
    unsigned n_max = 3;
    unsigned jobs = 1;
    std::uint64_t max_degree = 216000;
    std::string cache_dir;  // empty: no cache
    OutputFormat format = OutputFormat::csv;
    bool dump_theta = false;
    std::string dump_dir = ".";
    std::uint64_t dump_max_degree = 4096;  // expand theta in powers of T up to this degree

    void validate() const {
        if (pmin < 5) throw Error(Errc::InvalidArgument, "pmin must be >= 5");
        if (n_max < 2 || n_max > 4) throw Error(Errc::InvalidArgument, "nmax must be in [2, 4]");
        if (jobs < 1) throw Error(Errc::InvalidArgument, "jobs must be >= 1");
    }
};

struct ResultRow {
    std::string label;
    std::uint64_t p = 0;
    long a_p = 0;
    bool rank0 = false;  // [0]^+ != 0, i.e. L(E,1) != 0

    std::optional<unsigned> mu_plus, mu_minus;
    std::optional<std::size_t> lambda_plus, lambda_minus;
    std::string plus_status = "error", minus_status = "error";
    std::optional<unsigned> plus_level, minus_level;

    // indexed by BoundCase: S1 (minus_lambda0), S2 (plus_lambda0), S3 (minus_lambda1), S4 (plus_lambda1)
    std::array<std::optional<unsigned>, 4> sum_ord{};
    std::array<std::string, 4> mu_bound{"na", "na", "na", "na"};
    std::array<std::string, 4> sum_bound{"", "", "", ""};
    std::vector<std::string> supnorm;  // n = 1, 2, 3
    std::string max_abs_p2;
    std::string identities = "skipped";
    std::string expectation = "na";

    std::string error;
    bool anomaly = false;
    double runtime_ms = 0;
};

struct Summary {
    std::size_t rows = 0;
    std::size_t minus_lambda0_rows = 0, minus_lambda0_within = 0;  // mu^- <= 1
    std::size_t plus_lambda0_rows = 0, plus_lambda0_within = 0;    // mu^+ <= 2
    std::size_t bound_failures = 0;
    std::size_t errors = 0;
    std::size_t warnings = 0;
    std::vector<std::string> supnorm_violations;  // "label p=.. n=.."
    std::optional<unsigned> max_mu;
    std::optional<std::size_t> max_lambda;

    bool operator==(const Summary&) const = default;
};

struct RunResult {
    std::vector<ResultRow> rows;
    Summary summary;
    bool anomaly = false;
    std::vector<std::string> warnings;
};

inline Summary summarize(const std::vector<ResultRow>& rows) {
    Summary s;
    s.rows = rows.size();
    for (const auto& r : rows) {
        if (!r.error.empty()) ++s.errors;
        if (r.expectation == "WARN") ++s.warnings;
        if (r.lambda_minus == std::size_t{0}) {
            ++s.minus_lambda0_rows;
            if (*r.mu_minus <= 1) ++s.minus_lambda0_within;
        }
        if (r.lambda_plus == std::size_t{0}) {
            ++s.plus_lambda0_rows;
            if (*r.mu_plus <= 2) ++s.plus_lambda0_within;
        }
        for (const auto& t : r.mu_bound)
            if (t == "fail") ++s.bound_failures;
        for (std::size_t n = 0; n < r.supnorm.size(); ++n)
            if (r.supnorm[n] == "violated")
                s.supnorm_violations.push_back(r.label + " p=" + std::to_string(r.p) + " n=" + std::to_string(n + 1));
        for (auto mu : {r.mu_plus, r.mu_minus})
            if (mu) s.max_mu = std::max(s.max_mu.value_or(0), *mu);
        for (auto la : {r.lambda_plus, r.lambda_minus})
            if (la) s.max_lambda = std::max(s.max_lambda.value_or(0), *la);
    }
    return s;
}

namespace detail {

inline std::string cache_path(const RunConfig& cfg, const EllipticCurve& c) {
    return (std::filesystem::path(cfg.cache_dir) / (c.label + ".plus.modsym")).string();
}

inline EigenSymbol load_or_build_plus(const RunConfig& cfg, const EllipticCurve& curve,
                                      std::map<std::uint64_t, std::unique_ptr<ModularSymbolSpace>>& spaces,
                                      std::vector<std::string>& warnings) {
    if (!cfg.cache_dir.empty()) {
        std::ifstream in(cache_path(cfg, curve));
        if (in) {
            try {
                return read_symbol_cache(in, curve, Sign::plus);
            } catch (const Error& e) {
                warnings.push_back(curve.label + ": " + e.what() + " (rebuilding)");
            }
        }
    }
    auto& space = spaces[curve.conductor];
    if (!space) space = std::make_unique<ModularSymbolSpace>(curve.conductor);
    EigenSymbol sym = eigensymbol(*space, curve, Sign::plus);
    if (!cfg.cache_dir.empty()) {
        std::filesystem::create_directories(cfg.cache_dir);
        std::ofstream out(cache_path(cfg, curve));
        write_symbol_cache(out, sym, curve);
    }
    return sym;
}

inline void dump_theta_file(const RunConfig& cfg, const ThetaElement& th) {
    nlohmann::json j;
    j["label"] = th.label;
    j["p"] = th.p;
    j["n"] = th.n;
    j["group_ring"] = th.group_ring;
    if (th.degree_bound() <= cfg.dump_max_degree) j["poly"] = th.to_poly();
    std::filesystem::create_directories(cfg.dump_dir);
    std::ofstream out(std::filesystem::path(cfg.dump_dir) /
                      ("theta_" + th.label + "_p" + std::to_string(th.p) + "_n" + std::to_string(th.n) + ".json"));
    out << j.dump() << '\n';
}

inline const char* status_name(const SignResult& s) { return s.certified() ? "certified" : "not_stabilized"; }

inline ResultRow compute_row(const RunConfig& cfg, const EllipticCurve& curve, const EigenSymbol& plus,
                             std::uint64_t p) {
    ResultRow row;
    row.label = curve.label;
    row.p = p;
    row.rank0 = plus.value_at(0, 1) != 0;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        row.a_p = ap(curve, p);
        for (auto q : plus.exceptional_primes)
            if (q == p) throw Error(Errc::InvalidArgument, "p lies in the symbol's exceptional prime set");
        ThetaBudget budget{cfg.n_max, cfg.max_degree, cfg.jobs};
        std::map<unsigned, ThetaElement> thetas;
        const SignedInvariants inv = signed_invariants(plus, p, budget, &thetas);
        auto fill = [](const SignResult& s, auto& mu, auto& la, auto& status, auto& level) {
            status = status_name(s);
            mu = s.mu;
            la = s.lambda;
            level = s.stabilized_at;
        };
        fill(inv.plus, row.mu_plus, row.lambda_plus, row.plus_status, row.plus_level);
        fill(inv.minus, row.mu_minus, row.lambda_minus, row.minus_status, row.minus_level);

        const BoundsReport rep = check_bounds(plus, p, inv, 3, cfg.jobs);
        for (BoundCase c : all_bound_cases) {
            const auto i = static_cast<std::size_t>(c);
            const CaseAudit& a = rep.cases[i];
            row.sum_ord[i] = a.sum_ord;
            row.mu_bound[i] = verdict_name(a.verdict);
            row.sum_bound[i] = a.sum_within_bound ? "holds" : "violated";
        }
        for (const auto& ch : rep.sup_norms) row.supnorm.push_back(ch.holds ? "holds" : "violated");
        row.max_abs_p2 = to_fraction_string(rep.sup_norms.at(1).sup_norm);
        for (const auto& a : rep.anomalies) {
            row.anomaly = true;
            row.error += (row.error.empty() ? "" : "; ") + a;
        }

        // theta coefficients against the directly summed values
        if (thetas.count(0) && thetas.count(1) && thetas.count(2)) {
            auto S = [&](BoundCase c) { return rep.get(c).sum; };
            const bool ok = thetas.at(0).coefficient(0) == S(BoundCase::minus_lambda0) &&
                            thetas.at(1).coefficient(0) == S(BoundCase::plus_lambda0) &&
                            thetas.at(1).coefficient(1) == S(BoundCase::plus_lambda1) &&
                            thetas.at(2).coefficient(p) == S(BoundCase::minus_lambda1);
            row.identities = ok ? "ok" : "mismatch";
            if (!ok) {
                row.anomaly = true;
                row.error += (row.error.empty() ? "" : "; ") + std::string("theta coefficient identity mismatch");
            }
        }
        if (row.rank0) {
            const bool expected = inv.plus.certified() && inv.minus.certified() && row.lambda_plus == 0u &&
                                  row.lambda_minus == 0u && row.mu_plus == 0u && row.mu_minus == 0u;
            row.expectation = expected ? "ok" : "WARN";
        }
        if (cfg.dump_theta)
            for (const auto& [n, th] : thetas) dump_theta_file(cfg, th);
    } catch (const Error& e) {
        row.error = e.what();
        row.anomaly = is_math_anomaly(e.code());
    }
    row.runtime_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

}  // namespace detail

/// Sweep every curve over its supersingular primes in [pmin, pmax]. Rows are
/// ordered by (curve order in the input, p); failures stay inside their row.
inline RunResult run(const RunConfig& cfg, const std::vector<EllipticCurve>& curves) {
    cfg.validate();
    RunResult res;
    std::map<std::uint64_t, std::unique_ptr<ModularSymbolSpace>> spaces;
    for (const auto& curve : curves) {
        std::vector<std::uint64_t> primes;
        for (auto p : supersingular_primes(curve, cfg.pmax))
            if (p >= cfg.pmin) primes.push_back(p);
        if (primes.empty()) continue;
        std::optional<EigenSymbol> plus;
        try {
            plus = detail::load_or_build_plus(cfg, curve, spaces, res.warnings);
        } catch (const Error& e) {
            for (auto p : primes) {
                ResultRow row;
                row.label = curve.label;
                row.p = p;
                row.error = e.what();
                row.anomaly = is_math_anomaly(e.code());
                res.rows.push_back(std::move(row));
            }
            continue;
        }
        for (auto p : primes) res.rows.push_back(detail::compute_row(cfg, curve, *plus, p));
    }
    for (const auto& r : res.rows) {
        res.anomaly = res.anomaly || r.anomaly;
        if (r.expectation == "WARN")
            res.warnings.push_back("WARN " + r.label + " p=" + std::to_string(r.p) +
                                   ": rank-0 curve with nonzero signed invariants");
    }
    res.summary = summarize(res.rows);
    return res;
}

inline RunResult run(const RunConfig& cfg) {
    std::ifstream in(cfg.curve_file);
    if (!in) throw Error(Errc::ParseError, "cannot open curve file '" + cfg.curve_file + "'");
    return run(cfg, parse_curve_file(in));
}

// ---------------------------------------------------------------------------
// output

inline constexpr const char* report_version = "ssiw-report v1";

inline const std::vector<std::string>& csv_columns() {
    static const std::vector<std::string> cols = {
        "label", "p", "a_p", "rank0", "mu_plus", "lambda_plus",
        "plus_status", "plus_level", "mu_minus", "lambda_minus", "minus_status", "minus_level",
        "ord_s1", "ord_s2", "ord_s3", "ord_s4", "mubound_minus_l0", "mubound_plus_l0",
        "mubound_minus_l1", "mubound_plus_l1", "ineq_s1", "ineq_s2", "ineq_s3", "ineq_s4",
        "supnorm_n1", "supnorm_n2", "supnorm_n3", "max_abs_p2", "identities", "expectation",
        "error", "runtime_ms"};
    return cols;
}

namespace detail {

template <class T>
std::string opt(const std::optional<T>& v) {
    return v ? std::to_string(*v) : std::string();
}

inline std::vector<std::string> row_fields(const ResultRow& r) {
    std::ostringstream ms;
    ms << std::fixed << std::setprecision(1) << r.runtime_ms;
    auto supnorm = [&](std::size_t i) { return i < r.supnorm.size() ? r.supnorm[i] : std::string(); };
    return {r.label,
            std::to_string(r.p),
            std::to_string(r.a_p),
            r.rank0 ? "1" : "0",
            opt(r.mu_plus),
            opt(r.lambda_plus),
            r.plus_status,
            opt(r.plus_level),
            opt(r.mu_minus),
            opt(r.lambda_minus),
            r.minus_status,
            opt(r.minus_level),
            opt(r.sum_ord[0]),
            opt(r.sum_ord[1]),
            opt(r.sum_ord[2]),
            opt(r.sum_ord[3]),
            r.mu_bound[0],
            r.mu_bound[1],
            r.mu_bound[2],
            r.mu_bound[3],
            r.sum_bound[0],
            r.sum_bound[1],
            r.sum_bound[2],
            r.sum_bound[3],
            supnorm(0),
            supnorm(1),
            supnorm(2),
            r.max_abs_p2,
            r.identities,
            r.expectation,
            r.error,
            ms.str()};
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

}  // namespace detail

/// CSV with a version comment. Without runtime the output is a pure function of the inputs.
inline void write_csv(std::ostream& os, const std::vector<ResultRow>& rows, bool include_runtime = true) {
    const auto& cols = csv_columns();
    const std::size_t ncols = include_runtime ? cols.size() : cols.size() - 1;
    os << "# " << report_version << '\n';
    for (std::size_t i = 0; i < ncols; ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
    for (const auto& r : rows) {
        const auto f = detail::row_fields(r);
        for (std::size_t i = 0; i < ncols; ++i) os << (i ? "," : "") << detail::csv_escape(f[i]);
        os << '\n';
    }
}

inline nlohmann::json to_json_value(const Summary& s) {
    nlohmann::json j;
    j["rows"] = s.rows;
    j["minus_lambda0_rows"] = s.minus_lambda0_rows;
    j["minus_lambda0_within"] = s.minus_lambda0_within;
    j["plus_lambda0_rows"] = s.plus_lambda0_rows;
    j["plus_lambda0_within"] = s.plus_lambda0_within;
    j["bound_failures"] = s.bound_failures;
    j["errors"] = s.errors;
    j["warnings"] = s.warnings;
    j["supnorm_violations"] = s.supnorm_violations;
    j["max_mu"] = s.max_mu ? nlohmann::json(*s.max_mu) : nlohmann::json();
    j["max_lambda"] = s.max_lambda ? nlohmann::json(*s.max_lambda) : nlohmann::json();
    return j;
}

inline void write_json(std::ostream& os, const RunResult& res) {
    nlohmann::json rows = nlohmann::json::array();
    const auto& cols = csv_columns();
    for (const auto& r : res.rows) {
        const auto f = detail::row_fields(r);
        nlohmann::json row = nlohmann::json::object();
        for (std::size_t i = 0; i < cols.size(); ++i) row[cols[i]] = f[i];
        rows.push_back(std::move(row));
    }
    nlohmann::json j;
    j["version"] = report_version;
    j["rows"] = std::move(rows);
    j["summary"] = to_json_value(res.summary);
    os << j.dump(2) << '\n';
}

inline void write_table(std::ostream& os, const RunResult& res) {
    os << std::left << std::setw(8) << "curve" << std::setw(5) << "p" << std::setw(10) << "mu+/la+" << std::setw(10)
       << "mu-/la-" << std::setw(22) << "bounds(1..4)" << std::setw(12) << "|[a/p2]|" << "notes\n";
    for (const auto& r : res.rows) {
        auto pair = [](auto mu, auto la) {
            return mu ? std::to_string(*mu) + "/" + std::to_string(*la) : std::string("?");
        };
        std::string bounds = r.mu_bound[0] + "," + r.mu_bound[1] + "," + r.mu_bound[2] + "," + r.mu_bound[3];
        std::string notes = r.error.empty() ? (r.expectation == "WARN" ? "WARN" : "") : r.error;
        os << std::setw(8) << r.label << std::setw(5) << r.p << std::setw(10) << pair(r.mu_plus, r.lambda_plus)
           << std::setw(10) << pair(r.mu_minus, r.lambda_minus) << std::setw(22) << bounds << std::setw(12)
           << r.max_abs_p2 << notes << '\n';
    }
    const Summary& s = res.summary;
    os << "\nrows: " << s.rows << "  errors: " << s.errors << "  warnings: " << s.warnings << '\n'
       << "mu- <= 1 where lambda- = 0: " << s.minus_lambda0_within << "/" << s.minus_lambda0_rows << '\n'
       << "mu+ <= 2 where lambda+ = 0: " << s.plus_lambda0_within << "/" << s.plus_lambda0_rows << '\n'
       << "bound failures: " << s.bound_failures << "  |[a/p^n]^+| >= p at: " << s.supnorm_violations.size() << '\n';
}

}  // namespace ssiw
