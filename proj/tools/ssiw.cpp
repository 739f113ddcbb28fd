// ssiw: sweep supersingular primes of elliptic curves and report signed
// Iwasawa invariants computed from Mazur-Tate elements.
//
// Exit codes: 0 clean, 2 parse/config error, 3 mathematical anomaly.

#include <ssiw/ssiw.hpp>

#include "CLI11.hpp"

#include <fstream>
#include <iostream>

namespace {

constexpr int exit_config = 2;
constexpr int exit_anomaly = 3;

int cmd_sweep(const ssiw::RunConfig& cfg) {
    const auto res = ssiw::run(cfg);
    for (const auto& w : res.warnings) std::cerr << w << '\n';
    switch (cfg.format) {
        case ssiw::OutputFormat::csv: ssiw::write_csv(std::cout, res.rows); break;
        case ssiw::OutputFormat::json: ssiw::write_json(std::cout, res); break;
        case ssiw::OutputFormat::table: ssiw::write_table(std::cout, res); break;
    }
    return res.anomaly ? exit_anomaly : 0;
}

int cmd_selftest(std::uint64_t seed) {
    bool ok = true;
    for (const auto& r : ssiw::run_selftest(seed)) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name;
        if (!r.detail.empty()) std::cout << " (" << r.detail << ")";
        std::cout << '\n';
        ok = ok && r.passed;
    }
    return ok ? 0 : exit_anomaly;
}

int cmd_dump(const std::string& curve_file, const std::string& label, std::uint64_t p, unsigned n,
             std::uint64_t max_degree) {
    std::ifstream in(curve_file);
    if (!in) throw ssiw::Error(ssiw::Errc::ParseError, "cannot open curve file '" + curve_file + "'");
    for (const auto& curve : ssiw::parse_curve_file(in)) {
        if (curve.label != label) continue;
        if (!ssiw::is_supersingular(curve, p))
            std::cerr << "note: " << label << " is not supersingular at " << p << "\n";
        const ssiw::ModularSymbolSpace space(curve.conductor);
        const auto plus = ssiw::eigensymbol(space, curve, ssiw::Sign::plus);
        const auto th = ssiw::theta(plus, p, n);
        nlohmann::json j;
        j["label"] = label;
        j["p"] = p;
        j["n"] = n;
        j["group_ring"] = th.group_ring;
        if (th.degree_bound() <= max_degree) j["poly"] = th.to_poly();
        if (th.invariants) j["invariants"] = {{"mu", th.invariants->mu}, {"lambda", th.invariants->lambda}};
        std::cout << j.dump() << '\n';
        return 0;
    }
    throw ssiw::Error(ssiw::Errc::ParseError, "no curve labelled '" + label + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Signed Iwasawa invariants at supersingular primes"};
    app.require_subcommand(1);

    ssiw::RunConfig cfg;
    std::string format = "csv";
    auto* sweep = app.add_subcommand("sweep", "compute invariants for every supersingular prime in range");
    sweep->add_option("--curves", cfg.curve_file, "curve file (label a1 a2 a3 a4 a6 conductor)")->required();
    sweep->add_option("--pmin", cfg.pmin, "smallest prime")->capture_default_str();
    sweep->add_option("--pmax", cfg.pmax, "largest prime")->capture_default_str();
    sweep->add_option("--nmax", cfg.n_max, "highest theta level (2..4)")->capture_default_str();
    sweep->add_option("--jobs", cfg.jobs, "worker threads")->capture_default_str();
    sweep->add_option("--max-degree", cfg.max_degree, "skip theta levels with p^n above this")->capture_default_str();
    sweep->add_option("--cache", cfg.cache_dir, "modular symbol cache directory");
    sweep->add_option("--format", format, "csv | json | table")
        ->check(CLI::IsMember({"csv", "json", "table"}))
        ->capture_default_str();
    sweep->add_flag("--dump-theta", cfg.dump_theta, "write theta_n per (curve, p, n) as JSON");
    sweep->add_option("--dump-dir", cfg.dump_dir, "directory for --dump-theta")->capture_default_str();

    std::uint64_t seed = 1;
    auto* selftest = app.add_subcommand("selftest", "run the invariant suites");
    selftest->add_option("--seed", seed, "random seed")->capture_default_str();

    std::string dump_curves, dump_label;
    std::uint64_t dump_p = 0, dump_max_degree = 4096;
    unsigned dump_n = 0;
    auto* dump = app.add_subcommand("dump", "print theta_n of one curve as JSON");
    dump->add_option("--curves", dump_curves, "curve file")->required();
    dump->add_option("--label", dump_label, "curve label")->required();
    dump->add_option("--p", dump_p, "odd prime")->required();
    dump->add_option("--n", dump_n, "level")->required();
    dump->add_option("--max-degree", dump_max_degree, "expand in powers of T up to this degree")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_config;
    }

    try {
        if (*sweep) {
            cfg.format = format == "json"    ? ssiw::OutputFormat::json
                         : format == "table" ? ssiw::OutputFormat::table
                                             : ssiw::OutputFormat::csv;
            return cmd_sweep(cfg);
        }
        if (*selftest) return cmd_selftest(seed);
        if (*dump) return cmd_dump(dump_curves, dump_label, dump_p, dump_n, dump_max_degree);
    } catch (const ssiw::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return ssiw::is_math_anomaly(e.code()) ? exit_anomaly : exit_config;
    }
    return 0;
}
