// Command-line front end: capacity sweeps over an SNR grid, orbit-table
// inspection and caching, the invariant verification suite, and
// ML-ambiguity reports.  All numeric output is CSV with '#' metadata lines;
// identical configurations produce byte-identical files.
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "pqnc/analysis.hpp"
#include "pqnc/capacity.hpp"
#include "pqnc/channel.hpp"
#include "pqnc/monte_carlo.hpp"
#include "pqnc/orbit_cache.hpp"
#include "pqnc/rng.hpp"
#include "pqnc/symmetry.hpp"
#include "pqnc/types.hpp"
#include "pqnc/verify.hpp"

namespace {

constexpr const char* program_version = "1.0.0";

struct Options {
    int M = 4;
    int K = 8;
    int L = 6;
    std::string snr = "-5:20:1";
    int n_phi = 0; // 0 = pick the default for K
    bool dither = false;
    std::uint64_t samples = 200000;
    std::uint64_t seed = 1;
    std::string out;       // empty or "-" = stdout
    std::string cache_dir; // empty = no orbit cache
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// Accepts "start:stop:step" (inclusive endpoints) or a comma-separated list
// of dB values; a single number is a one-point grid.
std::vector<double> parse_snr_grid(const std::string& text) {
    const auto to_double = [](const std::string& s) {
        size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &pos);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad snr value '" + s + "'");
        }
        if (pos != s.size()) throw std::invalid_argument("bad snr value '" + s + "'");
        return v;
    };
    std::vector<double> grid;
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        size_t start = 0;
        for (size_t p = text.find(':'); ; p = text.find(':', start)) {
            parts.push_back(text.substr(start, p - start));
            if (p == std::string::npos) break;
            start = p + 1;
        }
        if (parts.size() != 3) throw std::invalid_argument("snr range must be start:stop:step");
        const double lo = to_double(parts[0]);
        const double hi = to_double(parts[1]);
        const double step = to_double(parts[2]);
        if (step <= 0.0) throw std::invalid_argument("snr step must be positive");
        if (hi < lo) throw std::invalid_argument("snr range must have stop >= start");
        const int count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
        for (int i = 0; i < count; ++i) grid.push_back(lo + i * step);
    } else {
        size_t start = 0;
        for (size_t p = text.find(','); ; p = text.find(',', start)) {
            grid.push_back(to_double(text.substr(start, p - start)));
            if (p == std::string::npos) break;
            start = p + 1;
        }
    }
    if (grid.empty()) throw std::invalid_argument("empty snr grid");
    return grid;
}

// Output sink: a file when a path is given, stdout otherwise.
struct Sink {
    std::ofstream file;
    std::ostream* os = &std::cout;

    explicit Sink(const std::string& path) {
        if (!path.empty() && path != "-") {
            file.open(path);
            if (!file) throw std::runtime_error("cannot open output file '" + path + "'");
            os = &file;
        }
    }
    bool to_file() const { return file.is_open(); }
    std::ostream& out() { return *os; }
};

void write_common_metadata(std::ostream& os, const char* subcommand, const Options& o,
                           int n_phi) {
    os << "# pqnc " << subcommand << " version=" << program_version << '\n';
    os << "# M=" << o.M << " K=" << o.K << " L=" << o.L << " n_phi=" << n_phi
       << " dither=" << (o.dither ? 1 : 0) << '\n';
}

int resolve_n_phi(const Options& o) {
    return o.n_phi > 0 ? o.n_phi : pqnc::default_n_phi(o.K);
}

// Orbit tables for (K, M, L), going through the JSON cache when a cache
// directory is configured.  Returns the tables plus "hit"/"miss"/"off".
std::pair<std::pair<pqnc::ConditionalOrbitTable, pqnc::OutputOrbitTable>, std::string>
obtain_orbit_tables(const Options& o) {
    namespace fs = std::filesystem;
    if (o.cache_dir.empty()) {
        return {{pqnc::enumerate_conditional_orbits(o.K, o.L),
                 pqnc::enumerate_output_orbits(o.K, o.M, o.L)},
                "off"};
    }
    fs::create_directories(o.cache_dir);
    const fs::path path = fs::path(o.cache_dir) / pqnc::orbit_cache_filename(o.K, o.M, o.L);
    if (auto loaded = pqnc::load_orbit_tables(path.string(), o.K, o.M, o.L))
        return {std::move(*loaded), "hit"};
    auto tables = std::make_pair(pqnc::enumerate_conditional_orbits(o.K, o.L),
                                 pqnc::enumerate_output_orbits(o.K, o.M, o.L));
    pqnc::save_orbit_tables(path.string(), tables.first, tables.second);
    return {std::move(tables), "miss"};
}

int run_sweep(const Options& o) {
    const std::vector<double> grid = parse_snr_grid(o.snr);
    const int n_phi = resolve_n_phi(o);
    pqnc::ChannelConfig probe{o.M, o.K, o.L, 1.0};
    probe.validate();

    Sink sink(o.out);
    std::ostream& os = sink.out();
    write_common_metadata(os, o.dither ? "dither" : "sweep", o, n_phi);
    os << "# snr_db=" << o.snr << '\n';
    if (o.dither)
        os << "# samples=" << o.samples << " seed=" << o.seed
           << " rng=" << pqnc::rng_algorithm_name << '\n';
    os << "snr_db,M,K,L,n_phi,dither,h_z_bits,h_z_given_x_bits,mi_bits,"
          "cap_per_symbol_bits,std_error,samples,seed\n"
       << std::flush;

    const auto prefix = [&](double db) {
        os << fmt(db) << ',' << o.M << ',' << o.K << ',' << o.L << ',' << n_phi << ','
           << (o.dither ? 1 : 0) << ',';
    };

    if (!o.dither) {
        auto [tables, cache_status] = obtain_orbit_tables(o);
        (void)cache_status;
        pqnc::CapacityWorkspace ws(o.M, o.K, o.L, n_phi, std::move(tables.first),
                                   std::move(tables.second));
        double prev_cap = 0.0;
        bool have_prev = false;
        for (double db : grid) {
            try {
                const pqnc::CapacityPoint pt = ws.at_snr_db(db);
                if (have_prev && pt.cap_per_symbol < prev_cap - 1e-6)
                    std::cerr << "warning: capacity decreased between grid points at " << db
                              << " dB; grid resolution may be insufficient\n";
                prev_cap = pt.cap_per_symbol;
                have_prev = true;
                prefix(db);
                os << fmt(pt.h_out) << ',' << fmt(pt.h_cond) << ',' << fmt(pt.mi) << ','
                   << fmt(pt.cap_per_symbol) << ",,,\n"
                   << std::flush;
            } catch (const pqnc::ResourceLimitError&) {
                throw;
            } catch (const std::exception& e) {
                std::cerr << "error: point " << db << " dB failed: " << e.what() << '\n';
            }
        }
        return 0;
    }

    const pqnc::Constellation cons = pqnc::Constellation::dithered(o.M, o.K, o.L);
    for (double db : grid) {
        try {
            pqnc::ChannelConfig cfg{o.M, o.K, o.L, pqnc::db_to_linear(db)};
            const pqnc::McRunResult run = pqnc::mc_run(cfg, cons, o.samples, o.seed, n_phi);
            prefix(db);
            os << fmt(run.entropies.h_out) << ',' << fmt(run.entropies.h_cond) << ','
               << fmt(run.mi.value * (o.L - 1)) << ',' << fmt(run.mi.value) << ','
               << fmt(run.mi.std_error) << ',' << run.mi.samples << ',' << run.mi.seed << '\n'
               << std::flush;
        } catch (const pqnc::ResourceLimitError&) {
            throw;
        } catch (const std::exception& e) {
            std::cerr << "error: point " << db << " dB failed: " << e.what() << '\n';
        }
    }
    return 0;
}

int run_orbits(const Options& o) {
    pqnc::ChannelConfig probe{o.M, o.K, o.L, 1.0};
    probe.validate();
    const auto t0 = std::chrono::steady_clock::now();
    auto [tables, cache_status] = obtain_orbit_tables(o);
    const auto t1 = std::chrono::steady_clock::now();
    const auto& [cond, out] = tables;
    std::uint64_t sum_cond = 0, sum_out = 0;
    for (auto c : cond.counts) sum_cond += c;
    for (auto c : out.counts) sum_out += c;
    const double ms =
        std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(t1 - t0).count();
    std::cout << "K=" << o.K << " M=" << o.M << " L=" << o.L << " |S_Z|=" << cond.count()
              << " |S~_Z|=" << out.count() << " sum_n=" << sum_cond
              << " sum_n_tilde=" << sum_out << " elapsed_ms=" << fmt(ms)
              << " cache=" << cache_status << '\n';
    return 0;
}

int run_verify(const Options& o) {
    const std::vector<double> grid = parse_snr_grid(o.snr);
    if (grid.size() != 1)
        throw std::invalid_argument("verify takes a single snr value");
    const int n_phi = resolve_n_phi(o);
    const pqnc::VerifyReport report =
        pqnc::run_verification(o.M, o.K, o.L, grid[0], n_phi, o.seed);
    std::printf("%-46s %12s %12s  %s\n", "property", "deviation", "tolerance", "status");
    for (const auto& c : report.checks)
        std::printf("%-46s %12.3e %12.3e  %s\n", c.name.c_str(), c.deviation, c.tolerance,
                    c.pass ? "PASS" : "FAIL");
    for (const auto& c : report.checks) {
        if (!c.pass) {
            std::printf("verification FAILED: %s (deviation %.3e, tolerance %.3e)\n",
                        c.name.c_str(), c.deviation, c.tolerance);
            return 1;
        }
    }
    std::printf("verification PASSED (%zu properties)\n", report.checks.size());
    return 0;
}

int run_ambiguity(const Options& o) {
    const std::vector<double> grid = parse_snr_grid(o.snr);
    if (grid.size() != 1)
        throw std::invalid_argument("ambiguity takes a single snr value");
    const int n_phi = resolve_n_phi(o);
    pqnc::ChannelConfig cfg{o.M, o.K, o.L, pqnc::db_to_linear(grid[0])};
    cfg.validate();
    const pqnc::Constellation cons =
        o.dither ? pqnc::Constellation::dithered(o.M, o.K, o.L) : pqnc::Constellation::standard(o.M);
    const pqnc::LikelihoodTable table = pqnc::build_likelihood_table(cfg, cons, n_phi);
    const pqnc::AmbiguityScan scan = pqnc::scan_ambiguity(cfg, cons, table);

    Sink sink(o.out);
    std::ostream& os = sink.out();
    write_common_metadata(os, "ambiguity", o, n_phi);
    os << "# snr_db=" << fmt(grid[0]) << " tie_tol=1e-09\n";
    os << "z,ambiguous,n_tied_inputs,p_z\n" << std::flush;
    for (const auto& row : scan.rows) {
        for (size_t i = 0; i < row.z.size(); ++i)
            os << (i ? " " : "") << row.z[i];
        os << ',' << (row.ambiguous ? 1 : 0) << ',' << row.tied_inputs << ',' << fmt(row.p_z)
           << '\n'
           << std::flush;
    }
    os << "# ambiguous_count=" << scan.ambiguous_count << '\n';
    os << "# ambiguous_mass=" << fmt(scan.mass) << '\n' << std::flush;
    if (sink.to_file())
        std::cout << "ambiguous_count=" << scan.ambiguous_count
                  << " ambiguous_mass=" << fmt(scan.mass) << '\n';
    return 0;
}

void add_channel_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--M", o.M, "constellation size")->capture_default_str();
    cmd->add_option("--K", o.K, "quantizer sectors")->capture_default_str();
    cmd->add_option("--L", o.L, "block length")->capture_default_str();
    cmd->add_option("--n-phi", o.n_phi, "phase grid nodes (0 = 128*K)")->capture_default_str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Capacity of block-noncoherent MPSK with K-sector phase quantization"};
    app.require_subcommand(1);

    Options sweep_opt, dither_opt, orbits_opt, verify_opt, amb_opt;
    verify_opt.L = 3;
    verify_opt.snr = "5";
    amb_opt.L = 3;
    amb_opt.snr = "20";
    dither_opt.dither = true;

    CLI::App* sweep = app.add_subcommand("sweep", "analytic capacity sweep over an snr grid");
    add_channel_flags(sweep, sweep_opt);
    sweep->add_option("--snr", sweep_opt.snr, "dB grid: start:stop:step or comma list")
        ->capture_default_str();
    sweep->add_flag("--dither", sweep_opt.dither,
                    "per-slot dither schedule (routes to Monte Carlo)");
    sweep->add_option("--samples", sweep_opt.samples, "Monte Carlo samples per point")
        ->capture_default_str();
    sweep->add_option("--seed", sweep_opt.seed, "Monte Carlo seed")->capture_default_str();
    sweep->add_option("--out", sweep_opt.out, "output CSV path (default stdout)");
    sweep->add_option("--cache-dir", sweep_opt.cache_dir, "orbit table cache directory");

    CLI::App* dither =
        app.add_subcommand("dither", "Monte Carlo sweep with the dithered constellation");
    add_channel_flags(dither, dither_opt);
    dither->add_option("--snr", dither_opt.snr, "dB grid: start:stop:step or comma list")
        ->capture_default_str();
    dither->add_option("--samples", dither_opt.samples, "Monte Carlo samples per point")
        ->capture_default_str();
    dither->add_option("--seed", dither_opt.seed, "Monte Carlo seed")->capture_default_str();
    dither->add_option("--out", dither_opt.out, "output CSV path (default stdout)");

    CLI::App* orbits = app.add_subcommand("orbits", "enumerate and cache orbit tables");
    orbits->add_option("--M", orbits_opt.M, "constellation size")->capture_default_str();
    orbits->add_option("--K", orbits_opt.K, "quantizer sectors")->capture_default_str();
    orbits->add_option("--L", orbits_opt.L, "block length")->capture_default_str();
    orbits->add_option("--cache-dir", orbits_opt.cache_dir, "orbit table cache directory");

    CLI::App* verify = app.add_subcommand("verify", "run the invariant verification suite");
    add_channel_flags(verify, verify_opt);
    verify->add_option("--snr", verify_opt.snr, "dB operating point")->capture_default_str();
    verify->add_option("--seed", verify_opt.seed, "seed for randomized spot checks")
        ->capture_default_str();

    CLI::App* ambiguity =
        app.add_subcommand("ambiguity", "classify every outcome vector by ML tie structure");
    add_channel_flags(ambiguity, amb_opt);
    ambiguity->add_option("--snr", amb_opt.snr, "dB operating point")->capture_default_str();
    ambiguity->add_flag("--dither", amb_opt.dither, "use the dithered constellation");
    ambiguity->add_option("--out", amb_opt.out, "output CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (sweep->parsed()) return run_sweep(sweep_opt);
        if (dither->parsed()) return run_sweep(dither_opt);
        if (orbits->parsed()) return run_orbits(orbits_opt);
        if (verify->parsed()) return run_verify(verify_opt);
        if (ambiguity->parsed()) return run_ambiguity(amb_opt);
    } catch (const pqnc::ResourceLimitError& e) {
        std::cerr << "resource limit: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
