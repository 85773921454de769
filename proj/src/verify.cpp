#include "pqnc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "pqnc/analysis.hpp"
#include "pqnc/capacity.hpp"
#include "pqnc/channel.hpp"
#include "pqnc/monte_carlo.hpp"
#include "pqnc/quadrature.hpp"
#include "pqnc/rng.hpp"
#include "pqnc/symmetry.hpp"

namespace pqnc {

namespace {

struct Ctx {
    ChannelConfig cfg;
    Constellation cons;
    int n_phi;
    std::mt19937_64 rng;

    int ri(int n) { return uniform_int(rng, n); }
    double rangle() { return two_pi * uniform01(rng); }
    OutcomeVector rz() {
        OutcomeVector z(static_cast<size_t>(cfg.L));
        for (auto& v : z) v = ri(cfg.K);
        return z;
    }
    InputVector rx() {
        InputVector x(static_cast<size_t>(cfg.L));
        for (auto& v : x) v = ri(cfg.M);
        return x;
    }
};

PropertyCheck check(const std::string& name, double dev, double tol) {
    return {name, dev, tol, dev <= tol};
}

PropertyCheck pdf_normalization(Ctx& c) {
    // Composite Simpson with a grid unrelated to the sector quadrature.
    const int n = 1 << 16;
    const double h = two_pi / n;
    double dev = 0.0;
    for (double snr : {0.0, 1.0, c.cfg.snr, 100.0}) {
        KahanSum s;
        for (int i = 0; i <= n; ++i) {
            const double psi = -pi + i * h;
            const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            s.add(w * phase_error_pdf(psi, snr));
        }
        dev = std::max(dev, std::abs(s.value() * h / 3.0 - 1.0));
    }
    return check("phase pdf normalization", dev, 1e-9);
}

PropertyCheck pdf_symmetry(Ctx& c) {
    double dev = 0.0;
    for (int t = 0; t < 200; ++t) {
        const double psi = c.rangle() - pi;
        const double snr = t % 5 == 0 ? 0.0 : db_to_linear(20.0 * uniform01(c.rng));
        dev = std::max(dev, std::abs(phase_error_pdf(psi, snr) - phase_error_pdf(-psi, snr)));
    }
    return check("phase pdf mirror symmetry", dev, 1e-13);
}

PropertyCheck pdf_vs_simulation(Ctx& c) {
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
        ChannelConfig cfg = c.cfg;
        cfg.snr = t == 0 ? 0.0 : db_to_linear(-5.0 + 25.0 * uniform01(c.rng));
        const int z = c.ri(cfg.K);
        const int x = c.ri(cfg.M);
        const double phi = c.rangle();
        const double p = sector_prob(z, x, phi, cfg, c.cons);
        const auto mc = mc_sector_oracle(z, x, phi, cfg, c.cons, 100000, c.rng());
        // Standard error from the analytic p, not the empirical one: a
        // tiny-probability sector can see zero hits, which would zero out
        // the empirical error estimate.
        const double se = std::max(std::sqrt(p * (1.0 - p) / static_cast<double>(mc.samples)),
                                   std::numeric_limits<double>::min());
        worst = std::max(worst, std::abs(p - mc.estimate) / se);
    }
    // The statistic is the max over 20 normalized deviations, so the bound
    // is the familywise 3-sigma equivalent (a plain 3.0 would false-alarm
    // on roughly one seed in twenty).
    return check("sector probability vs simulation (sigma units)", worst, 4.0);
}

PropertyCheck scalar_shift(Ctx& c) {
    double dev = 0.0;
    for (int t = 0; t < 200; ++t) {
        const int z = c.ri(c.cfg.K), x = c.ri(c.cfg.M), i = c.ri(c.cfg.K);
        const double phi = c.rangle();
        const double lhs = sector_prob(z, x, phi, c.cfg, c.cons);
        const double rhs =
            sector_prob((z + i) % c.cfg.K, x, phi + i * two_pi / c.cfg.K, c.cfg, c.cons);
        dev = std::max(dev, std::abs(lhs - rhs));
    }
    return check("scalar shift covariance", dev, 1e-12);
}

PropertyCheck scalar_input_shift(Ctx& c) {
    double dev = 0.0;
    const int a = c.cfg.a();
    for (int t = 0; t < 200; ++t) {
        const int z = c.ri(c.cfg.K), x = c.ri(c.cfg.M), i = c.ri(c.cfg.M);
        const double phi = c.rangle();
        const double lhs = sector_prob(z, x, phi, c.cfg, c.cons);
        const double rhs = sector_prob((z + i * a) % c.cfg.K, (x + i) % c.cfg.M, phi, c.cfg, c.cons);
        dev = std::max(dev, std::abs(lhs - rhs));
    }
    return check("scalar input-shift covariance", dev, 1e-12);
}

PropertyCheck scalar_zero_input(Ctx& c) {
    double dev = 0.0;
    const int a = c.cfg.a();
    for (int t = 0; t < 200; ++t) {
        const int z = c.ri(c.cfg.K), x = c.ri(c.cfg.M);
        const double phi = c.rangle();
        const double lhs = sector_prob(z, x, phi, c.cfg, c.cons);
        int w = (z - a * x) % c.cfg.K;
        if (w < 0) w += c.cfg.K;
        dev = std::max(dev, std::abs(lhs - sector_prob(w, 0, phi, c.cfg, c.cons)));
    }
    return check("scalar zero-input reduction", dev, 1e-12);
}

PropertyCheck scalar_coarse(Ctx& c) {
    double dev = 0.0;
    const int a = c.cfg.a();
    for (int t = 0; t < 200; ++t) {
        const int z = c.ri(c.cfg.K), x = c.ri(c.cfg.M);
        const double phi = c.rangle();
        const int q = z / a;
        const double lhs = sector_prob(z, x, phi, c.cfg, c.cons);
        const double rhs =
            sector_prob(z % a, ((x - q) % c.cfg.M + c.cfg.M) % c.cfg.M, phi, c.cfg, c.cons);
        dev = std::max(dev, std::abs(lhs - rhs));
    }
    return check("scalar coarse reduction", dev, 1e-12);
}

PropertyCheck table_rows(const LikelihoodTable& table) {
    double dev = 0.0;
    for (int n = 0; n < table.nodes(); n += 7)
        dev = std::max(dev, std::abs(table.row_sum(n) - 1.0));
    return check("likelihood table row sums", dev, 1e-10);
}

PropertyCheck table_vs_direct(Ctx& c, const LikelihoodTable& table) {
    double dev = 0.0;
    for (int t = 0; t < 100; ++t) {
        const int n = c.ri(table.nodes());
        const int z = c.ri(c.cfg.K);
        const int x = c.ri(c.cfg.M);
        const double direct = sector_prob(z, x, table.node_phase(n), c.cfg, c.cons);
        dev = std::max(dev, std::abs(table.value_for_input(n, z, x) - direct));
    }
    return check("table entries vs direct integration", dev, 1e-12);
}

PropertyCheck block_shift(Ctx& c, const LikelihoodTable& table) {
    double dev = 0.0;
    for (int t = 0; t < 50; ++t) {
        OutcomeVector z = c.rz(), zs = z;
        const InputVector x = c.rx();
        const int i = c.ri(c.cfg.K);
        for (auto& v : zs) v = (v + i) % c.cfg.K;
        dev = std::max(dev, std::abs(block_conditional_prob(z, x, table) -
                                     block_conditional_prob(zs, x, table)));
    }
    return check("block constant-shift invariance", dev, 1e-10);
}

PropertyCheck block_permutation(Ctx& c, const LikelihoodTable& table) {
    double dev = 0.0;
    std::vector<int> perm(static_cast<size_t>(c.cfg.L));
    for (int t = 0; t < 50; ++t) {
        OutcomeVector z = c.rz(), zp(z.size());
        InputVector x = c.rx(), xp(x.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), c.rng);
        for (size_t j = 0; j < z.size(); ++j) {
            zp[j] = z[static_cast<size_t>(perm[j])];
            xp[j] = x[static_cast<size_t>(perm[j])];
        }
        dev = std::max(dev, std::abs(block_conditional_prob(z, x, table) -
                                     block_conditional_prob(zp, xp, table)));
    }
    return check("block joint permutation invariance", dev, 1e-10);
}

PropertyCheck block_zero_input(Ctx& c, const LikelihoodTable& table) {
    double dev = 0.0;
    for (int t = 0; t < 10; ++t) {
        const OutcomeVector z = c.rz();
        const InputVector x = c.rx();
        const double direct = block_conditional_prob_direct(z, x, c.cfg, c.cons, table);
        dev = std::max(dev, std::abs(direct - block_conditional_prob(z, x, table)));
    }
    return check("block zero-input reduction vs direct", dev, 1e-10);
}

PropertyCheck block_coarse(Ctx& c, const LikelihoodTable& table) {
    double dev = 0.0;
    const int a = c.cfg.a();
    for (int t = 0; t < 10; ++t) {
        const OutcomeVector z = c.rz();
        const InputVector x = c.rx();
        OutcomeVector zr(z.size());
        InputVector xs(x.size());
        for (size_t j = 0; j < z.size(); ++j) {
            const int q = z[j] / a;
            zr[j] = z[j] % a;
            xs[j] = ((x[j] - q) % c.cfg.M + c.cfg.M) % c.cfg.M;
        }
        const double direct = block_conditional_prob_direct(z, x, c.cfg, c.cons, table);
        dev = std::max(dev, std::abs(direct - block_conditional_prob(zr, xs, table)));
    }
    return check("block coarse reduction vs direct", dev, 1e-10);
}

PropertyCheck output_shift(Ctx& c, const LikelihoodTable& table) {
    double dev = 0.0;
    for (int t = 0; t < 50; ++t) {
        OutcomeVector z = c.rz(), zs = z;
        const int i = c.ri(c.cfg.K);
        for (auto& v : zs) v = (v + i) % c.cfg.K;
        dev = std::max(dev, std::abs(output_prob_factorized(z, table) -
                                     output_prob_factorized(zs, table)));
    }
    return check("output constant-shift invariance", dev, 1e-10);
}

PropertyCheck output_permutation(Ctx& c, const LikelihoodTable& table) {
    double dev = 0.0;
    for (int t = 0; t < 50; ++t) {
        OutcomeVector z = c.rz(), zp = z;
        std::shuffle(zp.begin(), zp.end(), c.rng);
        dev = std::max(dev, std::abs(output_prob_factorized(z, table) -
                                     output_prob_factorized(zp, table)));
    }
    return check("output permutation invariance", dev, 1e-10);
}

PropertyCheck output_coarse(Ctx& c, const LikelihoodTable& table) {
    double dev = 0.0;
    const int a = c.cfg.a();
    for (int t = 0; t < 50; ++t) {
        OutcomeVector z = c.rz(), zr = z;
        for (auto& v : zr) v %= a;
        dev = std::max(dev, std::abs(output_prob_factorized(z, table) -
                                     output_prob_factorized(zr, table)));
    }
    return check("output coarse projection", dev, 1e-10);
}

PropertyCheck conditional_entropy_constancy(Ctx& c, const LikelihoodTable& table,
                                            const ConditionalOrbitTable& orbits) {
    const double h0 = conditional_entropy(c.cfg, table, orbits);
    double dev = 0.0;
    double zspace = 1.0;
    for (int l = 0; l < c.cfg.L; ++l) zspace *= c.cfg.K;
    const auto nz = static_cast<std::uint64_t>(zspace);
    for (int t = 0; t < 5; ++t) {
        const InputVector x = c.rx();
        OutcomeVector z(static_cast<size_t>(c.cfg.L), 0);
        KahanSum h;
        for (std::uint64_t zi = 0; zi < nz; ++zi) {
            const double p = block_conditional_prob(z, x, table);
            if (p > 1e-300) h.add(p * std::log2(p));
            for (int l = 0; l < c.cfg.L; ++l) {
                if (++z[static_cast<size_t>(l)] < c.cfg.K) break;
                z[static_cast<size_t>(l)] = 0;
            }
        }
        dev = std::max(dev, std::abs(-h.value() - h0));
    }
    return check("per-input output entropy constancy", dev, 1e-10);
}

PropertyCheck orbit_partitions(Ctx& c, const ConditionalOrbitTable& cond,
                               const OutputOrbitTable& out) {
    std::uint64_t space = 1;
    for (int l = 0; l < c.cfg.L; ++l) space *= static_cast<std::uint64_t>(c.cfg.K);
    std::uint64_t sc = 0, so = 0;
    for (auto v : cond.counts) sc += v;
    for (auto v : out.counts) so += v;
    const double dev = std::abs(static_cast<double>(sc) - static_cast<double>(space)) +
                       std::abs(static_cast<double>(so) - static_cast<double>(space));
    return check("orbit partitions tile the outcome space", dev, 0.0);
}

PropertyCheck conditional_orbit_constancy(Ctx& c, const LikelihoodTable& table) {
    // Random orbit members must match their representative's probability.
    double dev = 0.0;
    const InputVector x0(static_cast<size_t>(c.cfg.L), 0);
    for (int t = 0; t < 20; ++t) {
        const OutcomeVector z = c.rz();
        const auto canon = canonical_conditional(z, c.cfg.K);
        dev = std::max(dev, std::abs(block_conditional_prob(z, x0, table) -
                                     block_conditional_prob(canon.canonical, x0, table)));
    }
    return check("conditional probability constant on orbits", dev, 1e-10);
}

PropertyCheck output_orbit_constancy(Ctx& c, const LikelihoodTable& table) {
    double dev = 0.0;
    for (int t = 0; t < 20; ++t) {
        const OutcomeVector z = c.rz();
        const std::vector<int> rep = canonical_output(z, c.cfg.K, c.cfg.a());
        dev = std::max(dev, std::abs(output_prob_factorized(z, table) -
                                     output_prob_factorized(rep, table)));
    }
    return check("output probability constant on orbits", dev, 1e-10);
}

PropertyCheck input_reduction_mass(Ctx& c, const OutputOrbitTable& out) {
    double dev = 0.0;
    double mpow = 1.0;
    for (int l = 0; l < c.cfg.L; ++l) mpow *= c.cfg.M;
    for (size_t i = 0; i < out.count(); ++i) {
        const auto rep = out.rep(i);
        std::vector<int> zr(rep.begin(), rep.end());
        const InputReduction red = reduce_inputs(zr, c.cfg.M);
        std::uint64_t total = 0;
        for (auto m : red.mults) total += m;
        dev = std::max(dev, std::abs(static_cast<double>(total) - mpow));
    }
    return check("input reduction multiplicities sum to M^L", dev, 0.0);
}

PropertyCheck dual_output_routes(Ctx& c, const LikelihoodTable& table,
                                 const ConditionalOrbitTable& cond_orbits,
                                 const OutputOrbitTable& out) {
    const ConditionalProbTable cond = compute_conditional_probs(table, cond_orbits);
    double dev = 0.0;
    for (size_t i = 0; i < out.count(); ++i) {
        const auto rep = out.rep(i);
        std::vector<int> zr(rep.begin(), rep.end());
        dev = std::max(dev, std::abs(output_prob(zr, c.cfg, table, cond) -
                                     output_prob_factorized(zr, table)));
    }
    return check("output probability dual routes", dev, 1e-10);
}

PropertyCheck conditional_mass(const LikelihoodTable& table,
                               const ConditionalOrbitTable& orbits) {
    const ConditionalProbTable cond = compute_conditional_probs(table, orbits);
    return check("conditional probabilities sum to 1", std::abs(cond.total_mass - 1.0), 1e-8);
}

PropertyCheck oracle_equivalence(Ctx& c) {
    ChannelConfig cfg = c.cfg;
    cfg.L = std::min(cfg.L, 3);
    const int n_phi = std::min(c.n_phi, default_n_phi(cfg.K));
    const BruteForceResult bf = brute_force_mutual_information(cfg, n_phi);
    const CapacityPoint pt = capacity_point(cfg, n_phi);
    const double dev = std::max({std::abs(bf.h_out - pt.h_out), std::abs(bf.h_cond - pt.h_cond),
                                 std::abs(bf.mi - pt.mi)});
    return check("reduced engine vs brute-force reference", dev, 1e-9);
}

PropertyCheck quadrature_doubling(Ctx& c) {
    ChannelConfig cfg = c.cfg;
    cfg.L = std::min(cfg.L, 4);
    const CapacityPoint p1 = capacity_point(cfg, c.n_phi);
    const CapacityPoint p2 = capacity_point(cfg, 2 * c.n_phi);
    return check("phase-grid doubling stability", std::abs(p1.mi - p2.mi), 1e-7);
}

} // namespace

VerifyReport run_verification(int M, int K, int L, double snr_db, int n_phi,
                              std::uint64_t seed) {
    ChannelConfig cfg{M, K, L, db_to_linear(snr_db)};
    cfg.validate();
    if (n_phi <= 0 || n_phi % K != 0)
        throw std::invalid_argument("n_phi must be a positive multiple of K");
    double zspace = 1.0;
    for (int l = 0; l < L; ++l) zspace *= K;
    if (zspace > 1e6) throw ResourceLimitError("verification requires K^L <= 1e6");

    Ctx c{cfg, Constellation::standard(M), n_phi, std::mt19937_64(derive_seed(seed, 0))};
    const LikelihoodTable table = build_likelihood_table(cfg, c.cons, n_phi);
    const ConditionalOrbitTable cond = enumerate_conditional_orbits(K, L);
    const OutputOrbitTable out = enumerate_output_orbits(K, M, L);

    VerifyReport rep;
    rep.checks.push_back(pdf_normalization(c));
    rep.checks.push_back(pdf_symmetry(c));
    rep.checks.push_back(pdf_vs_simulation(c));
    rep.checks.push_back(scalar_shift(c));
    rep.checks.push_back(scalar_input_shift(c));
    rep.checks.push_back(scalar_zero_input(c));
    rep.checks.push_back(scalar_coarse(c));
    rep.checks.push_back(table_rows(table));
    rep.checks.push_back(table_vs_direct(c, table));
    rep.checks.push_back(block_shift(c, table));
    rep.checks.push_back(block_permutation(c, table));
    rep.checks.push_back(block_zero_input(c, table));
    rep.checks.push_back(block_coarse(c, table));
    rep.checks.push_back(output_shift(c, table));
    rep.checks.push_back(output_permutation(c, table));
    rep.checks.push_back(output_coarse(c, table));
    rep.checks.push_back(conditional_entropy_constancy(c, table, cond));
    rep.checks.push_back(orbit_partitions(c, cond, out));
    rep.checks.push_back(conditional_orbit_constancy(c, table));
    rep.checks.push_back(output_orbit_constancy(c, table));
    rep.checks.push_back(input_reduction_mass(c, out));
    rep.checks.push_back(dual_output_routes(c, table, cond, out));
    rep.checks.push_back(conditional_mass(table, cond));
    rep.checks.push_back(oracle_equivalence(c));
    rep.checks.push_back(quadrature_doubling(c));
    return rep;
}

} // namespace pqnc
