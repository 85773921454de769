#include "doctest.h"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "pqnc/channel.hpp"
#include "pqnc/quadrature.hpp"
#include "pqnc/rng.hpp"
#include "pqnc/types.hpp"

using namespace pqnc;

namespace {

// Simpson-rule integral of the phase density over [-pi, pi); independent of
// the Gauss-Legendre machinery used by the implementation.
double simpson_pdf_integral(double snr, int n) {
    const double h = two_pi / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * phase_error_pdf(-pi + i * h, snr);
    }
    return acc * h / 3.0;
}

ChannelConfig make_cfg(int M, int K, int L, double snr_db) {
    ChannelConfig cfg{M, K, L, db_to_linear(snr_db)};
    cfg.validate();
    return cfg;
}

} // namespace

TEST_CASE("sector index of a complex point") {
    CHECK(sector_of({1.0, 0.0}, 8) == 0);
    CHECK(sector_of({0.0, 1.0}, 8) == 2);
    CHECK(sector_of({-1.0, -1e-12}, 8) == 4); // arg just above pi
    CHECK(sector_of({-1.0, 1e-12}, 8) == 3);  // arg just below pi
    CHECK(sector_of({0.0, 0.0}, 8) == 0);     // origin pinned to sector 0
    CHECK(sector_of({1.0, -1e-12}, 8) == 7);  // arg just below 2*pi

    // Points exactly on a boundary belong to the higher-indexed sector.
    // The positive-imaginary and negative-real axes are exact in atan2 and
    // land on sector boundaries for K=8.
    CHECK(sector_of({0.0, 1.0}, 8) == 2);
    CHECK(sector_of({-1.0, 0.0}, 8) == 4);
    CHECK(sector_of({0.0, 2.5}, 4) == 1);
    CHECK(sector_of({-3.0, 0.0}, 4) == 2);

    for (int k = 0; k < 16; ++k) {
        const double ang = (k + 0.5) * two_pi / 16.0;
        CHECK(sector_of({std::cos(ang), std::sin(ang)}, 16) == k);
    }
}

TEST_CASE("phase error density: uniform at zero snr") {
    for (double psi : {-pi, -1.0, 0.0, 0.5, 3.0})
        CHECK(phase_error_pdf(psi, 0.0) == doctest::Approx(1.0 / two_pi).epsilon(1e-14));
}

TEST_CASE("phase error density: mirror symmetry") {
    std::mt19937_64 rng(99);
    for (int t = 0; t < 500; ++t) {
        const double psi = pi * (2.0 * uniform01(rng) - 1.0);
        const double snr = db_to_linear(30.0 * uniform01(rng) - 10.0);
        CHECK(phase_error_pdf(psi, snr) == doctest::Approx(phase_error_pdf(-psi, snr)).epsilon(1e-13));
    }
}

TEST_CASE("phase error density: unit normalization") {
    for (double snr_db : {-10.0, 0.0, 5.0, 10.0, 20.0, 30.0}) {
        const double integral = simpson_pdf_integral(db_to_linear(snr_db), 1 << 15);
        CHECK(std::abs(integral - 1.0) < 1e-9);
    }
    CHECK(std::abs(simpson_pdf_integral(0.0, 1 << 15) - 1.0) < 1e-12);
}

TEST_CASE("sector probability: uniform at zero snr and row-stochastic") {
    ChannelConfig cfg = make_cfg(4, 8, 2, 5.0);
    const Constellation cons = Constellation::standard(4);

    ChannelConfig cfg0 = cfg;
    cfg0.snr = 0.0;
    for (int z = 0; z < 8; ++z)
        CHECK(sector_prob(z, 1, 0.7, cfg0, cons) == doctest::Approx(1.0 / 8).epsilon(1e-12));

    std::mt19937_64 rng(7);
    for (int t = 0; t < 20; ++t) {
        const double phi = two_pi * uniform01(rng);
        const int x = uniform_int(rng, 4);
        double total = 0.0;
        for (int z = 0; z < 8; ++z) total += sector_prob(z, x, phi, cfg, cons);
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("sector probability: shift covariance in (z, phi)") {
    ChannelConfig cfg = make_cfg(4, 8, 2, 10.0);
    const Constellation cons = Constellation::standard(4);
    std::mt19937_64 rng(11);
    for (int t = 0; t < 200; ++t) {
        const int z = uniform_int(rng, 8), x = uniform_int(rng, 4), i = uniform_int(rng, 8);
        const double phi = two_pi * uniform01(rng);
        const double lhs = sector_prob(z, x, phi, cfg, cons);
        const double rhs = sector_prob((z + i) % 8, x, phi + i * two_pi / 8, cfg, cons);
        CHECK(std::abs(lhs - rhs) < 1e-12);
    }
}

TEST_CASE("sector probability: input rotation moves the outcome by a sectors") {
    ChannelConfig cfg = make_cfg(4, 8, 2, 10.0);
    const Constellation cons = Constellation::standard(4);
    std::mt19937_64 rng(13);
    for (int t = 0; t < 200; ++t) {
        const int z = uniform_int(rng, 8), x = uniform_int(rng, 4), i = uniform_int(rng, 4);
        const double phi = two_pi * uniform01(rng);
        const double lhs = sector_prob(z, x, phi, cfg, cons);
        const double rhs = sector_prob((z + 2 * i) % 8, (x + i) % 4, phi, cfg, cons);
        CHECK(std::abs(lhs - rhs) < 1e-12);
    }
}

TEST_CASE("sector probability matches simulation at a pinned operating point") {
    // One high-confidence spot check: z=0, x=0, phi=pi/8, K=8, snr=10 dB,
    // 10^6 samples.
    ChannelConfig cfg = make_cfg(4, 8, 2, 10.0);
    const Constellation cons = Constellation::standard(4);
    const double p = sector_prob(0, 0, pi / 8, cfg, cons);
    const SectorEstimate est = mc_sector_oracle(0, 0, pi / 8, cfg, cons, 1000000, 2024);
    const double se = std::sqrt(p * (1.0 - p) / 1e6);
    CHECK(std::abs(p - est.estimate) < 3.0 * se);
    CHECK(est.std_error > 0.0);
    CHECK(est.samples == 1000000);
}

TEST_CASE("simulation oracle: uniform at zero snr, rejects tiny runs") {
    ChannelConfig cfg = make_cfg(4, 8, 2, 0.0);
    cfg.snr = 0.0;
    const Constellation cons = Constellation::standard(4);
    const SectorEstimate est = mc_sector_oracle(3, 2, 1.1, cfg, cons, 100000, 5);
    CHECK(std::abs(est.estimate - 0.125) < 3.0 * std::sqrt(0.125 * 0.875 / 1e5));
    CHECK_THROWS_AS(mc_sector_oracle(0, 0, 0.0, cfg, cons, 100, 5), std::invalid_argument);
}

TEST_CASE("block sampling: noiseless blocks land mid-sector") {
    ChannelConfig cfg = make_cfg(4, 8, 3, 60.0);
    const Constellation cons = Constellation::standard(4);
    std::mt19937_64 rng(21);
    // With phi = pi/K every symbol sits in the middle of sector a*x_l.
    for (int t = 0; t < 50; ++t) {
        InputVector x(3);
        for (auto& v : x) v = uniform_int(rng, 4);
        const OutcomeVector z = sample_block_given_phase(x, pi / 8, cfg, cons, rng);
        for (int l = 0; l < 3; ++l) CHECK(z[l] == 2 * x[l]);
    }
}

TEST_CASE("block sampling: per-slot frequencies match sector probabilities") {
    ChannelConfig cfg = make_cfg(4, 8, 2, 5.0);
    const Constellation cons = Constellation::standard(4);
    const InputVector x = {1, 3};
    const double phi = 0.9;
    const int n = 100000;
    std::mt19937_64 rng(31);
    std::vector<int> counts(8, 0);
    for (int i = 0; i < n; ++i) ++counts[sample_block_given_phase(x, phi, cfg, cons, rng)[0]];
    for (int z = 0; z < 8; ++z) {
        const double p = sector_prob(z, x[0], phi, cfg, cons);
        const double se = std::sqrt(std::max(p * (1.0 - p) / n, 1e-12));
        CHECK(std::abs(counts[z] / double(n) - p) < 4.0 * se);
    }
}

TEST_CASE("block sampling: random carrier phase makes outcomes uniform") {
    ChannelConfig cfg = make_cfg(4, 8, 2, 8.0);
    const Constellation cons = Constellation::standard(4);
    const InputVector x = {2, 0};
    const int n = 100000;
    std::mt19937_64 rng(41);
    std::vector<int> counts(8, 0);
    for (int i = 0; i < n; ++i) ++counts[sample_block(x, cfg, cons, rng)[1]];
    const double se = std::sqrt(0.125 * 0.875 / n);
    for (int z = 0; z < 8; ++z)
        CHECK(std::abs(counts[z] / double(n) - 0.125) < 4.0 * se);
}

TEST_CASE("likelihood table: row sums, direct-integration agreement, lookup congruence") {
    ChannelConfig cfg = make_cfg(4, 8, 2, 5.0);
    const Constellation cons = Constellation::standard(4);
    const LikelihoodTable table = build_likelihood_table(cfg, cons, 256);

    for (int n = 0; n < table.nodes(); ++n)
        CHECK(std::abs(table.row_sum(n) - 1.0) < 1e-10);

    std::mt19937_64 rng(51);
    for (int t = 0; t < 200; ++t) {
        const int n = uniform_int(rng, table.nodes());
        const int z = uniform_int(rng, 8);
        const int x = uniform_int(rng, 4);
        CHECK(std::abs(table.value_for_input(n, z, x) -
                       sector_prob(z, x, table.node_phase(n), cfg, cons)) < 1e-12);
    }

    // (z=2, x=1) reads the same entry as (z=0, x=0): (2 - 2*1) mod 8 = 0.
    for (int n = 0; n < table.nodes(); n += 17)
        CHECK(table.value_for_input(n, 2, 1) == table.value(n, 0));
}

TEST_CASE("likelihood table: per-slot dither offsets") {
    ChannelConfig cfg = make_cfg(4, 8, 3, 7.0);
    const Constellation cons = Constellation::dithered(4, 8, 3);
    const LikelihoodTable table = build_likelihood_table(cfg, cons, 256);
    CHECK(table.dithered());

    std::mt19937_64 rng(61);
    for (int t = 0; t < 200; ++t) {
        const int n = uniform_int(rng, table.nodes());
        const int z = uniform_int(rng, 8);
        const int slot = uniform_int(rng, 3);
        CHECK(std::abs(table.value(n, z, slot) -
                       sector_prob(z, 0, table.node_phase(n), cfg, cons, slot)) < 1e-12);
    }
}

TEST_CASE("likelihood table: grid size must be a positive multiple of K") {
    ChannelConfig cfg = make_cfg(4, 8, 2, 5.0);
    const Constellation cons = Constellation::standard(4);
    CHECK_THROWS_AS(build_likelihood_table(cfg, cons, 100), std::invalid_argument);
    CHECK_THROWS_AS(build_likelihood_table(cfg, cons, 0), std::invalid_argument);
    CHECK_THROWS_AS(build_likelihood_table(cfg, cons, -8), std::invalid_argument);
    CHECK_NOTHROW(build_likelihood_table(cfg, cons, 8));
}

TEST_CASE("configuration and vector validation") {
    ChannelConfig bad{3, 8, 2, 1.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument); // K not a multiple of M
    bad = {4, 8, 1, 1.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument); // L too small
    bad = {4, 8, 2, -1.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument); // negative snr
    bad = {4, 8, 2, std::nan("")};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    ChannelConfig cfg = make_cfg(4, 8, 2, 0.0);
    CHECK_THROWS_AS(validate_outcome({0, 8}, cfg), std::invalid_argument);
    CHECK_THROWS_AS(validate_outcome({0}, cfg), std::invalid_argument);
    CHECK_THROWS_AS(validate_input({0, 4}, cfg), std::invalid_argument);
    CHECK_NOTHROW(validate_outcome({7, 0}, cfg));
    CHECK_NOTHROW(validate_input({3, 0}, cfg));

    const Constellation dith = Constellation::dithered(4, 8, 3);
    CHECK(dith.is_dithered());
    CHECK(dith.offset(0) == 0.0);
    CHECK(dith.offset(2) == doctest::Approx(2.0 * two_pi / 24.0));
    CHECK(!Constellation::standard(4).is_dithered());
}
