#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "pqnc/capacity.hpp"
#include "pqnc/channel.hpp"
#include "pqnc/monte_carlo.hpp"
#include "pqnc/rng.hpp"
#include "pqnc/symmetry.hpp"
#include "pqnc/types.hpp"

using namespace pqnc;

namespace {

ChannelConfig make_cfg(int M, int K, int L, double snr_db) {
    ChannelConfig cfg{M, K, L, db_to_linear(snr_db)};
    cfg.validate();
    return cfg;
}

} // namespace

TEST_CASE("estimates are bit-reproducible for a fixed seed") {
    ChannelConfig cfg = make_cfg(4, 8, 3, 5.0);
    const Constellation cons = Constellation::standard(4);
    const McEstimate a = mc_mutual_information(cfg, cons, 20000, 77, 512);
    const McEstimate b = mc_mutual_information(cfg, cons, 20000, 77, 512);
    CHECK(a.value == b.value);
    CHECK(a.std_error == b.std_error);
    CHECK(a.samples == 20000);
    CHECK(a.seed == 77);

    const McEstimate c = mc_mutual_information(cfg, cons, 20000, 78, 512);
    CHECK(a.value != c.value);

    // The combined runner reports the same estimate as the plain one.
    const McRunResult run = mc_run(cfg, cons, 20000, 77, 512);
    CHECK(run.mi.value == a.value);
    CHECK(run.mi.std_error == a.std_error);
}

TEST_CASE("undithered estimate brackets the analytic capacity") {
    ChannelConfig cfg = make_cfg(4, 8, 3, 5.0);
    const Constellation cons = Constellation::standard(4);
    const CapacityPoint exact = capacity_point(cfg, 1024);
    const McEstimate est = mc_mutual_information(cfg, cons, 100000, 321, 1024);
    CHECK(est.std_error > 0.0);
    CHECK(std::abs(est.value - exact.cap_per_symbol) < 3.0 * est.std_error);
}

TEST_CASE("zero snr estimates exactly zero information") {
    ChannelConfig cfg = make_cfg(4, 8, 3, 0.0);
    cfg.snr = 0.0;
    const McEstimate est =
        mc_mutual_information(cfg, Constellation::standard(4), 20000, 5, 512);
    CHECK(std::abs(est.value) < 1e-12);
    CHECK(est.std_error > 0.0); // floored, never reported as exactly zero
}

TEST_CASE("standard error shrinks like one over root samples") {
    ChannelConfig cfg = make_cfg(4, 8, 3, 5.0);
    const Constellation cons = Constellation::standard(4);
    const McEstimate small = mc_mutual_information(cfg, cons, 40000, 11, 512);
    const McEstimate large = mc_mutual_information(cfg, cons, 160000, 11, 512);
    const double ratio = small.std_error / large.std_error;
    CHECK(ratio > 1.8);
    CHECK(ratio < 2.2);
}

TEST_CASE("entropy decomposition is consistent on the shared sample stream") {
    ChannelConfig cfg = make_cfg(4, 8, 4, 5.0);
    const Constellation cons = Constellation::standard(4);
    const McRunResult run = mc_run(cfg, cons, 30000, 13, 1024);
    CHECK(std::abs((run.entropies.h_out - run.entropies.h_cond) - run.mi.value * 3.0) < 1e-9);

    const McEntropies ent = mc_entropy_check(cfg, cons, 30000, 13, 1024);
    CHECK(ent.h_out == run.entropies.h_out);
    CHECK(ent.h_cond == run.entropies.h_cond);

    // Against analytic values, undithered.
    const CapacityPoint exact = capacity_point(cfg, 1024);
    CHECK(std::abs(ent.h_out - exact.h_out) < 3.0 * ent.h_out_se);
    CHECK(std::abs(ent.h_cond - exact.h_cond) < 3.0 * ent.h_cond_se);
}

TEST_CASE("zero-snr entropies sit at the uniform ceiling") {
    ChannelConfig cfg = make_cfg(4, 8, 3, 0.0);
    cfg.snr = 0.0;
    const McEntropies ent =
        mc_entropy_check(cfg, Constellation::standard(4), 20000, 7, 512);
    CHECK(ent.h_out == doctest::Approx(9.0).epsilon(1e-9));
    CHECK(ent.h_cond == doctest::Approx(9.0).epsilon(1e-9));
}

TEST_CASE("constant-shift canonicalization preserves probabilities, dithered included") {
    for (bool dithered : {false, true}) {
        ChannelConfig cfg = make_cfg(4, 8, 4, 8.0);
        const Constellation cons =
            dithered ? Constellation::dithered(4, 8, 4) : Constellation::standard(4);
        const LikelihoodTable table = build_likelihood_table(cfg, cons, 512);
        const InputVector zeros(4, 0);
        std::mt19937_64 rng(dithered ? 101 : 100);
        for (int t = 0; t < 100; ++t) {
            OutcomeVector w(4);
            for (auto& v : w) v = uniform_int(rng, 8);
            const std::vector<int> canon = shift_canonical(w, 8);
            CHECK(std::abs(block_conditional_prob(w, zeros, table) -
                           block_conditional_prob(canon, zeros, table)) < 1e-12);
            CHECK(std::abs(output_prob_factorized(w, table) -
                           output_prob_factorized(canon, table)) < 1e-12);
        }
    }
}

TEST_CASE("dithered estimate beats the undithered analytic capacity at high snr") {
    ChannelConfig cfg = make_cfg(4, 8, 6, 10.0);
    const CapacityPoint plain = capacity_point(cfg, 1024);
    const McEstimate dith =
        mc_mutual_information(cfg, Constellation::dithered(4, 8, 6), 50000, 2025, 1024);
    CHECK(dith.value - plain.cap_per_symbol > 3.0 * dith.std_error);
}

TEST_CASE("sample floor is enforced") {
    ChannelConfig cfg = make_cfg(4, 8, 2, 5.0);
    CHECK_THROWS_AS(mc_mutual_information(cfg, Constellation::standard(4), 100, 1, 512),
                    std::invalid_argument);
}
