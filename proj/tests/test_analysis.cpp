#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "pqnc/analysis.hpp"
#include "pqnc/capacity.hpp"
#include "pqnc/channel.hpp"
#include "pqnc/rng.hpp"
#include "pqnc/types.hpp"

using namespace pqnc;

namespace {

ChannelConfig make_cfg(int M, int K, int L, double snr_db) {
    ChannelConfig cfg{M, K, L, db_to_linear(snr_db)};
    cfg.validate();
    return cfg;
}

bool argmax_contains_input(const MlResult& res, const InputVector& x) {
    return std::any_of(res.argmax.begin(), res.argmax.end(),
                       [&](const auto& pair) { return pair.first == x; });
}

} // namespace

TEST_CASE("maximum-likelihood search: rotation family is always tied") {
    ChannelConfig cfg = make_cfg(4, 8, 3, 20.0);
    const Constellation cons = Constellation::standard(4);
    const LikelihoodTable table = build_likelihood_table(cfg, cons, 512);

    // Rotating every input symbol and compensating the phase never changes
    // the block likelihood, so the tie set always spans M inputs even for
    // perfectly decodable outputs.
    const MlResult clean = ml_estimate(OutcomeVector{0, 2, 4}, cfg, cons, table);
    CHECK(clean.distinct_inputs == 4);
    CHECK(clean.rotation_classes == 1);
    CHECK(!clean.ambiguous);
    CHECK(argmax_contains_input(clean, InputVector{0, 1, 2}));
}

TEST_CASE("maximum-likelihood search: genuinely ambiguous outputs exist undithered") {
    ChannelConfig cfg = make_cfg(4, 8, 3, 20.0);
    const Constellation cons = Constellation::standard(4);
    const LikelihoodTable table = build_likelihood_table(cfg, cons, 512);

    const MlResult res = ml_estimate(OutcomeVector{0, 0, 1}, cfg, cons, table);
    CHECK(res.ambiguous);
    CHECK(res.rotation_classes >= 2);
    CHECK(res.distinct_inputs >= 8);
    CHECK(!res.argmax.empty());
    CHECK(res.distinct_inputs == 4 * res.rotation_classes);
}

TEST_CASE("maximum-likelihood search: dither removes the extra tie classes") {
    ChannelConfig cfg = make_cfg(4, 8, 3, 20.0);
    const Constellation cons = Constellation::dithered(4, 8, 3);
    const LikelihoodTable table = build_likelihood_table(cfg, cons, 512);

    const MlResult res = ml_estimate(OutcomeVector{0, 0, 1}, cfg, cons, table);
    CHECK(!res.ambiguous);
    CHECK(res.rotation_classes == 1);
    CHECK(res.distinct_inputs == 4);
}

TEST_CASE("ambiguity flag is a function of the output orbit") {
    ChannelConfig cfg = make_cfg(4, 8, 3, 10.0);
    const Constellation cons = Constellation::standard(4);
    const LikelihoodTable table = build_likelihood_table(cfg, cons, 512);
    std::mt19937_64 rng(43);
    for (int t = 0; t < 15; ++t) {
        OutcomeVector z(3);
        for (auto& v : z) v = uniform_int(rng, 8);
        const MlResult base = ml_estimate(z, cfg, cons, table);

        OutcomeVector shifted = z;
        const int i = uniform_int(rng, 8);
        for (auto& v : shifted) v = (v + i) % 8;
        const MlResult shift_res = ml_estimate(shifted, cfg, cons, table);
        CHECK(shift_res.ambiguous == base.ambiguous);
        CHECK(shift_res.rotation_classes == base.rotation_classes);
        CHECK(shift_res.distinct_inputs == base.distinct_inputs);

        OutcomeVector perm = z;
        std::shuffle(perm.begin(), perm.end(), rng);
        const MlResult perm_res = ml_estimate(perm, cfg, cons, table);
        CHECK(perm_res.ambiguous == base.ambiguous);
        CHECK(perm_res.rotation_classes == base.rotation_classes);
    }
}

TEST_CASE("ambiguity scan: positive shrinking mass, empty under dither") {
    const Constellation cons = Constellation::standard(4);
    ChannelConfig hi = make_cfg(4, 8, 3, 20.0);
    const LikelihoodTable t_hi = build_likelihood_table(hi, cons, 512);
    const AmbiguityScan scan_hi = scan_ambiguity(hi, cons, t_hi);

    CHECK(scan_hi.rows.size() == 512);
    CHECK(scan_hi.ambiguous_count > 0);
    CHECK(scan_hi.mass > 0.0);
    CHECK(scan_hi.mass == doctest::Approx(ambiguous_output_mass(hi, cons, t_hi)));

    // Unambiguous outputs still carry the M-fold rotation tie; ambiguous
    // ones carry at least twice that.
    for (const auto& row : scan_hi.rows) {
        if (row.ambiguous)
            CHECK(row.tied_inputs >= 8);
        else
            CHECK(row.tied_inputs == 4);
    }

    ChannelConfig lo = make_cfg(4, 8, 3, 5.0);
    const LikelihoodTable t_lo = build_likelihood_table(lo, cons, 512);
    CHECK(scan_ambiguity(lo, cons, t_lo).mass > scan_hi.mass);

    const Constellation dith = Constellation::dithered(4, 8, 3);
    const LikelihoodTable t_dith = build_likelihood_table(hi, dith, 512);
    const AmbiguityScan scan_dith = scan_ambiguity(hi, dith, t_dith);
    CHECK(scan_dith.ambiguous_count == 0);
    CHECK(scan_dith.mass == 0.0);
}

TEST_CASE("search guards and constellation mismatch") {
    ChannelConfig cfg = make_cfg(4, 8, 3, 10.0);
    const Constellation cons = Constellation::standard(4);
    const LikelihoodTable table = build_likelihood_table(cfg, cons, 512);
    CHECK_THROWS_AS(ml_estimate(OutcomeVector{0, 0, 1}, cfg,
                                Constellation::dithered(4, 8, 3), table),
                    std::invalid_argument);

    ChannelConfig big = make_cfg(4, 16, 5, 10.0); // 16^5 outcome vectors
    const Constellation cons16 = Constellation::standard(4);
    const LikelihoodTable table16 = build_likelihood_table(big, cons16, 512);
    CHECK_THROWS_AS(scan_ambiguity(big, cons16, table16), ResourceLimitError);

    ChannelConfig huge = make_cfg(4, 8, 16, 10.0); // 4^16 inputs in the search
    const Constellation cons8 = Constellation::standard(4);
    const LikelihoodTable table8 = build_likelihood_table(huge, cons8, 512);
    OutcomeVector z(16, 0);
    CHECK_THROWS_AS(ml_estimate(z, huge, cons8, table8), ResourceLimitError);
}

TEST_CASE("coherent reference: saturation, zero point, monotone trend") {
    const McEstimate sat = coherent_capacity(4, db_to_linear(20.0), 200000, 31);
    CHECK(std::abs(sat.value - 2.0) < 0.01);

    const McEstimate zero = coherent_capacity(4, 0.0, 100000, 32);
    CHECK(std::abs(zero.value) < 1e-12);
    CHECK(zero.std_error > 0.0);

    double prev = -1.0, prev_se = 0.0;
    for (double db : {-5.0, 0.0, 5.0, 10.0, 20.0}) {
        const McEstimate est = coherent_capacity(4, db_to_linear(db), 100000, 33);
        CHECK(est.value > prev - 3.0 * (est.std_error + prev_se));
        prev = est.value;
        prev_se = est.std_error;
    }
}
