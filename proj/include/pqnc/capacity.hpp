// Analytic mutual-information engine.  H(Z|X) reduces to one entropy sum
// over conditional-orbit representatives conditioned on the all-zero input;
// H(Z) reduces to output-orbit representatives whose probabilities are
// assembled two independent ways (input-representative sum vs factorized
// per-slot average) and cross-checked on every evaluation.
#ifndef PQNC_CAPACITY_HPP
#define PQNC_CAPACITY_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "pqnc/channel.hpp"
#include "pqnc/symmetry.hpp"
#include "pqnc/types.hpp"

namespace pqnc {

// Mean over the phase grid of the per-slot likelihood product for the
// sector pattern w = (z - a*x) mod K, i.e. P(z | x).
double block_conditional_prob(std::span<const int> z, std::span<const int> x,
                              const LikelihoodTable& table);

// Same quantity without the shift reduction: probabilities integrated per
// (x, node) directly.  Slow; exists as an independent route for validation.
double block_conditional_prob_direct(std::span<const int> z, std::span<const int> x,
                                     const ChannelConfig& cfg, const Constellation& cons,
                                     const LikelihoodTable& table);

// P(rep | x = 0) for every conditional-orbit representative, with a
// canonical-key index so arbitrary sector patterns can be resolved to
// their representative's probability.
struct ConditionalProbTable {
    std::vector<double> prob;          // aligned with the orbit table
    std::vector<std::uint64_t> keys;   // packed canonical reps, ascending
    std::vector<std::uint32_t> order;  // keys[i] belongs to rep order[i]

    double lookup_sorted(std::span<const int> w_sorted_canonical) const;
    double total_mass = 0.0;           // sum of count*prob; 1 up to quadrature error
};

ConditionalProbTable compute_conditional_probs(const LikelihoodTable& table,
                                               const ConditionalOrbitTable& orbits);

// H(Z | X) in bits per block.  Equals H(Z | x=0) because per-input output
// entropies coincide under the shift symmetry.
double conditional_entropy(const ChannelConfig& cfg, const LikelihoodTable& table,
                           const ConditionalOrbitTable& orbits);

// P(z_rep) via the reduced input sum: (1/M^L) * sum over input
// representatives of mult * P(rep(z - a*x) | x=0).
double output_prob(std::span<const int> z_rep, const ChannelConfig& cfg,
                   const LikelihoodTable& table, const ConditionalProbTable& cond);

// P(z) via the conditional-independence factorization: the phase-grid mean
// of the product of input-averaged slot likelihoods.  Valid for any z (not
// just representatives) and under dither.
double output_prob_factorized(std::span<const int> z, const LikelihoodTable& table);

// H(Z) in bits per block over output-orbit representatives; every
// representative's probability is computed by both routes and must agree
// to 1e-9 relative.
double output_entropy(const ChannelConfig& cfg, const LikelihoodTable& table,
                      const OutputOrbitTable& out, const ConditionalProbTable& cond);

// Orbit tables for fixed (M, K, L) reused across an SNR sweep.
class CapacityWorkspace {
public:
    CapacityWorkspace(int M, int K, int L, int n_phi);
    CapacityWorkspace(int M, int K, int L, int n_phi, ConditionalOrbitTable cond,
                      OutputOrbitTable out);

    CapacityPoint at_snr(double snr_linear) const;
    CapacityPoint at_snr_db(double snr_db) const {
        CapacityPoint pt = at_snr(db_to_linear(snr_db));
        pt.snr_db = snr_db; // keep the requested grid value exact in reports
        return pt;
    }

    const ConditionalOrbitTable& conditional_orbits() const { return cond_; }
    const OutputOrbitTable& output_orbits() const { return out_; }
    int n_phi() const { return n_phi_; }

private:
    int M_, K_, L_, n_phi_;
    ConditionalOrbitTable cond_;
    OutputOrbitTable out_;
};

// One-shot evaluation at cfg.snr (undithered).
CapacityPoint capacity_point(const ChannelConfig& cfg, int n_phi);

struct SweepResult {
    std::vector<CapacityPoint> points;
    std::vector<std::string> warnings; // e.g. non-monotone capacity between grid points
    std::vector<std::string> errors;   // per-point failures; sweep continues
};

SweepResult snr_sweep(int M, int K, int L, std::span<const double> snr_db, int n_phi);

// Full-enumeration reference: builds per-input tables by direct integration
// and sums over every (z, x) pair with no orbit or shift reduction.
// Guarded to small spaces; this is the oracle the reduced engine is held to.
struct BruteForceResult {
    double h_out = 0.0;
    double h_cond = 0.0;
    double mi = 0.0;
};

BruteForceResult brute_force_mutual_information(const ChannelConfig& cfg, int n_phi);

} // namespace pqnc

#endif
