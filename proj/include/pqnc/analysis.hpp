// Receiver-side analyses: joint (input, phase) maximum-likelihood search
// with tie detection, the probability mass of ambiguous outputs, and two
// reference capacities (coherent MPSK, and a fine-quantizer stand-in for
// the unquantized noncoherent channel).
#ifndef PQNC_ANALYSIS_HPP
#define PQNC_ANALYSIS_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "pqnc/capacity.hpp"
#include "pqnc/channel.hpp"
#include "pqnc/monte_carlo.hpp"
#include "pqnc/types.hpp"

namespace pqnc {

struct MlResult {
    // All (input, phase-grid node) pairs within tie_tol (relative) of the
    // maximum likelihood.
    std::vector<std::pair<InputVector, int>> argmax;
    double max_log2_likelihood = 0.0;
    // Number of distinct input vectors in the argmax set.  A constant
    // input rotation combined with a compensating phase shift never changes
    // the likelihood, so this is always at least M.
    int distinct_inputs = 0;
    // Distinct inputs counted modulo constant rotation x -> x + i mod M.
    // That rotation carries no information (the first symbol acts as the
    // phase reference), so only a second rotation class makes the block
    // genuinely undecidable.
    int rotation_classes = 0;
    bool ambiguous = false; // rotation_classes >= 2
};

// Exhaustive maximization of prod_l P(z_l | x_l, phi_n) over all M^L
// inputs and all grid nodes.
MlResult ml_estimate(const OutcomeVector& z, const ChannelConfig& cfg,
                     const Constellation& cons, const LikelihoodTable& table,
                     double tie_tol = 1e-9);

struct AmbiguityRow {
    OutcomeVector z;
    bool ambiguous = false;
    int tied_inputs = 0;
    int rotation_classes = 0;
    double p_z = 0.0;
};

struct AmbiguityScan {
    std::vector<AmbiguityRow> rows; // one per outcome vector, odometer order
    double mass = 0.0;              // total P(z) over ambiguous z
    std::uint64_t ambiguous_count = 0;
};

// ML-classifies every outcome vector (guarded to small K^L).
AmbiguityScan scan_ambiguity(const ChannelConfig& cfg, const Constellation& cons,
                             const LikelihoodTable& table, double tie_tol = 1e-9);

double ambiguous_output_mass(const ChannelConfig& cfg, const Constellation& cons,
                             const LikelihoodTable& table, double tie_tol = 1e-9);

// Coherent (known-phase, unquantized) MPSK mutual information in bits per
// channel use, by Monte Carlo over the exact likelihood ratio.
McEstimate coherent_capacity(int M, double snr, std::uint64_t samples, std::uint64_t seed);

// Noncoherent capacity at a quantizer fine enough (a = K/M >= 8) to stand
// in for the unquantized receiver.
CapacityPoint unquantized_proxy_capacity(const ChannelConfig& cfg, int n_phi);

} // namespace pqnc

#endif
