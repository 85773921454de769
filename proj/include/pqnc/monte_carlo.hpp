// Simulation-based mutual information for configurations the analytic
// engine cannot reduce (per-slot dither) and as an end-to-end cross-check
// of the analytic path.  Per-sample probabilities are still exact grid
// quantities; only the outer expectation over (X, Phi, noise) is sampled.
#ifndef PQNC_MONTE_CARLO_HPP
#define PQNC_MONTE_CARLO_HPP

#include <cstdint>

#include "pqnc/channel.hpp"
#include "pqnc/types.hpp"

namespace pqnc {

struct McEstimate {
    double value = 0.0;     // bits per symbol (already divided by L-1)
    double std_error = 0.0; // one standard error of `value`
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
};

// Plug-in entropy estimates from the same sample stream.
struct McEntropies {
    double h_out = 0.0, h_out_se = 0.0;   // H(Z) in bits per block
    double h_cond = 0.0, h_cond_se = 0.0; // H(Z|X) in bits per block
};

struct McRunResult {
    McEstimate mi;
    McEntropies entropies;
};

// Samples (x, phi, noise) blocks and averages log2 P(z|x) - log2 P(z).
// Both probabilities are computed analytically per observed z via the
// likelihood table and cached keyed by the constant-shift canonical form
// (constant sector shifts remain exact symmetries under dither).
// Deterministic for fixed (seed, samples): the stream is split into fixed
// batches with derived seeds and merged in batch order.
McRunResult mc_run(const ChannelConfig& cfg, const Constellation& cons, std::uint64_t samples,
                   std::uint64_t seed, int n_phi);

McEstimate mc_mutual_information(const ChannelConfig& cfg, const Constellation& cons,
                                 std::uint64_t samples, std::uint64_t seed, int n_phi);

McEntropies mc_entropy_check(const ChannelConfig& cfg, const Constellation& cons,
                             std::uint64_t samples, std::uint64_t seed, int n_phi);

} // namespace pqnc

#endif
