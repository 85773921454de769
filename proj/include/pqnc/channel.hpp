// Scalar channel model: phase quantizer, phase-error density, sector
// probabilities, block sampling, and the per-node likelihood table that
// every analytic computation downstream consumes.
#ifndef PQNC_CHANNEL_HPP
#define PQNC_CHANNEL_HPP

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "pqnc/types.hpp"

namespace pqnc {

// Sector index floor(arg(c) / (2*pi/K)) with arg taken in [0, 2*pi).
// Boundary hits resolve to the higher-indexed sector; the origin maps to 0.
int sector_of(std::complex<double> c, int K);

// Density of the received-phase error around the transmitted phase for a
// unit-energy symbol at linear Es/N0 = snr, psi in [-pi, pi).  snr == 0
// degenerates to the uniform density 1/(2*pi).
double phase_error_pdf(double psi, double snr);

// P(Z = z | X = x, Phi = phi) for one slot: the phase-error density
// integrated over sector z re-centered on the transmit phase.
double sector_prob(int z, int x, double phi, const ChannelConfig& cfg,
                   const Constellation& cons, int slot = 0);

// Draw one block with Phi ~ U[0, 2*pi) (or a forced value) and i.i.d.
// complex Gaussian noise.
OutcomeVector sample_block(const InputVector& x, const ChannelConfig& cfg,
                           const Constellation& cons, std::mt19937_64& rng);
OutcomeVector sample_block_given_phase(const InputVector& x, double phi,
                                       const ChannelConfig& cfg, const Constellation& cons,
                                       std::mt19937_64& rng);

struct SectorEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t samples = 0;
};

// Monte Carlo estimate of sector_prob by direct simulation; the quadrature
// path is validated against this before anything else uses it.
SectorEstimate mc_sector_oracle(int z, int x, double phi, const ChannelConfig& cfg,
                                const Constellation& cons, std::uint64_t samples,
                                std::uint64_t seed, int slot = 0);

// Sector probabilities tabulated on the uniform phase grid
// phi_n = 2*pi*n/n_phi, n_phi a multiple of K.
//
// Entry (node n, sector z, slot l) equals sector_prob(z, 0, phi_n, slot l).
// Because that value depends only on the start angle of the integration
// interval, each slot is backed by a single cyclic array g of n_phi sector
// integrals with entry(n, z) = g[(z*stride - n) mod n_phi], stored twice
// over so hot loops can read contiguous windows without wrapping.
class LikelihoodTable {
public:
    LikelihoodTable(const ChannelConfig& cfg, const Constellation& cons, int n_phi);

    int sectors() const { return K_; }
    int nodes() const { return n_phi_; }
    int stride() const { return stride_; }      // n_phi / K
    int inputs() const { return M_; }
    int step() const { return a_; }             // sectors per constellation step
    int block_length() const { return L_; }
    bool dithered() const { return dithered_; }
    double node_phase(int n) const { return two_pi * n / n_phi_; }

    // P(z | x = 0, phi_node) for the given slot.
    double value(int node, int z, int slot = 0) const {
        return slot_base(slot)[index(node, z)];
    }
    // P(z | x, phi_node): same table read at sector (z - a*x) mod K.
    double value_for_input(int node, int z, int x, int slot = 0) const {
        int w = (z - a_ * x) % K_;
        if (w < 0) w += K_;
        return value(node, w, slot);
    }
    double row_sum(int node, int slot = 0) const;

    // Raw cyclic arrays (length 2*n_phi).  For sector pattern w the per-node
    // values are base[w*stride + j], j = 0..n_phi-1, enumerating the grid in
    // reverse node order; full-grid sums are order-insensitive.
    const double* sector_integrals(int slot) const { return slot_base(slot); }
    // Same layout for the input-averaged integrand (1/M) * sum_x of the
    // sector integrals shifted by a*x*stride.
    const double* input_averaged(int slot) const {
        return avg_.data() + static_cast<size_t>(slot_index(slot)) * avg_slot_len();
    }

private:
    int K_, M_, a_, L_, n_phi_, stride_;
    bool dithered_;
    std::vector<double> g_;   // per distinct slot, duplicated cyclic arrays
    std::vector<double> avg_;

    size_t slot_len() const { return 2 * static_cast<size_t>(n_phi_); }
    size_t avg_slot_len() const { return 2 * static_cast<size_t>(n_phi_); }
    int slot_index(int slot) const { return dithered_ ? slot : 0; }
    const double* slot_base(int slot) const {
        return g_.data() + static_cast<size_t>(slot_index(slot)) * slot_len();
    }
    size_t index(int node, int z) const {
        int m = (z * stride_ - node) % n_phi_;
        if (m < 0) m += n_phi_;
        return static_cast<size_t>(m);
    }
};

// Builds the table; throws std::invalid_argument unless n_phi is a positive
// multiple of K (the grid must be invariant under 2*pi/K shifts).
LikelihoodTable build_likelihood_table(const ChannelConfig& cfg, const Constellation& cons,
                                       int n_phi);

// Default grid density: dense enough that the periodic trapezoid rule is
// converged to machine precision for every operating point of interest.
inline int default_n_phi(int K) { return 128 * K; }

} // namespace pqnc

#endif
