// Core parameter and result types shared by every component.
#ifndef PQNC_TYPES_HPP
#define PQNC_TYPES_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pqnc {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

// Thrown when a requested computation would exceed the configured size
// limits (e.g. brute-force enumeration of an astronomically large space).
// The CLI maps it to a dedicated exit code.
class ResourceLimitError : public std::runtime_error {
public:
    explicit ResourceLimitError(const std::string& what) : std::runtime_error(what) {}
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

// Uniform MPSK input over a block of L symbols, observed through a K-sector
// phase quantizer after an unknown rotation held constant across the block.
// snr is the linear per-symbol Es/N0; snr == 0 means noise only.
struct ChannelConfig {
    int M = 4;        // constellation size
    int K = 8;        // quantizer sectors per revolution
    int L = 2;        // block length
    double snr = 1.0; // linear Es/N0

    int a() const { return K / M; }                 // sectors per constellation step
    double sector_width() const { return two_pi / K; }

    // Scaled model: unit-variance noise per dimension, signal amplitude
    // sqrt(2*snr).  The quantizer only sees the argument, so this is
    // equivalent to unit-energy symbols with per-dimension variance N0/2.
    double signal_amplitude() const { return std::sqrt(2.0 * snr); }

    void validate() const {
        if (M < 1) throw std::invalid_argument("M must be >= 1");
        if (K < 1) throw std::invalid_argument("K must be >= 1");
        if (K % M != 0) throw std::invalid_argument("K must be a multiple of M");
        if (L < 2) throw std::invalid_argument("L must be >= 2");
        if (!(snr >= 0.0) || !std::isfinite(snr))
            throw std::invalid_argument("snr must be finite and >= 0");
    }
};

// Transmit phases per block slot: theta_x = 2*pi*x/M plus an optional
// per-slot dither offset.  An empty offset list means no dither.
struct Constellation {
    int M = 4;
    std::vector<double> offsets; // delta_l per slot; empty = undithered

    static Constellation standard(int M) { return Constellation{M, {}}; }

    // Slot l rotated by l/L of one quantizer sector.
    static Constellation dithered(int M, int K, int L) {
        Constellation c{M, {}};
        c.offsets.resize(L);
        for (int l = 0; l < L; ++l)
            c.offsets[l] = static_cast<double>(l) * two_pi / (static_cast<double>(K) * L);
        return c;
    }

    bool is_dithered() const { return !offsets.empty(); }
    double offset(int slot) const {
        return offsets.empty() ? 0.0 : offsets.at(static_cast<size_t>(slot));
    }
    double symbol_phase(int x, int slot) const {
        return two_pi * x / M + offset(slot);
    }
};

// Quantizer outputs for one block, each in [0, K).
using OutcomeVector = std::vector<int>;
// Input symbol indices for one block, each in [0, M).
using InputVector = std::vector<int>;

inline void validate_outcome(const OutcomeVector& z, const ChannelConfig& cfg) {
    if (static_cast<int>(z.size()) != cfg.L)
        throw std::invalid_argument("outcome vector length must equal L");
    for (int v : z)
        if (v < 0 || v >= cfg.K) throw std::invalid_argument("outcome entry out of [0,K)");
}

inline void validate_input(const InputVector& x, const ChannelConfig& cfg) {
    if (static_cast<int>(x.size()) != cfg.L)
        throw std::invalid_argument("input vector length must equal L");
    for (int v : x)
        if (v < 0 || v >= cfg.M) throw std::invalid_argument("input entry out of [0,M)");
}

// One evaluated operating point.  Entropies and mutual information are in
// bits per block; cap_per_symbol divides by L-1 to account for the one
// block symbol that effectively serves as a phase reference.
struct CapacityPoint {
    double snr_db = 0.0;
    int M = 0, K = 0, L = 0, n_phi = 0;
    bool dithered = false;
    double h_out = 0.0;          // H(Z)
    double h_cond = 0.0;         // H(Z|X)
    double mi = 0.0;             // I(X;Z) = H(Z) - H(Z|X)
    double cap_per_symbol = 0.0; // mi / (L-1)
};

} // namespace pqnc

#endif
