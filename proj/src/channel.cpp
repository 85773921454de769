#include "pqnc/channel.hpp"

#include <cmath>

#include "pqnc/quadrature.hpp"
#include "pqnc/rng.hpp"

namespace pqnc {

int sector_of(std::complex<double> c, int K) {
    double arg = std::atan2(c.imag(), c.real()); // (-pi, pi]
    if (arg < 0.0) arg += two_pi;                // [0, 2*pi)
    int s = static_cast<int>(std::floor(arg * K / two_pi));
    if (s >= K) s -= K; // arg rounding can graze 2*pi
    if (s < 0) s = 0;
    return s;
}

double phase_error_pdf(double psi, double snr) {
    const double g = snr;
    const double c = std::cos(psi);
    const double s = std::sin(psi);
    const double sg = std::sqrt(g);
    // erfc(-t) = 1 + erf(t), accurate on both tails.
    return std::exp(-g) / two_pi +
           0.5 * std::sqrt(g / pi) * c * std::exp(-g * s * s) * std::erfc(-sg * c);
}

namespace {

// Wrap an angle into [-pi, pi).
double wrap_pm_pi(double u) {
    u = std::remainder(u, two_pi); // [-pi, pi]
    if (u >= pi) u -= two_pi;
    return u;
}

// Integral of the phase-error density over [lo, lo + width), width <= 2*pi,
// lo arbitrary.  Splits at +/-pi where the principal interval wraps.
double sector_integral(double lo, double width, double snr) {
    const auto f = [snr](double psi) { return phase_error_pdf(psi, snr); };
    const double lo_w = wrap_pm_pi(lo);
    const double hi = lo_w + width;
    if (hi <= pi) return gauss_legendre_32(f, lo_w, hi);
    return gauss_legendre_32(f, lo_w, pi) + gauss_legendre_32(f, -pi, hi - two_pi);
}

} // namespace

double sector_prob(int z, int x, double phi, const ChannelConfig& cfg,
                   const Constellation& cons, int slot) {
    cfg.validate();
    if (z < 0 || z >= cfg.K) throw std::invalid_argument("sector index out of [0,K)");
    if (x < 0 || x >= cfg.M) throw std::invalid_argument("input index out of [0,M)");
    const double alpha = cons.symbol_phase(x, slot) + phi;
    return sector_integral(two_pi * z / cfg.K - alpha, cfg.sector_width(), cfg.snr);
}

OutcomeVector sample_block_given_phase(const InputVector& x, double phi,
                                       const ChannelConfig& cfg, const Constellation& cons,
                                       std::mt19937_64& rng) {
    cfg.validate();
    validate_input(x, cfg);
    const double amp = cfg.signal_amplitude();
    OutcomeVector z(static_cast<size_t>(cfg.L));
    for (int l = 0; l < cfg.L; ++l) {
        const double beta = cons.symbol_phase(x[static_cast<size_t>(l)], l) + phi;
        double n0, n1;
        gaussian_pair(rng, n0, n1);
        const std::complex<double> y(amp * std::cos(beta) + n0, amp * std::sin(beta) + n1);
        z[static_cast<size_t>(l)] = sector_of(y, cfg.K);
    }
    return z;
}

OutcomeVector sample_block(const InputVector& x, const ChannelConfig& cfg,
                           const Constellation& cons, std::mt19937_64& rng) {
    const double phi = two_pi * uniform01(rng);
    return sample_block_given_phase(x, phi, cfg, cons, rng);
}

SectorEstimate mc_sector_oracle(int z, int x, double phi, const ChannelConfig& cfg,
                                const Constellation& cons, std::uint64_t samples,
                                std::uint64_t seed, int slot) {
    cfg.validate();
    if (samples < 10000) throw std::invalid_argument("mc_sector_oracle needs >= 1e4 samples");
    const double amp = cfg.signal_amplitude();
    const double beta = cons.symbol_phase(x, slot) + phi;
    const double sx = amp * std::cos(beta), sy = amp * std::sin(beta);
    std::mt19937_64 rng(derive_seed(seed, 0));
    std::uint64_t hits = 0;
    for (std::uint64_t i = 0; i < samples; ++i) {
        double n0, n1;
        gaussian_pair(rng, n0, n1);
        if (sector_of({sx + n0, sy + n1}, cfg.K) == z) ++hits;
    }
    const double p = static_cast<double>(hits) / static_cast<double>(samples);
    SectorEstimate est;
    est.estimate = p;
    est.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
    est.samples = samples;
    return est;
}

LikelihoodTable::LikelihoodTable(const ChannelConfig& cfg, const Constellation& cons, int n_phi)
    : K_(cfg.K), M_(cfg.M), a_(cfg.a()), L_(cfg.L), n_phi_(n_phi),
      dithered_(cons.is_dithered()) {
    cfg.validate();
    if (n_phi <= 0 || n_phi % K_ != 0)
        throw std::invalid_argument("n_phi must be a positive multiple of K");
    if (dithered_ && static_cast<int>(cons.offsets.size()) != L_)
        throw std::invalid_argument("dither offset list must have one entry per block slot");
    if (cons.M != M_) throw std::invalid_argument("constellation/config M mismatch");
    stride_ = n_phi_ / K_;

    const int nslots = dithered_ ? L_ : 1;
    g_.resize(static_cast<size_t>(nslots) * slot_len());
    avg_.resize(static_cast<size_t>(nslots) * avg_slot_len());
    const double width = cfg.sector_width();
    for (int sl = 0; sl < nslots; ++sl) {
        double* g = g_.data() + static_cast<size_t>(sl) * slot_len();
        for (int m = 0; m < n_phi_; ++m) {
            // Start angle of the integration interval when the lookup index
            // (z*stride - node) mod n_phi equals m.
            const double lo = two_pi * m / n_phi_ - cons.offset(sl);
            g[m] = sector_integral(lo, width, cfg.snr);
            g[m + n_phi_] = g[m];
        }
        double* avg = avg_.data() + static_cast<size_t>(sl) * avg_slot_len();
        for (int m = 0; m < n_phi_; ++m) {
            double s = 0.0;
            for (int x = 0; x < M_; ++x) s += g[(m + n_phi_ - (a_ * x * stride_) % n_phi_) % n_phi_];
            avg[m] = s / M_;
            avg[m + n_phi_] = avg[m];
        }
    }
}

double LikelihoodTable::row_sum(int node, int slot) const {
    double s = 0.0;
    for (int z = 0; z < K_; ++z) s += value(node, z, slot);
    return s;
}

LikelihoodTable build_likelihood_table(const ChannelConfig& cfg, const Constellation& cons,
                                       int n_phi) {
    return LikelihoodTable(cfg, cons, n_phi);
}

} // namespace pqnc
