#include "pqnc/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <sstream>

#include "pqnc/quadrature.hpp"

namespace pqnc {

namespace {

constexpr double entropy_floor = 1e-300; // below this a p*log(p) term is zero

double plog2p(double p) {
    if (p < entropy_floor) return 0.0;
    return p * std::log2(p);
}

// Grid mean of prod_l base[l][off[l] + j].  base pointers address the
// duplicated cyclic arrays, so the window never wraps.  Fixed-trip-count
// kernels let the compiler vectorize the block lengths that matter.
template <int LL>
double window_mean_fixed(const double* const* base, const int* off, int n) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
        double p = base[0][off[0] + j];
        for (int l = 1; l < LL; ++l) p *= base[l][off[l] + j];
        acc += p;
    }
    return acc / n;
}

double window_mean(const double* const* base, const int* off, int n, int L) {
    switch (L) {
        case 2: return window_mean_fixed<2>(base, off, n);
        case 3: return window_mean_fixed<3>(base, off, n);
        case 4: return window_mean_fixed<4>(base, off, n);
        case 5: return window_mean_fixed<5>(base, off, n);
        case 6: return window_mean_fixed<6>(base, off, n);
        case 7: return window_mean_fixed<7>(base, off, n);
        case 8: return window_mean_fixed<8>(base, off, n);
        default: {
            double acc = 0.0;
            for (int j = 0; j < n; ++j) {
                double p = base[0][off[0] + j];
                for (int l = 1; l < L; ++l) p *= base[l][off[l] + j];
                acc += p;
            }
            return acc / n;
        }
    }
}

struct WindowArgs {
    const double* base[10];
    int off[10];
};

// Offsets for the sector pattern w viewed through per-slot arrays.
void fill_windows(const LikelihoodTable& t, std::span<const int> w, bool averaged,
                  WindowArgs& a) {
    const int L = static_cast<int>(w.size());
    for (int l = 0; l < L; ++l) {
        a.base[l] = averaged ? t.input_averaged(l) : t.sector_integrals(l);
        a.off[l] = w[static_cast<size_t>(l)] * t.stride();
    }
}

int mod_pos(int v, int m) {
    v %= m;
    return v < 0 ? v + m : v;
}

// Canonical representative of a sector pattern, written into out (sorted).
// Same orbit map as canonical_conditional but allocation-free: sort once,
// then take the minimum over the <= L rotations that land an entry on 0.
void canonicalize_sorted(std::span<const int> w, int K, std::uint8_t* out, std::uint8_t* tmp) {
    const int L = static_cast<int>(w.size());
    for (int i = 0; i < L; ++i) out[i] = static_cast<std::uint8_t>(w[static_cast<size_t>(i)]);
    std::sort(out, out + L);
    const std::uint8_t lead = out[0];
    if (lead != 0) { // shift the minimum down to zero first
        for (int i = 0; i < L; ++i) out[i] = static_cast<std::uint8_t>(out[i] - lead);
    }
    for (int i = 1; i < L; ++i) {
        if (out[i] == out[i - 1] || out[i] == 0) continue;
        const int d = out[i];
        // sorted(out - d): entries >= d drop by d, the rest wrap upward.
        int split = L;
        for (int k = 0; k < L; ++k) {
            if (out[k] >= d) {
                split = k;
                break;
            }
        }
        int o = 0;
        for (int k = split; k < L; ++k) tmp[o++] = static_cast<std::uint8_t>(out[k] - d);
        for (int k = 0; k < split; ++k) tmp[o++] = static_cast<std::uint8_t>(out[k] + K - d);
        if (std::lexicographical_compare(tmp, tmp + L, out, out + L)) {
            std::memcpy(out, tmp, static_cast<size_t>(L));
            i = 0; // restart against the new minimum
        }
    }
}

} // namespace

double block_conditional_prob(std::span<const int> z, std::span<const int> x,
                              const LikelihoodTable& table) {
    const int L = table.block_length();
    if (static_cast<int>(z.size()) != L || static_cast<int>(x.size()) != L)
        throw std::invalid_argument("z and x must have length L");
    WindowArgs a;
    for (int l = 0; l < L; ++l) {
        a.base[l] = table.sector_integrals(l);
        const int w = mod_pos(z[static_cast<size_t>(l)] - table.step() * x[static_cast<size_t>(l)],
                              table.sectors());
        a.off[l] = w * table.stride();
    }
    return window_mean(a.base, a.off, table.nodes(), L);
}

double block_conditional_prob_direct(std::span<const int> z, std::span<const int> x,
                                     const ChannelConfig& cfg, const Constellation& cons,
                                     const LikelihoodTable& table) {
    validate_outcome(OutcomeVector(z.begin(), z.end()), cfg);
    validate_input(InputVector(x.begin(), x.end()), cfg);
    KahanSum acc;
    for (int n = 0; n < table.nodes(); ++n) {
        double p = 1.0;
        for (int l = 0; l < cfg.L; ++l)
            p *= sector_prob(z[static_cast<size_t>(l)], x[static_cast<size_t>(l)],
                             table.node_phase(n), cfg, cons, l);
        acc.add(p);
    }
    return acc.value() / table.nodes();
}

double ConditionalProbTable::lookup_sorted(std::span<const int> w) const {
    const std::uint64_t key = pack_key(w);
    const auto it = std::lower_bound(keys.begin(), keys.end(), key);
    if (it == keys.end() || *it != key)
        throw std::logic_error("canonical pattern missing from conditional table");
    return prob[order[static_cast<size_t>(it - keys.begin())]];
}

ConditionalProbTable compute_conditional_probs(const LikelihoodTable& table,
                                               const ConditionalOrbitTable& orbits) {
    if (orbits.base != table.sectors() || orbits.L != table.block_length())
        throw std::invalid_argument("orbit table does not match likelihood table");
    if (table.dithered())
        throw std::invalid_argument("orbit reduction requires an undithered constellation");
    const size_t n = orbits.count();
    const int L = orbits.L;
    ConditionalProbTable out;
    out.prob.resize(n);

    const double* g = table.sector_integrals(0);
    const int stride = table.stride();
    const int nodes = table.nodes();
    const double* base[10];
    for (int l = 0; l < L; ++l) base[l] = g;

#pragma omp parallel for schedule(static) firstprivate(base)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
        const std::uint8_t* rep = orbits.reps.data() + static_cast<size_t>(i) * static_cast<size_t>(L);
        int off[10];
        for (int l = 0; l < L; ++l) off[l] = rep[l] * stride;
        out.prob[static_cast<size_t>(i)] = window_mean(base, off, nodes, L);
    }

    out.keys.resize(n);
    out.order.resize(n);
    for (size_t i = 0; i < n; ++i) {
        out.keys[i] = pack_key_u8(orbits.rep(i));
        out.order[i] = static_cast<std::uint32_t>(i);
    }
    if (!std::is_sorted(out.keys.begin(), out.keys.end())) {
        std::vector<std::uint32_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0u);
        std::sort(idx.begin(), idx.end(),
                  [&](std::uint32_t a, std::uint32_t b) { return out.keys[a] < out.keys[b]; });
        std::vector<std::uint64_t> k(n);
        for (size_t i = 0; i < n; ++i) {
            k[i] = out.keys[idx[i]];
            out.order[i] = idx[i];
        }
        out.keys = std::move(k);
    }

    KahanSum mass;
    for (size_t i = 0; i < n; ++i)
        mass.add(static_cast<double>(orbits.counts[i]) * out.prob[i]);
    out.total_mass = mass.value();
    return out;
}

double conditional_entropy(const ChannelConfig& cfg, const LikelihoodTable& table,
                           const ConditionalOrbitTable& orbits) {
    cfg.validate();
    const ConditionalProbTable probs = compute_conditional_probs(table, orbits);
    KahanSum h;
    for (size_t i = 0; i < orbits.count(); ++i)
        h.add(static_cast<double>(orbits.counts[i]) * plog2p(probs.prob[i]));
    return -h.value();
}

double output_prob(std::span<const int> z_rep, const ChannelConfig& cfg,
                   const LikelihoodTable& table, const ConditionalProbTable& cond) {
    cfg.validate();
    if (table.sectors() != cfg.K || table.block_length() != cfg.L)
        throw std::invalid_argument("likelihood table does not match config");
    const int L = cfg.L;
    const int a = cfg.a();
    const int K = cfg.K;
    std::uint8_t canon[10], tmp[10];
    int w[10];
    std::vector<int> wv(static_cast<size_t>(L));
    KahanSum sum;
    for_each_input_rep(z_rep, cfg.M, [&](std::span<const int> x, std::uint64_t mult) {
        for (int l = 0; l < L; ++l)
            w[l] = mod_pos(z_rep[static_cast<size_t>(l)] - a * x[static_cast<size_t>(l)], K);
        canonicalize_sorted({w, static_cast<size_t>(L)}, K, canon, tmp);
        for (int l = 0; l < L; ++l) wv[static_cast<size_t>(l)] = canon[l];
        sum.add(static_cast<double>(mult) * cond.lookup_sorted(wv));
    });
    double m_pow = 1.0;
    for (int l = 0; l < L; ++l) m_pow *= cfg.M;
    return sum.value() / m_pow;
}

double output_prob_factorized(std::span<const int> z, const LikelihoodTable& table) {
    const int L = table.block_length();
    if (static_cast<int>(z.size()) != L) throw std::invalid_argument("z must have length L");
    WindowArgs a;
    fill_windows(table, z, true, a);
    return window_mean(a.base, a.off, table.nodes(), L);
}

double output_entropy(const ChannelConfig& cfg, const LikelihoodTable& table,
                      const OutputOrbitTable& out, const ConditionalProbTable& cond) {
    cfg.validate();
    if (out.K != cfg.K || out.M != cfg.M || out.L != cfg.L)
        throw std::invalid_argument("output orbit table does not match config");
    const size_t n = out.count();
    const int L = cfg.L;
    std::vector<double> p(n);
    std::vector<int> zr(static_cast<size_t>(L));
    double worst_rel = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const auto rep = out.rep(i);
        for (int l = 0; l < L; ++l) zr[static_cast<size_t>(l)] = rep[static_cast<size_t>(l)];
        const double p_sx = output_prob(zr, cfg, table, cond);
        const double p_fac = output_prob_factorized(zr, table);
        const double rel = std::abs(p_sx - p_fac) / std::max({p_sx, p_fac, entropy_floor});
        worst_rel = std::max(worst_rel, rel);
        p[i] = p_sx;
    }
    if (worst_rel > 1e-9) {
        std::ostringstream msg;
        msg << "output probability routes disagree (relative deviation " << worst_rel << ")";
        throw std::logic_error(msg.str());
    }
    KahanSum h;
    for (size_t i = 0; i < n; ++i)
        h.add(static_cast<double>(out.counts[i]) * plog2p(p[i]));
    return -h.value();
}

CapacityWorkspace::CapacityWorkspace(int M, int K, int L, int n_phi)
    : CapacityWorkspace(M, K, L, n_phi, enumerate_conditional_orbits(K, L),
                        enumerate_output_orbits(K, M, L)) {}

CapacityWorkspace::CapacityWorkspace(int M, int K, int L, int n_phi, ConditionalOrbitTable cond,
                                     OutputOrbitTable out)
    : M_(M), K_(K), L_(L), n_phi_(n_phi), cond_(std::move(cond)), out_(std::move(out)) {
    ChannelConfig cfg{M, K, L, 1.0};
    cfg.validate();
    if (cond_.base != K || cond_.L != L || out_.K != K || out_.M != M || out_.L != L)
        throw std::invalid_argument("orbit tables do not match (M, K, L)");
}

CapacityPoint CapacityWorkspace::at_snr(double snr_linear) const {
    ChannelConfig cfg{M_, K_, L_, snr_linear};
    cfg.validate();
    const Constellation cons = Constellation::standard(M_);
    const LikelihoodTable table = build_likelihood_table(cfg, cons, n_phi_);

    const ConditionalProbTable cond = compute_conditional_probs(table, cond_);
    KahanSum hc;
    for (size_t i = 0; i < cond_.count(); ++i)
        hc.add(static_cast<double>(cond_.counts[i]) * plog2p(cond.prob[i]));

    CapacityPoint pt;
    pt.snr_db = snr_linear > 0.0 ? linear_to_db(snr_linear) : -std::numeric_limits<double>::infinity();
    pt.M = M_;
    pt.K = K_;
    pt.L = L_;
    pt.n_phi = n_phi_;
    pt.dithered = false;
    pt.h_cond = -hc.value();
    pt.h_out = output_entropy(cfg, table, out_, cond);
    pt.mi = pt.h_out - pt.h_cond;
    pt.cap_per_symbol = pt.mi / (L_ - 1);

    const double max_mi = L_ * std::log2(static_cast<double>(M_));
    if (pt.mi < -1e-9 || pt.mi > max_mi + 1e-9)
        throw std::logic_error("mutual information escaped [0, L*log2(M)]");
    if (std::abs(cond.total_mass - 1.0) > 1e-8)
        throw std::logic_error("conditional probabilities do not sum to 1");
    return pt;
}

CapacityPoint capacity_point(const ChannelConfig& cfg, int n_phi) {
    cfg.validate();
    CapacityWorkspace ws(cfg.M, cfg.K, cfg.L, n_phi);
    return ws.at_snr(cfg.snr);
}

SweepResult snr_sweep(int M, int K, int L, std::span<const double> snr_db, int n_phi) {
    SweepResult res;
    CapacityWorkspace ws(M, K, L, n_phi);
    double prev_cap = -1.0;
    bool have_prev = false;
    for (double db : snr_db) {
        try {
            const CapacityPoint pt = ws.at_snr_db(db);
            if (have_prev && pt.cap_per_symbol < prev_cap - 1e-6) {
                std::ostringstream w;
                w << "capacity decreased between grid points at " << db
                  << " dB; grid resolution may be insufficient";
                res.warnings.push_back(w.str());
            }
            prev_cap = pt.cap_per_symbol;
            have_prev = true;
            res.points.push_back(pt);
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << "snr " << db << " dB failed: " << e.what();
            res.errors.push_back(msg.str());
        }
    }
    return res;
}

BruteForceResult brute_force_mutual_information(const ChannelConfig& cfg, int n_phi) {
    cfg.validate();
    double zspace = 1.0, xspace = 1.0;
    for (int l = 0; l < cfg.L; ++l) {
        zspace *= cfg.K;
        xspace *= cfg.M;
    }
    if (zspace > 1e6 || xspace > 1e5)
        throw ResourceLimitError("brute-force enumeration space too large");
    const auto nz = static_cast<size_t>(zspace);
    const auto nx = static_cast<size_t>(xspace);
    if (n_phi <= 0 || n_phi % cfg.K != 0)
        throw std::invalid_argument("n_phi must be a positive multiple of K");

    const Constellation cons = Constellation::standard(cfg.M);
    // Independent likelihood tabulation: one direct integration per
    // (input, node, sector) with no index arithmetic shared with the
    // reduced engine.
    std::vector<double> full(static_cast<size_t>(cfg.M) * static_cast<size_t>(n_phi) *
                             static_cast<size_t>(cfg.K));
    for (int x = 0; x < cfg.M; ++x)
        for (int nd = 0; nd < n_phi; ++nd)
            for (int z = 0; z < cfg.K; ++z)
                full[(static_cast<size_t>(x) * n_phi + static_cast<size_t>(nd)) * cfg.K +
                     static_cast<size_t>(z)] =
                    sector_prob(z, x, two_pi * nd / n_phi, cfg, cons);

    std::vector<double> pz(nz, 0.0);
    std::vector<int> zv(static_cast<size_t>(cfg.L)), xv(static_cast<size_t>(cfg.L));
    KahanSum h_cond_sum;
    for (size_t xi = 0; xi < nx; ++xi) {
        size_t t = xi;
        for (int l = 0; l < cfg.L; ++l) {
            xv[static_cast<size_t>(l)] = static_cast<int>(t % static_cast<size_t>(cfg.M));
            t /= static_cast<size_t>(cfg.M);
        }
        KahanSum hx;
        for (size_t zi = 0; zi < nz; ++zi) {
            size_t u = zi;
            for (int l = 0; l < cfg.L; ++l) {
                zv[static_cast<size_t>(l)] = static_cast<int>(u % static_cast<size_t>(cfg.K));
                u /= static_cast<size_t>(cfg.K);
            }
            KahanSum acc;
            for (int nd = 0; nd < n_phi; ++nd) {
                double p = 1.0;
                for (int l = 0; l < cfg.L; ++l)
                    p *= full[(static_cast<size_t>(xv[static_cast<size_t>(l)]) * n_phi +
                               static_cast<size_t>(nd)) *
                                  cfg.K +
                              static_cast<size_t>(zv[static_cast<size_t>(l)])];
                acc.add(p);
            }
            const double pzx = acc.value() / n_phi;
            pz[zi] += pzx / xspace;
            hx.add(plog2p(pzx));
        }
        h_cond_sum.add(-hx.value() / xspace);
    }
    BruteForceResult res;
    res.h_cond = h_cond_sum.value();
    KahanSum hz;
    for (double p : pz) hz.add(plog2p(p));
    res.h_out = -hz.value();
    res.mi = res.h_out - res.h_cond;
    return res;
}

} // namespace pqnc
