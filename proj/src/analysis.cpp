#include "pqnc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "pqnc/quadrature.hpp"
#include "pqnc/rng.hpp"
#include "pqnc/symmetry.hpp"

namespace pqnc {

namespace {

// Lexicographically smallest constant rotation of an input vector.
InputVector rotation_class_rep(const InputVector& x, int M) {
    InputVector best = x, cand(x.size());
    for (int i = 1; i < M; ++i) {
        for (size_t j = 0; j < x.size(); ++j) cand[j] = (x[j] + i) % M;
        if (cand < best) best = cand;
    }
    return best;
}

} // namespace

MlResult ml_estimate(const OutcomeVector& z, const ChannelConfig& cfg,
                     const Constellation& cons, const LikelihoodTable& table,
                     double tie_tol) {
    cfg.validate();
    validate_outcome(z, cfg);
    if (table.sectors() != cfg.K || table.block_length() != cfg.L)
        throw std::invalid_argument("likelihood table does not match config");
    if (cons.M != cfg.M || cons.is_dithered() != table.dithered())
        throw std::invalid_argument("constellation does not match likelihood table");
    if (!(tie_tol > 0.0) || tie_tol >= 1.0)
        throw std::invalid_argument("tie_tol must be in (0, 1)");
    const int L = cfg.L;
    const int n_phi = table.nodes();
    double inputs = 1.0;
    for (int l = 0; l < L; ++l) inputs *= cfg.M;
    if (inputs * n_phi > 4e9) throw ResourceLimitError("ml search space too large");
    const auto n_inputs = static_cast<std::uint64_t>(inputs);

    const int stride = table.stride();
    const double* base[10];
    for (int l = 0; l < L; ++l) base[l] = table.sector_integrals(l);

    InputVector x(static_cast<size_t>(L), 0);
    int off[10];
    const auto fill_offsets = [&]() {
        for (int l = 0; l < L; ++l) {
            int w = (z[static_cast<size_t>(l)] - cfg.a() * x[static_cast<size_t>(l)]) % cfg.K;
            if (w < 0) w += cfg.K;
            off[l] = w * stride;
        }
    };
    const auto advance = [&]() -> bool {
        for (int l = 0; l < L; ++l) {
            if (++x[static_cast<size_t>(l)] < cfg.M) return true;
            x[static_cast<size_t>(l)] = 0;
        }
        return false;
    };

    // Pass 1: global maximum of the likelihood product.
    double best = 0.0;
    for (std::uint64_t xi = 0; xi < n_inputs; ++xi) {
        fill_offsets();
        for (int j = 0; j < n_phi; ++j) {
            double p = base[0][off[0] + j];
            for (int l = 1; l < L; ++l) p *= base[l][off[l] + j];
            if (p > best) best = p;
        }
        advance();
    }

    // Pass 2: collect everything within the relative tie tolerance.
    MlResult res;
    res.max_log2_likelihood = std::log2(best);
    const double cut = best * (1.0 - tie_tol);
    std::set<InputVector> distinct, classes;
    std::fill(x.begin(), x.end(), 0);
    for (std::uint64_t xi = 0; xi < n_inputs; ++xi) {
        fill_offsets();
        for (int j = 0; j < n_phi; ++j) {
            double p = base[0][off[0] + j];
            for (int l = 1; l < L; ++l) p *= base[l][off[l] + j];
            if (p >= cut) {
                // The window index j walks the grid in reverse node order.
                const int node = (n_phi - j) % n_phi;
                res.argmax.emplace_back(x, node);
                distinct.insert(x);
                classes.insert(rotation_class_rep(x, cfg.M));
            }
        }
        advance();
    }
    res.distinct_inputs = static_cast<int>(distinct.size());
    res.rotation_classes = static_cast<int>(classes.size());
    res.ambiguous = res.rotation_classes >= 2;
    return res;
}

AmbiguityScan scan_ambiguity(const ChannelConfig& cfg, const Constellation& cons,
                             const LikelihoodTable& table, double tie_tol) {
    cfg.validate();
    double zspace = 1.0;
    for (int l = 0; l < cfg.L; ++l) zspace *= cfg.K;
    if (zspace > 65536.0) throw ResourceLimitError("ambiguity scan space too large");
    const auto nz = static_cast<std::uint64_t>(zspace);

    AmbiguityScan scan;
    scan.rows.reserve(nz);
    OutcomeVector z(static_cast<size_t>(cfg.L), 0);
    KahanSum mass;
    for (std::uint64_t zi = 0; zi < nz; ++zi) {
        const MlResult ml = ml_estimate(z, cfg, cons, table, tie_tol);
        AmbiguityRow row;
        row.z = z;
        row.ambiguous = ml.ambiguous;
        row.tied_inputs = ml.distinct_inputs;
        row.rotation_classes = ml.rotation_classes;
        row.p_z = output_prob_factorized(z, table);
        if (row.ambiguous) {
            mass.add(row.p_z);
            ++scan.ambiguous_count;
        }
        scan.rows.push_back(std::move(row));
        for (int l = 0; l < cfg.L; ++l) {
            if (++z[static_cast<size_t>(l)] < cfg.K) break;
            z[static_cast<size_t>(l)] = 0;
        }
    }
    scan.mass = mass.value();
    return scan;
}

double ambiguous_output_mass(const ChannelConfig& cfg, const Constellation& cons,
                             const LikelihoodTable& table, double tie_tol) {
    return scan_ambiguity(cfg, cons, table, tie_tol).mass;
}

McEstimate coherent_capacity(int M, double snr, std::uint64_t samples, std::uint64_t seed) {
    if (M < 2) throw std::invalid_argument("M must be >= 2");
    if (!(snr >= 0.0)) throw std::invalid_argument("snr must be >= 0");
    if (samples < 10000) throw std::invalid_argument("coherent_capacity needs >= 1e4 samples");
    const double amp = std::sqrt(2.0 * snr); // unit-variance noise per dimension
    std::vector<double> sx(static_cast<size_t>(M)), sy(static_cast<size_t>(M));
    for (int m = 0; m < M; ++m) {
        sx[static_cast<size_t>(m)] = amp * std::cos(two_pi * m / M);
        sy[static_cast<size_t>(m)] = amp * std::sin(two_pi * m / M);
    }
    const double log2M = std::log2(static_cast<double>(M));
    KahanSum sum, sum_sq;
    constexpr std::uint64_t batch = 8192;
    const std::uint64_t n_batches = (samples + batch - 1) / batch;
    std::uint64_t done = 0;
    std::vector<double> e(static_cast<size_t>(M));
    for (std::uint64_t b = 0; b < n_batches; ++b) {
        std::mt19937_64 rng(derive_seed(seed, b));
        const std::uint64_t todo = std::min(batch, samples - done);
        for (std::uint64_t i = 0; i < todo; ++i) {
            const int m = uniform_int(rng, M);
            double n0, n1;
            gaussian_pair(rng, n0, n1);
            const double yx = sx[static_cast<size_t>(m)] + n0;
            const double yy = sy[static_cast<size_t>(m)] + n1;
            double emax = -std::numeric_limits<double>::infinity();
            for (int k = 0; k < M; ++k) {
                const double dx = yx - sx[static_cast<size_t>(k)];
                const double dy = yy - sy[static_cast<size_t>(k)];
                e[static_cast<size_t>(k)] = -0.5 * (dx * dx + dy * dy);
                emax = std::max(emax, e[static_cast<size_t>(k)]);
            }
            double lse = 0.0;
            for (int k = 0; k < M; ++k) lse += std::exp(e[static_cast<size_t>(k)] - emax);
            // log2 sum_k exp(e_k - e_m) done stably via the max shift.
            const double v =
                log2M - (std::log(lse) + emax - e[static_cast<size_t>(m)]) / std::log(2.0);
            sum.add(v);
            sum_sq.add(v * v);
        }
        done += todo;
    }
    McEstimate est;
    const double n = static_cast<double>(samples);
    est.value = sum.value() / n;
    double var = (sum_sq.value() - n * est.value * est.value) / (n - 1.0);
    if (var < 0.0) var = 0.0;
    est.std_error = std::max(std::sqrt(var / n), std::numeric_limits<double>::min());
    est.samples = samples;
    est.seed = seed;
    return est;
}

CapacityPoint unquantized_proxy_capacity(const ChannelConfig& cfg, int n_phi) {
    cfg.validate();
    if (cfg.a() < 8)
        throw std::invalid_argument("proxy requires at least 8 sectors per constellation step");
    if (cfg.L > 6) throw ResourceLimitError("proxy limited to block lengths <= 6");
    return capacity_point(cfg, n_phi);
}

} // namespace pqnc
