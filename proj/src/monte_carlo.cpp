#include "pqnc/monte_carlo.hpp"

#include <cmath>
#include <limits>
#include <unordered_map>

#include "pqnc/capacity.hpp"
#include "pqnc/quadrature.hpp"
#include "pqnc/rng.hpp"
#include "pqnc/symmetry.hpp"

namespace pqnc {

namespace {

constexpr std::uint64_t batch_size = 8192;

// log2 of a grid-mean likelihood, memoized on the shift-canonical pattern.
class ShiftCanonicalCache {
public:
    ShiftCanonicalCache(const LikelihoodTable& table, bool averaged)
        : table_(table), averaged_(averaged),
          zeros_(static_cast<size_t>(table.block_length()), 0) {}

    double log2_prob(std::span<const int> pattern) {
        const std::vector<int> canon = shift_canonical(pattern, table_.sectors());
        const std::uint64_t key = pack_key(canon);
        auto it = map_.find(key);
        if (it != map_.end()) return it->second;
        const double p = averaged_ ? output_prob_factorized(canon, table_)
                                   : block_conditional_prob(canon, zeros_, table_);
        const double lg = std::log2(p);
        map_.emplace(key, lg);
        return lg;
    }

private:
    const LikelihoodTable& table_;
    bool averaged_;
    std::vector<int> zeros_;
    std::unordered_map<std::uint64_t, double> map_;
};

struct Accumulator {
    KahanSum sum, sum_sq;
    void add(double v) {
        sum.add(v);
        sum_sq.add(v * v);
    }
    double mean(std::uint64_t n) const { return sum.value() / static_cast<double>(n); }
    double std_err(std::uint64_t n) const {
        const double m = mean(n);
        double var = (sum_sq.value() - static_cast<double>(n) * m * m) /
                     (static_cast<double>(n) - 1.0);
        if (var < 0.0) var = 0.0;
        return std::sqrt(var / static_cast<double>(n));
    }
};

} // namespace

McRunResult mc_run(const ChannelConfig& cfg, const Constellation& cons, std::uint64_t samples,
                   std::uint64_t seed, int n_phi) {
    cfg.validate();
    if (samples < 10000) throw std::invalid_argument("mc_run needs >= 1e4 samples");
    const LikelihoodTable table = build_likelihood_table(cfg, cons, n_phi);
    ShiftCanonicalCache cond_cache(table, false);
    ShiftCanonicalCache out_cache(table, true);

    const int L = cfg.L;
    const int a = cfg.a();
    InputVector x(static_cast<size_t>(L));
    std::vector<int> w(static_cast<size_t>(L));

    Accumulator ratio, h_out, h_cond;
    const std::uint64_t n_batches = (samples + batch_size - 1) / batch_size;
    std::uint64_t done = 0;
    for (std::uint64_t b = 0; b < n_batches; ++b) {
        std::mt19937_64 rng(derive_seed(seed, b));
        const std::uint64_t todo = std::min(batch_size, samples - done);
        for (std::uint64_t i = 0; i < todo; ++i) {
            for (int l = 0; l < L; ++l) x[static_cast<size_t>(l)] = uniform_int(rng, cfg.M);
            const OutcomeVector z = sample_block(x, cfg, cons, rng);
            for (int l = 0; l < L; ++l) {
                int v = (z[static_cast<size_t>(l)] - a * x[static_cast<size_t>(l)]) % cfg.K;
                if (v < 0) v += cfg.K;
                w[static_cast<size_t>(l)] = v;
            }
            const double lz = out_cache.log2_prob(z);
            const double lw = cond_cache.log2_prob(w);
            ratio.add(lw - lz);
            h_out.add(-lz);
            h_cond.add(-lw);
        }
        done += todo;
    }

    const double norm = static_cast<double>(L - 1);
    McRunResult res;
    res.mi.value = ratio.mean(samples) / norm;
    res.mi.std_error =
        std::max(ratio.std_err(samples) / norm, std::numeric_limits<double>::min());
    res.mi.samples = samples;
    res.mi.seed = seed;
    res.entropies.h_out = h_out.mean(samples);
    res.entropies.h_out_se = h_out.std_err(samples);
    res.entropies.h_cond = h_cond.mean(samples);
    res.entropies.h_cond_se = h_cond.std_err(samples);
    return res;
}

McEstimate mc_mutual_information(const ChannelConfig& cfg, const Constellation& cons,
                                 std::uint64_t samples, std::uint64_t seed, int n_phi) {
    return mc_run(cfg, cons, samples, seed, n_phi).mi;
}

McEntropies mc_entropy_check(const ChannelConfig& cfg, const Constellation& cons,
                             std::uint64_t samples, std::uint64_t seed, int n_phi) {
    return mc_run(cfg, cons, samples, seed, n_phi).entropies;
}

} // namespace pqnc
