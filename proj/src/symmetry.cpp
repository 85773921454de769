#include "pqnc/symmetry.hpp"

#include <algorithm>
#include <array>
#include <compare>
#include <numeric>

namespace pqnc {

namespace {

void check_small_vector(std::span<const int> z, int base) {
    if (z.empty() || z.size() > 10)
        throw std::invalid_argument("vector length must be in [1, 10]");
    if (base < 1 || base > 64) throw std::invalid_argument("alphabet size must be in [1, 64]");
    for (int v : z)
        if (v < 0 || v >= base) throw std::invalid_argument("vector entry out of range");
}

std::uint64_t factorial(int n) {
    std::uint64_t f = 1;
    for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
    return f;
}

// Number of sorted multisets of length L over `base` symbols: C(base+L-1, L).
double multiset_count(int base, int L) {
    double c = 1.0;
    for (int i = 1; i <= L; ++i) c = c * (base - 1 + i) / i;
    return c;
}

// sorted(v + shift) for sorted v: entries wrap in a block that moves to the
// front.  out must have the same length as v.
void shifted_sorted(std::span<const std::uint8_t> v, int shift, int base,
                    std::uint8_t* out) {
    const int L = static_cast<int>(v.size());
    // First index whose entry wraps past base.
    int split = L;
    for (int i = 0; i < L; ++i) {
        if (v[static_cast<size_t>(i)] + shift >= base) {
            split = i;
            break;
        }
    }
    int o = 0;
    for (int i = split; i < L; ++i) out[o++] = static_cast<std::uint8_t>(v[static_cast<size_t>(i)] + shift - base);
    for (int i = 0; i < split; ++i) out[o++] = static_cast<std::uint8_t>(v[static_cast<size_t>(i)] + shift);
}

// prod over distinct values of multiplicity! for a sorted vector.
std::uint64_t sorted_multiplicity_product(const std::uint8_t* v, int L) {
    std::uint64_t p = 1;
    int run = 1;
    for (int i = 1; i < L; ++i) {
        if (v[i] == v[i - 1]) {
            ++run;
            p *= static_cast<std::uint64_t>(run);
        } else {
            run = 1;
        }
    }
    return p;
}

// Shared enumeration core: emits shift-minimal sorted vectors over
// {0..base-1}^L with orbit sizes base*L!/(s*prod mult!), scaled by `scale`
// (1 for conditional orbits, M^L for output orbits).
OrbitTable enumerate_orbits(int base, int L, std::uint64_t scale) {
    if (L < 1) throw std::invalid_argument("block length must be positive");
    if (base < 1 || base > 64) throw std::invalid_argument("alphabet size must be in [1, 64]");
    if (L > 10) throw ResourceLimitError("orbit enumeration limited to block lengths <= 10");
    if (multiset_count(base, L - 1) > 3e8)
        throw ResourceLimitError("orbit enumeration space too large");

    OrbitTable table;
    table.base = base;
    table.L = L;

    const std::uint64_t group_order = static_cast<std::uint64_t>(base) * factorial(L);
    std::array<std::uint8_t, 10> v{}, w{};

    // Recursive walk over non-decreasing vectors with v[0] == 0 (any other
    // sorted vector shifts down to one of these, so minima start at 0).
    auto emit = [&]() {
        // Candidate shifts must land some entry on 0, so only the distinct
        // values of v matter.  Count stabilizer shifts along the way.
        int stab_shifts = 1;
        for (int i = 1; i < L; ++i) {
            if (v[static_cast<size_t>(i)] == v[static_cast<size_t>(i - 1)]) continue;
            shifted_sorted({v.data(), static_cast<size_t>(L)}, base - v[static_cast<size_t>(i)], base,
                           w.data());
            const auto ord = std::lexicographical_compare_three_way(w.data(), w.data() + L,
                                                                    v.data(), v.data() + L);
            if (ord == std::strong_ordering::less) return; // smaller rotation exists
            if (ord == std::strong_ordering::equal) ++stab_shifts;
        }
        const std::uint64_t stab =
            static_cast<std::uint64_t>(stab_shifts) * sorted_multiplicity_product(v.data(), L);
        table.reps.insert(table.reps.end(), v.data(), v.data() + L);
        table.counts.push_back(group_order / stab * scale);
    };

    auto walk = [&](auto&& self, int pos) -> void {
        if (pos == L) {
            emit();
            return;
        }
        for (int val = v[static_cast<size_t>(pos - 1)]; val < base; ++val) {
            v[static_cast<size_t>(pos)] = static_cast<std::uint8_t>(val);
            self(self, pos + 1);
        }
    };
    v[0] = 0;
    if (L == 1) {
        emit();
    } else {
        walk(walk, 1);
    }

    // The orbit sizes must tile the whole space exactly.
    std::uint64_t total = 0;
    for (std::uint64_t c : table.counts) total += c;
    std::uint64_t space = scale;
    for (int i = 0; i < L; ++i) space *= static_cast<std::uint64_t>(base);
    if (total != space) throw std::logic_error("orbit counts do not tile the outcome space");
    return table;
}

} // namespace

CanonicalResult canonical_conditional(std::span<const int> z, int K) {
    check_small_vector(z, K);
    const int L = static_cast<int>(z.size());
    std::vector<int> best, cand(static_cast<size_t>(L));
    int best_shift = 0;
    for (int shift = 0; shift < K; ++shift) {
        for (int i = 0; i < L; ++i)
            cand[static_cast<size_t>(i)] = (z[static_cast<size_t>(i)] + shift) % K;
        std::sort(cand.begin(), cand.end());
        if (best.empty() || cand < best) {
            best = cand;
            best_shift = shift;
        }
    }
    CanonicalResult res;
    res.canonical = best;
    res.transform.shift = best_shift;
    res.transform.perm.resize(static_cast<size_t>(L));
    std::iota(res.transform.perm.begin(), res.transform.perm.end(), 0);
    std::stable_sort(res.transform.perm.begin(), res.transform.perm.end(),
                     [&](int i, int j) {
                         return (z[static_cast<size_t>(i)] + best_shift) % K <
                                (z[static_cast<size_t>(j)] + best_shift) % K;
                     });
    return res;
}

std::vector<int> canonical_output(std::span<const int> z, int K, int a) {
    check_small_vector(z, K);
    if (a < 1 || K % a != 0) throw std::invalid_argument("a must divide K");
    std::vector<int> r(z.size());
    for (size_t i = 0; i < z.size(); ++i) r[i] = z[i] % a;
    return canonical_conditional(r, a).canonical;
}

std::vector<int> shift_canonical(std::span<const int> z, int K) {
    check_small_vector(z, K);
    const int L = static_cast<int>(z.size());
    std::vector<int> best(z.begin(), z.end()), cand(static_cast<size_t>(L));
    for (int shift = 1; shift < K; ++shift) {
        for (int i = 0; i < L; ++i)
            cand[static_cast<size_t>(i)] = (z[static_cast<size_t>(i)] + shift) % K;
        if (cand < best) best = cand;
    }
    return best;
}

ConditionalOrbitTable enumerate_conditional_orbits(int K, int L) {
    ConditionalOrbitTable t;
    static_cast<OrbitTable&>(t) = enumerate_orbits(K, L, 1);
    return t;
}

OutputOrbitTable enumerate_output_orbits(int K, int M, int L) {
    if (M < 1 || K % M != 0) throw std::invalid_argument("M must divide K");
    std::uint64_t scale = 1;
    for (int i = 0; i < L; ++i) scale *= static_cast<std::uint64_t>(M);
    OutputOrbitTable t;
    static_cast<OrbitTable&>(t) = enumerate_orbits(K / M, L, scale);
    t.K = K;
    t.M = M;
    return t;
}

std::uint64_t detail::multinomial_permutations(std::span<const int> sorted_vals) {
    const int n = static_cast<int>(sorted_vals.size());
    std::uint64_t denom = 1;
    int run = 1;
    for (int i = 1; i < n; ++i) {
        if (sorted_vals[static_cast<size_t>(i)] == sorted_vals[static_cast<size_t>(i - 1)]) {
            ++run;
            denom *= static_cast<std::uint64_t>(run);
        } else {
            run = 1;
        }
    }
    return factorial(n) / denom;
}

InputReduction reduce_inputs(std::span<const int> z_rep, int M) {
    if (M < 1) throw std::invalid_argument("M must be >= 1");
    for (size_t i = 1; i < z_rep.size(); ++i)
        if (z_rep[i] < z_rep[i - 1])
            throw std::invalid_argument("input reduction requires a sorted residue vector");
    InputReduction red;
    for_each_input_rep(z_rep, M, [&](std::span<const int> x, std::uint64_t mult) {
        red.reps.emplace_back(x.begin(), x.end());
        red.mults.push_back(mult);
    });
    return red;
}

std::uint64_t pack_key(std::span<const int> v) {
    std::uint64_t k = 0;
    for (int e : v) k = (k << 6) | static_cast<std::uint64_t>(e & 63);
    return k;
}

std::uint64_t pack_key_u8(std::span<const std::uint8_t> v) {
    std::uint64_t k = 0;
    for (std::uint8_t e : v) k = (k << 6) | static_cast<std::uint64_t>(e & 63);
    return k;
}

} // namespace pqnc
