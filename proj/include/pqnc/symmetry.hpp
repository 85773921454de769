// Orbit machinery for the block output space.  Conditional probabilities
// are constant on orbits of {0..K-1}^L under coordinate permutations plus
// constant sector shifts, and unconditional output probabilities collapse
// further onto residues mod a = K/M.  Enumerating one representative per
// orbit with its cardinality makes the entropy sums tractable.
#ifndef PQNC_SYMMETRY_HPP
#define PQNC_SYMMETRY_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "pqnc/types.hpp"

namespace pqnc {

// How a vector maps onto its canonical representative:
// canonical[j] = (z[perm[j]] + shift) mod K.
struct CanonicalTransform {
    int shift = 0;
    std::vector<int> perm;
};

struct CanonicalResult {
    std::vector<int> canonical;
    CanonicalTransform transform;
};

// Canonical representative under permutation + constant addition mod K:
// the lexicographically smallest sorted vector over all K shifts.  The
// reported transform uses the smallest achieving shift and a stable sort.
CanonicalResult canonical_conditional(std::span<const int> z, int K);

// Canonical form of the residues z mod a under permutation + constant
// addition mod a.  With a == 1 this is always the all-zero vector.
std::vector<int> canonical_output(std::span<const int> z, int K, int a);

// Canonical form under constant addition alone (no sorting); preserves
// slot order, so it remains valid when per-slot dither breaks permutation
// symmetry.
std::vector<int> shift_canonical(std::span<const int> z, int K);

// One representative per orbit, flat-packed (stride L), with orbit sizes.
// counts[i] is the number of vectors in {0..base-1}^L in orbit i; the
// counts always sum to base^L.
struct OrbitTable {
    int base = 0; // alphabet size the orbits partition (K, or a for outputs)
    int L = 0;
    std::vector<std::uint8_t> reps;    // size() == count() * L, sorted vectors
    std::vector<std::uint64_t> counts;

    size_t count() const { return counts.size(); }
    std::span<const std::uint8_t> rep(size_t i) const {
        return {reps.data() + i * static_cast<size_t>(L), static_cast<size_t>(L)};
    }
};

struct ConditionalOrbitTable : OrbitTable {};

// Output orbits carry the weight of the full K-ary preimage: each residue
// vector stands for M^L outcome vectors, so counts[i] = m_i * M^L where
// m_i is the orbit size within {0..a-1}^L.
struct OutputOrbitTable : OrbitTable {
    int K = 0;
    int M = 0;
};

// Enumerates shift-minimal sorted vectors directly (never the full base^L
// space); orbit sizes come from the stabilizer product formula
// count = base * L! / (s * prod_v mult_v!).  Throws ResourceLimitError when
// the candidate multiset space is too large to walk.
ConditionalOrbitTable enumerate_conditional_orbits(int K, int L);
OutputOrbitTable enumerate_output_orbits(int K, int M, int L);

// Input representatives for P(z): for a sorted residue vector z_rep,
// inputs that permute within groups of equal z components give identical
// conditional probabilities, so one sorted assignment per group suffices.
struct InputReduction {
    std::vector<InputVector> reps;
    std::vector<std::uint64_t> mults; // permutation counts; sums to M^L
};

InputReduction reduce_inputs(std::span<const int> z_rep, int M);

// Walk the same reduction without materializing it.  visit(x, mult) is
// called once per representative with a scratch vector owned by the walker.
template <typename Visit>
void for_each_input_rep(std::span<const int> z_rep, int M, Visit&& visit);

// Dense packing of a vector with entries < 64 into one key; used for
// canonical-form lookups.  Requires L <= 10.
std::uint64_t pack_key(std::span<const int> v);
std::uint64_t pack_key_u8(std::span<const std::uint8_t> v);

// --- implementation of the template walker ---

namespace detail {

struct InputGroup {
    int start = 0;            // first slot of the group
    int size = 0;             // number of slots
    std::uint64_t perms = 1;  // multinomial permutation count of the chosen multiset
};

std::uint64_t multinomial_permutations(std::span<const int> sorted_vals);

} // namespace detail

template <typename Visit>
void for_each_input_rep(std::span<const int> z_rep, int M, Visit&& visit) {
    const int L = static_cast<int>(z_rep.size());
    // Group boundaries over equal z components (z_rep sorted).
    std::vector<detail::InputGroup> groups;
    for (int i = 0; i < L;) {
        int j = i;
        while (j < L && z_rep[static_cast<size_t>(j)] == z_rep[static_cast<size_t>(i)]) ++j;
        groups.push_back({i, j - i, 1});
        i = j;
    }
    InputVector x(static_cast<size_t>(L), 0);
    // Odometer over non-decreasing assignments per group.
    const auto advance_group = [&](const detail::InputGroup& g) -> bool {
        // Next non-decreasing tuple within slots [start, start+size).
        for (int i = g.start + g.size - 1; i >= g.start; --i) {
            if (x[static_cast<size_t>(i)] < M - 1) {
                const int v = x[static_cast<size_t>(i)] + 1;
                for (int j = i; j < g.start + g.size; ++j) x[static_cast<size_t>(j)] = v;
                return true;
            }
        }
        return false;
    };
    std::vector<int> scratch;
    const auto group_perms = [&](const detail::InputGroup& g) {
        scratch.assign(x.begin() + g.start, x.begin() + g.start + g.size);
        return detail::multinomial_permutations(scratch);
    };
    for (auto& g : groups) g.perms = group_perms(g);
    for (;;) {
        std::uint64_t mult = 1;
        for (const auto& g : groups) mult *= g.perms;
        visit(std::span<const int>(x.data(), x.size()), mult);
        // Advance the rightmost group that still has a successor.
        int gi = static_cast<int>(groups.size()) - 1;
        for (; gi >= 0; --gi) {
            if (advance_group(groups[static_cast<size_t>(gi)])) {
                groups[static_cast<size_t>(gi)].perms = group_perms(groups[static_cast<size_t>(gi)]);
                // Reset all groups to the right.
                for (size_t k = static_cast<size_t>(gi) + 1; k < groups.size(); ++k) {
                    auto& h = groups[k];
                    for (int j = h.start; j < h.start + h.size; ++j) x[static_cast<size_t>(j)] = 0;
                    h.perms = group_perms(h);
                }
                break;
            }
        }
        if (gi < 0) break;
    }
}

} // namespace pqnc

#endif
