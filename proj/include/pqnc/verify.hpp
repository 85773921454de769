// Self-check suite: every symmetry the reduction engine relies on is
// re-derived from independent evaluation routes and measured, plus an
// end-to-end comparison against the brute-force reference.
#ifndef PQNC_VERIFY_HPP
#define PQNC_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pqnc/types.hpp"

namespace pqnc {

struct PropertyCheck {
    std::string name;
    double deviation = 0.0; // worst observed
    double tolerance = 0.0;
    bool pass = false;
};

struct VerifyReport {
    std::vector<PropertyCheck> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

VerifyReport run_verification(int M, int K, int L, double snr_db, int n_phi,
                              std::uint64_t seed);

} // namespace pqnc

#endif
