// JSON persistence for orbit tables so repeated runs at the same
// (K, M, L) skip re-enumeration.
#ifndef PQNC_ORBIT_CACHE_HPP
#define PQNC_ORBIT_CACHE_HPP

#include <optional>
#include <string>
#include <utility>

#include "pqnc/symmetry.hpp"

namespace pqnc {

inline constexpr int orbit_cache_schema = 1;

std::string orbit_cache_filename(int K, int M, int L);

void save_orbit_tables(const std::string& path, const ConditionalOrbitTable& cond,
                       const OutputOrbitTable& out);

// Returns nothing if the file is missing, malformed, from a different
// schema, or keyed to different parameters.
std::optional<std::pair<ConditionalOrbitTable, OutputOrbitTable>>
load_orbit_tables(const std::string& path, int K, int M, int L);

} // namespace pqnc

#endif
