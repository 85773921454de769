#include "pqnc/orbit_cache.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace pqnc {

namespace {

using nlohmann::json;

json table_to_json(const OrbitTable& t) {
    json j;
    j["base"] = t.base;
    j["L"] = t.L;
    j["reps"] = t.reps;     // flat, stride L
    j["counts"] = t.counts;
    return j;
}

bool table_from_json(const json& j, OrbitTable& t) {
    t.base = j.at("base").get<int>();
    t.L = j.at("L").get<int>();
    t.reps = j.at("reps").get<std::vector<std::uint8_t>>();
    t.counts = j.at("counts").get<std::vector<std::uint64_t>>();
    return t.reps.size() == t.counts.size() * static_cast<size_t>(t.L);
}

} // namespace

std::string orbit_cache_filename(int K, int M, int L) {
    std::ostringstream s;
    s << "orbits_K" << K << "_M" << M << "_L" << L << ".json";
    return s.str();
}

void save_orbit_tables(const std::string& path, const ConditionalOrbitTable& cond,
                       const OutputOrbitTable& out) {
    json j;
    j["schema"] = orbit_cache_schema;
    j["K"] = out.K;
    j["M"] = out.M;
    j["L"] = out.L;
    j["conditional"] = table_to_json(cond);
    j["output"] = table_to_json(out);
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write orbit cache: " + path);
    f << j.dump() << '\n';
}

std::optional<std::pair<ConditionalOrbitTable, OutputOrbitTable>>
load_orbit_tables(const std::string& path, int K, int M, int L) {
    std::ifstream f(path);
    if (!f) return std::nullopt;
    json j;
    try {
        f >> j;
        if (j.at("schema").get<int>() != orbit_cache_schema) return std::nullopt;
        if (j.at("K").get<int>() != K || j.at("M").get<int>() != M || j.at("L").get<int>() != L)
            return std::nullopt;
        ConditionalOrbitTable cond;
        OutputOrbitTable out;
        if (!table_from_json(j.at("conditional"), cond)) return std::nullopt;
        if (!table_from_json(j.at("output"), out)) return std::nullopt;
        if (cond.base != K || cond.L != L) return std::nullopt;
        if (out.base != K / M || out.L != L) return std::nullopt;
        out.K = K;
        out.M = M;
        return std::make_pair(std::move(cond), std::move(out));
    } catch (const json::exception&) {
        return std::nullopt;
    }
}

} // namespace pqnc
