#pragma once

#include <cstdint>
#include <fstream>
#include <string>

#include <json.hpp>

namespace cip {

inline constexpr const char* kVersion = "0.1.0";

/// FNV-1a over the canonical config text; enough to pin a run.
inline std::uint64_t config_hash(const std::string& text) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

/// Writes `<output>.manifest.json` next to an output file: everything
/// needed to reproduce it bit-exactly.
inline void write_manifest(const std::string& out_path, const nlohmann::json& config,
                           std::uint64_t seed) {
    nlohmann::json m;
    m["version"] = kVersion;
    m["output"] = out_path;
    m["config"] = config;
    m["config_hash"] = config_hash(config.dump());
    m["seed"] = seed;
    std::ofstream os(out_path + ".manifest.json");
    os << m.dump(2) << '\n';
}

} // namespace cip
