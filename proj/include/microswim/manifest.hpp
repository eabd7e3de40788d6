#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace microswim {

inline constexpr const char* kArtifactVersion = "0.1.0";

struct ManifestFile {
    std::string path;   ///< relative to the run directory
    std::uint64_t bytes = 0;
    std::string digest; ///< fnv1a-64 over content, hex
};

/// Run provenance record. Written last, so its presence signals a complete
/// run; re-runs with the same config and seed reproduce every listed file
/// byte-for-byte (timestamps live only here).
struct RunManifest {
    std::string artifact_version = kArtifactVersion;
    nlohmann::json* config = nullptr;  // set via write_manifest overload
    std::uint64_t seed = 0;
    std::string started;   ///< ISO-8601 UTC
    std::string finished;
    std::vector<ManifestFile> files;
};

std::string iso_utc_now();

/// FNV-1a 64-bit digest of a file's bytes, lowercase hex.
std::string file_digest(const std::filesystem::path& path);

/// Digests `files` (paths relative to dir) and writes dir/manifest.json.
void write_manifest(const std::filesystem::path& dir, const nlohmann::json& config,
                    std::uint64_t seed, const std::string& started,
                    const std::vector<std::string>& files);

/// Re-digests every file listed in dir/manifest.json; returns problems
/// (missing files, size or digest mismatches). Empty means verified.
std::vector<std::string> verify_manifest(const std::filesystem::path& dir);

}  // namespace microswim
