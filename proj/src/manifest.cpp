#include "microswim/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "microswim/errors.hpp"

namespace microswim {

std::string iso_utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string file_digest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("file_digest: cannot open " + path.string());
    std::uint64_t h = 14695981039346656037ull;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
        if (got < static_cast<std::streamsize>(sizeof(buf))) break;
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

void write_manifest(const std::filesystem::path& dir, const nlohmann::json& config,
                    std::uint64_t seed, const std::string& started,
                    const std::vector<std::string>& files) {
    nlohmann::json j;
    j["artifact_version"] = kArtifactVersion;
    j["config"] = config;
    j["seed"] = seed;
    j["started"] = started;
    j["finished"] = iso_utc_now();
    j["files"] = nlohmann::json::array();
    for (const auto& f : files) {
        const auto full = dir / f;
        nlohmann::json entry;
        entry["path"] = f;
        entry["bytes"] = static_cast<std::uint64_t>(std::filesystem::file_size(full));
        entry["digest"] = file_digest(full);
        j["files"].push_back(entry);
    }
    std::ofstream out(dir / "manifest.json");
    if (!out) throw DataError("cannot write manifest in " + dir.string());
    out << j.dump(2) << "\n";
}

std::vector<std::string> verify_manifest(const std::filesystem::path& dir) {
    std::vector<std::string> problems;
    const auto mpath = dir / "manifest.json";
    std::ifstream in(mpath);
    if (!in) return {"missing manifest.json in " + dir.string()};
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        return {std::string("unreadable manifest: ") + e.what()};
    }
    for (const auto& entry : j.value("files", nlohmann::json::array())) {
        const std::string rel = entry.value("path", "");
        const auto full = dir / rel;
        if (!std::filesystem::exists(full)) {
            problems.push_back("missing file: " + rel);
            continue;
        }
        const auto bytes = static_cast<std::uint64_t>(std::filesystem::file_size(full));
        if (bytes != entry.value("bytes", std::uint64_t{0}))
            problems.push_back("size mismatch: " + rel);
        else if (file_digest(full) != entry.value("digest", ""))
            problems.push_back("digest mismatch: " + rel);
    }
    return problems;
}

}  // namespace microswim
