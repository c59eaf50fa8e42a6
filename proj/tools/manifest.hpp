// manifest.hpp - run manifests listing every output file with its SHA-256

#pragma once

#include "json.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace bjj::io {

inline constexpr const char* kToolVersion = "1.0.0";

std::string sha256_file(const std::filesystem::path& path);

// UTC time in ISO 8601, second resolution.
std::string utc_timestamp();

class RunManifest {
public:
    RunManifest(std::string command, nlohmann::json config);

    void add_seed(const std::string& name, std::uint64_t seed);
    void add_output(const std::filesystem::path& path);
    void set(const std::string& key, nlohmann::json value);

    nlohmann::json to_json() const;
    // Stamps the finish time and writes the manifest (the manifest itself is
    // not listed among the outputs).
    void write(const std::filesystem::path& path);

private:
    std::string command_;
    nlohmann::json config_;
    nlohmann::json seeds_ = nlohmann::json::object();
    nlohmann::json extra_ = nlohmann::json::object();
    std::vector<std::filesystem::path> outputs_;
    std::string started_;
    std::string finished_;
};

// Recomputes every listed digest; returns the paths whose content differs.
std::vector<std::string> verify_manifest(const std::filesystem::path& manifest_path);

}  // namespace bjj::io
