#include "manifest.hpp"

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <stdexcept>

namespace bjj::io {

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "' for hashing");
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw std::runtime_error("SHA-256 initialisation failed");
    }
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md.data(), &len);
    EVP_MD_CTX_free(ctx);
    std::string hex;
    hex.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        char b[3];
        std::snprintf(b, sizeof b, "%02x", md[i]);
        hex += b;
    }
    return hex;
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

RunManifest::RunManifest(std::string command, nlohmann::json config)
    : command_(std::move(command)), config_(std::move(config)), started_(utc_timestamp()) {}

void RunManifest::add_seed(const std::string& name, std::uint64_t seed) { seeds_[name] = seed; }

void RunManifest::add_output(const std::filesystem::path& path) { outputs_.push_back(path); }

void RunManifest::set(const std::string& key, nlohmann::json value) { extra_[key] = std::move(value); }

nlohmann::json RunManifest::to_json() const {
    nlohmann::json j;
    j["tool"] = "bjj";
    j["version"] = kToolVersion;
    j["command"] = command_;
    j["config"] = config_;
    j["seeds"] = seeds_;
    j["started"] = started_;
    j["finished"] = finished_;
    nlohmann::json files = nlohmann::json::array();
    for (const auto& p : outputs_) {
        files.push_back({{"path", p.filename().string()}, {"sha256", sha256_file(p)},
                         {"bytes", std::filesystem::file_size(p)}});
    }
    j["outputs"] = files;
    if (!extra_.empty()) j["results"] = extra_;
    return j;
}

void RunManifest::write(const std::filesystem::path& path) {
    finished_ = utc_timestamp();
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write manifest '" + path.string() + "'");
    out << to_json().dump(2) << '\n';
}

std::vector<std::string> verify_manifest(const std::filesystem::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw std::runtime_error("cannot open manifest '" + manifest_path.string() + "'");
    const nlohmann::json j = nlohmann::json::parse(in);
    std::vector<std::string> bad;
    for (const auto& f : j.at("outputs")) {
        const auto p = manifest_path.parent_path() / f.at("path").get<std::string>();
        if (!std::filesystem::exists(p) || sha256_file(p) != f.at("sha256").get<std::string>()) {
            bad.push_back(p.string());
        }
    }
    return bad;
}

}  // namespace bjj::io
