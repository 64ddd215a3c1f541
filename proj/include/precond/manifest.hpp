// Run manifests: every command records its inputs (command line, config
// snapshot, seed, input digests, tool version) plus timing. Reports carry
// the digest of the deterministic fields, so re-running a command with the
// same inputs reproduces byte-identical report files; timing lives only in
// the manifest sidecar.

#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace precond {

constexpr const char* kToolVersion = "precond 0.1.0";

namespace detail {

// Compact SHA-256, sufficient for content digests.
class Sha256 {
public:
    Sha256() { reset(); }

    void update(const void* data, size_t len) {
        const auto* p = static_cast<const uint8_t*>(data);
        while (len--) {
            buffer_[buflen_++] = *p++;
            if (buflen_ == 64) {
                process(buffer_);
                total_ += 512;
                buflen_ = 0;
            }
        }
    }

    std::string hex_digest() {
        uint64_t total_bits = total_ + buflen_ * 8;
        uint8_t pad = 0x80;
        update(&pad, 1);
        uint8_t zero = 0;
        while (buflen_ != 56) update(&zero, 1);
        for (int i = 7; i >= 0; --i) {
            uint8_t b = static_cast<uint8_t>(total_bits >> (i * 8));
            buffer_[buflen_++] = b;
        }
        process(buffer_);
        static const char* hexd = "0123456789abcdef";
        std::string out;
        for (uint32_t v : state_) {
            for (int i = 28; i >= 0; i -= 4) out += hexd[(v >> i) & 0xF];
        }
        return out;
    }

private:
    std::array<uint32_t, 8> state_{};
    uint8_t buffer_[64]{};
    size_t buflen_ = 0;
    uint64_t total_ = 0;

    void reset() {
        state_ = {0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a,
                  0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19};
    }

    static uint32_t rotr(uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

    void process(const uint8_t* chunk) {
        static const uint32_t k[64] = {
            0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1,
            0x923f82a4, 0xab1c5ed5, 0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3,
            0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174, 0xe49b69c1, 0xefbe4786,
            0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
            0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147,
            0x06ca6351, 0x14292967, 0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13,
            0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85, 0xa2bfe8a1, 0xa81a664b,
            0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
            0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a,
            0x5b9cca4f, 0x682e6ff3, 0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208,
            0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2};
        uint32_t w[64];
        for (int i = 0; i < 16; ++i)
            w[i] = (chunk[i * 4] << 24) | (chunk[i * 4 + 1] << 16) | (chunk[i * 4 + 2] << 8) |
                   chunk[i * 4 + 3];
        for (int i = 16; i < 64; ++i) {
            uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
            uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
            w[i] = w[i - 16] + s0 + w[i - 7] + s1;
        }
        auto [a, b, c, d, e, f, g, h] = state_;
        for (int i = 0; i < 64; ++i) {
            uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
            uint32_t ch = (e & f) ^ (~e & g);
            uint32_t t1 = h + s1 + ch + k[i] + w[i];
            uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
            uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
            uint32_t t2 = s0 + maj;
            h = g;
            g = f;
            f = e;
            e = d + t1;
            d = c;
            c = b;
            b = a;
            a = t1 + t2;
        }
        state_[0] += a;
        state_[1] += b;
        state_[2] += c;
        state_[3] += d;
        state_[4] += e;
        state_[5] += f;
        state_[6] += g;
        state_[7] += h;
    }
};

}  // namespace detail

inline std::string sha256_hex(const std::string& data) {
    detail::Sha256 h;
    h.update(data.data(), data.size());
    return h.hex_digest();
}

inline std::string sha256_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) return "missing";
    std::ostringstream ss;
    ss << f.rdbuf();
    return sha256_hex(ss.str());
}

struct RunManifest {
    std::string command;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> input_digests;  // path -> sha256
    double elapsed_ms = 0;

    void add_input(const std::string& path) { input_digests.push_back({path, sha256_file(path)}); }

    /// Digest over the deterministic fields only (timing excluded).
    std::string digest() const {
        nlohmann::ordered_json j;
        j["command"] = command;
        j["config"] = config;
        j["seed"] = seed;
        nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
        for (const auto& [path, d] : input_digests) inputs[path] = d;
        j["inputs"] = inputs;
        j["version"] = kToolVersion;
        return sha256_hex(j.dump());
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["command"] = command;
        j["config"] = config;
        j["seed"] = seed;
        nlohmann::ordered_json inputs = nlohmann::ordered_json::object();
        for (const auto& [path, d] : input_digests) inputs[path] = d;
        j["inputs"] = inputs;
        j["version"] = kToolVersion;
        j["digest"] = digest();
        j["elapsed_ms"] = elapsed_ms;
        return j;
    }
};

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + path + "'");
    f << content;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace precond
