#include "t2qc/manifest.hpp"

#include <openssl/evp.h>

#include <chrono>
#include <fstream>

#include "json.hpp"
#include "t2qc/errors.hpp"

namespace t2qc {

namespace {

std::string digest_stream(std::istream& in) {
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw Error("sha256 init failed");
    }
    char buf[1 << 16];
    while (in.good()) {
        in.read(buf, sizeof buf);
        EVP_DigestUpdate(ctx, buf, std::size_t(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xF];
    }
    return out;
}

}  // namespace

std::string sha256_hex_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "' for digest");
    return digest_stream(in);
}

std::string sha256_hex_string(const std::string& data) {
    std::istringstream in(data);
    return digest_stream(in);
}

void RunManifest::write_for(const std::string& output_path) const {
    nlohmann::json j;
    j["command"] = command;
    j["args"] = args;
    auto& ji = j["inputs"] = nlohmann::json::array();
    for (const auto& [path, digest] : inputs)
        ji.push_back({{"path", path}, {"sha256", digest}});
    if (seed) j["seed"] = *seed;
    j["version"] = version;
    const auto now = std::chrono::system_clock::now();
    j["timestamp_unix"] =
        std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch())
            .count();
    std::ofstream out(output_path + ".manifest.json");
    if (!out) throw ParseError("cannot write manifest for '" + output_path + "'");
    out << j.dump(2) << '\n';
}

}  // namespace t2qc
