#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace t2qc {

std::string sha256_hex_file(const std::string& path);
std::string sha256_hex_string(const std::string& data);

/// Provenance sidecar for every CLI run: command, flags, digests of all
/// inputs consumed, seed, version, timestamp.
struct RunManifest {
    std::string command;
    std::vector<std::string> args;
    std::vector<std::pair<std::string, std::string>> inputs;  // path, sha256
    std::optional<std::uint64_t> seed;
    std::string version;

    void add_input(const std::string& path) {
        inputs.emplace_back(path, sha256_hex_file(path));
    }

    /// Writes `<output_path>.manifest.json`.
    void write_for(const std::string& output_path) const;
};

}  // namespace t2qc
