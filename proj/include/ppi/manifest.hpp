#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace ppi {

inline constexpr const char* kToolVersion = "0.1.0";

// FNV-1a 64 over raw file bytes; enough to pin inputs in a manifest.
inline std::uint64_t file_digest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot digest " + path);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

// Everything needed to re-run a command bit-identically. No timestamps on
// purpose.
struct RunManifest {
    std::string command;
    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_dir;
    std::vector<std::pair<std::string, std::uint64_t>> input_digests;

    void add_input(const std::string& path) {
        input_digests.emplace_back(path, file_digest(path));
    }

    void write(const std::string& path) const {
        std::ofstream out(path);
        out << "command=" << command << "\n";
        out << "version=" << kToolVersion << "\n";
        if (!config_path.empty()) out << "config=" << config_path << "\n";
        out << "seed=" << seed << "\n";
        out << "out=" << out_dir << "\n";
        for (const auto& [input, digest] : input_digests) {
            std::ostringstream hex;
            hex << std::hex << digest;
            out << "input=" << input << " fnv64=" << hex.str() << "\n";
        }
    }
};

}  // namespace ppi
