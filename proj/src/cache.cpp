#include "gvfan/cache.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gvfan/io.hpp"

namespace gvfan {

namespace {

// FNV-1a, 64 bit
uint64_t fnv1a(const std::string& s) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace

std::string cache_key(const ExchangeMatrix& B, const std::string& label) {
    ExchangeMatrix rep = B.n <= 10 ? canonical_form(B) : B;
    std::string payload = matrix_key(rep) + "|" + label + "|" + kVersion;
    char hex[17];
    snprintf(hex, sizeof hex, "%016llx", (unsigned long long)fnv1a(payload));
    return label.substr(0, label.find('|')) + "-" + hex;
}

std::optional<std::string> cache_load(const std::string& dir, const std::string& key) {
    if (dir.empty()) return std::nullopt;
    std::filesystem::path p = std::filesystem::path(dir) / (key + ".json");
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void cache_store(const std::string& dir, const std::string& key, const std::string& value) {
    if (dir.empty()) return;
    std::filesystem::create_directories(dir);
    atomic_write_file((std::filesystem::path(dir) / (key + ".json")).string(), value);
}

}  // namespace gvfan
