#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#ifndef IPG_CORPUS_DIR
#define IPG_CORPUS_DIR "corpus"
#endif

namespace testutil {

inline std::string corpus_path(const std::string& rel) {
    return std::string(IPG_CORPUS_DIR) + "/" + rel;
}

inline std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

inline std::vector<std::uint8_t> read_bytes(const std::string& path) {
    std::string s = read_file(path);
    return std::vector<std::uint8_t>(s.begin(), s.end());
}

// Deterministic xorshift RNG for fuzz-style tests.
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed ? seed : 0x9e3779b97f4a7c15ull) {}
    std::uint64_t next() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return state;
    }
    std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }
};

}  // namespace testutil
