#include <benchmark/benchmark.h>

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "ipg/check.hpp"
#include "ipg/engine.hpp"

#ifndef IPG_CORPUS_DIR
#define IPG_CORPUS_DIR "corpus"
#endif

namespace {

std::string read_file(const std::string& rel) {
    std::ifstream f(std::string(IPG_CORPUS_DIR) + "/" + rel, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

ipg::Grammar load(const std::string& name) {
    auto r = ipg::load_grammar(read_file("grammars/" + name + ".ipg"));
    if (!r.ok()) throw std::runtime_error("grammar failed to load: " + name);
    return r.grammar;
}

std::string random_bits(std::size_t n) {
    std::mt19937_64 rng(12345);
    std::string s;
    s.reserve(n);
    for (std::size_t i = 0; i < n; ++i) s += "01"[rng() & 1];
    return s;
}

void bm_numeral(benchmark::State& state) {
    auto g = load("numeral");
    auto input = random_bits(static_cast<std::size_t>(state.range(0)));
    ipg::EngineOptions opts;
    opts.memo = state.range(1) != 0;
    for (auto _ : state) {
        auto out = ipg::parse(input, g, "Int", opts);
        benchmark::DoNotOptimize(out.success);
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                            state.range(0));
}

void bm_gif(benchmark::State& state) {
    auto g = load("gif_subset");
    auto input = read_file("fixtures/gif_7block.bin");
    for (auto _ : state) {
        auto out = ipg::parse(input, g, "GIF");
        benchmark::DoNotOptimize(out.success);
    }
}

void bm_elf(benchmark::State& state) {
    auto g = load("elf_subset");
    auto input = read_file("fixtures/elf.bin");
    for (auto _ : state) {
        auto out = ipg::parse(input, g, "ELF");
        benchmark::DoNotOptimize(out.success);
    }
}

void bm_backward_numeral(benchmark::State& state) {
    auto g = load("pdf_bnum");
    std::string input(static_cast<std::size_t>(state.range(0)), '7');
    for (auto _ : state) {
        auto out = ipg::parse(input, g, "bNum");
        benchmark::DoNotOptimize(out.success);
    }
}

}  // namespace

BENCHMARK(bm_numeral)
    ->Args({256, 1})
    ->Args({1024, 1})
    ->Args({4096, 1})
    ->Args({256, 0});
BENCHMARK(bm_gif);
BENCHMARK(bm_elf);
BENCHMARK(bm_backward_numeral)->Arg(16)->Arg(64)->Arg(256);

BENCHMARK_MAIN();
