// SPDX-License-Identifier: Apache-2.0

#include <udstr/bench.hpp>

#include <algorithm>
#include <chrono>
#include <random>

#include <udstr/decider.hpp>

namespace udstr {

std::string bench_alphabet(std::size_t sigma) {
    std::string out;
    for (int c = '!'; c <= '~' && out.size() < sigma; ++c) {
        if (c != kDelimiter) out += static_cast<char>(c);
    }
    if (out.size() != sigma || sigma == 0) {
        throw Error(ErrorCode::kInvalidParameter, "sigma must lie in 1.." + std::to_string(93));
    }
    return out;
}

UdBench bench_ud(std::size_t n, std::size_t sigma, std::size_t trials, std::uint64_t seed) {
    if (trials == 0) throw Error(ErrorCode::kInvalidParameter, "at least one trial");
    const std::string symbols = bench_alphabet(sigma);
    UdBench out;
    out.n = n;
    out.sigma = sigma;
    std::mt19937_64 rng(seed);
    std::string word(n, '\0');
    Decider decider{Alphabet(symbols)};
    for (std::size_t t = 0; t < trials; ++t) {
        for (auto& c : word) c = symbols[rng() % sigma];
        decider.reset();
        std::size_t rejections = 0;
        const auto start = std::chrono::steady_clock::now();
        for (char c : word) {
            if (!decider.push(c).ud()) {
                ++rejections;
                out.max_stack = std::max(out.max_stack, decider.stack_depth());
                decider.reset();
            }
        }
        const auto stop = std::chrono::steady_clock::now();
        out.max_stack = std::max(out.max_stack, decider.stack_depth());
        out.seconds.push_back(std::chrono::duration<double>(stop - start).count());
        out.rejections = rejections;
        out.slots = decider.slot_count();
    }
    auto sorted = out.seconds;
    std::sort(sorted.begin(), sorted.end());
    out.median_seconds = sorted[sorted.size() / 2];
    return out;
}

}  // namespace udstr
