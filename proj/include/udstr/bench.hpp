// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace udstr {

struct UdBench {
    std::size_t n = 0;
    std::size_t sigma = 0;
    std::vector<double> seconds;  // one entry per trial
    double median_seconds = 0;
    std::size_t slots = 0;       // decider slots after the last trial
    std::size_t max_stack = 0;   // deepest visit stack seen
    std::size_t rejections = 0;  // per trial
};

/**
 * Times the decider on `trials` random words of length n over `sigma` symbols.
 * Random words are rarely uniquely decodable, so the decider restarts after each
 * rejection and every symbol is processed by a live state.
 */
UdBench bench_ud(std::size_t n, std::size_t sigma, std::size_t trials, std::uint64_t seed);

/// `sigma` printable bytes other than the delimiter.
std::string bench_alphabet(std::size_t sigma);

}  // namespace udstr
