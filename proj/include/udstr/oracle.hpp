// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include <udstr/core.hpp>

namespace udstr {

// Ground truth for small instances, independent of the streaming decider.

struct DecodingCount {
    std::uint64_t count = 0;  // saturates at the requested cap
    std::vector<Word> witnesses;
};

/**
 * Counts the distinct words whose delimited shingling equals `s`, by
 * backtracking over Eulerian paths of the shingle graph from the all-delimiter
 * node. Stops once `cap` distinct decodings are found.
 *
 * The shingle length comes from `s.base_len()`, or the shortest shingle when unset.
 */
DecodingCount decoding_count(const ShingleMultiset& s, std::uint64_t cap = 2);

/// One instance (x, a, b) of the obstruction patterns.
struct Obstruction {
    char x;
    char a;
    char b;
};

/**
 * Finds x and a, b != x (a == b allowed) with
 *   w in  S* a x (S\{a})* b S*   and   w in  S* a (S\{x})* b S*.
 */
std::optional<Obstruction> find_obstruction(const Word& w);
bool is_obstruction(const Word& w);

/// Number of distinct obstruction languages over an alphabet of `sigma_size` symbols.
std::uint64_t obstruction_language_count(std::uint64_t sigma_size);

struct TranspositionParts {
    Word x1, x2, x3, x4, x5;
    Word z1, z2;
};

/// x1 z1 x2 z2 x3 z1 x4 z2 x5  ->  x1 z1 x4 z2 x3 z1 x2 z2 x5.
std::pair<Word, Word> pevzner_transpose(const TranspositionParts& parts, std::size_t q);

/// z1 x1 z2 x2 z1  ->  z2 x2 z1 x1 z2.
std::pair<Word, Word> pevzner_rotate(const Word& x1, const Word& x2, const Word& z1, const Word& z2,
                                     std::size_t q);

/// q-gram multiset of the raw word with no delimiter padding.
ShingleMultiset interior_qgrams(const Word& w, std::size_t q);

enum class PevznerKind { kTranspose, kRotate };

struct PevznerPair {
    Word x;
    Word x_prime;
};

/// Random transformation instance over `alphabet`; pieces have length <= max_piece.
/// Rotations draw z1 == z2 half of the time so that anchored multisets also agree.
PevznerPair random_pevzner(PevznerKind kind, std::mt19937_64& rng, const Alphabet& alphabet, std::size_t q,
                           std::size_t max_piece = 4);

}  // namespace udstr
