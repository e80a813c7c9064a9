// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <unordered_set>
#include <utility>
#include <vector>

#include <udstr/core.hpp>
#include <udstr/field.hpp>

namespace udstr {

/**
 * Injective map from shingle instances (shingle, occurrence) into the encoding
 * range [0, limit) of a field. The shingle is read as a bijective base-(|alphabet|+1)
 * numeral with the delimiter as digit 1; the occurrence index fills the low bits.
 */
class ShingleCodec {
  public:
    ShingleCodec(Alphabet alphabet, unsigned occurrence_bits, std::uint64_t limit);

    /// Bits needed for occurrence indices 1..max_multiplicity.
    static unsigned occurrence_bits_for(std::uint64_t max_multiplicity);

    /// Throws kEncodingCapacity when the instance does not fit, kInvalidSymbol for
    /// bytes outside the alphabet.
    std::uint64_t encode(const Shingle& s, std::uint64_t occurrence) const;
    /// Inverse of encode; nullopt for values no instance maps to.
    std::optional<std::pair<Shingle, std::uint64_t>> decode(std::uint64_t value) const;

    const Alphabet& alphabet() const { return alphabet_; }
    unsigned occurrence_bits() const { return occ_bits_; }
    std::uint64_t limit() const { return limit_; }

  private:
    Alphabet alphabet_;
    unsigned occ_bits_;
    std::uint64_t limit_;
    std::uint64_t base_;
};

/// Encodings of every instance of `s`, occurrences numbered 1..count.
std::vector<std::uint64_t> encode_instances(const ShingleMultiset& s, const ShingleCodec& codec);

struct EvalBundle {
    std::vector<std::uint64_t> points;
    std::vector<std::uint64_t> values;
    std::uint64_t set_size = 0;
};

struct Delta {
    ShingleMultiset only_local;
    ShingleMultiset only_remote;

    std::uint64_t size() const { return only_local.total() + only_remote.total(); }
};

/// Characteristic polynomial values at a fixed set of encoded instances.
class CharPoly {
  public:
    CharPoly(const ShingleMultiset& s, const ShingleCodec& codec, const PrimeField& field);

    /// Throws kInvalidPoint for points inside the encoding range.
    std::uint64_t at(std::uint64_t point) const;
    std::uint64_t set_size() const { return roots_.size(); }

  private:
    std::vector<std::uint64_t> roots_;
    PrimeField field_;
    std::uint64_t limit_;
};

/// values[i] = prod over instances e of (points[i] - e).
EvalBundle char_poly_evals(const ShingleMultiset& s, const std::vector<std::uint64_t>& points,
                           const ShingleCodec& codec, const PrimeField& field);

/// `count` distinct points from the top of the field down: p-1, p-2, ...
std::vector<std::uint64_t> fixed_points(const PrimeField& field, std::size_t count);

/**
 * Recovers the multiset difference from evaluations at shared points. The
 * difference is assumed to hold at most `bound` instances; points beyond those
 * the interpolation needs verify the result. Throws kBoundExceeded when
 * verification fails and kPointCollision when a remote value is zero.
 */
Delta reconcile_fixed(const ShingleMultiset& local, const EvalBundle& local_evals, const EvalBundle& remote_evals,
                      std::size_t bound, const ShingleCodec& codec, const PrimeField& field);

/// The remote multiset: local minus only_local plus only_remote.
ShingleMultiset apply_delta(const ShingleMultiset& local, const Delta& delta);

/// Distinct evaluation points from [p/2, p), pseudorandom from a seed.
class PointStream {
  public:
    PointStream(const PrimeField& field, std::uint64_t seed);
    /// Throws kCapacity once every point of the range has been drawn.
    std::uint64_t next();
    std::size_t drawn() const { return seen_.size(); }

  private:
    std::mt19937_64 rng_;
    std::uint64_t low_;
    std::uint64_t span_;
    std::unordered_set<std::uint64_t> seen_;
};

/// Emits (point, value) pairs for the local multiset without a size bound.
class RatelessEncoder {
  public:
    RatelessEncoder(const ShingleMultiset& s, const ShingleCodec& codec, const PrimeField& field, std::uint64_t seed);
    std::pair<std::uint64_t, std::uint64_t> next();
    std::size_t produced() const { return points_.drawn(); }

  private:
    CharPoly chi_;
    PointStream points_;
};

/**
 * Consumes remote (point, value) pairs. After N pairs it tests the hypothesis that
 * the difference has N - k instances: the first pairs fix the rational function,
 * the last k verify it.
 */
class RatelessDecoder {
  public:
    RatelessDecoder(const ShingleMultiset& local, const ShingleCodec& codec, const PrimeField& field,
                    std::uint64_t seed, std::uint64_t remote_set_size, std::size_t verification_points);

    /// The difference once the newest pair completes a verified hypothesis.
    /// Throws kProtocolError if the point is not the next one of the shared stream.
    std::optional<Delta> consume(std::uint64_t point, std::uint64_t remote_value);

    std::size_t consumed() const { return points_.size(); }
    bool done() const { return result_.has_value(); }
    const std::optional<Delta>& result() const { return result_; }

  private:
    ShingleMultiset local_;
    ShingleCodec codec_;
    PrimeField field_;
    CharPoly chi_;
    PointStream stream_;
    std::int64_t size_diff_;
    std::size_t k_;
    std::vector<std::uint64_t> points_;
    std::vector<std::uint64_t> local_values_;
    std::vector<std::uint64_t> remote_values_;
    std::optional<Delta> result_;
};

}  // namespace udstr
