// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <udstr/core.hpp>
#include <udstr/field.hpp>
#include <udstr/set_recon.hpp>
#include <udstr/transport.hpp>

namespace udstr {

/**
 * One merge of the local merge loop. Both indices address base shingle instances
 * in canonical order (by shingle bytes, then occurrence in position order) and
 * name the first base shingle of each piece; the right piece is appended to the
 * left one.
 */
struct MergeRecord {
    std::uint64_t left_index;
    std::uint64_t right_index;

    friend bool operator==(const MergeRecord&, const MergeRecord&) = default;
};

/// Canonical index of every shingle of a position-ordered shingling.
std::vector<std::uint64_t> canonical_indices(const std::vector<Shingle>& ordered);
/// Instances of a multiset in canonical order.
std::vector<Shingle> canonical_instances(const ShingleMultiset& s);

struct MergeResult {
    ShingleMultiset multiset;  // uniquely decodable
    std::vector<MergeRecord> records;
    std::vector<Shingle> pieces;  // merged shingles in position order
};

/// Streams the position-ordered shingles through the merging decider.
MergeResult merge_until_ud(const std::vector<Shingle>& ordered, std::size_t l);

/// Replays merge records over the base multiset they index. Throws kInvalidMerge.
ShingleMultiset apply_merges(const ShingleMultiset& base, const std::vector<MergeRecord>& records, std::size_t l);

/**
 * Wire form of a merge log: the merged pieces it produces, each as the canonical
 * indices of its base shingles in order. u32 piece count, u8 index width, then per
 * piece the Elias gamma code of (length - 1) followed by the indices at that
 * width, all bit-packed MSB-first. `instances` is the size of the indexed multiset. Throws kInvalidMerge for
 * records that do not replay.
 */
std::vector<std::uint8_t> pack_merges(const std::vector<MergeRecord>& records, std::uint64_t instances);
/// Records that rebuild the packed pieces: (head, next) for every later member.
/// Equivalent to, not identical with, the packed records.
std::vector<MergeRecord> unpack_merges(const std::vector<std::uint8_t>& payload, std::uint64_t instances);

/// Principal branch of the Lambert W function for x >= 0.
double lambert_w0(double x);
/// W(e^log_x) without forming e^log_x, for arguments far beyond double range.
double lambert_w0_from_log(double log_x);

/// n + 1 + W(-ln(p) p^-n) / ln p.
double shingle_len_bound(std::uint64_t n, double p);
/// Smallest integer l >= 2 with l >= shingle_len_bound(n, p). Throws
/// kInvalidParameter unless 0.5 < p < 1 and n >= 2.
std::size_t recommend_shingle_len(std::uint64_t n, double p);

/// Insertions plus deletions turning `a` into `b`; nullopt when too large to compute quickly.
std::optional<std::uint64_t> indel_distance(std::string_view a, std::string_view b);

/// `edits` insertions or deletions, each at a uniform random position.
Word apply_random_edits(const Word& w, std::size_t edits, const Alphabet& alphabet, std::mt19937_64& rng);

enum class Role : std::uint8_t { kInitiator = 0, kResponder = 1 };
enum class ReconMode : std::uint8_t { kFixed = 0, kRateless = 1 };

std::string_view to_string(Role role);

struct SessionConfig {
    Role role = Role::kInitiator;
    std::size_t l = 2;
    ReconMode mode = ReconMode::kRateless;
    std::size_t bound = 0;                // fixed mode: most differing instances
    std::size_t verification_points = 8;  // k
    std::uint64_t seed = 1;
    std::uint64_t modulus = PrimeField::kDefaultModulus;
    bool two_way = true;  // otherwise only the initiator learns the remote string
    std::size_t max_pairs = 1 << 16;
};

struct StepBits {
    std::uint64_t sent = 0;
    std::uint64_t received = 0;
};

struct SessionReport {
    Role role = Role::kInitiator;
    std::string outcome = "pending";
    std::uint64_t n = 0;
    std::optional<std::uint64_t> remote_n;
    std::size_t l = 0;
    std::string mode;
    StepBits handshake, step2, step5, step6;
    std::uint64_t eval_pairs_sent = 0;
    std::uint64_t eval_pairs_received = 0;
    std::optional<std::uint64_t> delta_only_local;
    std::optional<std::uint64_t> delta_only_remote;
    std::optional<std::uint64_t> merges_local;
    std::optional<std::uint64_t> merges_remote;
    std::optional<std::uint64_t> alpha;

    StepBits total() const;
    /// `key=value` lines in a fixed order; absent values print as `-`.
    std::string to_text() const;
};

/**
 * One execution of the reconciliation protocol over a connected endpoint:
 * handshake, multiset reconciliation, local merging, merge exchange and decoding.
 */
class ReconSession {
  public:
    ReconSession(Word local, SessionConfig config);

    /// The remote string, or nullopt for the side that does not learn in one-way
    /// mode. Throws kNeedsLargerBound, kSessionAbort, kCapacity or kProtocolError.
    std::optional<Word> run(Endpoint& endpoint);

    const SessionReport& report() const { return report_; }
    const SessionConfig& config() const { return config_; }

  private:
    std::optional<Word> run_steps(Endpoint& endpoint);

    Word local_;
    SessionConfig config_;
    SessionReport report_;
};

struct SessionResult {
    std::optional<Word> remote;
    SessionReport report;
};

SessionResult run_protocol(const Word& local, Endpoint& endpoint, const SessionConfig& config);

}  // namespace udstr
