// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <udstr/core.hpp>

namespace udstr {

enum class RejectReason : std::uint8_t {
    kCycleIntrusion,
    kCommunicatingParents,
    kDegreeOverflow,
};

std::string_view to_string(RejectReason reason);

struct Verdict {
    enum class Status : std::uint8_t { kStillUd, kNotUd };

    Status status = Status::kStillUd;
    std::optional<RejectReason> reason;  // present iff status == kNotUd

    static Verdict still_ud() { return {}; }
    static Verdict not_ud(RejectReason r) { return {Status::kNotUd, r}; }

    bool ud() const { return status == Status::kStillUd; }
    friend bool operator==(const Verdict&, const Verdict&) = default;
};

/**
 * Streaming unique-decodability test over dense symbol ids.
 *
 * Consumes one symbol per push and maintains the bigram graph of the prefix seen
 * so far, but only as much of it as the test needs: visit and cycle flags, at most
 * two children and two parents per node, a visit stack and the first/last
 * occurrence index of every symbol. A push is amortized O(1); storage depends on
 * the number of slots only.
 *
 * Rejection rules, in the order they are tested:
 *  - cycle intrusion: a new edge into an already visited node that lies on a cycle;
 *  - communicating parents: the pushed node already has two distinct parents whose
 *    occurrence intervals intersect (they share a strongly connected component);
 *  - degree overflow: a new edge would give a node a third child or parent.
 *
 * NotUd is absorbing. With undo enabled every accepted push is journaled so the
 * most recent pushes can be rolled back exactly.
 */
class DeciderCore {
  public:
    using Id = std::uint32_t;

    explicit DeciderCore(std::size_t slots = 0, bool undo = false);

    Id add_slot();
    std::size_t slot_count() const { return nodes_.size(); }
    /// Back to the initial state; keeps the slots.
    void reset();

    Verdict push(Id c);

    /// The rejection `push(c)` would report, with no state change. Ignores absorption.
    std::optional<RejectReason> probe(Id c) const;

    Verdict verdict() const { return verdict_; }
    /// Number of symbols consumed, including the rejecting one.
    std::size_t position() const { return pos_; }
    /// 1-based index of the rejecting symbol.
    std::optional<std::size_t> rejected_at() const { return rejected_at_; }
    std::size_t stack_depth() const { return stack_.size(); }
    std::optional<Id> last() const { return prev_; }

    std::size_t children_of(Id v) const { return nodes_.at(v).n_children; }
    std::size_t parents_of(Id v) const { return nodes_.at(v).n_parents; }

    /// Rolls back the most recent accepted push. Requires undo mode.
    void undo();
    std::size_t undo_depth() const { return journal_.size(); }
    bool undo_enabled() const { return undo_enabled_; }

  private:
    struct Node {
        bool visited = false;
        bool on_cycle = false;
        std::uint8_t n_children = 0;
        std::uint8_t n_parents = 0;
        std::array<Id, 2> children{};
        std::array<Id, 2> parents{};
        std::size_t first_ix = 0;
        std::size_t last_ix = 0;
    };

    struct JournalEntry {
        Id node;
        std::optional<Id> prev;
        bool first_visit;
        bool added_edge;
        std::size_t old_last_ix;
        std::size_t popped_from;  // offset into popped_
    };

    bool has_child(const Node& n, Id c) const;
    void apply(Id c);

    std::vector<Node> nodes_;
    std::vector<Id> stack_;
    std::optional<Id> prev_;
    std::size_t pos_ = 0;
    Verdict verdict_;
    std::optional<std::size_t> rejected_at_;

    bool undo_enabled_;
    std::vector<JournalEntry> journal_;
    std::vector<Id> popped_;
};

/// Decider over a byte alphabet; the plain bigram case.
class Decider {
  public:
    explicit Decider(Alphabet alphabet);

    /// Throws kInvalidSymbol (state unchanged) for bytes outside the alphabet.
    Verdict push(char c);
    void reset() { core_.reset(); }

    Verdict verdict() const { return core_.verdict(); }
    std::size_t position() const { return core_.position(); }
    std::optional<std::size_t> rejected_at() const { return core_.rejected_at(); }
    std::size_t slot_count() const { return core_.slot_count(); }
    std::size_t stack_depth() const { return core_.stack_depth(); }
    const Alphabet& alphabet() const { return alphabet_; }

  private:
    Alphabet alphabet_;
    DeciderCore core_;
};

/// True iff `w` is uniquely decodable from its bigrams. Uses the observed alphabet.
bool is_ud(const Word& w);
bool is_ud(const Word& w, const Alphabet& alphabet);

struct MergeOutcome {
    enum class Kind : std::uint8_t { kAccepted, kMergedWithPrevious };
    Kind kind = Kind::kAccepted;
    std::size_t merges = 0;
};

/**
 * Decider over (q-1)-gram tokens, for q-gram shingles and merged shingle chains.
 *
 * Tokens are interned on first sight. An edge is a shingle whose (q-1)-prefix is
 * the current token and whose (q-1)-suffix is the next one. A composite shingle
 * (longer than q) is routed through a private token of its own, so parallel edges
 * with different labels stay distinct and the test remains the bigram test on an
 * enlarged alphabet.
 */
class TokenDecider {
  public:
    /// `mergeable` keeps an undo journal, which push_or_merge requires.
    explicit TokenDecider(std::size_t token_len, bool mergeable = false);

    std::size_t token_len() const { return token_len_; }

    /// Pushes a raw token. Throws kInvalidToken on a length mismatch.
    Verdict push_token(std::string_view token);

    /// Pushes the edge `s`; starts the stream at its prefix if nothing was pushed.
    Verdict push_edge(const Shingle& s);

    /**
     * Pushes the edge `s`, merging instead of rejecting. While the pending edge
     * would make the stream non-UD the last accepted edge is rolled back and
     * replaced, together with the pending one, by its non-overlapping
     * concatenation. Throws kProtocolMisuse when a merge is needed but no
     * labelled edge precedes it, or when the decider is not mergeable.
     */
    MergeOutcome push_or_merge(const Shingle& s);

    /// Accepted edge labels in stream order (push_or_merge only).
    const std::vector<Shingle>& edges() const { return edges_; }
    ShingleMultiset edge_multiset() const;

    Verdict verdict() const { return core_.verdict(); }
    std::optional<std::size_t> rejected_at() const { return core_.rejected_at(); }
    std::size_t position() const { return core_.position(); }
    std::size_t slot_count() const { return core_.slot_count(); }
    std::size_t stack_depth() const { return core_.stack_depth(); }

  private:
    DeciderCore::Id intern(std::string_view key);
    void check_edge(const Shingle& s) const;
    /// Tries to append `s` with journaling; on rejection leaves the state untouched.
    std::optional<RejectReason> try_append(const Shingle& s);
    void undo_edge();

    std::size_t token_len_;
    DeciderCore core_;
    std::unordered_map<std::string, DeciderCore::Id> ids_;
    std::string current_;  // token at the head of the stream
    bool started_ = false;
    bool raw_pushes_ = false;  // push_token/push_edge were used

    std::vector<Shingle> edges_;
    std::vector<std::uint8_t> edge_pushes_;  // 1 for a plain edge, 2 for a composite
};

}  // namespace udstr
