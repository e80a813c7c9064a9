// SPDX-License-Identifier: Apache-2.0

#include <udstr/decider.hpp>

#include <cassert>

namespace udstr {

std::string_view to_string(RejectReason reason) {
    switch (reason) {
        case RejectReason::kCycleIntrusion: return "cycle-intrusion";
        case RejectReason::kCommunicatingParents: return "communicating-parents";
        case RejectReason::kDegreeOverflow: return "degree-overflow";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// DeciderCore

DeciderCore::DeciderCore(std::size_t slots, bool undo) : nodes_(slots), undo_enabled_(undo) {
    stack_.reserve(slots);
}

DeciderCore::Id DeciderCore::add_slot() {
    nodes_.emplace_back();
    return static_cast<Id>(nodes_.size() - 1);
}

void DeciderCore::reset() {
    for (auto& n : nodes_) n = Node{};
    stack_.clear();
    prev_.reset();
    pos_ = 0;
    verdict_ = Verdict::still_ud();
    rejected_at_.reset();
    journal_.clear();
    popped_.clear();
}

bool DeciderCore::has_child(const Node& n, Id c) const {
    for (std::uint8_t i = 0; i < n.n_children; ++i) {
        if (n.children[i] == c) return true;
    }
    return false;
}

std::optional<RejectReason> DeciderCore::probe(Id c) const {
    if (!prev_) return std::nullopt;  // the first symbol is only marked visited
    const Node& p = nodes_[*prev_];
    const Node& x = nodes_[c];
    const bool edge_exists = has_child(p, c);

    if (x.visited && !edge_exists && x.on_cycle) return RejectReason::kCycleIntrusion;

    // Two distinct parents in one strongly connected component. In a graph that
    // is still UD this holds iff their occurrence intervals intersect; a parent
    // may be `c` itself through a self-loop.
    if (x.n_parents == 2) {
        const Node& a = nodes_[x.parents[0]];
        const Node& b = nodes_[x.parents[1]];
        if (a.first_ix <= b.last_ix && b.first_ix <= a.last_ix) return RejectReason::kCommunicatingParents;
    }

    if (!edge_exists && (p.n_children == 2 || x.n_parents == 2)) return RejectReason::kDegreeOverflow;
    return std::nullopt;
}

Verdict DeciderCore::push(Id c) {
    assert(c < nodes_.size());
    if (!verdict_.ud()) return verdict_;
    if (auto reason = probe(c)) {
        ++pos_;
        verdict_ = Verdict::not_ud(*reason);
        rejected_at_ = pos_;
        return verdict_;
    }
    apply(c);
    return verdict_;
}

void DeciderCore::apply(Id c) {
    Node& x = nodes_[c];
    JournalEntry entry{c, prev_, !x.visited, false, x.last_ix, popped_.size()};

    if (!x.visited) {
        x.visited = true;
        x.first_ix = pos_ + 1;
        stack_.push_back(c);
    } else if (prev_ && !has_child(nodes_[*prev_], c)) {
        // New edge into a visited node off any cycle: everything visited since
        // its previous occurrence now lies on a cycle.
        for (;;) {
            const Id v = stack_.back();
            stack_.pop_back();
            nodes_[v].on_cycle = true;
            if (undo_enabled_) popped_.push_back(v);
            if (v == c) break;
        }
    }

    if (prev_ && !has_child(nodes_[*prev_], c)) {
        Node& p = nodes_[*prev_];
        p.children[p.n_children++] = c;
        x.parents[x.n_parents++] = *prev_;
        entry.added_edge = true;
    }

    x.last_ix = pos_ + 1;
    ++pos_;
    prev_ = c;
    if (undo_enabled_) journal_.push_back(entry);
}

void DeciderCore::undo() {
    if (!undo_enabled_) throw Error(ErrorCode::kProtocolMisuse, "decider was built without undo support");
    if (journal_.empty()) throw Error(ErrorCode::kProtocolMisuse, "nothing to undo");
    const JournalEntry entry = journal_.back();
    journal_.pop_back();

    Node& x = nodes_[entry.node];
    if (entry.added_edge) {
        Node& p = nodes_[*entry.prev];
        --p.n_children;
        --x.n_parents;
    }
    // Popped nodes return to the stack in their original order, off-cycle.
    while (popped_.size() > entry.popped_from) {
        const Id v = popped_.back();
        popped_.pop_back();
        nodes_[v].on_cycle = false;
        stack_.push_back(v);
    }
    if (entry.first_visit) {
        stack_.pop_back();
        x.visited = false;
        x.first_ix = 0;
    }
    x.last_ix = entry.old_last_ix;
    --pos_;
    prev_ = entry.prev;
}

// ---------------------------------------------------------------------------
// Decider

Decider::Decider(Alphabet alphabet) : alphabet_(std::move(alphabet)), core_(alphabet_.size()) {}

Verdict Decider::push(char c) {
    const auto ix = alphabet_.index_of(c);
    if (!ix) {
        throw Error(ErrorCode::kInvalidSymbol,
                    "byte " + hex_byte(c) + " is outside the alphabet");
    }
    return core_.push(static_cast<DeciderCore::Id>(*ix));
}

bool is_ud(const Word& w) { return is_ud(w, Alphabet::observed(w.str())); }

bool is_ud(const Word& w, const Alphabet& alphabet) {
    Decider decider(alphabet);
    for (char c : w.str()) {
        if (!decider.push(c).ud()) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// TokenDecider

TokenDecider::TokenDecider(std::size_t token_len, bool mergeable) : token_len_(token_len), core_(0, mergeable) {
    if (token_len == 0) throw Error(ErrorCode::kInvalidParameter, "token length must be positive");
}

DeciderCore::Id TokenDecider::intern(std::string_view key) {
    auto [it, inserted] = ids_.try_emplace(std::string(key), 0);
    if (inserted) it->second = core_.add_slot();
    return it->second;
}

Verdict TokenDecider::push_token(std::string_view token) {
    if (token.size() != token_len_) {
        throw Error(ErrorCode::kInvalidToken, "token '" + std::string(token) + "' has length " +
                                                  std::to_string(token.size()) + ", expected " +
                                                  std::to_string(token_len_));
    }
    const auto v = core_.push(intern(token));
    raw_pushes_ = true;
    current_ = token;
    started_ = true;
    return v;
}

void TokenDecider::check_edge(const Shingle& s) const {
    if (s.size() < token_len_ + 1) {
        throw Error(ErrorCode::kInvalidToken, "edge '" + s.str() + "' is shorter than a base shingle");
    }
    if (started_ && s.prefix(token_len_) != current_) {
        throw Error(ErrorCode::kInvalidToken, "edge '" + s.str() + "' does not start at '" + current_ + "'");
    }
}

Verdict TokenDecider::push_edge(const Shingle& s) {
    check_edge(s);
    if (!started_) push_token(s.prefix(token_len_));
    if (s.size() > token_len_ + 1) {
        const auto v = core_.push(intern(s.str()));
        if (!v.ud()) return v;
    }
    return push_token(s.suffix(token_len_));
}

std::optional<RejectReason> TokenDecider::try_append(const Shingle& s) {
    const bool composite = s.size() > token_len_ + 1;
    if (composite) {
        const auto via = intern(s.str());
        if (auto r = core_.probe(via)) return r;
        core_.push(via);
    }
    const auto to = intern(s.suffix(token_len_));
    if (auto r = core_.probe(to)) {
        if (composite) core_.undo();
        return r;
    }
    core_.push(to);
    current_ = s.suffix(token_len_);
    edges_.push_back(s);
    edge_pushes_.push_back(composite ? 2 : 1);
    return std::nullopt;
}

void TokenDecider::undo_edge() {
    for (std::uint8_t i = 0; i < edge_pushes_.back(); ++i) core_.undo();
    current_ = edges_.back().prefix(token_len_);
    edges_.pop_back();
    edge_pushes_.pop_back();
}

MergeOutcome TokenDecider::push_or_merge(const Shingle& s) {
    if (!core_.undo_enabled()) throw Error(ErrorCode::kProtocolMisuse, "decider is not mergeable");
    if (raw_pushes_) throw Error(ErrorCode::kProtocolMisuse, "push_or_merge after raw pushes");
    check_edge(s);
    if (!core_.verdict().ud()) throw Error(ErrorCode::kProtocolMisuse, "stream already rejected");
    if (!started_) {
        core_.push(intern(s.prefix(token_len_)));
        current_ = s.prefix(token_len_);
        started_ = true;
    }

    MergeOutcome outcome;
    Shingle pending = s;
    while (try_append(pending)) {
        if (edges_.empty()) {
            throw Error(ErrorCode::kProtocolMisuse, "merge requested with no previous edge");
        }
        Shingle previous = edges_.back();
        undo_edge();
        pending = noconcat(previous, pending, token_len_ + 1);
        ++outcome.merges;
    }
    if (outcome.merges > 0) outcome.kind = MergeOutcome::Kind::kMergedWithPrevious;
    return outcome;
}

ShingleMultiset TokenDecider::edge_multiset() const {
    ShingleMultiset out(token_len_ + 1);
    for (const auto& e : edges_) out.add(e);
    return out;
}

}  // namespace udstr
