// SPDX-License-Identifier: Apache-2.0

#include <udstr/oracle.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <string>

namespace udstr {

namespace {

struct PathSearch {
    struct Edge {
        std::size_t from;
        std::size_t to;
        std::string label;
        std::uint64_t remaining;
    };

    std::size_t l = 0;
    std::vector<Edge> edges;
    std::vector<std::vector<std::size_t>> out;  // node -> edge ids, label order
    std::size_t start = 0;
    std::uint64_t total = 0;
    std::uint64_t cap = 2;
    std::set<std::string> found;
    std::string folded;

    // Every edge still to be used must be reachable from `node`.
    bool remaining_reachable(std::size_t node, std::uint64_t used) const {
        if (used == total) return true;
        std::vector<bool> seen(out.size(), false);
        std::vector<std::size_t> todo{node};
        seen[node] = true;
        std::uint64_t reached = 0;
        while (!todo.empty()) {
            const auto v = todo.back();
            todo.pop_back();
            for (auto e : out[v]) {
                if (edges[e].remaining == 0) continue;
                reached += edges[e].remaining;
                if (!seen[edges[e].to]) {
                    seen[edges[e].to] = true;
                    todo.push_back(edges[e].to);
                }
            }
        }
        return reached == total - used;
    }

    void run(std::size_t node, std::uint64_t used) {
        if (found.size() >= cap) return;
        if (used == total) {
            if (node == start) found.insert(folded);
            return;
        }
        for (auto e : out[node]) {
            Edge& edge = edges[e];
            if (edge.remaining == 0) continue;
            --edge.remaining;
            const auto mark = folded.size();
            folded += used == 0 ? std::string_view(edge.label) : std::string_view(edge.label).substr(l - 1);
            if (remaining_reachable(edge.to, used + 1)) run(edge.to, used + 1);
            folded.resize(mark);
            ++edge.remaining;
            if (found.size() >= cap) return;
        }
    }
};

}  // namespace

DecodingCount decoding_count(const ShingleMultiset& s, std::uint64_t cap) {
    DecodingCount result;
    if (s.empty() || cap == 0) return result;

    PathSearch search;
    search.cap = cap;
    search.l = s.base_len();
    if (search.l == 0) {
        search.l = s.entries().begin()->first.size();
        for (const auto& [sh, n] : s.entries()) search.l = std::min(search.l, sh.size());
    }
    if (search.l < 2) return result;

    std::map<std::string, std::size_t> node_ids;
    auto node = [&](std::string_view text) {
        auto [it, inserted] = node_ids.try_emplace(std::string(text), node_ids.size());
        if (inserted) search.out.emplace_back();
        return it->second;
    };
    const std::size_t k = search.l - 1;
    const std::string anchor(k, kDelimiter);
    for (const auto& [sh, n] : s.entries()) {
        if (sh.size() < search.l) return result;
        const auto from = node(sh.prefix(k));
        const auto to = node(sh.suffix(k));
        search.out[from].push_back(search.edges.size());
        search.edges.push_back({from, to, sh.str(), n});
        search.total += n;
    }
    auto start = node_ids.find(anchor);
    if (start == node_ids.end()) return result;
    search.start = start->second;

    search.run(search.start, 0);

    for (const auto& text : search.found) {
        // A folded chain that is not delimiter-anchored decodes to nothing.
        if (text.size() < 2 * k) continue;
        const auto interior = std::string_view(text).substr(k, text.size() - 2 * k);
        if (interior.find(kDelimiter) != std::string_view::npos) continue;
        if (text.compare(0, k, anchor) != 0 || text.compare(text.size() - k, k, anchor) != 0) continue;
        result.witnesses.emplace_back(std::string(interior));
    }
    result.count = result.witnesses.size();
    return result;
}

// ---------------------------------------------------------------------------

namespace {

// w in S* a x (S\{a})* b S*
bool matches_first(std::string_view w, char x, char a, char b) {
    bool armed = false;
    for (std::size_t k = 0; k < w.size(); ++k) {
        const char c = w[k];
        if (armed && c == b) return true;
        if (c == a) armed = k + 1 < w.size() && w[k + 1] == x;
    }
    return false;
}

// w in S* a (S\{x})* b S*
bool matches_second(std::string_view w, char x, char a, char b) {
    bool seen_a = false;
    for (char c : w) {
        if (seen_a && c == b) return true;
        if (c == x) seen_a = false;
        if (c == a) seen_a = true;
    }
    return false;
}

}  // namespace

std::optional<Obstruction> find_obstruction(const Word& w) {
    // Symbols that never occur cannot take part in a match.
    const auto symbols = Alphabet::observed(w.str()).symbols();
    for (char x : symbols) {
        for (char a : symbols) {
            if (a == x) continue;
            for (char b : symbols) {
                if (b == x) continue;
                if (matches_first(w.str(), x, a, b) && matches_second(w.str(), x, a, b)) return Obstruction{x, a, b};
            }
        }
    }
    return std::nullopt;
}

bool is_obstruction(const Word& w) { return find_obstruction(w).has_value(); }

std::uint64_t obstruction_language_count(std::uint64_t sigma_size) {
    if (sigma_size == 0) throw Error(ErrorCode::kInvalidParameter, "alphabet size must be positive");
    const auto s = sigma_size;
    return s * ((s - 1) + (s - 1) * (s - 2));  // s == 1 gives 0 * (wrapped) == 0
}

// ---------------------------------------------------------------------------

namespace {

void require_gram(const Word& z, std::size_t q, const char* name) {
    if (q < 2) throw Error(ErrorCode::kInvalidParameter, "q must be at least 2");
    if (z.size() != q - 1) {
        throw Error(ErrorCode::kInvalidParameter,
                    std::string(name) + " must have length q-1 = " + std::to_string(q - 1));
    }
}

Word cat(std::initializer_list<const Word*> parts) {
    std::string out;
    for (const auto* p : parts) out += p->str();
    return Word(std::move(out));
}

Word random_word(std::mt19937_64& rng, const Alphabet& alphabet, std::size_t len) {
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::string out(len, '\0');
    for (auto& c : out) c = alphabet.symbol(pick(rng));
    return Word(std::move(out));
}

}  // namespace

std::pair<Word, Word> pevzner_transpose(const TranspositionParts& p, std::size_t q) {
    require_gram(p.z1, q, "z1");
    require_gram(p.z2, q, "z2");
    return {cat({&p.x1, &p.z1, &p.x2, &p.z2, &p.x3, &p.z1, &p.x4, &p.z2, &p.x5}),
            cat({&p.x1, &p.z1, &p.x4, &p.z2, &p.x3, &p.z1, &p.x2, &p.z2, &p.x5})};
}

std::pair<Word, Word> pevzner_rotate(const Word& x1, const Word& x2, const Word& z1, const Word& z2, std::size_t q) {
    require_gram(z1, q, "z1");
    require_gram(z2, q, "z2");
    return {cat({&z1, &x1, &z2, &x2, &z1}), cat({&z2, &x2, &z1, &x1, &z2})};
}

ShingleMultiset interior_qgrams(const Word& w, std::size_t q) {
    ShingleMultiset out(q);
    for (std::size_t i = 0; i + q <= w.size(); ++i) out.add(Shingle(w.str().substr(i, q)));
    return out;
}

PevznerPair random_pevzner(PevznerKind kind, std::mt19937_64& rng, const Alphabet& alphabet, std::size_t q,
                           std::size_t max_piece) {
    if (alphabet.empty()) throw Error(ErrorCode::kInvalidParameter, "empty alphabet");
    std::uniform_int_distribution<std::size_t> len(0, max_piece);
    auto piece = [&] { return random_word(rng, alphabet, len(rng)); };
    const Word z1 = random_word(rng, alphabet, q - 1);

    if (kind == PevznerKind::kTranspose) {
        TranspositionParts parts{piece(), piece(), piece(), piece(), piece(), z1, random_word(rng, alphabet, q - 1)};
        auto [x, xp] = pevzner_transpose(parts, q);
        return {std::move(x), std::move(xp)};
    }
    const Word z2 = std::bernoulli_distribution(0.5)(rng) ? z1 : random_word(rng, alphabet, q - 1);
    auto [x, xp] = pevzner_rotate(piece(), piece(), z1, z2, q);
    return {std::move(x), std::move(xp)};
}

}  // namespace udstr
