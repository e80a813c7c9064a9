// SPDX-License-Identifier: Apache-2.0

#include <udstr/debruijn.hpp>

#include <set>
#include <unordered_map>

#include <udstr/decider.hpp>

namespace udstr {

DeBruijnGraph DeBruijnGraph::build(const ShingleMultiset& s, std::size_t l) {
    if (l < 2) throw Error(ErrorCode::kInvalidParameter, "shingle length must be at least 2");
    for (const auto& [sh, n] : s.entries()) {
        if (sh.size() < l) {
            throw Error(ErrorCode::kInvalidShingle,
                        "shingle '" + sh.str() + "' is shorter than l = " + std::to_string(l));
        }
    }
    ShingleMultiset edges = s;
    edges.set_base_len(l);
    return DeBruijnGraph(std::move(edges), l);
}

std::vector<DeBruijnGraph::Edge> DeBruijnGraph::edges() const {
    std::vector<Edge> out;
    out.reserve(edges_.distinct());
    for (const auto& [sh, n] : edges_.entries()) {
        out.push_back({std::string(sh.prefix(l_ - 1)), std::string(sh.suffix(l_ - 1)), sh, n});
    }
    return out;
}

std::vector<std::string> DeBruijnGraph::nodes() const {
    std::set<std::string> seen;
    for (const auto& [sh, n] : edges_.entries()) {
        seen.emplace(sh.prefix(l_ - 1));
        seen.emplace(sh.suffix(l_ - 1));
    }
    return {seen.begin(), seen.end()};
}

std::size_t DeBruijnGraph::out_degree(const std::string& node) const {
    std::size_t n = 0;
    for (const auto& [sh, w] : edges_.entries()) n += sh.prefix(l_ - 1) == node;
    return n;
}

std::size_t DeBruijnGraph::in_degree(const std::string& node) const {
    std::size_t n = 0;
    for (const auto& [sh, w] : edges_.entries()) n += sh.suffix(l_ - 1) == node;
    return n;
}

Shingle DeBruijnGraph::merge(const Shingle& e1, const Shingle& e2) {
    if (e1.size() < l_ || e2.size() < l_ || !overlaps(e1, e2, l_)) {
        throw Error(ErrorCode::kInvalidMerge, "'" + e1.str() + "' and '" + e2.str() + "' are not adjacent");
    }
    const std::uint64_t need1 = e1 == e2 ? 2 : 1;
    if (edges_.count(e1) < need1 || edges_.count(e2) < 1) {
        throw Error(ErrorCode::kInvalidMerge, "edge '" + e1.str() + "' or '" + e2.str() + "' is absent");
    }
    Shingle merged = noconcat(e1, e2, l_);
    edges_.remove(e1);
    edges_.remove(e2);
    edges_.add(merged);
    return merged;
}

std::string DeBruijnGraph::to_adjacency_text() const {
    std::string out;
    for (const auto& e : edges()) {
        out += e.from + '\t' + e.to + '\t' + std::to_string(e.weight) + '\t' + e.label.str() + '\n';
    }
    return out;
}

DeBruijnGraph merge_edges(DeBruijnGraph g, const Shingle& e1, const Shingle& e2) {
    g.merge(e1, e2);
    return g;
}

Word decode_unique(const DeBruijnGraph& g) {
    const std::size_t k = g.shingle_len() - 1;
    const auto& entries = g.multiset().entries();
    if (entries.empty()) throw Error(ErrorCode::kInconsistentMultiset, "empty multiset");

    std::unordered_map<std::string, std::size_t> ids;
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::int64_t> balance;
    auto node = [&](std::string_view text) {
        auto [it, inserted] = ids.try_emplace(std::string(text), ids.size());
        if (inserted) {
            out.emplace_back();
            balance.push_back(0);
        }
        return it->second;
    };

    std::vector<const Shingle*> label;
    std::vector<std::size_t> target;
    std::vector<std::uint64_t> remaining;
    for (const auto& [sh, n] : entries) {
        const auto from = node(sh.prefix(k));
        const auto to = node(sh.suffix(k));
        out[from].push_back(label.size());
        label.push_back(&sh);
        target.push_back(to);
        remaining.push_back(n);
        balance[from] += static_cast<std::int64_t>(n);
        balance[to] -= static_cast<std::int64_t>(n);
    }
    const auto anchor = ids.find(g.anchor());
    if (anchor == ids.end()) throw Error(ErrorCode::kInconsistentMultiset, "no delimiter-anchored shingle");
    for (auto b : balance) {
        if (b != 0) throw Error(ErrorCode::kInconsistentMultiset, "in- and out-weights differ at some node");
    }

    // Hierholzer from the anchor.
    std::vector<std::size_t> cursor(out.size(), 0);
    std::vector<std::pair<std::size_t, std::size_t>> stack{{anchor->second, SIZE_MAX}};
    std::vector<std::size_t> circuit;
    circuit.reserve(g.total_weight());
    while (!stack.empty()) {
        const auto v = stack.back().first;
        auto& c = cursor[v];
        while (c < out[v].size() && remaining[out[v][c]] == 0) ++c;
        if (c < out[v].size()) {
            const auto e = out[v][c];
            --remaining[e];
            stack.emplace_back(target[e], e);
        } else {
            if (stack.back().second != SIZE_MAX) circuit.push_back(stack.back().second);
            stack.pop_back();
        }
    }
    if (circuit.size() != g.total_weight()) {
        throw Error(ErrorCode::kInconsistentMultiset, "shingles do not form one connected chain");
    }

    TokenDecider decider(k);
    std::string folded;
    for (auto it = circuit.rbegin(); it != circuit.rend(); ++it) {
        const Shingle& s = *label[*it];
        if (!decider.push_edge(s).ud()) {
            throw Error(ErrorCode::kNotUnique, "the multiset has more than one decoding");
        }
        folded += folded.empty() ? std::string_view(s.str()) : std::string_view(s.str()).substr(k);
    }
    return strip_padding(folded, k);
}

}  // namespace udstr
