// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <udstr/core.hpp>

namespace udstr {

/**
 * Modified de Bruijn graph of a shingle multiset. Nodes are (l-1)-grams over the
 * delimited alphabet; every distinct shingle is one edge from its (l-1)-prefix to
 * its (l-1)-suffix, weighted by its multiplicity. Merged shingles keep (l-1)-gram
 * endpoints and carry their full text as the label.
 */
class DeBruijnGraph {
  public:
    struct Edge {
        std::string from;
        std::string to;
        Shingle label;
        std::uint64_t weight;
    };

    /// Throws kInvalidShingle if a shingle is shorter than `l`.
    static DeBruijnGraph build(const ShingleMultiset& s, std::size_t l);

    std::size_t shingle_len() const { return l_; }
    const ShingleMultiset& multiset() const { return edges_; }

    std::vector<Edge> edges() const;
    std::vector<std::string> nodes() const;
    std::uint64_t total_weight() const { return edges_.total(); }
    std::uint64_t weight(const Shingle& label) const { return edges_.count(label); }

    /// The all-delimiter (l-1)-gram; decodings start and end here.
    std::string anchor() const { return std::string(l_ - 1, kDelimiter); }

    /// Distinct out- and in-edges of `node`.
    std::size_t out_degree(const std::string& node) const;
    std::size_t in_degree(const std::string& node) const;

    /// Replaces one copy each of `e1` and `e2` by one copy of their non-overlapping
    /// concatenation, which is returned. Throws kInvalidMerge unless the target of
    /// `e1` is the source of `e2` and both copies exist.
    Shingle merge(const Shingle& e1, const Shingle& e2);

    /// `source TAB target TAB weight TAB label` per edge, in label order.
    std::string to_adjacency_text() const;

  private:
    DeBruijnGraph(ShingleMultiset edges, std::size_t l) : edges_(std::move(edges)), l_(l) {}

    ShingleMultiset edges_;
    std::size_t l_;
};

/// Copying form of DeBruijnGraph::merge.
DeBruijnGraph merge_edges(DeBruijnGraph g, const Shingle& e1, const Shingle& e2);

/**
 * The unique word whose delimited shingling folds to the edge multiset, found as an
 * Eulerian circuit through the anchor. Throws kInconsistentMultiset when no such
 * circuit exists and kNotUnique when the circuit is not the only one.
 */
Word decode_unique(const DeBruijnGraph& g);

}  // namespace udstr
