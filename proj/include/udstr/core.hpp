// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <udstr/error.hpp>

namespace udstr {

/// Reserved delimiter byte. It anchors the start and end of every shingled word
/// and is never a member of an Alphabet.
inline constexpr char kDelimiter = '$';

/**
 * Finite ordered set of byte symbols with a dense index 0..size()-1.
 *
 * Symbols are compared bytewise (as unsigned char). The delimiter is never a member.
 */
class Alphabet {
  public:
    Alphabet();
    explicit Alphabet(std::string_view symbols);

    /// Alphabet of the distinct bytes occurring in `text`.
    static Alphabet observed(std::string_view text);

    std::size_t size() const { return symbols_.size(); }
    bool empty() const { return symbols_.empty(); }
    bool contains(char c) const { return index_[static_cast<unsigned char>(c)] >= 0; }
    char delimiter() const { return kDelimiter; }

    std::optional<std::size_t> index_of(char c) const {
        const auto ix = index_[static_cast<unsigned char>(c)];
        if (ix < 0) return std::nullopt;
        return static_cast<std::size_t>(ix);
    }
    char symbol(std::size_t index) const { return symbols_.at(index); }
    const std::string& symbols() const { return symbols_; }

    /// Throws kInvalidSymbol on the first byte of `text` outside the alphabet.
    void validate(std::string_view text) const;

    Alphabet merged_with(const Alphabet& other) const;

    friend bool operator==(const Alphabet& a, const Alphabet& b) { return a.symbols_ == b.symbols_; }

  private:
    std::string symbols_;
    std::array<std::int16_t, 256> index_;
};

/// A word over the user alphabet; never contains the delimiter.
class Word {
  public:
    Word() = default;
    explicit Word(std::string text);

    const std::string& str() const { return text_; }
    std::size_t size() const { return text_.size(); }
    bool empty() const { return text_.empty(); }
    char operator[](std::size_t i) const { return text_[i]; }
    operator std::string_view() const { return text_; }

    friend bool operator==(const Word&, const Word&) = default;
    friend auto operator<=>(const Word&, const Word&) = default;

  private:
    std::string text_;
};

/**
 * Nonempty string over the user alphabet plus delimiter. The delimiter may only
 * occur as a leading run or a trailing run.
 */
class Shingle {
  public:
    explicit Shingle(std::string chars);
    Shingle(const char* chars) : Shingle(std::string(chars)) {}

    const std::string& str() const { return chars_; }
    std::size_t size() const { return chars_.size(); }
    std::string_view prefix(std::size_t n) const { return std::string_view(chars_).substr(0, n); }
    std::string_view suffix(std::size_t n) const {
        return std::string_view(chars_).substr(chars_.size() - n);
    }

    friend bool operator==(const Shingle&, const Shingle&) = default;
    friend auto operator<=>(const Shingle&, const Shingle&) = default;

  private:
    std::string chars_;
};

/// Multiset of shingles with 64-bit multiplicities, iterated in bytewise order.
class ShingleMultiset {
  public:
    using Entries = std::map<Shingle, std::uint64_t>;

    ShingleMultiset() = default;
    explicit ShingleMultiset(std::size_t base_len) : base_len_(base_len) {}

    void add(const Shingle& s, std::uint64_t count = 1);
    /// Removes `count` copies; throws kInvalidParameter if fewer are present.
    void remove(const Shingle& s, std::uint64_t count = 1);

    std::uint64_t count(const Shingle& s) const;
    std::uint64_t total() const { return total_; }
    std::size_t distinct() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    std::uint64_t max_multiplicity() const;
    const Entries& entries() const { return entries_; }

    /// Shingle length used at initial shingling; 0 when unknown or heterogeneous.
    std::size_t base_len() const { return base_len_; }
    void set_base_len(std::size_t l) { base_len_ = l; }

    /// `<multiplicity>\t<shingle>\n` per entry, sorted by shingle bytes.
    std::string to_text() const;
    static ShingleMultiset from_text(std::string_view text, std::size_t base_len = 0);

    /// Equality compares entries only.
    friend bool operator==(const ShingleMultiset& a, const ShingleMultiset& b) {
        return a.entries_ == b.entries_;
    }

  private:
    Entries entries_;
    std::uint64_t total_ = 0;
    std::size_t base_len_ = 0;
};

/// `pad` delimiters, then `w`, then `pad` delimiters.
std::string delimited(const Word& w, std::size_t pad);

/// Bigram multiset of `$w$`.
ShingleMultiset bigram_map(const Word& w);

/// q-gram multiset of the word padded with q-1 delimiters on each side.
ShingleMultiset qgram_map(const Word& w, std::size_t q);

/// True iff the (l-1)-suffix of `s` equals the (l-1)-prefix of `t`.
bool overlaps(const Shingle& s, const Shingle& t, std::size_t l);

/// Non-overlapping concatenation: s'ut' for s = s'u, t = ut', |u| = l-1.
Shingle noconcat(const Shingle& s, const Shingle& t, std::size_t l);

struct Shingling {
    std::vector<Shingle> ordered;  // s_0, s_1, ... in position order
    ShingleMultiset multiset;
};

Shingling shingling(const Word& w, std::size_t l);

/// The (l-1)-gram node sequence of an ordered shingle chain: the prefix of every
/// shingle followed by the suffix of the last one.
std::vector<std::string> node_sequence(const std::vector<Shingle>& ordered, std::size_t l);

/// Strips exactly `pad` delimiters from each end of a folded shingle chain.
/// Throws kInconsistentMultiset when the padding is missing or the interior has a delimiter.
Word strip_padding(std::string_view folded, std::size_t pad);

}  // namespace udstr
