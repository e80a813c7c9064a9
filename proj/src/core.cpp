// SPDX-License-Identifier: Apache-2.0

#include <udstr/core.hpp>

#include <algorithm>
#include <charconv>

namespace udstr {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::kInvalidParameter: return "invalid-parameter";
        case ErrorCode::kInvalidSymbol: return "invalid-symbol";
        case ErrorCode::kInvalidToken: return "invalid-token";
        case ErrorCode::kOverlapMismatch: return "overlap-mismatch";
        case ErrorCode::kInvalidShingle: return "invalid-shingle";
        case ErrorCode::kInvalidMerge: return "invalid-merge";
        case ErrorCode::kInconsistentMultiset: return "inconsistent-multiset";
        case ErrorCode::kNotUnique: return "not-unique";
        case ErrorCode::kProtocolMisuse: return "protocol-misuse";
        case ErrorCode::kEncodingCapacity: return "encoding-capacity";
        case ErrorCode::kInvalidPoint: return "invalid-point";
        case ErrorCode::kBoundExceeded: return "bound-exceeded";
        case ErrorCode::kPointCollision: return "point-collision";
        case ErrorCode::kCapacity: return "capacity";
        case ErrorCode::kTransportClosed: return "transport-closed";
        case ErrorCode::kProtocolError: return "protocol-error";
        case ErrorCode::kSessionAbort: return "session-abort";
        case ErrorCode::kNeedsLargerBound: return "needs-larger-bound";
        case ErrorCode::kParseError: return "parse-error";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// Alphabet

Alphabet::Alphabet() { index_.fill(-1); }

Alphabet::Alphabet(std::string_view symbols) : Alphabet() {
    std::string sorted(symbols);
    std::sort(sorted.begin(), sorted.end(),
              [](char a, char b) { return static_cast<unsigned char>(a) < static_cast<unsigned char>(b); });
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    for (char c : sorted) {
        if (c == kDelimiter) throw Error(ErrorCode::kInvalidSymbol, "the delimiter '$' cannot be an alphabet symbol");
    }
    symbols_ = std::move(sorted);
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
        index_[static_cast<unsigned char>(symbols_[i])] = static_cast<std::int16_t>(i);
    }
}

Alphabet Alphabet::observed(std::string_view text) { return Alphabet(text); }

void Alphabet::validate(std::string_view text) const {
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (!contains(text[i])) {
            throw Error(ErrorCode::kInvalidSymbol,
                        "byte " + hex_byte(text[i]) + " at offset " +
                            std::to_string(i) + " is outside the alphabet");
        }
    }
}

Alphabet Alphabet::merged_with(const Alphabet& other) const { return Alphabet(symbols_ + other.symbols_); }

// ---------------------------------------------------------------------------
// Word, Shingle

Word::Word(std::string text) : text_(std::move(text)) {
    if (const auto pos = text_.find(kDelimiter); pos != std::string::npos) {
        throw Error(ErrorCode::kInvalidSymbol, "word contains the delimiter at offset " + std::to_string(pos));
    }
}

Shingle::Shingle(std::string chars) : chars_(std::move(chars)) {
    if (chars_.empty()) throw Error(ErrorCode::kInvalidShingle, "empty shingle");
    const auto first = chars_.find_first_not_of(kDelimiter);
    if (first == std::string::npos) return;  // all delimiters
    const auto last = chars_.find_last_not_of(kDelimiter);
    if (chars_.find(kDelimiter, first) < last) {
        throw Error(ErrorCode::kInvalidShingle, "interior delimiter in shingle '" + chars_ + "'");
    }
}

// ---------------------------------------------------------------------------
// ShingleMultiset

void ShingleMultiset::add(const Shingle& s, std::uint64_t count) {
    if (count == 0) return;
    entries_[s] += count;
    total_ += count;
}

void ShingleMultiset::remove(const Shingle& s, std::uint64_t count) {
    if (count == 0) return;
    auto it = entries_.find(s);
    if (it == entries_.end() || it->second < count) {
        throw Error(ErrorCode::kInvalidParameter, "cannot remove " + std::to_string(count) + " of '" + s.str() + "'");
    }
    it->second -= count;
    total_ -= count;
    if (it->second == 0) entries_.erase(it);
}

std::uint64_t ShingleMultiset::count(const Shingle& s) const {
    auto it = entries_.find(s);
    return it == entries_.end() ? 0 : it->second;
}

std::uint64_t ShingleMultiset::max_multiplicity() const {
    std::uint64_t best = 0;
    for (const auto& [s, n] : entries_) best = std::max(best, n);
    return best;
}

std::string ShingleMultiset::to_text() const {
    std::string out;
    for (const auto& [s, n] : entries_) {
        out += std::to_string(n);
        out += '\t';
        out += s.str();
        out += '\n';
    }
    return out;
}

ShingleMultiset ShingleMultiset::from_text(std::string_view text, std::size_t base_len) {
    ShingleMultiset result(base_len);
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;

        const auto tab = line.find('\t');
        if (tab == std::string_view::npos || tab + 1 >= line.size()) {
            throw Error(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": expected '<count>\\t<shingle>'");
        }
        std::uint64_t n = 0;
        const auto digits = line.substr(0, tab);
        const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
        if (ec != std::errc{} || ptr != digits.data() + digits.size() || n == 0) {
            throw Error(ErrorCode::kParseError, "line " + std::to_string(line_no) + ": bad multiplicity");
        }
        result.add(Shingle(std::string(line.substr(tab + 1))), n);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Shingling operations

std::string delimited(const Word& w, std::size_t pad) {
    std::string out(pad, kDelimiter);
    out += w.str();
    out.append(pad, kDelimiter);
    return out;
}

namespace {

std::vector<Shingle> sliding_window(const std::string& text, std::size_t q) {
    std::vector<Shingle> out;
    if (text.size() < q) return out;
    out.reserve(text.size() - q + 1);
    for (std::size_t i = 0; i + q <= text.size(); ++i) out.emplace_back(text.substr(i, q));
    return out;
}

}  // namespace

ShingleMultiset bigram_map(const Word& w) { return qgram_map(w, 2); }

ShingleMultiset qgram_map(const Word& w, std::size_t q) {
    if (q < 2) throw Error(ErrorCode::kInvalidParameter, "q must be at least 2");
    ShingleMultiset result(q);
    for (auto& s : sliding_window(delimited(w, q - 1), q)) result.add(s);
    return result;
}

bool overlaps(const Shingle& s, const Shingle& t, std::size_t l) {
    if (l == 0) throw Error(ErrorCode::kInvalidParameter, "l must be positive");
    const std::size_t u = l - 1;
    if (s.size() < u || t.size() < u) {
        throw Error(ErrorCode::kInvalidParameter, "shingles shorter than the overlap length");
    }
    return s.suffix(u) == t.prefix(u);
}

Shingle noconcat(const Shingle& s, const Shingle& t, std::size_t l) {
    if (!overlaps(s, t, l)) {
        throw Error(ErrorCode::kOverlapMismatch, "'" + s.str() + "' does not overlap '" + t.str() + "'");
    }
    return Shingle(s.str() + t.str().substr(l - 1));
}

Shingling shingling(const Word& w, std::size_t l) {
    if (l < 2) throw Error(ErrorCode::kInvalidParameter, "shingle length must be at least 2");
    Shingling result{sliding_window(delimited(w, l - 1), l), ShingleMultiset(l)};
    for (const auto& s : result.ordered) result.multiset.add(s);
    return result;
}

std::vector<std::string> node_sequence(const std::vector<Shingle>& ordered, std::size_t l) {
    std::vector<std::string> nodes;
    if (ordered.empty()) return nodes;
    nodes.reserve(ordered.size() + 1);
    for (const auto& s : ordered) nodes.emplace_back(s.prefix(l - 1));
    nodes.emplace_back(ordered.back().suffix(l - 1));
    return nodes;
}

Word strip_padding(std::string_view folded, std::size_t pad) {
    if (folded.size() < 2 * pad) {
        throw Error(ErrorCode::kInconsistentMultiset, "decoded text shorter than its padding");
    }
    for (std::size_t i = 0; i < pad; ++i) {
        if (folded[i] != kDelimiter || folded[folded.size() - 1 - i] != kDelimiter) {
            throw Error(ErrorCode::kInconsistentMultiset, "decoded text is not delimiter-anchored");
        }
    }
    const auto interior = folded.substr(pad, folded.size() - 2 * pad);
    if (interior.find(kDelimiter) != std::string_view::npos) {
        throw Error(ErrorCode::kInconsistentMultiset, "delimiter inside decoded text");
    }
    return Word(std::string(interior));
}

}  // namespace udstr
