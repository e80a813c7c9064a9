// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <udstr/core.hpp>

#include "test_util.hpp"

using namespace udstr;
using udstr::testing::multiset;
using udstr::testing::multiset_of;

TEST(Alphabet, DenseSortedIndex) {
    const Alphabet a("kaatn");
    EXPECT_EQ(a.symbols(), "aknt");
    EXPECT_EQ(a.size(), 4u);
    EXPECT_EQ(a.index_of('a'), 0u);
    EXPECT_EQ(a.index_of('t'), 3u);
    EXPECT_FALSE(a.index_of('z'));
    EXPECT_EQ(a.symbol(1), 'k');
}

TEST(Alphabet, RejectsDelimiter) {
    EXPECT_THROW(Alphabet("a$b"), Error);
}

TEST(Alphabet, ValidateReportsOffset) {
    const Alphabet a("ab");
    EXPECT_NO_THROW(a.validate("abba"));
    try {
        a.validate("abc");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kInvalidSymbol);
        EXPECT_NE(std::string(e.what()).find("offset 2"), std::string::npos);
    }
}

TEST(Alphabet, MergedWith) {
    EXPECT_EQ(Alphabet("ab").merged_with(Alphabet("bc")), Alphabet("abc"));
}

TEST(Word, RejectsDelimiter) {
    EXPECT_THROW(Word("ka$ta"), Error);
    EXPECT_NO_THROW(Word(""));
}

TEST(Shingle, DelimiterOnlyAtEnds) {
    EXPECT_NO_THROW(Shingle("$$a"));
    EXPECT_NO_THROW(Shingle("ab$"));
    EXPECT_NO_THROW(Shingle("$$$"));
    EXPECT_NO_THROW(Shingle("$a$"));
    EXPECT_THROW(Shingle("a$b"), Error);
    EXPECT_THROW(Shingle(""), Error);
}

TEST(BigramMap, Katana) {
    EXPECT_EQ(bigram_map(Word("katana")),
              multiset_of({"$k", "ka", "at", "ta", "an", "na", "a$"}));
}

TEST(BigramMap, EmptyWord) { EXPECT_EQ(bigram_map(Word("")), multiset({{"$$", 1}})); }

TEST(BigramMap, KatanaKanataCollide) { EXPECT_EQ(bigram_map(Word("katana")), bigram_map(Word("kanata"))); }

TEST(BigramMap, TotalIsLengthPlusOne) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        const auto w = udstr::testing::random_word(rng, "abc", rng() % 40);
        EXPECT_EQ(bigram_map(w).total(), w.size() + 1);
    }
}

TEST(QgramMap, SlidingWindow) {
    EXPECT_EQ(qgram_map(Word("ab"), 3), multiset_of({"$$a", "$ab", "ab$", "b$$"}));
    EXPECT_EQ(qgram_map(Word("katana"), 2), bigram_map(Word("katana")));
}

TEST(QgramMap, EmptyWordIsAllDelimiters) { EXPECT_EQ(qgram_map(Word(""), 3), multiset({{"$$$", 2}})); }

TEST(QgramMap, RejectsShortQ) {
    try {
        qgram_map(Word("ab"), 1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kInvalidParameter);
    }
}

TEST(Overlaps, Examples) {
    EXPECT_TRUE(overlaps("kata", "tana", 3));
    EXPECT_FALSE(overlaps("kata", "kata", 3));
    EXPECT_TRUE(overlaps("ab", "bc", 2));
}

TEST(Overlaps, ShortShingleIsAnError) { EXPECT_THROW(overlaps("a", "abc", 3), Error); }

TEST(Noconcat, Examples) {
    EXPECT_EQ(noconcat("kata", "tana", 3), Shingle("katana"));
    EXPECT_EQ(noconcat("ab", "b", 2), Shingle("ab"));
    EXPECT_EQ(noconcat("$k", "ka", 2), Shingle("$ka"));
}

TEST(Noconcat, MismatchIsAnError) {
    try {
        noconcat("kata", "kata", 3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kOverlapMismatch);
    }
}

TEST(Noconcat, AssociativeAlongChain) {
    const Shingle s("$ka"), t("kat"), u("ata");
    EXPECT_EQ(noconcat(noconcat(s, t, 3), u, 3), noconcat(s, noconcat(t, u, 3), 3));
}

TEST(Shingling, Katana) {
    const auto sh = shingling(Word("katana"), 2);
    ASSERT_EQ(sh.ordered.size(), 7u);
    EXPECT_EQ(sh.ordered.front(), Shingle("$k"));
    EXPECT_EQ(sh.ordered[3], Shingle("ta"));
    EXPECT_EQ(sh.multiset, multiset_of({"$k", "ka", "at", "ta", "an", "na", "a$"}));
    EXPECT_EQ(shingling(Word("kanata"), 2).multiset, sh.multiset);
}

TEST(Shingling, SingleCharacter) { EXPECT_EQ(shingling(Word("a"), 2).multiset, multiset_of({"$a", "a$"})); }

TEST(Shingling, RejectsShortL) { EXPECT_THROW(shingling(Word("ab"), 1), Error); }

TEST(Shingling, ChainFoldsBackToDelimitedWord) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 300; ++i) {
        const auto w = udstr::testing::random_word(rng, "abcd", rng() % 30);
        const std::size_t l = 2 + rng() % 5;
        const auto sh = shingling(w, l);
        ASSERT_EQ(sh.multiset.total(), w.size() + l - 1);
        Shingle folded = sh.ordered.front();
        for (std::size_t k = 1; k < sh.ordered.size(); ++k) {
            ASSERT_TRUE(overlaps(sh.ordered[k - 1], sh.ordered[k], l));
            folded = noconcat(folded, sh.ordered[k], l);
        }
        EXPECT_EQ(folded.str(), delimited(w, l - 1));
        EXPECT_EQ(strip_padding(folded.str(), l - 1), w);
    }
}

TEST(Shingling, PalindromeReversalFixesMap) {
    EXPECT_EQ(bigram_map(Word("abcba")), bigram_map(Word("abcba")));
    const std::string w = "racecar";
    EXPECT_EQ(bigram_map(Word(std::string(w.rbegin(), w.rend()))), bigram_map(Word(w)));
}

TEST(NodeSequence, PrefixesThenLastSuffix) {
    const auto sh = shingling(Word("ab"), 3);
    EXPECT_EQ(node_sequence(sh.ordered, 3), (std::vector<std::string>{"$$", "$a", "ab", "b$", "$$"}));
}

TEST(StripPadding, RejectsBadAnchoring) {
    EXPECT_EQ(strip_padding("$$ab$$", 2), Word("ab"));
    EXPECT_THROW(strip_padding("$ab$$", 2), Error);
    EXPECT_THROW(strip_padding("$", 1), Error);
}

TEST(MultisetText, Format) {
    const auto text = bigram_map(Word("katana")).to_text();
    EXPECT_EQ(text, "1\t$k\n1\ta$\n1\tan\n1\tat\n1\tka\n1\tna\n1\tta\n");
    EXPECT_EQ(ShingleMultiset::from_text(text), bigram_map(Word("katana")));
}

TEST(MultisetText, Multiplicities) {
    const auto m = bigram_map(Word("aaaa"));
    EXPECT_EQ(m.to_text(), "1\t$a\n1\ta$\n3\taa\n");
    EXPECT_EQ(m.max_multiplicity(), 3u);
    EXPECT_EQ(ShingleMultiset::from_text("3\taa\r\n1\t$a\n\n1\ta$\n"), m);
}

TEST(MultisetText, ParseErrors) {
    for (const char* bad : {"x\tab\n", "0\tab\n", "1 ab\n", "1\t\n", "1\ta$b\n"}) {
        EXPECT_THROW(ShingleMultiset::from_text(bad), Error) << bad;
    }
}

TEST(Multiset, RemoveChecksCounts) {
    auto m = multiset({{"ab", 2}});
    m.remove(Shingle("ab"));
    EXPECT_EQ(m.count(Shingle("ab")), 1u);
    EXPECT_THROW(m.remove(Shingle("ab"), 2), Error);
    m.remove(Shingle("ab"));
    EXPECT_TRUE(m.empty());
    EXPECT_EQ(m.total(), 0u);
}
