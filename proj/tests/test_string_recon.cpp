// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <future>
#include <thread>

#include <udstr/debruijn.hpp>
#include <udstr/decider.hpp>
#include <udstr/oracle.hpp>
#include <udstr/string_recon.hpp>

#include "test_util.hpp"

using namespace udstr;
using udstr::testing::multiset_of;
using udstr::testing::random_word;

namespace {

struct Outcome {
    SessionResult a;
    SessionResult b;
};

Outcome run_pair(const std::string& sigma, const std::string& tau, SessionConfig cfg) {
    auto [ea, eb] = channel_pair();
    SessionConfig ca = cfg, cb = cfg;
    ca.role = Role::kInitiator;
    cb.role = Role::kResponder;
    auto fb = std::async(std::launch::async, [&, &eb = eb] { return run_protocol(Word(tau), *eb, cb); });
    auto ra = run_protocol(Word(sigma), *ea, ca);
    return {std::move(ra), fb.get()};
}

/// B = n + 1 + W(-ln(p) p^-n)/ln p solved as the fixed point B = 1 + ln(n + 1 - B)/(-ln p).
double bound_by_bisection(double n, double p) {
    const double c = -std::log(p);
    auto g = [&](double b) { return b - 1 - std::log(n + 1 - b) / c; };
    double lo = 1, hi = n;
    for (int i = 0; i < 200; ++i) {
        const double mid = (lo + hi) / 2;
        (g(mid) < 0 ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace

TEST(Canonical, IndicesFollowBytesThenPosition) {
    const auto sh = shingling(Word("aaa"), 2);
    // $a, aa, aa, a$ sort as $a < a$ < aa#1 < aa#2.
    EXPECT_EQ(canonical_indices(sh.ordered), (std::vector<std::uint64_t>{0, 2, 3, 1}));
    const auto inst = canonical_instances(sh.multiset);
    EXPECT_EQ(inst, (std::vector<Shingle>{"$a", "a$", "aa", "aa"}));
}

TEST(MergeUntilUd, Katana) {
    const auto r = merge_until_ud(shingling(Word("katana"), 2).ordered, 2);
    EXPECT_EQ(r.multiset, multiset_of({"$k", "ka", "at", "tana", "a$"}));
    EXPECT_EQ(r.records.size(), 2u);
    EXPECT_EQ(decode_unique(DeBruijnGraph::build(r.multiset, 2)), Word("katana"));
}

TEST(MergeUntilUd, UdWordHasNoMerges) {
    const auto r = merge_until_ud(shingling(Word("axbxa"), 2).ordered, 2);
    EXPECT_TRUE(r.records.empty());
    EXPECT_EQ(r.multiset, bigram_map(Word("axbxa")));
}

TEST(MergeUntilUd, RepeatedCharacter) {
    const auto r = merge_until_ud(shingling(Word("aaaa"), 2).ordered, 2);
    auto m = r.multiset;
    m.set_base_len(2);
    const auto dc = decoding_count(m);
    ASSERT_EQ(dc.count, 1u);
    EXPECT_EQ(dc.witnesses.front(), Word("aaaa"));
}

TEST(MergeUntilUd, ReplayReproducesMergedMultiset) {
    std::mt19937_64 rng(70);
    for (int i = 0; i < 2000; ++i) {
        const auto w = random_word(rng, "ab", rng() % 60);
        const std::size_t l = 2 + rng() % 4;
        const auto sh = shingling(w, l);
        const auto r = merge_until_ud(sh.ordered, l);
        ASSERT_LE(r.records.size(), sh.ordered.size());
        ASSERT_EQ(apply_merges(sh.multiset, r.records, l), r.multiset);
        ASSERT_EQ(decode_unique(DeBruijnGraph::build(r.multiset, l)), w);
        const auto packed = pack_merges(r.records, sh.multiset.total());
        const auto unpacked = unpack_merges(packed, sh.multiset.total());
        ASSERT_EQ(unpacked.size(), r.records.size());
        ASSERT_EQ(apply_merges(sh.multiset, unpacked, l), r.multiset);
        const unsigned width = sh.multiset.total() <= 2 ? 1 : std::bit_width(sh.multiset.total() - 1);
        ASSERT_LE(8 * (packed.size() - 5), (2 * width + 1) * r.records.size() + 7);
    }
}

TEST(MergeRecords, PackedWidth) {
    const std::vector<MergeRecord> recs{{0, 5}, {6, 2}};
    const auto bytes = pack_merges(recs, 7);  // width 3, two pieces of 1 + 6 bits
    EXPECT_EQ(bytes.size(), 4u + 1 + 2);
    EXPECT_EQ(bytes[4], 3u);
    EXPECT_EQ(unpack_merges(bytes, 7), recs);
    EXPECT_THROW(unpack_merges({0, 0, 0, 2, 3, 0x80}, 7), Error);
    EXPECT_THROW(pack_merges({{7, 0}}, 7), Error);
}

TEST(MergeRecords, CascadePacksAsOnePiece) {
    const std::vector<MergeRecord> recs{{3, 4}, {2, 3}, {0, 2}};
    const auto bytes = pack_merges(recs, 8);
    EXPECT_EQ(bytes.size(), 4u + 1 + 2);  // gamma(3) is 3 bits, then 4 indices of 3
    EXPECT_EQ(unpack_merges(bytes, 8), (std::vector<MergeRecord>{{0, 2}, {0, 3}, {0, 4}}));
}

TEST(MergeRecords, InvalidReplay) {
    const auto base = bigram_map(Word("katana"));
    EXPECT_THROW(apply_merges(base, {{0, 0}}, 2), Error);
    EXPECT_THROW(apply_merges(base, {{0, 99}}, 2), Error);
}

TEST(Lambert, Values) {
    EXPECT_NEAR(lambert_w0(0), 0, 1e-15);
    EXPECT_NEAR(lambert_w0(std::exp(1.0)), 1, 1e-12);
    for (double x : {1e-6, 0.3, 2.0, 10.0, 1e5, 1e200}) {
        const double w = lambert_w0(x);
        EXPECT_NEAR(w * std::exp(w) / x, 1, 1e-12) << x;
    }
    const double w = lambert_w0_from_log(5000);
    EXPECT_NEAR(w + std::log(w), 5000, 1e-9);
}

TEST(ShingleLen, MatchesBisection) {
    for (const auto& [n, p] : {std::pair<std::uint64_t, double>{1024, 0.75}, {1024, 0.6}, {4096, 0.6}, {1 << 20, 0.6},
                              {100, 0.9}}) {
        EXPECT_NEAR(shingle_len_bound(n, p), bound_by_bisection(static_cast<double>(n), p), 1e-6) << n << " " << p;
    }
    EXPECT_NEAR(shingle_len_bound(1024, 0.75), 25.0117, 1e-4);
    EXPECT_EQ(recommend_shingle_len(1024, 0.75), 26u);
    EXPECT_EQ(recommend_shingle_len(4096, 0.6), 18u);
}

TEST(ShingleLen, LogarithmicGrowth) {
    const double r = static_cast<double>(recommend_shingle_len(1 << 20, 0.6)) / recommend_shingle_len(1 << 10, 0.6);
    EXPECT_LE(r, 2.5);
}

TEST(ShingleLen, MonotoneInN) {
    std::size_t prev = 0;
    for (std::uint64_t n = 2; n < 5000; n += 7) {
        const auto l = recommend_shingle_len(n, 0.6);
        EXPECT_GE(l, prev);
        prev = l;
    }
}

TEST(ShingleLen, ParameterRange) {
    EXPECT_THROW(recommend_shingle_len(100, 0.5), Error);
    EXPECT_THROW(recommend_shingle_len(100, 1.0), Error);
    EXPECT_THROW(recommend_shingle_len(1, 0.6), Error);
}

TEST(IndelDistance, Small) {
    EXPECT_EQ(indel_distance("katana", "katna"), 1u);
    EXPECT_EQ(indel_distance("", "abc"), 3u);
    EXPECT_EQ(indel_distance("abc", "abc"), 0u);
    EXPECT_EQ(indel_distance("ab", "ba"), 2u);
}

TEST(IndelDistance, BoundedByEdits) {
    std::mt19937_64 rng(71);
    const Alphabet a("01");
    for (int i = 0; i < 100; ++i) {
        const auto w = random_word(rng, "01", 300);
        const std::size_t edits = rng() % 10;
        const auto v = apply_random_edits(w, edits, a, rng);
        EXPECT_LE(*indel_distance(w.str(), v.str()), edits);
    }
}

TEST(Protocol, IdenticalStrings) {
    const auto out = run_pair("katana", "katana", {});
    EXPECT_EQ(out.a.remote, Word("katana"));
    EXPECT_EQ(out.b.remote, Word("katana"));
    EXPECT_EQ(out.a.report.delta_only_local, 0u);
    EXPECT_EQ(out.a.report.delta_only_remote, 0u);
    EXPECT_EQ(out.a.report.alpha, 0u);
}

TEST(Protocol, KatanaKatnaRateless) {
    SessionConfig cfg;
    cfg.l = 2;
    const auto out = run_pair("katana", "katna", cfg);
    EXPECT_EQ(out.a.remote, Word("katna"));
    EXPECT_EQ(out.b.remote, Word("katana"));
    EXPECT_EQ(out.a.report.merges_local, 2u);
    EXPECT_EQ(out.b.report.merges_remote, 2u);
    EXPECT_EQ(out.a.report.outcome, "ok");
    EXPECT_EQ(out.a.report.alpha, 1u);
}

TEST(Protocol, KatanaKatnaFixed) {
    SessionConfig cfg;
    cfg.l = 2;
    cfg.mode = ReconMode::kFixed;
    cfg.bound = 6;
    const auto out = run_pair("katana", "katna", cfg);
    EXPECT_EQ(out.a.remote, Word("katna"));
    EXPECT_EQ(out.b.remote, Word("katana"));
    EXPECT_EQ(out.a.report.eval_pairs_sent, 6u + 8u);
}

TEST(Protocol, FixedBoundTooSmall) {
    SessionConfig cfg;
    cfg.l = 3;
    cfg.mode = ReconMode::kFixed;
    cfg.bound = 1;
    cfg.verification_points = 2;
    auto [ea, eb] = channel_pair();
    SessionConfig cb = cfg;
    cb.role = Role::kResponder;
    auto fb = std::async(std::launch::async, [&, &eb = eb] {
        ReconSession s(Word("abcdefgh"), cb);
        try {
            s.run(*eb);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::kParseError;
    });
    ReconSession s(Word("abxdefyh"), cfg);
    ErrorCode code = ErrorCode::kParseError;
    try {
        s.run(*ea);
    } catch (const Error& e) {
        code = e.code();
    }
    const auto peer = fb.get();
    EXPECT_TRUE(code == ErrorCode::kNeedsLargerBound || code == ErrorCode::kSessionAbort);
    EXPECT_TRUE(peer == ErrorCode::kNeedsLargerBound || peer == ErrorCode::kSessionAbort);
    EXPECT_TRUE(code == ErrorCode::kNeedsLargerBound || peer == ErrorCode::kNeedsLargerBound);
}

TEST(Protocol, OneWay) {
    SessionConfig cfg;
    cfg.l = 3;
    cfg.two_way = false;
    const auto out = run_pair("abracadabra", "abracadabrx", cfg);
    EXPECT_EQ(out.a.remote, Word("abracadabrx"));
    EXPECT_FALSE(out.b.remote);
    EXPECT_FALSE(out.a.report.merges_local);
    EXPECT_EQ(out.a.report.step5.sent, 0u);
    EXPECT_GT(out.b.report.step5.sent, 0u);
}

TEST(Protocol, IncompatibleParameters) {
    auto [ea, eb] = channel_pair();
    SessionConfig ca, cb;
    cb.role = Role::kResponder;
    cb.l = 3;
    auto fb = std::async(std::launch::async, [&, &eb = eb] {
        try {
            run_protocol(Word("ab"), *eb, cb);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::kParseError;
    });
    ErrorCode code = ErrorCode::kParseError;
    try {
        run_protocol(Word("ab"), *ea, ca);
    } catch (const Error& e) {
        code = e.code();
    }
    EXPECT_EQ(code, ErrorCode::kProtocolError);
    EXPECT_NE(fb.get(), ErrorCode::kParseError);
}

TEST(Protocol, PeerVanishes) {
    auto [ea, eb] = channel_pair();
    eb->close();
    try {
        run_protocol(Word("ab"), *ea, {});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::kSessionAbort);
    }
}

TEST(Protocol, RandomEditsBothModes) {
    std::mt19937_64 rng(72);
    const Alphabet bits("01");
    for (int t = 0; t < 12; ++t) {
        const auto sigma = random_word(rng, "01", 300 + rng() % 200);
        const auto tau = apply_random_edits(sigma, 1 + rng() % 4, bits, rng);
        SessionConfig cfg;
        cfg.l = recommend_shingle_len(sigma.size(), 0.6);
        cfg.seed = rng();
        if (t % 2) {
            cfg.mode = ReconMode::kFixed;
            cfg.bound = 8 * cfg.l;
        }
        const auto out = run_pair(sigma.str(), tau.str(), cfg);
        ASSERT_EQ(out.a.remote, tau);
        ASSERT_EQ(out.b.remote, sigma);
        const double n = static_cast<double>(sigma.size());
        EXPECT_LE(out.a.report.step5.sent, 2 * n * std::log2(n - cfg.l + 1) + 48);
    }
}

TEST(Protocol, SocketMatchesChannel) {
    SocketListener listener("127.0.0.1:0");
    SessionConfig ca;
    ca.l = 2;
    SessionConfig cb = ca;
    cb.role = Role::kResponder;
    auto fb = std::async(std::launch::async, [&] {
        auto ep = listener.accept();
        return run_protocol(Word("katna"), *ep, cb);
    });
    auto ep = socket_connect("127.0.0.1:" + std::to_string(listener.port()), 2000);
    const auto ra = run_protocol(Word("katana"), *ep, ca);
    const auto rb = fb.get();
    EXPECT_EQ(ra.remote, Word("katna"));
    EXPECT_EQ(rb.remote, Word("katana"));
    const auto chan = run_pair("katana", "katna", ca);
    EXPECT_EQ(ra.report.to_text(), chan.a.report.to_text());
}

TEST(Report, TextFormat) {
    SessionReport r;
    r.outcome = "ok";
    r.n = 6;
    r.l = 2;
    r.mode = "rateless";
    r.step2 = {100, 200};
    const auto text = r.to_text();
    EXPECT_EQ(text.rfind("role=initiator\noutcome=ok\nmode=rateless\nl=2\nn=6\nremote_n=-\n", 0), 0u);
    EXPECT_NE(text.find("step2_bits_sent=100\n"), std::string::npos);
    EXPECT_NE(text.find("merges_remote=-\n"), std::string::npos);
}
