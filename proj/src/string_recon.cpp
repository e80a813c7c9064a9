// SPDX-License-Identifier: Apache-2.0

#include <udstr/string_recon.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <map>

#include <udstr/debruijn.hpp>
#include <udstr/decider.hpp>

namespace udstr {

std::vector<std::uint64_t> canonical_indices(const std::vector<Shingle>& ordered) {
    std::map<Shingle, std::uint64_t> counts;
    for (const auto& s : ordered) ++counts[s];
    std::map<Shingle, std::uint64_t> offset;
    std::uint64_t running = 0;
    for (const auto& [s, n] : counts) {
        offset[s] = running;
        running += n;
    }
    std::vector<std::uint64_t> out;
    out.reserve(ordered.size());
    for (const auto& s : ordered) out.push_back(offset[s]++);
    return out;
}

std::vector<Shingle> canonical_instances(const ShingleMultiset& s) {
    std::vector<Shingle> out;
    out.reserve(s.total());
    for (const auto& [sh, n] : s.entries()) out.insert(out.end(), n, sh);
    return out;
}

MergeResult merge_until_ud(const std::vector<Shingle>& ordered, std::size_t l) {
    if (l < 2) throw Error(ErrorCode::kInvalidParameter, "shingle length must be at least 2");
    const auto canon = canonical_indices(ordered);
    TokenDecider decider(l - 1, true);
    std::vector<std::uint64_t> piece_first;
    MergeResult result;
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        const auto outcome = decider.push_or_merge(ordered[i]);
        std::uint64_t pending = canon[i];
        for (std::size_t m = 0; m < outcome.merges; ++m) {
            result.records.push_back({piece_first.back(), pending});
            pending = piece_first.back();
            piece_first.pop_back();
        }
        piece_first.push_back(pending);
    }
    result.multiset = decider.edge_multiset();
    result.multiset.set_base_len(l);
    result.pieces = decider.edges();
    return result;
}

namespace {

constexpr std::size_t kNone = SIZE_MAX;

/// Replays merge records over `n` instance indices. Returns the successor of every
/// instance within its piece and which instances start a piece.
std::pair<std::vector<std::size_t>, std::vector<bool>> replay(const std::vector<MergeRecord>& records, std::size_t n) {
    std::vector<std::size_t> next(n, kNone), tail(n);
    std::vector<bool> first(n, true);
    for (std::size_t i = 0; i < n; ++i) tail[i] = i;
    for (const auto& r : records) {
        if (r.left_index >= n || r.right_index >= n || r.left_index == r.right_index || !first[r.left_index] ||
            !first[r.right_index]) {
            throw Error(ErrorCode::kInvalidMerge, "merge (" + std::to_string(r.left_index) + ", " +
                                                      std::to_string(r.right_index) + ") does not name two pieces");
        }
        next[tail[r.left_index]] = r.right_index;
        tail[r.left_index] = tail[r.right_index];
        first[r.right_index] = false;
    }
    return {std::move(next), std::move(first)};
}

unsigned index_width(std::uint64_t instances) {
    return instances <= 2 ? 1 : static_cast<unsigned>(std::bit_width(instances - 1));
}

}  // namespace

ShingleMultiset apply_merges(const ShingleMultiset& base, const std::vector<MergeRecord>& records, std::size_t l) {
    const auto instances = canonical_instances(base);
    const auto [next, first] = replay(records, instances.size());
    ShingleMultiset out(l);
    for (std::size_t i = 0; i < instances.size(); ++i) {
        if (!first[i]) continue;
        std::string text = instances[i].str();
        for (std::size_t j = next[i]; j != kNone; j = next[j]) {
            const Shingle& s = instances[j];
            if (text.size() < l - 1 || s.size() < l - 1 || text.compare(text.size() - (l - 1), l - 1, s.str(), 0, l - 1) != 0) {
                throw Error(ErrorCode::kInvalidMerge, "merged shingles '" + text + "' and '" + s.str() + "' do not overlap");
            }
            text.append(s.str(), l - 1);
        }
        out.add(Shingle(std::move(text)));
    }
    return out;
}

std::vector<std::uint8_t> pack_merges(const std::vector<MergeRecord>& records, std::uint64_t instances) {
    const auto [next, first] = replay(records, instances);
    std::vector<std::vector<std::uint64_t>> pieces;
    for (std::size_t i = 0; i < instances; ++i) {
        if (!first[i] || next[i] == kNone) continue;
        auto& piece = pieces.emplace_back();
        for (std::size_t j = i; j != kNone; j = next[j]) piece.push_back(j);
    }

    const unsigned width = index_width(instances);
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(pieces.size())).u8(static_cast<std::uint8_t>(width));
    auto& out = w.bytes();
    const std::size_t header = out.size();
    std::uint64_t bits_needed = 0;
    for (const auto& p : pieces) bits_needed += width * p.size() + 2 * std::bit_width(p.size() - 1) - 1;
    out.resize(header + (bits_needed + 7) / 8, 0);
    std::uint64_t bit = 0;
    auto put = [&](std::uint64_t v, unsigned bits) {
        for (unsigned b = bits; b-- > 0; ++bit) {
            if ((v >> b) & 1) out[header + bit / 8] |= static_cast<std::uint8_t>(0x80u >> (bit % 8));
        }
    };
    for (const auto& p : pieces) {
        // Elias gamma code of the number of joins.
        const auto joins = p.size() - 1;
        const auto bits = static_cast<unsigned>(std::bit_width(joins));
        put(0, bits - 1);
        put(joins, bits);
        for (auto ix : p) put(ix, width);
    }
    return w.take();
}

std::vector<MergeRecord> unpack_merges(const std::vector<std::uint8_t>& payload, std::uint64_t instances) {
    ByteReader r(payload);
    const std::uint32_t count = r.u32();
    const unsigned width = r.u8();
    if (width != index_width(instances)) throw Error(ErrorCode::kProtocolError, "unexpected merge index width");
    const auto packed = r.raw(r.remaining());
    const std::uint64_t total_bits = 8ULL * packed.size();
    std::uint64_t bit = 0;
    auto read_bit = [&]() -> std::uint64_t {
        if (bit >= total_bits) throw Error(ErrorCode::kProtocolError, "truncated merge list");
        const auto v = (packed[bit / 8] >> (7 - bit % 8)) & 1u;
        ++bit;
        return v;
    };
    auto get = [&](unsigned bits) {
        std::uint64_t v = 0;
        for (unsigned b = 0; b < bits; ++b) v = (v << 1) | read_bit();
        return v;
    };
    std::vector<MergeRecord> out;
    for (std::uint32_t p = 0; p < count; ++p) {
        unsigned zeros = 0;
        while (read_bit() == 0) {
            if (++zeros >= 64) throw Error(ErrorCode::kProtocolError, "bad merged piece length");
        }
        const std::uint64_t joins = (std::uint64_t{1} << zeros) | get(zeros);
        if (joins == 0 || joins >= instances) throw Error(ErrorCode::kProtocolError, "bad merged piece length");
        const std::uint64_t head = get(width);
        for (std::uint64_t k = 0; k < joins; ++k) out.push_back({head, get(width)});
    }
    if ((total_bits - bit) >= 8) throw Error(ErrorCode::kProtocolError, "trailing merge list bytes");
    replay(out, instances);
    return out;
}

// ---------------------------------------------------------------------------

double lambert_w0_from_log(double log_x) {
    if (log_x < 1.0) return lambert_w0(std::exp(log_x));
    // Solve w + ln w = log_x by Newton's method.
    double w = log_x - std::log(log_x);
    for (int i = 0; i < 100; ++i) {
        const double step = (w + std::log(w) - log_x) / (1.0 + 1.0 / w);
        w -= step;
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(w))) break;
    }
    return w;
}

double lambert_w0(double x) {
    if (!(x >= 0.0)) throw Error(ErrorCode::kInvalidParameter, "lambert_w0 is only provided for x >= 0");
    if (x == 0.0) return 0.0;
    if (x > 3.0) return lambert_w0_from_log(std::log(x));
    // Halley's iteration on w e^w = x.
    double w = std::log1p(x);
    for (int i = 0; i < 100; ++i) {
        const double ew = std::exp(w);
        const double f = w * ew - x;
        const double step = f / (ew * (w + 1.0) - (w + 2.0) * f / (2.0 * w + 2.0));
        w -= step;
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(w))) break;
    }
    return w;
}

double shingle_len_bound(std::uint64_t n, double p) {
    const double ln_p = std::log(p);
    const double nd = static_cast<double>(n);
    // ln(-ln(p) p^-n)
    const double log_arg = std::log(-ln_p) - nd * ln_p;
    return nd + 1.0 + lambert_w0_from_log(log_arg) / ln_p;
}

std::size_t recommend_shingle_len(std::uint64_t n, double p) {
    if (!(p > 0.5 && p < 1.0)) throw Error(ErrorCode::kInvalidParameter, "p must lie in (0.5, 1)");
    if (n < 2) throw Error(ErrorCode::kInvalidParameter, "n must be at least 2");
    const double b = std::ceil(shingle_len_bound(n, p) - 1e-9);
    return std::max<std::size_t>(2, static_cast<std::size_t>(b));
}

std::optional<std::uint64_t> indel_distance(std::string_view a, std::string_view b) {
    if (a.size() < b.size()) std::swap(a, b);
    if (b.empty()) return a.size();
    // Bit-parallel LCS with the shorter string packed into words.
    const std::size_t words = (b.size() + 63) / 64;
    if (static_cast<double>(words) * static_cast<double>(a.size()) > 4e9) return std::nullopt;
    std::array<std::int32_t, 256> slot;
    slot.fill(-1);
    std::vector<std::vector<std::uint64_t>> peq;
    for (std::size_t i = 0; i < b.size(); ++i) {
        auto& s = slot[static_cast<unsigned char>(b[i])];
        if (s < 0) {
            s = static_cast<std::int32_t>(peq.size());
            peq.emplace_back(words, 0);
        }
        peq[static_cast<std::size_t>(s)][i / 64] |= 1ULL << (i % 64);
    }
    std::vector<std::uint64_t> v(words, ~0ULL);
    for (char c : a) {
        const auto s = slot[static_cast<unsigned char>(c)];
        if (s < 0) continue;
        const auto& m = peq[static_cast<std::size_t>(s)];
        bool carry = false;
        for (std::size_t w = 0; w < words; ++w) {
            const std::uint64_t u = v[w] & m[w];
            std::uint64_t sum;
            const bool c1 = __builtin_add_overflow(v[w], u, &sum);
            const bool c2 = __builtin_add_overflow(sum, static_cast<std::uint64_t>(carry), &sum);
            carry = c1 || c2;
            v[w] = sum | (v[w] & ~m[w]);
        }
    }
    std::uint64_t lcs = 0;
    for (std::size_t i = 0; i < b.size(); ++i) lcs += ((v[i / 64] >> (i % 64)) & 1) == 0;
    return a.size() + b.size() - 2 * lcs;
}

Word apply_random_edits(const Word& w, std::size_t edits, const Alphabet& alphabet, std::mt19937_64& rng) {
    if (alphabet.empty()) throw Error(ErrorCode::kInvalidParameter, "empty alphabet");
    std::string text = w.str();
    std::uniform_int_distribution<std::size_t> symbol(0, alphabet.size() - 1);
    for (std::size_t e = 0; e < edits; ++e) {
        const bool insert = text.empty() || std::bernoulli_distribution(0.5)(rng);
        if (insert) {
            const std::size_t pos = std::uniform_int_distribution<std::size_t>(0, text.size())(rng);
            text.insert(text.begin() + static_cast<std::ptrdiff_t>(pos), alphabet.symbol(symbol(rng)));
        } else {
            const std::size_t pos = std::uniform_int_distribution<std::size_t>(0, text.size() - 1)(rng);
            text.erase(pos, 1);
        }
    }
    return Word(std::move(text));
}

// ---------------------------------------------------------------------------

std::string_view to_string(Role role) { return role == Role::kInitiator ? "initiator" : "responder"; }

StepBits SessionReport::total() const {
    StepBits t;
    for (const auto* s : {&handshake, &step2, &step5, &step6}) {
        t.sent += s->sent;
        t.received += s->received;
    }
    return t;
}

std::string SessionReport::to_text() const {
    auto opt = [](const std::optional<std::uint64_t>& v) { return v ? std::to_string(*v) : std::string("-"); };
    std::string out;
    auto line = [&](std::string_view key, const std::string& value) {
        out += key;
        out += '=';
        out += value;
        out += '\n';
    };
    line("role", std::string(to_string(role)));
    line("outcome", outcome);
    line("mode", mode);
    line("l", std::to_string(l));
    line("n", std::to_string(n));
    line("remote_n", opt(remote_n));
    line("alpha", opt(alpha));
    line("handshake_bits_sent", std::to_string(handshake.sent));
    line("handshake_bits_received", std::to_string(handshake.received));
    line("step2_bits_sent", std::to_string(step2.sent));
    line("step2_bits_received", std::to_string(step2.received));
    line("step5_bits_sent", std::to_string(step5.sent));
    line("step5_bits_received", std::to_string(step5.received));
    line("step6_bits_sent", std::to_string(step6.sent));
    line("step6_bits_received", std::to_string(step6.received));
    const auto t = total();
    line("total_bits_sent", std::to_string(t.sent));
    line("total_bits_received", std::to_string(t.received));
    line("eval_pairs_sent", std::to_string(eval_pairs_sent));
    line("eval_pairs_received", std::to_string(eval_pairs_received));
    line("delta_only_local", opt(delta_only_local));
    line("delta_only_remote", opt(delta_only_remote));
    line("merges_local", opt(merges_local));
    line("merges_remote", opt(merges_remote));
    return out;
}

namespace {

constexpr std::uint8_t kProtocolVersion = 1;

struct Hello {
    std::uint8_t version;
    Role role;
    bool two_way;
    std::uint32_t l;
    ReconMode mode;
    std::uint64_t bound;
    std::uint32_t k;
    std::uint64_t seed;
    std::uint64_t n;
    std::uint64_t set_size;
    std::uint64_t max_multiplicity;
    std::uint64_t modulus;
    std::string alphabet;
};

Frame encode_hello(const Hello& h) {
    ByteWriter w;
    w.u8(h.version)
        .u8(static_cast<std::uint8_t>(h.role))
        .u8(h.two_way ? 1 : 0)
        .u32(h.l)
        .u8(static_cast<std::uint8_t>(h.mode))
        .u64(h.bound)
        .u32(h.k)
        .u64(h.seed)
        .u64(h.n)
        .u64(h.set_size)
        .u64(h.max_multiplicity)
        .u64(h.modulus)
        .str(h.alphabet);
    return {FrameKind::kHello, w.take()};
}

Hello decode_hello(const Frame& f) {
    ByteReader r(f.payload);
    Hello h{};
    h.version = r.u8();
    const auto role = r.u8();
    if (role > 1) throw Error(ErrorCode::kProtocolError, "bad role in HELLO");
    h.role = static_cast<Role>(role);
    h.two_way = r.u8() != 0;
    h.l = r.u32();
    const auto mode = r.u8();
    if (mode > 1) throw Error(ErrorCode::kProtocolError, "bad mode in HELLO");
    h.mode = static_cast<ReconMode>(mode);
    h.bound = r.u64();
    h.k = r.u32();
    h.seed = r.u64();
    h.n = r.u64();
    h.set_size = r.u64();
    h.max_multiplicity = r.u64();
    h.modulus = r.u64();
    h.alphabet = r.str();
    r.finish();
    return h;
}

Frame encode_bundle(const EvalBundle& b) {
    ByteWriter w;
    w.u64(b.set_size).u32(static_cast<std::uint32_t>(b.points.size()));
    for (std::size_t i = 0; i < b.points.size(); ++i) w.u64(b.points[i]).u64(b.values[i]);
    return {FrameKind::kEvalBundle, w.take()};
}

EvalBundle decode_bundle(const Frame& f) {
    ByteReader r(f.payload);
    EvalBundle b;
    b.set_size = r.u64();
    const auto count = r.u32();
    if (r.remaining() != 16ULL * count) throw Error(ErrorCode::kProtocolError, "EVAL_BUNDLE size mismatch");
    for (std::uint32_t i = 0; i < count; ++i) {
        b.points.push_back(r.u64());
        b.values.push_back(r.u64());
    }
    r.finish();
    return b;
}

/// Runs `body` and records the bits it moved into `bucket`.
template <typename F>
auto metered(Endpoint& ep, StepBits& bucket, F&& body) {
    const auto s0 = ep.bits_sent(), r0 = ep.bits_received();
    struct Commit {
        Endpoint& ep;
        StepBits& bucket;
        std::uint64_t s0, r0;
        ~Commit() {
            bucket.sent += ep.bits_sent() - s0;
            bucket.received += ep.bits_received() - r0;
        }
    } commit{ep, bucket, s0, r0};
    return body();
}

class Wire {
  public:
    Wire(Endpoint& ep, Role role) : ep_(ep), role_(role) {}

    void send(const Frame& f) { ep_.send(f); }

    Frame expect(FrameKind kind) {
        Frame f = ep_.recv();
        if (f.kind == FrameKind::kAbort) {
            ByteReader r(f.payload);
            throw Error(ErrorCode::kSessionAbort, "peer aborted: " + r.str());
        }
        if (f.kind != kind) {
            throw Error(ErrorCode::kProtocolError, "expected " + std::string(to_string(kind)) + ", got " +
                                                       std::string(to_string(f.kind)));
        }
        return f;
    }

    /// Symmetric exchange; the initiator writes first so large frames never meet head-on.
    Frame exchange(const Frame& out, FrameKind in_kind) {
        if (role_ == Role::kInitiator) {
            send(out);
            return expect(in_kind);
        }
        Frame in = expect(in_kind);
        send(out);
        return in;
    }

  private:
    Endpoint& ep_;
    Role role_;
};

}  // namespace

ReconSession::ReconSession(Word local, SessionConfig config) : local_(std::move(local)), config_(config) {
    if (config_.l < 2) throw Error(ErrorCode::kInvalidParameter, "shingle length must be at least 2");
    if (config_.mode == ReconMode::kRateless && config_.verification_points == 0) {
        throw Error(ErrorCode::kInvalidParameter, "rateless mode needs at least one verification point");
    }
    report_.role = config_.role;
    report_.n = local_.size();
    report_.l = config_.l;
    report_.mode = config_.mode == ReconMode::kFixed ? "fixed:" + std::to_string(config_.bound) : "rateless";
}

std::optional<Word> ReconSession::run(Endpoint& endpoint) {
    try {
        auto out = run_steps(endpoint);
        report_.outcome = "ok";
        return out;
    } catch (const Error& e) {
        ErrorCode code = e.code();
        if (code == ErrorCode::kTransportClosed) code = ErrorCode::kSessionAbort;
        if (code == ErrorCode::kBoundExceeded) code = ErrorCode::kNeedsLargerBound;
        report_.outcome = std::string(to_string(code));
        if (e.code() != ErrorCode::kTransportClosed && e.code() != ErrorCode::kSessionAbort) {
            try {
                ByteWriter w;
                w.str(e.what());
                endpoint.send({FrameKind::kAbort, w.take()});
            } catch (const Error&) {
            }
        }
        if (code == e.code()) throw;
        throw Error(code, e.what());
    }
}

std::optional<Word> ReconSession::run_steps(Endpoint& ep) {
    const auto& cfg = config_;
    Wire wire(ep, cfg.role);
    const PrimeField field(cfg.modulus);

    // Step 1: shingle.
    const Shingling local = shingling(local_, cfg.l);
    const Alphabet local_alphabet = Alphabet::observed(local_.str());

    // Handshake.
    const Hello mine{kProtocolVersion,
                     cfg.role,
                     cfg.two_way,
                     static_cast<std::uint32_t>(cfg.l),
                     cfg.mode,
                     cfg.mode == ReconMode::kFixed ? cfg.bound : 0,
                     static_cast<std::uint32_t>(cfg.verification_points),
                     cfg.seed,
                     local_.size(),
                     local.multiset.total(),
                     local.multiset.max_multiplicity(),
                     cfg.modulus,
                     local_alphabet.symbols()};
    const Hello peer = metered(ep, report_.handshake,
                               [&] { return decode_hello(wire.exchange(encode_hello(mine), FrameKind::kHello)); });
    if (peer.version != mine.version || peer.role == mine.role || peer.two_way != mine.two_way ||
        peer.l != mine.l || peer.mode != mine.mode || peer.bound != mine.bound || peer.k != mine.k ||
        peer.seed != mine.seed || peer.modulus != mine.modulus) {
        throw Error(ErrorCode::kProtocolError, "peer runs incompatible session parameters");
    }
    report_.remote_n = peer.n;

    const Alphabet alphabet = local_alphabet.merged_with(Alphabet(peer.alphabet));
    const ShingleCodec codec(alphabet,
                             ShingleCodec::occurrence_bits_for(std::max(mine.max_multiplicity, peer.max_multiplicity)),
                             field.encoding_limit());
    const bool i_learn = cfg.two_way || cfg.role == Role::kInitiator;
    const bool peer_learns = cfg.two_way || cfg.role == Role::kResponder;

    // Step 2: reconcile the shingle multisets.
    std::optional<Delta> delta;
    metered(ep, report_.step2, [&] {
        if (cfg.mode == ReconMode::kFixed) {
            const auto points = fixed_points(field, cfg.bound + cfg.verification_points);
            const EvalBundle local_evals = char_poly_evals(local.multiset, points, codec, field);
            std::optional<EvalBundle> remote_evals;
            if (peer_learns && i_learn) {
                remote_evals = decode_bundle(wire.exchange(encode_bundle(local_evals), FrameKind::kEvalBundle));
            } else if (peer_learns) {
                wire.send(encode_bundle(local_evals));
            } else {
                remote_evals = decode_bundle(wire.expect(FrameKind::kEvalBundle));
            }
            if (peer_learns) report_.eval_pairs_sent = points.size();
            if (i_learn) {
                report_.eval_pairs_received = remote_evals->points.size();
                if (remote_evals->set_size != peer.set_size) {
                    throw Error(ErrorCode::kProtocolError, "EVAL_BUNDLE set size disagrees with HELLO");
                }
                delta = reconcile_fixed(local.multiset, local_evals, *remote_evals, cfg.bound, codec, field);
            }
            return 0;
        }

        std::optional<RatelessEncoder> encoder;
        std::optional<RatelessDecoder> decoder;
        if (peer_learns) encoder.emplace(local.multiset, codec, field, cfg.seed);
        if (i_learn) {
            decoder.emplace(local.multiset, codec, field, cfg.seed, peer.set_size, cfg.verification_points);
        }
        bool i_need = i_learn, peer_needs = peer_learns;
        while (i_need || peer_needs) {
            const bool consume = i_need, produce = peer_needs;
            if (std::max(report_.eval_pairs_sent, report_.eval_pairs_received) >= cfg.max_pairs) {
                throw Error(ErrorCode::kCapacity, "no decode after " + std::to_string(cfg.max_pairs) + " pairs");
            }
            auto send_pair = [&] {
                const auto [z, v] = encoder->next();
                ByteWriter w;
                w.u64(z).u64(v);
                wire.send({FrameKind::kEvalPair, w.take()});
                ++report_.eval_pairs_sent;
            };
            auto recv_pair = [&] {
                const Frame f = wire.expect(FrameKind::kEvalPair);
                ByteReader r(f.payload);
                const auto z = r.u64();
                const auto v = r.u64();
                r.finish();
                ++report_.eval_pairs_received;
                if (decoder->consume(z, v)) i_need = false;
            };
            if (cfg.role == Role::kInitiator) {
                if (produce) send_pair();
                if (consume) recv_pair();
            } else {
                if (consume) recv_pair();
                if (produce) send_pair();
            }

            auto send_status = [&] {
                if (i_need) {
                    wire.send({FrameKind::kDeltaReq, {}});
                } else {
                    ByteWriter w;
                    w.u64(decoder->result()->only_local.total()).u64(decoder->result()->only_remote.total());
                    wire.send({FrameKind::kDelta, w.take()});
                }
            };
            auto recv_status = [&] {
                Frame f = ep.recv();
                if (f.kind == FrameKind::kDeltaReq) return;
                if (f.kind == FrameKind::kDelta) {
                    peer_needs = false;
                    return;
                }
                if (f.kind == FrameKind::kAbort) {
                    ByteReader r(f.payload);
                    throw Error(ErrorCode::kSessionAbort, "peer aborted: " + r.str());
                }
                throw Error(ErrorCode::kProtocolError, "expected DELTA_REQ or DELTA, got " +
                                                           std::string(to_string(f.kind)));
            };
            if (cfg.role == Role::kInitiator) {
                if (consume) send_status();
                if (produce) recv_status();
            } else {
                if (produce) recv_status();
                if (consume) send_status();
            }
        }
        if (decoder) delta = *decoder->result();
        return 0;
    });
    if (delta) {
        report_.delta_only_local = delta->only_local.total();
        report_.delta_only_remote = delta->only_remote.total();
    }

    // Steps 3-4: merge the local shingles until uniquely decodable.
    std::optional<MergeResult> merged;
    if (peer_learns) {
        merged = merge_until_ud(local.ordered, cfg.l);
        report_.merges_local = merged->records.size();
    }

    // Step 5: exchange merge records.
    std::vector<MergeRecord> remote_records;
    metered(ep, report_.step5, [&] {
        std::optional<Frame> out;
        if (peer_learns) out = Frame{FrameKind::kMerges, pack_merges(merged->records, local.multiset.total())};
        Frame in{FrameKind::kMerges, {}};
        if (peer_learns && i_learn) {
            in = wire.exchange(*out, FrameKind::kMerges);
        } else if (peer_learns) {
            wire.send(*out);
        } else {
            in = wire.expect(FrameKind::kMerges);
        }
        if (i_learn) remote_records = unpack_merges(in.payload, peer.set_size);
        return 0;
    });
    if (i_learn) report_.merges_remote = remote_records.size();

    // Step 6: decode the remote string.
    std::optional<Word> remote;
    if (i_learn) {
        ShingleMultiset remote_base = apply_delta(local.multiset, *delta);
        if (remote_base.total() != peer.set_size) {
            throw Error(ErrorCode::kInconsistentMultiset, "reconciled multiset has the wrong size");
        }
        const ShingleMultiset remote_merged = apply_merges(remote_base, remote_records, cfg.l);
        remote = decode_unique(DeBruijnGraph::build(remote_merged, cfg.l));
        if (remote->size() != peer.n) throw Error(ErrorCode::kInconsistentMultiset, "decoded string has the wrong length");
        report_.alpha = indel_distance(local_.str(), remote->str());
    }
    metered(ep, report_.step6, [&] {
        ByteWriter w;
        w.u8(0).u64(remote ? remote->size() : 0);
        const Frame done{FrameKind::kDone, w.take()};
        if (i_learn && peer_learns) {
            wire.exchange(done, FrameKind::kDone);
        } else if (i_learn) {
            wire.send(done);
        } else {
            wire.expect(FrameKind::kDone);
        }
        return 0;
    });
    return remote;
}

SessionResult run_protocol(const Word& local, Endpoint& endpoint, const SessionConfig& config) {
    ReconSession session(local, config);
    auto remote = session.run(endpoint);
    return {std::move(remote), session.report()};
}

}  // namespace udstr
