// SPDX-License-Identifier: Apache-2.0

#include <udstr/set_recon.hpp>

#include <algorithm>
#include <bit>
#include <map>
#include <string>

namespace udstr {

ShingleCodec::ShingleCodec(Alphabet alphabet, unsigned occurrence_bits, std::uint64_t limit)
    : alphabet_(std::move(alphabet)), occ_bits_(occurrence_bits), limit_(limit), base_(alphabet_.size() + 1) {
    if (occurrence_bits > 32) throw Error(ErrorCode::kInvalidParameter, "occurrence bits above 32");
    if (limit == 0) throw Error(ErrorCode::kInvalidParameter, "empty encoding range");
}

unsigned ShingleCodec::occurrence_bits_for(std::uint64_t max_multiplicity) {
    return max_multiplicity <= 1 ? 0 : static_cast<unsigned>(std::bit_width(max_multiplicity - 1));
}

std::uint64_t ShingleCodec::encode(const Shingle& s, std::uint64_t occurrence) const {
    if (occurrence == 0 || occurrence - 1 >= (1ULL << occ_bits_)) {
        throw Error(ErrorCode::kEncodingCapacity, "occurrence " + std::to_string(occurrence) + " needs more than " +
                                                      std::to_string(occ_bits_) + " bits");
    }
    const std::uint64_t numeral_limit = ((limit_ - 1) >> occ_bits_) + 1;  // numerals must stay below this
    std::uint64_t n = 0;
    for (char c : s.str()) {
        std::uint64_t digit = 1;
        if (c != kDelimiter) {
            const auto ix = alphabet_.index_of(c);
            if (!ix) {
                throw Error(ErrorCode::kInvalidSymbol, "shingle '" + s.str() + "' has a byte outside the alphabet");
            }
            digit = *ix + 2;
        }
        if (n > (numeral_limit - digit) / base_) {
            throw Error(ErrorCode::kEncodingCapacity, "shingle '" + s.str() + "' does not fit the field");
        }
        n = n * base_ + digit;
    }
    const std::uint64_t value = (n << occ_bits_) | (occurrence - 1);
    if (value >= limit_) throw Error(ErrorCode::kEncodingCapacity, "shingle '" + s.str() + "' does not fit the field");
    return value;
}

std::optional<std::pair<Shingle, std::uint64_t>> ShingleCodec::decode(std::uint64_t value) const {
    if (value >= limit_) return std::nullopt;
    const std::uint64_t occurrence = (value & ((1ULL << occ_bits_) - 1)) + 1;
    std::uint64_t n = value >> occ_bits_;
    if (n == 0) return std::nullopt;
    std::string text;
    while (n > 0) {
        std::uint64_t digit = n % base_;
        if (digit == 0) digit = base_;
        n = (n - digit) / base_;
        text += digit == 1 ? kDelimiter : alphabet_.symbol(digit - 2);
    }
    std::reverse(text.begin(), text.end());
    try {
        return std::pair{Shingle(std::move(text)), occurrence};
    } catch (const Error&) {
        return std::nullopt;
    }
}

std::vector<std::uint64_t> encode_instances(const ShingleMultiset& s, const ShingleCodec& codec) {
    std::vector<std::uint64_t> out;
    out.reserve(s.total());
    for (const auto& [sh, n] : s.entries()) {
        for (std::uint64_t i = 1; i <= n; ++i) out.push_back(codec.encode(sh, i));
    }
    return out;
}

CharPoly::CharPoly(const ShingleMultiset& s, const ShingleCodec& codec, const PrimeField& field)
    : roots_(encode_instances(s, codec)), field_(field), limit_(field.encoding_limit()) {
    if (codec.limit() > limit_) throw Error(ErrorCode::kInvalidParameter, "codec range exceeds the field's");
}

std::uint64_t CharPoly::at(std::uint64_t point) const {
    if (point < limit_ || point >= field_.modulus()) {
        throw Error(ErrorCode::kInvalidPoint, "point " + std::to_string(point) + " is outside the evaluation range");
    }
    std::uint64_t v = 1;
    for (auto e : roots_) v = field_.mul(v, field_.sub(point, e));
    return v;
}

EvalBundle char_poly_evals(const ShingleMultiset& s, const std::vector<std::uint64_t>& points,
                           const ShingleCodec& codec, const PrimeField& field) {
    const CharPoly chi(s, codec, field);
    EvalBundle out{points, {}, s.total()};
    out.values.reserve(points.size());
    for (auto z : points) out.values.push_back(chi.at(z));
    return out;
}

std::vector<std::uint64_t> fixed_points(const PrimeField& field, std::size_t count) {
    if (count > field.modulus() - field.encoding_limit()) {
        throw Error(ErrorCode::kCapacity, "the field has fewer than " + std::to_string(count) + " evaluation points");
    }
    std::vector<std::uint64_t> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = field.modulus() - 1 - i;
    return out;
}

namespace {

/**
 * Fits P/Q with deg P - deg Q = size_diff and deg P + deg Q <= bound to the
 * ratios at the first points, then checks every remaining point. The roots of P
 * are the local-only instances and those of Q the remote-only ones.
 */
std::optional<Delta> interpolate(const ShingleMultiset& local, const ShingleCodec& codec, const PrimeField& f,
                                 const std::vector<std::uint64_t>& points, const std::vector<std::uint64_t>& lv,
                                 const std::vector<std::uint64_t>& rv, std::int64_t size_diff, std::size_t bound) {
    const auto m = static_cast<std::int64_t>(bound);
    if (m < std::abs(size_diff)) return std::nullopt;
    const auto d_local = static_cast<std::size_t>((m + size_diff) / 2);
    const auto d_remote = static_cast<std::size_t>(static_cast<std::int64_t>(d_local) - size_diff);
    const std::size_t unknowns = d_local + d_remote;
    if (points.size() < unknowns) return std::nullopt;

    std::vector<std::uint64_t> ratio(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (rv[i] == 0) throw Error(ErrorCode::kPointCollision, "remote evaluation vanishes at a sample point");
        ratio[i] = f.mul(lv[i], f.inv(rv[i]));
    }

    Poly p_poly(d_local + 1, 0), q_poly(d_remote + 1, 0);
    p_poly[d_local] = 1;
    q_poly[d_remote] = 1;
    if (unknowns > 0) {
        std::vector<std::vector<std::uint64_t>> rows(unknowns, std::vector<std::uint64_t>(unknowns + 1));
        for (std::size_t i = 0; i < unknowns; ++i) {
            const std::uint64_t z = points[i], r = ratio[i];
            auto& row = rows[i];
            std::uint64_t zp = 1;
            for (std::size_t j = 0; j < std::max(d_local, d_remote) + 1; ++j) {
                if (j < d_local) row[j] = zp;
                if (j < d_remote) row[d_local + j] = f.neg(f.mul(r, zp));
                if (j == d_local) row[unknowns] = f.sub(row[unknowns], zp);
                if (j == d_remote) row[unknowns] = f.add(row[unknowns], f.mul(r, zp));
                zp = f.mul(zp, z);
            }
        }
        const auto x = solve_linear(f, std::move(rows), unknowns);
        if (!x) return std::nullopt;
        std::copy_n(x->begin(), d_local, p_poly.begin());
        std::copy_n(x->begin() + static_cast<std::ptrdiff_t>(d_local), d_remote, q_poly.begin());
    }

    const Poly g = poly::gcd(f, p_poly, q_poly);
    p_poly = poly::monic(f, poly::divmod(f, p_poly, g).first);
    q_poly = poly::monic(f, poly::divmod(f, q_poly, g).first);

    for (std::size_t i = unknowns; i < points.size(); ++i) {
        const std::uint64_t z = points[i];
        if (f.mul(poly::eval(f, p_poly, z), rv[i]) != f.mul(poly::eval(f, q_poly, z), lv[i])) return std::nullopt;
    }

    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL ^ points.size());
    const auto local_roots = poly::distinct_roots(f, p_poly, rng);
    if (!local_roots) return std::nullopt;
    const auto remote_roots = poly::distinct_roots(f, q_poly, rng);
    if (!remote_roots) return std::nullopt;

    Delta delta;
    std::map<Shingle, std::vector<std::uint64_t>> occ_local, occ_remote;
    for (auto v : *local_roots) {
        auto inst = codec.decode(v);
        if (!inst) return std::nullopt;
        occ_local[inst->first].push_back(inst->second);
    }
    for (auto v : *remote_roots) {
        auto inst = codec.decode(v);
        if (!inst) return std::nullopt;
        occ_remote[inst->first].push_back(inst->second);
    }
    // Differing instances of a shingle are always the top occurrences on the larger side.
    for (auto& [s, occ] : occ_local) {
        std::sort(occ.begin(), occ.end());
        const std::uint64_t have = local.count(s);
        if (occ_remote.count(s) || occ.back() != have || occ.front() != have - occ.size() + 1) return std::nullopt;
        delta.only_local.add(s, occ.size());
    }
    for (auto& [s, occ] : occ_remote) {
        std::sort(occ.begin(), occ.end());
        const std::uint64_t have = local.count(s);
        if (occ.front() != have + 1 || occ.back() != have + occ.size()) return std::nullopt;
        delta.only_remote.add(s, occ.size());
    }
    delta.only_local.set_base_len(local.base_len());
    delta.only_remote.set_base_len(local.base_len());
    return delta;
}

}  // namespace

Delta reconcile_fixed(const ShingleMultiset& local, const EvalBundle& local_evals, const EvalBundle& remote_evals,
                      std::size_t bound, const ShingleCodec& codec, const PrimeField& field) {
    if (local_evals.points != remote_evals.points || local_evals.values.size() != local_evals.points.size() ||
        remote_evals.values.size() != remote_evals.points.size()) {
        throw Error(ErrorCode::kProtocolError, "evaluation bundles are not over the same points");
    }
    if (local_evals.set_size != local.total()) {
        throw Error(ErrorCode::kInvalidParameter, "local bundle does not belong to the local multiset");
    }
    const auto size_diff =
        static_cast<std::int64_t>(local_evals.set_size) - static_cast<std::int64_t>(remote_evals.set_size);
    auto delta = interpolate(local, codec, field, local_evals.points, local_evals.values, remote_evals.values,
                             size_diff, bound);
    if (!delta) {
        throw Error(ErrorCode::kBoundExceeded,
                    "the multisets differ in more than " + std::to_string(bound) + " instances");
    }
    return std::move(*delta);
}

ShingleMultiset apply_delta(const ShingleMultiset& local, const Delta& delta) {
    ShingleMultiset out = local;
    for (const auto& [s, n] : delta.only_local.entries()) out.remove(s, n);
    for (const auto& [s, n] : delta.only_remote.entries()) out.add(s, n);
    return out;
}

// ---------------------------------------------------------------------------

PointStream::PointStream(const PrimeField& field, std::uint64_t seed)
    : rng_(seed), low_(field.encoding_limit()), span_(field.modulus() - field.encoding_limit()) {}

std::uint64_t PointStream::next() {
    if (seen_.size() >= span_) throw Error(ErrorCode::kCapacity, "evaluation points exhausted");
    for (;;) {
        const std::uint64_t z = low_ + rng_() % span_;
        if (seen_.insert(z).second) return z;
    }
}

RatelessEncoder::RatelessEncoder(const ShingleMultiset& s, const ShingleCodec& codec, const PrimeField& field,
                                 std::uint64_t seed)
    : chi_(s, codec, field), points_(field, seed) {}

std::pair<std::uint64_t, std::uint64_t> RatelessEncoder::next() {
    const std::uint64_t z = points_.next();
    return {z, chi_.at(z)};
}

RatelessDecoder::RatelessDecoder(const ShingleMultiset& local, const ShingleCodec& codec, const PrimeField& field,
                                 std::uint64_t seed, std::uint64_t remote_set_size, std::size_t verification_points)
    : local_(local),
      codec_(codec),
      field_(field),
      chi_(local, codec, field),
      stream_(field, seed),
      size_diff_(static_cast<std::int64_t>(local.total()) - static_cast<std::int64_t>(remote_set_size)),
      k_(verification_points) {
    if (k_ == 0) throw Error(ErrorCode::kInvalidParameter, "rateless decoding needs at least one verification point");
}

std::optional<Delta> RatelessDecoder::consume(std::uint64_t point, std::uint64_t remote_value) {
    if (result_) return result_;
    if (stream_.next() != point) throw Error(ErrorCode::kProtocolError, "evaluation point out of sequence");
    points_.push_back(point);
    local_values_.push_back(chi_.at(point));
    remote_values_.push_back(remote_value);
    if (points_.size() < k_) return std::nullopt;
    result_ = interpolate(local_, codec_, field_, points_, local_values_, remote_values_, size_diff_,
                          points_.size() - k_);
    return result_;
}

}  // namespace udstr
