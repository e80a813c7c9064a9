// SPDX-License-Identifier: Apache-2.0

#include <udstr/field.hpp>

#include <algorithm>
#include <string>

namespace udstr {

namespace {

__extension__ typedef unsigned __int128 u128;

std::uint64_t mulmod128(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

std::uint64_t powmod128(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod128(r, a, m);
        a = mulmod128(a, a, m);
        e >>= 1;
    }
    return r;
}

}  // namespace

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t small : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n % small == 0) return n == small;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    // These bases are deterministic for all 64-bit n.
    for (std::uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        std::uint64_t x = powmod128(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod128(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

PrimeField::PrimeField(std::uint64_t p) : p_(p), inv_(1.0L / static_cast<long double>(p)) {
    if (p < 3 || p >= (1ULL << 62) || !is_prime_u64(p)) {
        throw Error(ErrorCode::kInvalidParameter, "modulus " + std::to_string(p) + " is not an odd prime below 2^62");
    }
}

std::uint64_t PrimeField::pow(std::uint64_t a, std::uint64_t e) const {
    std::uint64_t r = 1;
    while (e) {
        if (e & 1) r = mul(r, a);
        a = mul(a, a);
        e >>= 1;
    }
    return r;
}

std::uint64_t PrimeField::inv(std::uint64_t a) const {
    if (a % p_ == 0) throw Error(ErrorCode::kInvalidParameter, "zero has no inverse");
    return pow(a, p_ - 2);
}

// ---------------------------------------------------------------------------

namespace poly {

void trim(Poly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

long degree(const Poly& a) { return static_cast<long>(a.size()) - 1; }

std::uint64_t eval(const PrimeField& f, const Poly& a, std::uint64_t x) {
    std::uint64_t r = 0;
    for (auto it = a.rbegin(); it != a.rend(); ++it) r = f.add(f.mul(r, x), *it);
    return r;
}

Poly sub(const PrimeField& f, const Poly& a, const Poly& b) {
    Poly r(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) r[i] = f.sub(r[i], b[i]);
    trim(r);
    return r;
}

Poly mul(const PrimeField& f, const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) r[i + j] = f.add(r[i + j], f.mul(a[i], b[j]));
    }
    trim(r);
    return r;
}

std::pair<Poly, Poly> divmod(const PrimeField& f, Poly a, const Poly& b) {
    if (b.empty()) throw Error(ErrorCode::kInvalidParameter, "division by the zero polynomial");
    trim(a);
    if (a.size() < b.size()) return {Poly{}, std::move(a)};
    const std::uint64_t lead_inv = f.inv(b.back());
    Poly q(a.size() - b.size() + 1, 0);
    for (std::size_t i = a.size(); i-- >= b.size();) {
        const std::uint64_t c = f.mul(a[i], lead_inv);
        const std::size_t shift = i + 1 - b.size();
        q[shift] = c;
        if (c == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) a[shift + j] = f.sub(a[shift + j], f.mul(c, b[j]));
    }
    a.resize(b.size() - 1);
    trim(a);
    trim(q);
    return {std::move(q), std::move(a)};
}

Poly mod(const PrimeField& f, Poly a, const Poly& b) { return divmod(f, std::move(a), b).second; }

Poly monic(const PrimeField& f, Poly a) {
    trim(a);
    if (a.empty() || a.back() == 1) return a;
    const std::uint64_t li = f.inv(a.back());
    for (auto& c : a) c = f.mul(c, li);
    return a;
}

Poly gcd(const PrimeField& f, Poly a, Poly b) {
    trim(a);
    trim(b);
    while (!b.empty()) {
        Poly r = mod(f, std::move(a), b);
        a = std::move(b);
        b = std::move(r);
    }
    return monic(f, std::move(a));
}

Poly powmod(const PrimeField& f, Poly base, std::uint64_t e, const Poly& m) {
    Poly result = mod(f, Poly{1}, m);
    base = mod(f, std::move(base), m);
    while (e) {
        if (e & 1) result = mod(f, mul(f, result, base), m);
        e >>= 1;
        if (e) base = mod(f, mul(f, base, base), m);
    }
    return result;
}

namespace {

void split(const PrimeField& f, const Poly& a, std::mt19937_64& rng, std::vector<std::uint64_t>& roots) {
    const long d = degree(a);
    if (d <= 0) return;
    if (d == 1) {
        roots.push_back(f.neg(a[0]));  // a is monic
        return;
    }
    const std::uint64_t half = (f.modulus() - 1) / 2;
    for (;;) {
        const std::uint64_t shift = rng() % f.modulus();
        Poly t = powmod(f, Poly{shift, 1}, half, a);
        t = sub(f, t, Poly{1});
        Poly g = gcd(f, a, t);
        const long dg = degree(g);
        if (dg > 0 && dg < d) {
            Poly rest = monic(f, divmod(f, a, g).first);
            split(f, g, rng, roots);
            split(f, rest, rng, roots);
            return;
        }
    }
}

}  // namespace

std::optional<std::vector<std::uint64_t>> distinct_roots(const PrimeField& f, const Poly& a_in, std::mt19937_64& rng) {
    Poly a = monic(f, a_in);
    if (a.empty()) throw Error(ErrorCode::kInvalidParameter, "roots of the zero polynomial");
    const long d = degree(a);
    std::vector<std::uint64_t> roots;
    if (d == 0) return roots;

    if (f.modulus() < (1ULL << 20)) {
        for (std::uint64_t x = 0; x < f.modulus(); ++x) {
            if (eval(f, a, x) == 0) roots.push_back(x);
        }
        if (static_cast<long>(roots.size()) != d) return std::nullopt;
        return roots;
    }

    // a splits into distinct linear factors iff a divides x^p - x.
    const Poly xp = powmod(f, Poly{0, 1}, f.modulus(), a);
    if (degree(gcd(f, a, sub(f, xp, Poly{0, 1}))) != d) return std::nullopt;
    split(f, a, rng, roots);
    std::sort(roots.begin(), roots.end());
    return roots;
}

}  // namespace poly

std::optional<std::vector<std::uint64_t>> solve_linear(const PrimeField& f, std::vector<std::vector<std::uint64_t>> rows,
                                                        std::size_t n) {
    std::vector<std::size_t> pivot_col;
    std::size_t r = 0;
    for (std::size_t c = 0; c < n && r < rows.size(); ++c) {
        std::size_t sel = r;
        while (sel < rows.size() && rows[sel][c] == 0) ++sel;
        if (sel == rows.size()) continue;
        std::swap(rows[r], rows[sel]);
        const std::uint64_t pi = f.inv(rows[r][c]);
        for (std::size_t j = c; j <= n; ++j) rows[r][j] = f.mul(rows[r][j], pi);
        for (std::size_t i = r + 1; i < rows.size(); ++i) {
            if (rows[i][c] == 0) continue;
            const std::uint64_t factor = rows[i][c];
            auto& dst = rows[i];
            const auto& src = rows[r];
            for (std::size_t j = c; j <= n; ++j) dst[j] = f.sub(dst[j], f.mul(factor, src[j]));
        }
        pivot_col.push_back(c);
        ++r;
    }
    for (std::size_t i = r; i < rows.size(); ++i) {
        if (rows[i][n] != 0) return std::nullopt;
    }
    std::vector<std::uint64_t> x(n, 0);
    for (std::size_t i = r; i-- > 0;) {
        std::uint64_t v = rows[i][n];
        for (std::size_t j = pivot_col[i] + 1; j < n; ++j) {
            if (x[j] != 0) v = f.sub(v, f.mul(rows[i][j], x[j]));
        }
        x[pivot_col[i]] = v;
    }
    return x;
}

}  // namespace udstr
