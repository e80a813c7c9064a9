// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <udstr/error.hpp>

namespace udstr {

/**
 * Arithmetic modulo a prime 3 <= p < 2^62. Elements are plain integers in [0, p).
 *
 * The lower half [0, p/2) is reserved for shingle encodings and the upper half
 * [p/2, p) for evaluation points.
 */
class PrimeField {
  public:
    /// Smallest prime above 2^61.
    static constexpr std::uint64_t kDefaultModulus = 2305843009213693967ULL;

    /// Throws kInvalidParameter unless `p` is a prime in range.
    explicit PrimeField(std::uint64_t p = kDefaultModulus);

    std::uint64_t modulus() const { return p_; }
    std::uint64_t encoding_limit() const { return p_ / 2; }

    std::uint64_t add(std::uint64_t a, std::uint64_t b) const {
        const std::uint64_t s = a + b;
        return s >= p_ ? s - p_ : s;
    }
    std::uint64_t sub(std::uint64_t a, std::uint64_t b) const { return a >= b ? a - b : a + p_ - b; }
    std::uint64_t neg(std::uint64_t a) const { return a == 0 ? 0 : p_ - a; }
    std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
        // Quotient estimate in extended precision; exact for p < 2^62.
        const auto q = static_cast<std::uint64_t>(inv_ * a * b);
        auto r = static_cast<std::int64_t>(a * b - q * p_);
        if (r < 0) r += static_cast<std::int64_t>(p_);
        if (r >= static_cast<std::int64_t>(p_)) r -= static_cast<std::int64_t>(p_);
        return static_cast<std::uint64_t>(r);
    }
    std::uint64_t pow(std::uint64_t a, std::uint64_t e) const;
    /// Throws kInvalidParameter for 0.
    std::uint64_t inv(std::uint64_t a) const;

    friend bool operator==(const PrimeField& a, const PrimeField& b) { return a.p_ == b.p_; }

  private:
    std::uint64_t p_;
    long double inv_;
};

bool is_prime_u64(std::uint64_t n);

/// Dense polynomial, coefficients from degree 0 up, no trailing zeros. The zero
/// polynomial is empty.
using Poly = std::vector<std::uint64_t>;

namespace poly {

void trim(Poly& a);
/// -1 for the zero polynomial.
long degree(const Poly& a);
std::uint64_t eval(const PrimeField& f, const Poly& a, std::uint64_t x);
Poly sub(const PrimeField& f, const Poly& a, const Poly& b);
Poly mul(const PrimeField& f, const Poly& a, const Poly& b);
/// Remainder of a modulo a nonzero b.
Poly mod(const PrimeField& f, Poly a, const Poly& b);
/// Quotient and remainder; b nonzero.
std::pair<Poly, Poly> divmod(const PrimeField& f, Poly a, const Poly& b);
Poly monic(const PrimeField& f, Poly a);
/// Monic gcd; the gcd of two zero polynomials is zero.
Poly gcd(const PrimeField& f, Poly a, Poly b);
/// base^e mod m.
Poly powmod(const PrimeField& f, Poly base, std::uint64_t e, const Poly& m);

/**
 * All roots of a monic `a` when it splits into distinct linear factors over the
 * field, nullopt otherwise. Equal-degree splitting with random shifts; an
 * exhaustive scan when p < 2^20.
 */
std::optional<std::vector<std::uint64_t>> distinct_roots(const PrimeField& f, const Poly& a, std::mt19937_64& rng);

}  // namespace poly

/**
 * Solves A x = b over the field by Gaussian elimination and back substitution. `rows` holds the
 * augmented matrix, one row of n+1 entries per equation. Free variables are set
 * to zero; nullopt when the system is inconsistent.
 */
std::optional<std::vector<std::uint64_t>> solve_linear(const PrimeField& f, std::vector<std::vector<std::uint64_t>> rows,
                                                        std::size_t n);

}  // namespace udstr
