#pragma once

// Exact integer number theory used throughout the descent: primality,
// valuations, residue symbols and square classes of Q*.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace isodescent {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using i128 = __int128;
using u128 = unsigned __int128;

namespace detail {

inline std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<u128>(a) * b % m);
}

inline std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
    if (m == 1) return 0;
    std::uint64_t result = 1;
    base %= m;
    while (exp > 0) {
        if (exp & 1U) result = mul_mod(result, base, m);
        base = mul_mod(base, base, m);
        exp >>= 1U;
    }
    return result;
}

// Reduce a signed value into [0, m).
inline std::uint64_t reduce(const Int& a, std::uint64_t m) {
    Int r = a % m;
    if (r < 0) r += m;
    return static_cast<std::uint64_t>(r);
}

inline std::uint64_t reduce(i128 a, std::uint64_t m) {
    i128 r = a % static_cast<i128>(m);
    if (r < 0) r += m;
    return static_cast<std::uint64_t>(r);
}

inline bool fits_i128(const Int& v) {
    static const Int lim = (Int(1) << 126);
    return v < lim && v > -lim;
}

inline i128 to_i128(const Int& v) {
    if (!fits_i128(v)) throw std::out_of_range("value exceeds 126-bit fast path");
    const bool neg = v < 0;
    Int mag = neg ? Int(-v) : v;
    const std::uint64_t lo = static_cast<std::uint64_t>(mag & std::numeric_limits<std::uint64_t>::max());
    const std::uint64_t hi = static_cast<std::uint64_t>(mag >> 64);
    i128 r = static_cast<i128>((static_cast<u128>(hi) << 64) | lo);
    return neg ? -r : r;
}

inline Int from_i128(i128 v) {
    const bool neg = v < 0;
    u128 mag = neg ? static_cast<u128>(-(v + 1)) + 1 : static_cast<u128>(v);
    Int r = Int(static_cast<std::uint64_t>(mag >> 64));
    r <<= 64;
    r += static_cast<std::uint64_t>(mag);
    return neg ? Int(-r) : r;
}

inline std::uint64_t to_u64(const Int& v, const char* what) {
    if (v < 0 || v > std::numeric_limits<std::uint64_t>::max())
        throw std::out_of_range(std::string(what) + ": value outside the 64-bit range");
    return static_cast<std::uint64_t>(v);
}

// Deterministic Miller-Rabin; this witness set is exact below 3.3e24.
inline bool miller_rabin(std::uint64_t n) {
    static constexpr std::uint64_t witnesses[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (std::uint64_t q : witnesses) {
        if (n % q == 0) return n == q;
    }
    const std::uint64_t nm1 = n - 1;
    const int s = std::countr_zero(nm1);
    const std::uint64_t d = nm1 >> s;
    for (std::uint64_t a : witnesses) {
        std::uint64_t x = pow_mod(a, d, n);
        if (x == 1 || x == nm1) continue;
        bool composite = true;
        for (int r = 1; r < s; ++r) {
            x = mul_mod(x, x, n);
            if (x == nm1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

inline std::uint64_t pollard_brent(std::uint64_t n) {
    if (n % 2 == 0) return 2;
    for (std::uint64_t c = 1;; ++c) {
        std::uint64_t y = 2, x = 2, g = 1, q = 1, ys = 2;
        const std::uint64_t m = 128;
        std::uint64_t r = 1;
        auto f = [&](std::uint64_t v) { return (mul_mod(v, v, n) + c) % n; };
        do {
            x = y;
            for (std::uint64_t i = 0; i < r; ++i) y = f(y);
            std::uint64_t k = 0;
            do {
                ys = y;
                for (std::uint64_t i = 0; i < std::min(m, r - k); ++i) {
                    y = f(y);
                    q = mul_mod(q, x > y ? x - y : y - x, n);
                }
                g = std::gcd(q, n);
                k += m;
            } while (k < r && g == 1);
            r *= 2;
        } while (g == 1);
        if (g == n) {
            do {
                ys = f(ys);
                g = std::gcd(x > ys ? x - ys : ys - x, n);
            } while (g == 1);
        }
        if (g != n) return g;
    }
}

inline void factor_u64(std::uint64_t n, std::map<Int, int>& out) {
    if (n == 1) return;
    if (miller_rabin(n)) {
        out[Int(n)] += 1;
        return;
    }
    const std::uint64_t d = pollard_brent(n);
    factor_u64(d, out);
    factor_u64(n / d, out);
}

}  // namespace detail

/// Deterministic primality for n in [1, 2^64).
inline bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    return detail::miller_rabin(n);
}

inline bool is_prime(const Int& n) {
    if (n < 1) throw std::out_of_range("is_prime: n must be positive");
    return is_prime(detail::to_u64(n, "is_prime"));
}

/// Exponent of the prime l in n. Throws std::domain_error for n == 0.
inline int valuation(const Int& n, std::uint64_t l) {
    if (n == 0) throw std::domain_error("valuation: undefined for zero");
    if (l < 2) throw std::domain_error("valuation: l must be prime");
    int e = 0;
    Int m = n;
    while (m % l == 0) {
        m /= l;
        ++e;
    }
    return e;
}

inline int valuation(i128 n, std::uint64_t l) {
    if (n == 0) throw std::domain_error("valuation: undefined for zero");
    int e = 0;
    const i128 ll = static_cast<i128>(l);
    while (n % ll == 0) {
        n /= ll;
        ++e;
    }
    return e;
}

/// Prime factorization of |n| for n != 0. Trial division to 10^6, then
/// Pollard-Brent on 64-bit cofactors; larger cofactors must be perfect
/// powers of something that fits.
inline std::map<Int, int> factorize(const Int& n) {
    if (n == 0) throw std::domain_error("factorize: zero has no factorization");
    std::map<Int, int> out;
    Int m = boost::multiprecision::abs(n);
    for (std::uint64_t q : {2ULL, 3ULL, 5ULL}) {
        while (m % q == 0) {
            m /= q;
            out[Int(q)] += 1;
        }
    }
    // 2,3,5 wheel over the remaining candidates; cofactors that fit in 64
    // bits go straight to Pollard-Brent.
    static constexpr std::uint64_t gaps[] = {4, 2, 4, 2, 4, 6, 2, 6};
    std::uint64_t q = 7;
    for (std::size_t i = 0; q <= 1'000'000 && m > std::numeric_limits<std::uint64_t>::max(); q += gaps[i++ % 8]) {
        while (m % q == 0) {
            m /= q;
            out[Int(q)] += 1;
        }
    }
    if (m == 1) return out;
    if (m <= std::numeric_limits<std::uint64_t>::max()) {
        detail::factor_u64(static_cast<std::uint64_t>(m), out);
        return out;
    }
    for (unsigned k = 2; k < 8; ++k) {
        // Integer k-th root by bisection.
        Int lo = 1, hi = Int(1) << (boost::multiprecision::msb(m) / k + 2);
        while (lo < hi) {
            Int mid = (lo + hi + 1) / 2;
            if (boost::multiprecision::pow(mid, k) <= m)
                lo = mid;
            else
                hi = mid - 1;
        }
        if (boost::multiprecision::pow(lo, k) == m && lo > 1) {
            for (auto& [prime, e] : factorize(lo)) out[prime] += e * static_cast<int>(k);
            return out;
        }
    }
    throw std::out_of_range("factorize: cofactor " + m.str() + " is too large to factor");
}

/// Distinct primes dividing n, ascending.
inline std::vector<Int> prime_support(const Int& n) {
    std::vector<Int> primes;
    for (const auto& [prime, e] : factorize(n)) primes.push_back(prime);
    return primes;
}

/// Canonical signed squarefree representative of n modulo squares.
inline Int squarefree_class(const Int& n) {
    if (n == 0) throw std::domain_error("squarefree_class: zero is not a square class");
    Int r = n < 0 ? Int(-1) : Int(1);
    for (const auto& [prime, e] : factorize(n))
        if (e % 2 == 1) r *= prime;
    return r;
}

/// Class of u*v for squarefree u, v, without factoring.
inline Int square_class_product(const Int& u, const Int& v) {
    const Int g = boost::multiprecision::gcd(u, v);
    return (u / g) * (v / g);
}

/// Jacobi symbol (a/n) for odd n >= 1.
inline int jacobi(const Int& a, const Int& n) {
    if (n < 1 || n % 2 == 0) throw std::domain_error("jacobi: modulus must be odd and positive");
    Int x = a % n;
    if (x < 0) x += n;
    Int m = n;
    int t = 1;
    while (x != 0) {
        while (x % 2 == 0) {
            x /= 2;
            const int r = static_cast<int>(m % 8);
            if (r == 3 || r == 5) t = -t;
        }
        std::swap(x, m);
        if (x % 4 == 3 && m % 4 == 3) t = -t;
        x %= m;
    }
    return m == 1 ? t : 0;
}

/// Legendre symbol for an odd prime l on a machine-size residue.
inline int legendre_small(std::uint64_t a, std::uint64_t l) {
    a %= l;
    if (a == 0) return 0;
    return detail::pow_mod(a, (l - 1) / 2, l) == 1 ? 1 : -1;
}

/// base^exp mod m in [0, m); negative bases are reduced first.
inline Int mod_pow(const Int& base, const Int& exp, const Int& m) {
    if (m < 1) throw std::domain_error("mod_pow: modulus must be positive");
    if (exp < 0) throw std::domain_error("mod_pow: exponent must be nonnegative");
    if (m == 1) return 0;
    Int b = base % m;
    if (b < 0) b += m;
    return boost::multiprecision::powm(b, exp, m);
}

/// Rational quartic residue symbol a^((p-1)/4) mod p as +1/-1. Defined only
/// for p = 1 mod 4 and a a nonzero quadratic residue mod p.
inline int quartic_symbol(const Int& a, std::uint64_t p) {
    if (!is_prime(p)) throw std::domain_error("quartic_symbol: modulus must be prime");
    if (p % 4 != 1) throw std::domain_error("quartic_symbol: requires p = 1 mod 4");
    const std::uint64_t r = detail::reduce(a, p);
    if (r == 0) throw std::domain_error("quartic_symbol: p divides a");
    if (legendre_small(r, p) != 1) throw std::domain_error("quartic_symbol: a is not a quadratic residue");
    const std::uint64_t v = detail::pow_mod(r, (p - 1) / 4, p);
    return v == 1 ? 1 : -1;
}

/// All primes <= n, ascending (sieve of Eratosthenes over odd numbers).
inline std::vector<std::uint64_t> primes_up_to(std::uint64_t n) {
    std::vector<std::uint64_t> primes;
    if (n < 2) return primes;
    primes.push_back(2);
    const std::uint64_t half = (n - 1) / 2;  // index i <-> 2i+1
    std::vector<bool> composite(half + 1, false);
    for (std::uint64_t i = 1; i <= half; ++i) {
        if (composite[i]) continue;
        const std::uint64_t q = 2 * i + 1;
        primes.push_back(q);
        for (std::uint64_t j = (q * q) / 2; j <= half; j += q) composite[j] = true;
    }
    return primes;
}

/// Floor square root and exactness test for nonnegative 128-bit values.
inline bool is_square_i128(i128 n, i128* root = nullptr) {
    if (n < 0) return false;
    // Quadratic residue filters mod 64, 63, 65 and 11.
    static const auto tables = [] {
        struct T {
            bool m64[64]{}, m63[63]{}, m65[65]{}, m11[11]{};
        } t;
        for (int i = 0; i < 64; ++i) t.m64[(i * i) % 64] = true;
        for (int i = 0; i < 63; ++i) t.m63[(i * i) % 63] = true;
        for (int i = 0; i < 65; ++i) t.m65[(i * i) % 65] = true;
        for (int i = 0; i < 11; ++i) t.m11[(i * i) % 11] = true;
        return t;
    }();
    const u128 u = static_cast<u128>(n);
    if (!tables.m64[static_cast<unsigned>(u & 63U)]) return false;
    const auto r45045 = static_cast<unsigned>(u % 45045U);  // 63*65*11
    if (!tables.m63[r45045 % 63] || !tables.m65[r45045 % 65] || !tables.m11[r45045 % 11]) return false;
    u128 s = static_cast<u128>(std::sqrt(static_cast<long double>(u)));
    while (s * s > u) --s;
    while ((s + 1) * (s + 1) <= u) ++s;
    if (s * s != u) return false;
    if (root) *root = static_cast<i128>(s);
    return true;
}

inline bool is_square(const Int& n, Int* root = nullptr) {
    if (n < 0) return false;
    if (detail::fits_i128(n)) {
        i128 r = 0;
        if (!is_square_i128(detail::to_i128(n), &r)) return false;
        if (root) *root = detail::from_i128(r);
        return true;
    }
    Int s = boost::multiprecision::sqrt(n);
    if (s * s != n) return false;
    if (root) *root = s;
    return true;
}

}  // namespace isodescent
