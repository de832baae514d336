#include <gtest/gtest.h>

#include <random>
#include <set>

#include "isodescent/arith.hpp"

using namespace isodescent;

namespace {

// Trial-division reference, independent of Miller-Rabin.
bool prime_by_trial(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

// Euler's criterion evaluated naively; reference for the Jacobi symbol at primes.
int legendre_by_squares(std::int64_t a, std::int64_t p) {
    const std::int64_t r = ((a % p) + p) % p;
    if (r == 0) return 0;
    for (std::int64_t x = 1; x < p; ++x)
        if ((x * x) % p == r) return 1;
    return -1;
}

bool is_fourth_power_mod(std::int64_t a, std::int64_t p) {
    const std::int64_t r = ((a % p) + p) % p;
    for (std::int64_t x = 1; x < p; ++x) {
        const std::int64_t x2 = (x * x) % p;
        if ((x2 * x2) % p == r) return true;
    }
    return false;
}

}  // namespace

TEST(Arith, IsPrimeExamples) {
    EXPECT_TRUE(is_prime(std::uint64_t{2}));
    EXPECT_TRUE(is_prime(std::uint64_t{19249}));
    EXPECT_FALSE(is_prime(std::uint64_t{3651}));
    EXPECT_FALSE(is_prime(std::uint64_t{1}));
    EXPECT_TRUE(is_prime(std::uint64_t{18446744073709551557ULL}));  // largest 64-bit prime
    EXPECT_FALSE(is_prime(std::uint64_t{3215031751ULL}));           // strong pseudoprime to 2,3,5,7
}

TEST(Arith, IsPrimeAgreesWithTrialDivision) {
    for (std::uint64_t n = 1; n < 20000; ++n) ASSERT_EQ(is_prime(n), prime_by_trial(n)) << n;
}

TEST(Arith, IsPrimeRangeErrors) {
    EXPECT_THROW(is_prime(Int(0)), std::out_of_range);
    EXPECT_THROW(is_prime(Int(-7)), std::out_of_range);
    EXPECT_THROW(is_prime(Int(1) << 64), std::out_of_range);
    EXPECT_TRUE(is_prime(Int(1217)));
}

TEST(Arith, Valuation) {
    EXPECT_EQ(valuation(Int(72), 2), 3);
    EXPECT_EQ(valuation(Int(72), 3), 2);
    EXPECT_EQ(valuation(Int(18) * 121, 11), 2);
    EXPECT_EQ(valuation(Int(18) * 121 * 121, 11), 4);  // 121^2 = 11^4
    EXPECT_EQ(valuation(Int(-250), 5), 3);
    EXPECT_THROW(valuation(Int(0), 2), std::domain_error);
}

TEST(Arith, SquarefreeClass) {
    EXPECT_EQ(squarefree_class(Int(18)), 2);
    EXPECT_EQ(squarefree_class(Int(-72)), -2);
    EXPECT_EQ(squarefree_class(Int(19249) * 19249 * 6), 6);
    EXPECT_EQ(squarefree_class(Int(1)), 1);
    EXPECT_THROW(squarefree_class(Int(0)), std::domain_error);
}

TEST(Arith, SquarefreeClassIsCanonicalAndMultiplicative) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::int64_t> dist(-5000, 5000);
    for (int i = 0; i < 2000; ++i) {
        std::int64_t u = dist(rng), v = dist(rng), k = dist(rng);
        if (u == 0 || v == 0 || k == 0) continue;
        const Int su = squarefree_class(Int(u));
        EXPECT_EQ(squarefree_class(su), su);
        EXPECT_EQ(squarefree_class(Int(u) * k * k), su);
        const Int sv = squarefree_class(Int(v));
        EXPECT_EQ(squarefree_class(Int(u) * v), squarefree_class(su * sv));
        EXPECT_EQ(square_class_product(su, sv), squarefree_class(su * sv));
    }
}

TEST(Arith, FactorizeLargeValues) {
    const Int p = 4294967311ULL;  // prime above 2^32
    auto f = factorize(Int(-72) * p * p);
    EXPECT_EQ(f.size(), 3u);
    EXPECT_EQ(f[Int(2)], 3);
    EXPECT_EQ(f[Int(3)], 2);
    EXPECT_EQ(f[p], 2);
    auto g = factorize(Int(1000003) * 998244353ULL);
    EXPECT_EQ(g.size(), 2u);
}

TEST(Arith, JacobiExamples) {
    EXPECT_EQ(jacobi(Int(3), Int(7)), -1);
    EXPECT_EQ(jacobi(Int(6), Int(5)), 1);
    for (std::uint64_t p : primes_up_to(200))
        if (p > 2) {
            EXPECT_EQ(jacobi(Int(1), Int(p)), 1);
        }
    EXPECT_EQ(jacobi(Int(6), Int(9)), 0);
    EXPECT_THROW(jacobi(Int(3), Int(8)), std::domain_error);
    EXPECT_THROW(jacobi(Int(3), Int(-3)), std::domain_error);
}

TEST(Arith, JacobiMatchesLegendreAtPrimes) {
    for (std::uint64_t p : primes_up_to(300)) {
        if (p == 2) continue;
        for (std::int64_t a = -40; a <= 40; ++a)
            ASSERT_EQ(jacobi(Int(a), Int(p)), legendre_by_squares(a, static_cast<std::int64_t>(p))) << a << " " << p;
    }
}

TEST(Arith, JacobiMultiplicative) {
    for (int n = 1; n < 120; n += 2)
        for (int a = -30; a <= 30; ++a)
            for (int b = -30; b <= 30; b += 7)
                ASSERT_EQ(jacobi(Int(a * b), Int(n)), jacobi(Int(a), Int(n)) * jacobi(Int(b), Int(n)));
}

TEST(Arith, QuarticSymbolExamples) {
    EXPECT_EQ(quartic_symbol(Int(2), 17), -1);
    EXPECT_EQ(quartic_symbol(Int(2), 73), 1);
    for (std::uint64_t p : primes_up_to(500))
        if (p % 4 == 1) {
            EXPECT_EQ(quartic_symbol(Int(1), p), 1);
        }
}

TEST(Arith, QuarticSymbolDomainErrors) {
    EXPECT_THROW(quartic_symbol(Int(3), 17), std::domain_error);   // non-residue
    EXPECT_THROW(quartic_symbol(Int(34), 17), std::domain_error);  // p | a
    EXPECT_THROW(quartic_symbol(Int(2), 7), std::domain_error);    // p = 3 mod 4
    EXPECT_THROW(quartic_symbol(Int(2), 21), std::domain_error);   // composite
}

TEST(Arith, QuarticSymbolSquareConsistency) {
    for (std::uint64_t p : primes_up_to(2000)) {
        if (p % 4 != 1) continue;
        for (std::int64_t a = 1; a < 60; ++a) {
            if (a % static_cast<std::int64_t>(p) == 0) continue;
            // (a^2/p)_4 = (a/p)
            ASSERT_EQ(quartic_symbol(Int(a * a), p), jacobi(Int(a), Int(p)));
            if (jacobi(Int(a), Int(p)) == 1) {
                const int s = quartic_symbol(Int(a), p);
                ASSERT_EQ(s * s, 1);
                ASSERT_EQ(s == 1, is_fourth_power_mod(a, static_cast<std::int64_t>(p)));
            }
        }
    }
}

TEST(Arith, QuarticTwoMatchesExhaustiveSearchSmall) {
    for (std::uint64_t p : primes_up_to(1000))
        if (p % 8 == 1) {
            EXPECT_EQ(quartic_symbol(Int(2), p) == 1, is_fourth_power_mod(2, static_cast<std::int64_t>(p))) << p;
        }
}

TEST(Arith, ModPow) {
    EXPECT_EQ(mod_pow(Int(2), Int(4), Int(17)), 16);
    const Int r = mod_pow(Int(2), Int(304), Int(1217));
    EXPECT_TRUE(r == 1 || r == 1216);
    for (int x = -5; x <= 5; ++x) EXPECT_EQ(mod_pow(Int(x), Int(0), Int(13)), 1);
    EXPECT_EQ(mod_pow(Int(-2), Int(3), Int(7)), 6);
    EXPECT_EQ(mod_pow(Int(5), Int(3), Int(1)), 0);
    EXPECT_THROW(mod_pow(Int(2), Int(3), Int(0)), std::domain_error);
}

TEST(Arith, PrimesUpTo) {
    EXPECT_EQ(primes_up_to(10), (std::vector<std::uint64_t>{2, 3, 5, 7}));
    EXPECT_EQ(primes_up_to(30).back(), 29u);
    const auto ps = primes_up_to(2000);
    EXPECT_TRUE(std::binary_search(ps.begin(), ps.end(), 1217u));
    EXPECT_TRUE(std::binary_search(ps.begin(), ps.end(), 1601u));
    EXPECT_EQ(ps.size(), 303u);
    for (std::uint64_t p : ps) ASSERT_TRUE(prime_by_trial(p));
}

TEST(Arith, IsSquare) {
    for (std::int64_t n = 0; n < 5000; ++n) {
        const auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
        const bool sq = r * r == n;
        i128 root = -1;
        ASSERT_EQ(is_square_i128(n, &root), sq) << n;
        if (sq) {
            ASSERT_EQ(static_cast<std::int64_t>(root), r);
        }
    }
    const i128 big = static_cast<i128>(3037000493LL) * 3037000493LL * 1000003 * 1000003;
    EXPECT_TRUE(is_square_i128(big));
    EXPECT_FALSE(is_square_i128(big + 1));
    EXPECT_FALSE(is_square_i128(-4));
    Int root;
    EXPECT_TRUE(is_square(Int(1) << 200, &root));
    EXPECT_EQ(root, Int(1) << 100);
}
