#include <gtest/gtest.h>

#include "isodescent/family.hpp"

using namespace isodescent;

namespace {

std::vector<Int> ints(std::initializer_list<std::int64_t> xs) {
    std::vector<Int> v;
    for (auto x : xs) v.push_back(Int(x));
    std::sort(v.begin(), v.end());
    return v;
}

// Plain double loop over both variables.
std::optional<std::pair<std::int64_t, std::int64_t>> repr_by_double_loop(std::int64_t n, std::int64_t k) {
    for (std::int64_t a = 1; a * a * a * a < n; ++a)
        for (std::int64_t b = 1; a * a * a * a + k * b * b * b * b <= n; ++b)
            if (a * a * a * a + k * b * b * b * b == n) return std::make_pair(a, b);
    return std::nullopt;
}

}  // namespace

TEST(Family, CurveForPrime) {
    EXPECT_EQ(curve_for_prime(7), CurveModel(Int(0), Int(882)));
    EXPECT_EQ(curve_for_prime(2), CurveModel(Int(0), Int(72)));
    EXPECT_EQ(curve_for_prime(19249).b(), 18 * Int(19249) * 19249);
    EXPECT_THROW(curve_for_prime(15), std::domain_error);
}

TEST(Family, TransformPointRoundTrips) {
    const std::uint64_t p = 5;
    EXPECT_EQ(transform_point(p, ModelDirection::to_reduced, CurvePoint::at_infinity()), CurvePoint::at_infinity());
    const CurvePoint t = CurvePoint::affine(Rational(0), Rational(0));
    EXPECT_EQ(transform_point(p, ModelDirection::to_reduced, t), t);
    const CurvePoint q = CurvePoint::affine(Rational(6), Rational(54));  // 3 does divide x here
    const CurvePoint back = transform_point(p, ModelDirection::to_original, q);
    EXPECT_TRUE(on_original_model(p, back));
    EXPECT_EQ(transform_point(p, ModelDirection::to_reduced, back), q);
    // A point with 3 not dividing x, from the b1 = 19249 witness.
    const CurveModel e = curve_for_prime(19249);
    const CurvePoint r = homspace_to_curve(e, {Int(19249), Rational(Int(4), Int(11)), Rational(Int(19249), Int(121))});
    const CurvePoint r0 = transform_point(19249, ModelDirection::to_original, r);
    EXPECT_TRUE(on_original_model(19249, r0));
    EXPECT_EQ(transform_point(19249, ModelDirection::to_reduced, r0), r);
    EXPECT_THROW(transform_point(p, ModelDirection::to_reduced, q), std::domain_error);
    EXPECT_THROW(transform_point(p, ModelDirection::to_original, CurvePoint::affine(Rational(1), Rational(1))),
                 std::domain_error);
}

TEST(Family, Classify) {
    const PrimeClass a = classify(1217);
    EXPECT_EQ(a.residue_mod_24, 17);
    ASSERT_TRUE(a.quartic2);
    EXPECT_EQ(*a.quartic2, 1);
    EXPECT_EQ(mod_pow(Int(2), Int(304), Int(1217)), 1);
    const PrimeClass b = classify(17);
    ASSERT_TRUE(b.quartic2);
    EXPECT_EQ(*b.quartic2, -1);
    EXPECT_FALSE(classify(11).quartic2);
    EXPECT_FALSE(classify(2).quartic2);
    EXPECT_THROW(classify(21), std::domain_error);
    for (std::uint64_t p : primes_up_to(3000)) EXPECT_EQ(classify(p).quartic2.has_value(), p % 8 == 1) << p;
}

TEST(Family, ClosedFormTables) {
    EXPECT_EQ(closed_form_selmer_psibar(11).classes, ints({1, 2, 3, 6, 11, 22, 33, 66}));
    EXPECT_EQ(closed_form_selmer_psibar(41).classes, ints({1, 2, 41, 82}));
    EXPECT_EQ(mod_pow(Int(2), Int(10), Int(41)), 40);
    EXPECT_EQ(closed_form_selmer_psibar(3).classes, ints({1, 2}));
    EXPECT_EQ(closed_form_selmer_psibar(2).classes, ints({1, 2}));
    EXPECT_EQ(closed_form_selmer_psibar(1217).classes, ints({1, 2, 3651, 7302}));
    EXPECT_EQ(closed_form_selmer_psi(23).classes, ints({1, -2, -23, 46}));
    EXPECT_EQ(closed_form_selmer_psi(73).classes, ints({1, -2, 73, -146}));
    EXPECT_EQ(mod_pow(Int(2), Int(9), Int(73)), 1);
    EXPECT_EQ(closed_form_selmer_psi(7).classes, ints({1, -2}));
    EXPECT_EQ(closed_form_selmer_psi(7).which, Isogeny::psi);
}

TEST(Family, ClosedFormsMatchEngineSmallPrimes) {
    for (std::uint64_t p : primes_up_to(400)) {
        const CurveModel e = curve_for_prime(p);
        EXPECT_EQ(closed_form_selmer_psibar(p).classes, selmer(e, Isogeny::psibar).classes) << p;
        EXPECT_EQ(closed_form_selmer_psi(p).classes, selmer(e, Isogeny::psi).classes) << p;
    }
}

TEST(Family, DimensionTablesMatchClosedForms) {
    for (std::uint64_t p : primes_up_to(2000)) {
        const PrimeClass c = classify(p);
        EXPECT_EQ(closed_form_selmer_psibar(p).dim(), expected_dim_psibar(c)) << p;
        EXPECT_EQ(closed_form_selmer_psi(p).dim(), expected_dim_psi(c)) << p;
        EXPECT_GE(expected_dim_psibar(c), 1);
        EXPECT_LE(expected_dim_psibar(c), 3);
        EXPECT_LE(expected_dim_psi(c), 2);
    }
}

TEST(Family, TheoremBound) {
    EXPECT_EQ(theorem_bound(7), (TheoremBound{true, 0}));
    EXPECT_EQ(theorem_bound(2), (TheoremBound{true, 0}));
    EXPECT_EQ(theorem_bound(5), (TheoremBound{false, 1}));
    EXPECT_EQ(theorem_bound(73), (TheoremBound{false, 3}));
    EXPECT_EQ(theorem_bound(11), (TheoremBound{false, 2}));
    EXPECT_EQ(theorem_bound(7).str(), "exact 0");
    EXPECT_EQ(theorem_bound(73).str(), "<= 3");
}

TEST(Family, FindReprExamples) {
    EXPECT_EQ(find_repr(Int(3651), 2), (ReprWitness{ReprKind::three_p, 7, 5}));
    EXPECT_EQ(find_repr(Int(19249), 18), (ReprWitness{ReprKind::prime, 11, 4}));
    EXPECT_EQ(find_repr(Int(57747), 2), (ReprWitness{ReprKind::three_p, 5, 13}));
    EXPECT_EQ(find_repr(Int(4803), 2), (ReprWitness{ReprKind::three_p, 1, 7}));
    EXPECT_FALSE(find_repr(Int(21), 2));
    EXPECT_FALSE(find_repr(Int(1), 18));
    EXPECT_THROW(find_repr(Int(5), 3), std::invalid_argument);
    EXPECT_THROW(find_repr(Int(0), 2), std::invalid_argument);
}

TEST(Family, FindReprMatchesDoubleLoop) {
    for (std::int64_t n = 1; n < 30000; ++n)
        for (int k : {2, 18}) {
            const auto got = find_repr(Int(n), k);
            const auto want = repr_by_double_loop(n, k);
            ASSERT_EQ(got.has_value(), want.has_value()) << n << " " << k;
            if (got) {
                ASSERT_EQ(static_cast<std::int64_t>(got->a), want->first);
                ASSERT_EQ(static_cast<std::int64_t>(got->b), want->second);
            }
        }
}

TEST(Family, WitnessHomspacePoints) {
    const auto check = [](std::uint64_t p, ReprWitness w, Int b1, Rational z, Rational wv) {
        ASSERT_TRUE(witness_valid(p, w));
        const HomSpacePoint h = witness_homspace_point(p, w);
        EXPECT_EQ(h.b1, b1);
        EXPECT_EQ(h.z, z);
        EXPECT_EQ(h.w, wv);
        const CurveModel e = curve_for_prime(p);
        EXPECT_TRUE(on_curve(e, homspace_to_curve(e, h)));
    };
    check(19249, {ReprKind::prime, 11, 4}, Int(19249), Rational(Int(4), Int(11)), Rational(Int(19249), Int(121)));
    check(19249, {ReprKind::three_p, 5, 13}, Int(57747), Rational(Int(13), Int(5)), Rational(Int(57747), Int(25)));
    check(1217, {ReprKind::three_p, 7, 5}, Int(3651), Rational(Int(5), Int(7)), Rational(Int(3651), Int(49)));
    EXPECT_THROW(witness_homspace_point(1217, {ReprKind::three_p, 5, 7}), std::domain_error);
    EXPECT_FALSE(witness_valid(1217, {ReprKind::prime, 7, 5}));
}

TEST(Family, PropositionRank) {
    const auto a = proposition_rank(1217);
    ASSERT_TRUE(a);
    EXPECT_TRUE(a->exact);
    EXPECT_EQ(a->str(), "rank = 1");
    const auto b = proposition_rank(19249);
    ASSERT_TRUE(b);
    EXPECT_FALSE(b->exact);
    EXPECT_EQ(b->str(), "rank >= 2");
    ASSERT_EQ(b->witnesses.size(), 2u);
    EXPECT_FALSE(proposition_rank(7));
    EXPECT_FALSE(proposition_rank(17));  // (2/17)_4 = -1
}

TEST(Family, PropositionOneImpliesRankOne) {
    int fired = 0;
    for (std::uint64_t p : primes_up_to(3000)) {
        const auto claim = proposition_rank(p);
        if (!claim || !claim->exact) continue;
        ++fired;
        const RankBounds r = rank_bounds(curve_for_prime(p));
        EXPECT_EQ(r.lower, 1) << p;
        EXPECT_EQ(r.upper, 1) << p;
    }
    EXPECT_GE(fired, 2);  // 1217 and 1601 at least
}

TEST(Family, SymbolicClass) {
    EXPECT_EQ(symbolic_class(Int(66), 11), "6p");
    EXPECT_EQ(symbolic_class(Int(-23), 23), "-p");
    EXPECT_EQ(symbolic_class(Int(-2), 23), "-2");
    EXPECT_EQ(symbolic_class(Int(2), 2), "2");
}

TEST(Family, VerifyPrime) {
    const FamilyReport r7 = verify_prime(7);
    EXPECT_TRUE(r7.consistent) << r7.issue;
    EXPECT_EQ(r7.rank_bounds.lower, 0);
    EXPECT_EQ(r7.rank_bounds.upper, 0);
    const FamilyReport r11 = verify_prime(11);
    EXPECT_TRUE(r11.consistent);
    EXPECT_EQ(r11.rank_bounds.upper, 2);
    EXPECT_EQ(r11.rank_bounds.lower, 2);
    const FamilyReport big = verify_prime(19249);
    EXPECT_TRUE(big.consistent) << big.issue;
    EXPECT_EQ(big.rank_bounds.upper, 3);
    EXPECT_GE(big.rank_bounds.lower, 2);
    ASSERT_TRUE(big.proposition);
    EXPECT_EQ(big.witnesses.size(), 2u);
}
