#pragma once

// The family y^2 = x^3 + 18 p^2 x for primes p: residue classification,
// closed-form Selmer groups, rank ceilings, and the quartic representations
// a^4 + 2b^4 = 3p and a^4 + 18b^4 = p that give explicit points.

#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "isodescent/descent.hpp"

namespace isodescent {

inline void require_prime(std::uint64_t p, const char* what) {
    if (!is_prime(p)) throw std::domain_error(std::string(what) + ": " + std::to_string(p) + " is not prime");
}

inline CurveModel curve_for_prime(std::uint64_t p) {
    require_prime(p, "curve_for_prime");
    const Int P(p);
    return CurveModel(Int(0), 18 * P * P);
}

// Y^2 = 3X^3 + 6p^2 X, the shape before scaling by 3.
inline bool on_original_model(std::uint64_t p, const CurvePoint& pt) {
    if (pt.identity) return true;
    const Rational p2(Int(p) * p);
    return pt.y * pt.y == 3 * pt.x * pt.x * pt.x + 6 * p2 * pt.x;
}

enum class ModelDirection { to_reduced, to_original };

/// (X, Y) <-> (x, y) = (3X, 3Y).
inline CurvePoint transform_point(std::uint64_t p, ModelDirection dir, const CurvePoint& pt) {
    const CurveModel e = curve_for_prime(p);
    if (dir == ModelDirection::to_reduced) {
        if (!on_original_model(p, pt)) throw std::domain_error("transform_point: " + pt.str() + " not on the original model");
        if (pt.identity) return pt;
        return CurvePoint::affine(3 * pt.x, 3 * pt.y);
    }
    require_on_curve(e, pt, "transform_point");
    if (pt.identity) return pt;
    return CurvePoint::affine(pt.x / 3, pt.y / 3);
}

struct PrimeClass {
    std::uint64_t p = 0;
    int residue_mod_24 = 0;
    std::optional<int> quartic2;  // (2/p)_4, only for p = 1 mod 8
};

inline PrimeClass classify(std::uint64_t p) {
    require_prime(p, "classify");
    PrimeClass c;
    c.p = p;
    c.residue_mod_24 = static_cast<int>(p % 24);
    if (p % 8 == 1) c.quartic2 = quartic_symbol(Int(2), p);
    return c;
}

namespace detail {

inline bool quartic2_is(const PrimeClass& c, int v) { return c.quartic2 && *c.quartic2 == v; }

inline SelmerGroup closed_group(std::uint64_t p, Isogeny which, std::initializer_list<std::int64_t> small,
                                std::initializer_list<std::int64_t> times_p) {
    SelmerGroup s;
    s.which = which;
    s.bad_places = bad_places(curve_for_prime(p));
    for (auto k : small) s.classes.push_back(Int(k));
    for (auto k : times_p) s.classes.push_back(Int(k) * p);
    std::sort(s.classes.begin(), s.classes.end());
    return s;
}

}  // namespace detail

/// Which of the five tabulated shapes S[psibar] takes, numbered 1..5.
inline int psibar_case(const PrimeClass& c) {
    const int r = c.residue_mod_24;
    if (c.p <= 3) return 5;
    if (r == 11 || r == 19 || (r == 1 && detail::quartic2_is(c, 1))) return 1;
    if (r == 5 || r == 13 || r == 23 || (r == 1 && detail::quartic2_is(c, -1))) return 2;
    if (r == 17) return detail::quartic2_is(c, 1) ? 3 : 4;
    return 5;
}

inline SelmerGroup closed_form_selmer_psibar(std::uint64_t p) {
    const PrimeClass c = classify(p);
    switch (psibar_case(c)) {
        case 1: return detail::closed_group(p, Isogeny::psibar, {1, 2, 3, 6}, {1, 2, 3, 6});
        case 2: return detail::closed_group(p, Isogeny::psibar, {1, 2, 3, 6}, {});
        case 3: return detail::closed_group(p, Isogeny::psibar, {1, 2}, {3, 6});
        case 4: return detail::closed_group(p, Isogeny::psibar, {1, 2}, {1, 2});
        default: return detail::closed_group(p, Isogeny::psibar, {1, 2}, {});
    }
}

inline SelmerGroup closed_form_selmer_psi(std::uint64_t p) {
    const PrimeClass c = classify(p);
    if (c.residue_mod_24 == 1 && detail::quartic2_is(c, 1))
        return detail::closed_group(p, Isogeny::psi, {1, -2}, {1, -2});
    if (c.residue_mod_24 == 23) return detail::closed_group(p, Isogeny::psi, {1, -2}, {-1, 2});
    return detail::closed_group(p, Isogeny::psi, {1, -2}, {});
}

/// Expected dimensions keyed only on the residue class.
inline int expected_dim_psibar(const PrimeClass& c) {
    switch (psibar_case(c)) {
        case 1: return 3;
        case 5: return 1;
        default: return 2;
    }
}

inline int expected_dim_psi(const PrimeClass& c) {
    return (c.residue_mod_24 == 23 || (c.residue_mod_24 == 1 && detail::quartic2_is(c, 1))) ? 2 : 1;
}

struct TheoremBound {
    bool exact = false;
    int ceiling = 0;

    std::string str() const { return (exact ? "exact " : "<= ") + std::to_string(ceiling); }
    friend bool operator==(const TheoremBound&, const TheoremBound&) = default;
};

inline TheoremBound theorem_bound(std::uint64_t p) {
    const PrimeClass c = classify(p);
    const int r = c.residue_mod_24;
    if (p <= 3 || r == 7) return {true, 0};
    if (r == 5 || r == 13 || r == 17) return {false, 1};
    if (r == 1 && detail::quartic2_is(c, 1)) return {false, 3};
    return {false, 2};
}

enum class ReprKind { three_p, prime };  // a^4 + 2b^4 = 3p, a^4 + 18b^4 = p

inline const char* to_string(ReprKind k) { return k == ReprKind::three_p ? "a^4+2b^4=3p" : "a^4+18b^4=p"; }

struct ReprWitness {
    ReprKind kind = ReprKind::three_p;
    std::uint64_t a = 0, b = 0;

    friend bool operator==(const ReprWitness&, const ReprWitness&) = default;
};

namespace detail {

inline bool is_fourth_power(const Int& n, Int* root) {
    Int r2, r;
    if (!is_square(n, &r2) || !is_square(r2, &r)) return false;
    if (root) *root = r;
    return true;
}

}  // namespace detail

/// Smallest (a, b) in lexicographic order with a, b >= 1 and a^4 + k b^4 = n.
/// The search runs over every a with a^4 < n, so an empty answer is final.
inline std::optional<ReprWitness> find_repr(const Int& n, int k) {
    if (k != 2 && k != 18) throw std::invalid_argument("find_repr: coefficient must be 2 or 18");
    if (n < 1) throw std::invalid_argument("find_repr: n must be positive");
    for (std::uint64_t a = 1;; ++a) {
        const Int a4 = Int(a) * a * a * a;
        if (a4 >= n) break;
        const Int rest = n - a4;
        if (rest % k != 0) continue;
        Int b;
        if (detail::is_fourth_power(rest / k, &b))
            return ReprWitness{k == 2 ? ReprKind::three_p : ReprKind::prime, a, static_cast<std::uint64_t>(b)};
    }
    return std::nullopt;
}

inline bool witness_identity_holds(std::uint64_t p, const ReprWitness& w) {
    const Int a(w.a), b(w.b);
    if (w.kind == ReprKind::three_p) return a * a * a * a + 2 * b * b * b * b == 3 * Int(p);
    return a * a * a * a + 18 * b * b * b * b == Int(p);
}

/// Identity plus gcd(a, 6p) = 1 (resp. gcd(a, 18p) = 1).
inline bool witness_valid(std::uint64_t p, const ReprWitness& w) {
    if (w.a == 0 || w.b == 0 || !witness_identity_holds(p, w)) return false;
    const std::uint64_t g = std::gcd(w.a, p) * std::gcd(w.a, std::uint64_t{6});
    return g == 1;
}

/// (z, w) = (b/a, np/a^2) on the space of class 3p or p.
inline HomSpacePoint witness_homspace_point(std::uint64_t p, const ReprWitness& w) {
    require_prime(p, "witness_homspace_point");
    if (!witness_valid(p, w)) throw std::domain_error("witness_homspace_point: invalid witness");
    const Int b1 = w.kind == ReprKind::three_p ? 3 * Int(p) : Int(p);
    HomSpacePoint h{b1, Rational(Int(w.b), Int(w.a)), Rational(b1, Int(w.a) * w.a)};
    if (!homspace_form(curve_for_prime(p), b1).contains(h.z, h.w))
        throw std::logic_error("witness_homspace_point: image not on the space");
    return h;
}

struct PropositionClaim {
    bool exact = false;  // rank = 1 when true, rank >= 2 otherwise
    int rank = 0;
    std::vector<ReprWitness> witnesses;

    std::string str() const { return (exact ? "rank = " : "rank >= ") + std::to_string(rank); }
};

inline std::optional<PropositionClaim> proposition_rank(std::uint64_t p) {
    const PrimeClass c = classify(p);
    if (!detail::quartic2_is(c, 1)) return std::nullopt;
    const Int P(p);
    const auto rep3 = find_repr(3 * P, 2);
    if (!rep3 || !witness_valid(p, *rep3)) return std::nullopt;
    if (c.residue_mod_24 == 17) return PropositionClaim{true, 1, {*rep3}};
    if (c.residue_mod_24 == 1) {
        const auto rep1 = find_repr(P, 18);
        if (!rep1 || !witness_valid(p, *rep1)) return std::nullopt;
        return PropositionClaim{false, 2, {*rep1, *rep3}};
    }
    return std::nullopt;
}

/// Class written with p kept symbolic, e.g. 66 -> "6p" when p = 11.
inline std::string symbolic_class(const Int& c, std::uint64_t p) {
    Int v = c;
    std::string sign;
    if (v < 0) {
        sign = "-";
        v = -v;
    }
    if (p > 3 && v % p == 0) {
        v /= p;
        return sign + (v == 1 ? std::string() : v.str()) + "p";
    }
    return sign + v.str();
}

struct FamilyReport {
    PrimeClass prime_class;
    SelmerGroup closed_psibar, closed_psi;
    SelmerGroup engine_psibar, engine_psi;
    AlphaImage image_alpha, image_alphabar;
    TheoremBound bound;
    std::optional<PropositionClaim> proposition;
    std::vector<ReprWitness> witnesses;
    RankBounds rank_bounds;
    std::int64_t height_bound = 0;
    bool consistent = false;
    std::string issue;  // empty when consistent
};

inline FamilyReport verify_prime(std::uint64_t p, std::int64_t height_bound = default_height_bound) {
    FamilyReport r;
    r.prime_class = classify(p);
    r.closed_psibar = closed_form_selmer_psibar(p);
    r.closed_psi = closed_form_selmer_psi(p);
    r.bound = theorem_bound(p);
    r.proposition = proposition_rank(p);
    r.height_bound = height_bound;
    if (r.proposition) r.witnesses = r.proposition->witnesses;
    try {
        DescentResult d = descend(curve_for_prime(p), height_bound);
        r.engine_psibar = std::move(d.selmer_psibar);
        r.engine_psi = std::move(d.selmer_psi);
        r.image_alpha = std::move(d.image_alpha);
        r.image_alphabar = std::move(d.image_alphabar);
        r.rank_bounds = d.bounds;
    } catch (const ConsistencyError& ex) {
        r.issue = ex.what();
        return r;
    }
    if (r.closed_psibar.classes != r.engine_psibar.classes)
        r.issue = "S[psibar] differs from the closed form";
    else if (r.closed_psi.classes != r.engine_psi.classes)
        r.issue = "S[psi] differs from the closed form";
    else if (r.rank_bounds.upper > r.bound.ceiling)
        r.issue = "upper bound exceeds the theorem ceiling";
    else if (r.proposition && r.proposition->rank > r.rank_bounds.upper)
        r.issue = "witness lower bound exceeds the upper bound";
    r.consistent = r.issue.empty();
    return r;
}

}  // namespace isodescent
