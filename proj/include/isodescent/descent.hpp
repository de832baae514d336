#pragma once

// Descent via the 2-isogeny E -> E' for y^2 = x^3 + a x^2 + b x.
//
// Orientation: the Selmer group for psibar is built from the homogeneous
// spaces of E itself, w^2 = b1 + a z^2 + (b/b1) z^4, and the Selmer group
// for psi from those of the dual curve. A class b1 lies in the Selmer group
// when its space has points at infinity and at every prime dividing 2 b b'.

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "isodescent/curve.hpp"
#include "isodescent/local.hpp"

namespace isodescent {

enum class Isogeny { psi, psibar };

inline const char* to_string(Isogeny which) { return which == Isogeny::psi ? "psi" : "psibar"; }

/// Thrown when a computed Selmer set fails to be a group.
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Infinity together with every prime dividing 2 b b'.
inline std::set<Place> bad_places(const CurveModel& e) {
    std::set<Place> s{Place::infinity(), Place::finite(2)};
    const CurveModel d = dual_curve(e);
    for (const Int& n : {e.b(), d.b()})
        for (const Int& q : prime_support(n)) s.insert(Place::finite(static_cast<std::uint64_t>(q)));
    return s;
}

/// Every signed squarefree b1 supported on the primes of b, ascending.
inline std::vector<Int> divisor_classes(const Int& b) {
    if (b == 0) throw std::domain_error("divisor_classes: b must be nonzero");
    std::vector<Int> out{1};
    for (const Int& q : prime_support(b)) {
        const std::size_t n = out.size();
        for (std::size_t i = 0; i < n; ++i) out.push_back(out[i] * q);
    }
    const std::size_t n = out.size();
    for (std::size_t i = 0; i < n; ++i) out.push_back(-out[i]);
    std::sort(out.begin(), out.end());
    return out;
}

/// Closure of a set of square classes under multiplication, ascending.
inline std::vector<Int> generate_subgroup(const std::vector<Int>& generators) {
    std::vector<Int> group{1};
    for (const Int& g : generators) {
        if (std::find(group.begin(), group.end(), g) != group.end()) continue;
        const std::size_t n = group.size();
        for (std::size_t i = 0; i < n; ++i) group.push_back(square_class_product(group[i], g));
    }
    std::sort(group.begin(), group.end());
    return group;
}

inline bool is_subgroup(const std::vector<Int>& classes) {
    if (std::find(classes.begin(), classes.end(), Int(1)) == classes.end()) return false;
    const std::size_t n = classes.size();
    if (n == 0 || (n & (n - 1)) != 0) return false;
    for (const Int& u : classes)
        for (const Int& v : classes)
            if (std::find(classes.begin(), classes.end(), square_class_product(u, v)) == classes.end()) return false;
    return true;
}

inline int dimension_of(const std::vector<Int>& group) {
    return std::countr_zero(static_cast<std::uint64_t>(group.size()));
}

struct SelmerGroup {
    std::vector<Int> classes;  // ascending
    std::set<Place> bad_places;
    Isogeny which = Isogeny::psibar;

    int dim() const { return dimension_of(classes); }
    bool contains(const Int& b1) const { return std::binary_search(classes.begin(), classes.end(), b1); }
};

/// The curve whose homogeneous spaces realise the chosen side.
inline CurveModel descent_curve(const CurveModel& e, Isogeny which) {
    return which == Isogeny::psibar ? e : dual_curve(e);
}

/// w^2 = b1 + a z^2 + (b/b1) z^4 for the curve (a, b).
inline QuarticForm homspace_form(const CurveModel& c, const Int& b1) {
    if (b1 == 0 || c.b() % b1 != 0) throw std::domain_error("homspace_form: b1 must divide b");
    return QuarticForm(b1, c.a(), c.b() / b1);
}

inline SelmerGroup selmer(const CurveModel& e, Isogeny which) {
    SelmerGroup s;
    s.which = which;
    s.bad_places = bad_places(e);
    const CurveModel c = descent_curve(e, which);
    for (const Int& b1 : divisor_classes(c.b()))
        if (solvable_everywhere_locally(homspace_form(c, b1), s.bad_places)) s.classes.push_back(b1);
    if (!is_subgroup(s.classes) || !s.contains(squarefree_class(c.b())))
        throw ConsistencyError(std::string("selmer: ") + to_string(which) + " set for " + e.str() +
                               " is not a subgroup containing the torsion image");
    return s;
}

/// A rational point on w^2 = b1 + a z^2 + (b/b1) z^4, z != 0.
struct HomSpacePoint {
    Int b1;
    Rational z, w;
};

namespace detail {

// Visits pairs (m, e), 1 <= m, e <= bound, shell by shell in max(m, e), and
// reports those with d1 e^4 + c m^2 e^2 + d2 m^4 a perfect square. Only
// forms flagged in `active` are tested; on_hit may clear flags.
template <class OnHit>
void scan_quartics(const std::vector<QuarticForm>& forms, std::vector<char>& active, std::int64_t bound,
                   OnHit&& on_hit) {
    if (bound < 1) throw std::invalid_argument("height bound must be positive");
    struct Coeffs {
        i128 d1, c, d2;
    };
    Int big = 0;
    for (const auto& f : forms) big = std::max({big, Int(abs(f.d1())), Int(abs(f.c())), Int(abs(f.d2()))});
    const Int b4 = Int(bound) * bound * bound * bound;
    const bool fast = big * 3 * b4 < (Int(1) << 125);

    std::vector<i128> sq(static_cast<std::size_t>(bound) + 1), q4(static_cast<std::size_t>(bound) + 1);
    for (std::int64_t i = 0; i <= bound; ++i) {
        sq[i] = static_cast<i128>(i) * i;
        q4[i] = sq[i] * sq[i];
    }
    std::vector<Coeffs> coeffs;
    if (fast)
        for (const auto& f : forms) coeffs.push_back({to_i128(f.d1()), to_i128(f.c()), to_i128(f.d2())});

    std::vector<std::size_t> live;
    auto refresh = [&] {
        live.clear();
        for (std::size_t i = 0; i < forms.size(); ++i)
            if (active[i]) live.push_back(i);
    };
    refresh();

    auto visit = [&](std::int64_t m, std::int64_t e) {
        bool hit = false;
        if (fast) {
            const i128 e4 = q4[e], m4 = q4[m], me2 = sq[m] * sq[e];
            for (std::size_t idx : live) {
                const Coeffs& f = coeffs[idx];
                i128 root = 0;
                if (is_square_i128(f.d1 * e4 + f.c * me2 + f.d2 * m4, &root) && std::gcd(m, e) == 1) {
                    on_hit(idx, m, e, from_i128(root));
                    hit = true;
                }
            }
        } else {
            const Int E(e), M(m);
            for (std::size_t idx : live) {
                const QuarticForm& f = forms[idx];
                const Int n = f.d1() * E * E * E * E + f.c() * M * M * E * E + f.d2() * M * M * M * M;
                Int root;
                if (is_square(n, &root) && std::gcd(m, e) == 1) {
                    on_hit(idx, m, e, root);
                    hit = true;
                }
            }
        }
        if (hit) refresh();
    };

    for (std::int64_t h = 1; h <= bound && !live.empty(); ++h) {
        for (std::int64_t e = 1; e <= h && !live.empty(); ++e) visit(h, e);
        for (std::int64_t m = 1; m < h && !live.empty(); ++m) visit(m, h);
    }
}

}  // namespace detail

/// All points with z = m/e in lowest terms, 0 < |m|, 1 <= e, max(|m|, e) <= bound,
/// on the space of class b1 of curve e. Both signs of z and w are listed.
inline std::vector<HomSpacePoint> search_homspace_points(const CurveModel& e, const Int& b1, std::int64_t bound) {
    const std::vector<QuarticForm> forms{homspace_form(e, b1)};
    std::vector<char> active{1};
    std::vector<HomSpacePoint> out;
    detail::scan_quartics(forms, active, bound, [&](std::size_t, std::int64_t m, std::int64_t den, const Int& root) {
        const Rational z{Int(m), Int(den)};
        const Rational w{root, Int(den) * den};
        for (const Rational& sz : {z, Rational(-z)}) {
            out.push_back({b1, sz, w});
            if (w != 0) out.push_back({b1, sz, -w});
        }
    });
    return out;
}

/// (z, w) -> (b1/z^2, b1 w/z^3) on the curve.
inline CurvePoint homspace_to_curve(const CurveModel& e, const HomSpacePoint& p) {
    if (p.z == 0) throw std::domain_error("homspace_to_curve: z must be nonzero");
    if (!homspace_form(e, p.b1).contains(p.z, p.w))
        throw std::domain_error("homspace_to_curve: point is not on its homogeneous space");
    const Rational b1(p.b1);
    return CurvePoint::affine(b1 / (p.z * p.z), b1 * p.w / (p.z * p.z * p.z));
}

/// The connecting map: O -> 1, (0,0) -> class of b, (x, y) -> class of x.
inline Int alpha(const CurveModel& e, const CurvePoint& p) {
    require_on_curve(e, p, "alpha");
    if (p.identity) return 1;
    if (p.x == 0) return squarefree_class(e.b());
    return squarefree_class(numerator(p.x) * denominator(p.x));
}

struct AlphaImage {
    std::vector<Int> classes;                // subgroup, ascending
    std::vector<HomSpacePoint> witnesses;    // one point per generator found by search
};

/// Image of the connecting map as certified by points of height <= bound:
/// the subgroup generated by 1, the class of b, and every Selmer class
/// whose space has a point found by the search.
inline AlphaImage alpha_image(const CurveModel& e, const SelmerGroup& sel, std::int64_t bound) {
    const CurveModel c = descent_curve(e, sel.which);
    AlphaImage img;
    img.classes = generate_subgroup({squarefree_class(c.b())});
    std::vector<Int> candidates;
    std::vector<QuarticForm> forms;
    for (const Int& b1 : sel.classes) {
        if (std::binary_search(img.classes.begin(), img.classes.end(), b1)) continue;
        candidates.push_back(b1);
        forms.push_back(homspace_form(c, b1));
    }
    std::vector<char> active(forms.size(), 1);
    detail::scan_quartics(forms, active, bound, [&](std::size_t i, std::int64_t m, std::int64_t den, const Int& root) {
        if (std::binary_search(img.classes.begin(), img.classes.end(), candidates[i])) return;
        img.witnesses.push_back({candidates[i], Rational(Int(m), Int(den)), Rational(root, Int(den) * den)});
        std::vector<Int> gens = img.classes;
        gens.push_back(candidates[i]);
        img.classes = generate_subgroup(gens);
        for (std::size_t j = 0; j < candidates.size(); ++j)
            active[j] = !std::binary_search(img.classes.begin(), img.classes.end(), candidates[j]);
    });
    return img;
}

inline AlphaImage alpha_image(const CurveModel& e, Isogeny which, std::int64_t bound) {
    return alpha_image(e, selmer(e, which), bound);
}

struct RankBounds {
    int dim_selmer_psibar = 0;
    int dim_selmer_psi = 0;
    int dim_im_alpha = 0;
    int dim_im_alphabar = 0;
    int lower = 0;
    int upper = 0;
};

/// Everything a two-sided descent produces for one curve.
struct DescentResult {
    SelmerGroup selmer_psibar, selmer_psi;
    AlphaImage image_alpha, image_alphabar;
    std::int64_t height_bound = 0;
    RankBounds bounds;
};

inline constexpr std::int64_t default_height_bound = 2000;

inline DescentResult descend(const CurveModel& e, std::int64_t bound = default_height_bound) {
    DescentResult r;
    r.height_bound = bound;
    r.selmer_psibar = selmer(e, Isogeny::psibar);
    r.selmer_psi = selmer(e, Isogeny::psi);
    r.image_alpha = alpha_image(e, r.selmer_psibar, bound);
    r.image_alphabar = alpha_image(e, r.selmer_psi, bound);
    RankBounds& b = r.bounds;
    b.dim_selmer_psibar = r.selmer_psibar.dim();
    b.dim_selmer_psi = r.selmer_psi.dim();
    b.dim_im_alpha = dimension_of(r.image_alpha.classes);
    b.dim_im_alphabar = dimension_of(r.image_alphabar.classes);
    // Sha only ever lowers the rank below the Selmer count.
    b.upper = b.dim_selmer_psibar + b.dim_selmer_psi - 2;
    b.lower = std::max(0, b.dim_im_alpha + b.dim_im_alphabar - 2);
    return r;
}

inline RankBounds rank_bounds(const CurveModel& e, std::int64_t bound = default_height_bound) {
    return descend(e, bound).bounds;
}

}  // namespace isodescent
