#pragma once

// Curves y^2 = x^3 + a x^2 + b x with the rational 2-torsion point (0,0),
// their 2-isogenous partners, and exact rational point arithmetic.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "isodescent/arith.hpp"

namespace isodescent {

class CurveModel {
public:
    CurveModel(Int a, Int b) : a_(std::move(a)), b_(std::move(b)) {
        if (b_ == 0) throw std::invalid_argument("CurveModel: b must be nonzero");
        if (a_ * a_ - 4 * b_ == 0) throw std::invalid_argument("CurveModel: singular curve (a^2 = 4b)");
    }

    const Int& a() const { return a_; }
    const Int& b() const { return b_; }

    /// Discriminant 16 b^2 (a^2 - 4b).
    Int discriminant() const { return 16 * b_ * b_ * (a_ * a_ - 4 * b_); }

    Rational rhs(const Rational& x) const { return x * x * x + Rational(a_) * x * x + Rational(b_) * x; }

    std::string str() const { return "y^2 = x^3 + " + a_.str() + "x^2 + " + b_.str() + "x"; }

    friend bool operator==(const CurveModel&, const CurveModel&) = default;

private:
    Int a_, b_;
};

/// (a, b) -> (-2a, a^2 - 4b).
inline CurveModel dual_curve(const CurveModel& e) { return CurveModel(-2 * e.a(), e.a() * e.a() - 4 * e.b()); }

struct CurvePoint {
    bool identity = true;
    Rational x, y;

    static CurvePoint at_infinity() { return CurvePoint{}; }
    static CurvePoint affine(Rational x, Rational y) { return CurvePoint{false, std::move(x), std::move(y)}; }

    bool is_two_torsion_origin() const { return !identity && x == 0 && y == 0; }

    std::string str() const { return identity ? "O" : "(" + x.str() + ", " + y.str() + ")"; }

    friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

inline bool on_curve(const CurveModel& e, const CurvePoint& p) { return p.identity || p.y * p.y == e.rhs(p.x); }

inline void require_on_curve(const CurveModel& e, const CurvePoint& p, const char* what) {
    if (!on_curve(e, p)) throw std::domain_error(std::string(what) + ": point " + p.str() + " is not on " + e.str());
}

inline CurvePoint negate(const CurvePoint& p) {
    if (p.identity) return p;
    return CurvePoint::affine(p.x, -p.y);
}

inline CurvePoint add(const CurveModel& e, const CurvePoint& p, const CurvePoint& q) {
    if (p.identity) return q;
    if (q.identity) return p;
    Rational lambda;
    if (p.x == q.x) {
        if (p.y != q.y || p.y == 0) return CurvePoint::at_infinity();
        lambda = (3 * p.x * p.x + 2 * Rational(e.a()) * p.x + Rational(e.b())) / (2 * p.y);
    } else {
        lambda = (q.y - p.y) / (q.x - p.x);
    }
    Rational x3 = lambda * lambda - Rational(e.a()) - p.x - q.x;
    Rational y3 = -(p.y + lambda * (x3 - p.x));
    return CurvePoint::affine(std::move(x3), std::move(y3));
}

inline CurvePoint multiply(const CurveModel& e, CurvePoint p, std::uint64_t n) {
    CurvePoint acc = CurvePoint::at_infinity();
    while (n > 0) {
        if (n & 1U) acc = add(e, acc, p);
        p = add(e, p, p);
        n >>= 1U;
    }
    return acc;
}

/// Order of p if it is at most max_order, otherwise 0. Rational torsion
/// never exceeds order 12.
inline int point_order(const CurveModel& e, const CurvePoint& p, int max_order = 12) {
    CurvePoint q = p;
    for (int n = 1; n <= max_order; ++n) {
        if (q.identity) return n;
        q = add(e, q, p);
    }
    return 0;
}

/// Psi: E -> dual(E), (x, y) -> (y^2/x^2, y (b - x^2)/x^2), kernel {O, (0,0)}.
inline CurvePoint apply_isogeny(const CurveModel& e, const CurvePoint& p) {
    require_on_curve(e, p, "apply_isogeny");
    if (p.identity || p.x == 0) return CurvePoint::at_infinity();
    const Rational x2 = p.x * p.x;
    return CurvePoint::affine(p.y * p.y / x2, p.y * (Rational(e.b()) - x2) / x2);
}

/// Dual isogeny dual(E) -> E, (X, Y) -> (Y^2/4X^2, Y (b' - X^2)/8X^2) where
/// b' is the b-coefficient of dual(E).
inline CurvePoint apply_dual_isogeny(const CurveModel& e, const CurvePoint& p) {
    const CurveModel d = dual_curve(e);
    require_on_curve(d, p, "apply_dual_isogeny");
    if (p.identity || p.x == 0) return CurvePoint::at_infinity();
    const Rational x2 = p.x * p.x;
    return CurvePoint::affine(p.y * p.y / (4 * x2), p.y * (Rational(d.b()) - x2) / (8 * x2));
}

namespace detail {

// Integer roots of x^3 + a x^2 + b x - t on a monotone stretch [lo, hi].
inline void cubic_roots_between(const Int& a, const Int& b, const Int& t, Int lo, Int hi, bool increasing,
                                std::vector<Int>& out) {
    auto f = [&](const Int& x) { return x * x * x + a * x * x + b * x - t; };
    while (lo <= hi) {
        const Int mid = lo + (hi - lo) / 2;
        const Int v = f(mid);
        if (v == 0) {
            out.push_back(mid);
            return;
        }
        if ((v < 0) == increasing)
            lo = mid + 1;
        else
            hi = mid - 1;
    }
}

// All integers x with x^3 + a x^2 + b x = t.
inline std::vector<Int> integer_cubic_solutions(const Int& a, const Int& b, const Int& t) {
    using boost::multiprecision::abs;
    const Int bound = 1 + abs(a) + abs(b) + abs(t);  // Cauchy bound on real roots
    std::vector<Int> cuts{-bound};
    // Critical points of the cubic: 3x^2 + 2ax + b = 0.
    const Int disc = 4 * a * a - 12 * b;
    if (disc > 0) {
        const long double s = std::sqrt(static_cast<long double>(disc));
        for (long double r : {(-2 * static_cast<long double>(a) - s) / 6, (-2 * static_cast<long double>(a) + s) / 6})
            cuts.push_back(Int(static_cast<long long>(std::floor(r))));
    }
    cuts.push_back(bound);
    std::vector<Int> roots;
    auto f = [&](const Int& x) { return x * x * x + a * x * x + b * x - t; };
    // Scan each stretch; the few integers straddling a critical point are
    // checked directly so the bisection only sees monotone ranges.
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        Int lo = cuts[i] + (i == 0 ? 0 : 2), hi = cuts[i + 1] - 1;
        if (lo > hi) continue;
        cubic_roots_between(a, b, t, lo, hi, f(hi) >= f(lo), roots);
    }
    for (std::size_t i = 1; i + 1 < cuts.size(); ++i)
        for (int d = -1; d <= 2; ++d)
            if (f(cuts[i] + d) == 0) roots.push_back(cuts[i] + d);
    if (f(bound) == 0) roots.push_back(bound);
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    return roots;
}

}  // namespace detail

/// Rational torsion points by Lutz-Nagell: integral points with y = 0 or
/// y^2 dividing the discriminant, each confirmed by its finite order.
inline std::vector<CurvePoint> torsion_info(const CurveModel& e) {
    std::vector<CurvePoint> out{CurvePoint::at_infinity()};
    // Candidate y: 0 and every divisor whose square divides the discriminant.
    std::vector<Int> ys{1};
    for (const auto& [prime, exp] : factorize(e.discriminant())) {
        const std::size_t n = ys.size();
        Int pw = 1;
        for (int k = 1; 2 * k <= exp; ++k) {
            pw *= prime;
            for (std::size_t i = 0; i < n; ++i) ys.push_back(ys[i] * pw);
        }
    }
    ys.push_back(0);
    for (const Int& y : ys) {
        for (const Int& x : detail::integer_cubic_solutions(e.a(), e.b(), y * y)) {
            for (const Int& sy : {y, Int(-y)}) {
                const CurvePoint p = CurvePoint::affine(Rational(x), Rational(sy));
                if (point_order(e, p) > 0 && std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
                if (y == 0) break;
            }
        }
    }
    return out;
}

}  // namespace isodescent
