#pragma once

// Local solvability of w^2 = d1 + c z^2 + d2 z^4 over R and Q_l.
//
// A Q_l-point exists iff the quartic g(z) = d2 z^4 + c z^2 + d1 takes a
// square value (zero included) at some z in Z_l, or the reciprocal quartic
// d1 z^4 + c z^2 + d2 does so at some z in l Z_l. Each of those is decided
// by refining residue discs x + l^k Z_l until every disc is either settled
// or certified.

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "isodescent/arith.hpp"

namespace isodescent {

/// w^2 = d1 + c z^2 + d2 z^4 with d1 d2 != 0 and c^2 != 4 d1 d2.
class QuarticForm {
public:
    QuarticForm(Int d1, Int c, Int d2) : d1_(std::move(d1)), c_(std::move(c)), d2_(std::move(d2)) {
        if (d1_ == 0 || d2_ == 0) throw std::invalid_argument("QuarticForm: d1 and d2 must be nonzero");
        if (discriminant() == 0) throw std::invalid_argument("QuarticForm: degenerate quartic (c^2 = 4 d1 d2)");
    }

    const Int& d1() const { return d1_; }
    const Int& c() const { return c_; }
    const Int& d2() const { return d2_; }

    /// c^2 - 4 d1 d2, the discriminant of d2 t^2 + c t + d1.
    Int discriminant() const { return c_ * c_ - 4 * d1_ * d2_; }

    /// The form obtained by z -> 1/z, w -> w/z^2.
    QuarticForm reciprocal() const { return QuarticForm(d2_, c_, d1_); }

    Rational rhs(const Rational& z) const {
        const Rational z2 = z * z;
        return Rational(d1_) + Rational(c_) * z2 + Rational(d2_) * z2 * z2;
    }

    bool contains(const Rational& z, const Rational& w) const { return w * w == rhs(z); }

    std::string str() const { return "(" + d1_.str() + ", " + c_.str() + ", " + d2_.str() + ")"; }

    friend bool operator==(const QuarticForm&, const QuarticForm&) = default;

private:
    Int d1_, c_, d2_;
};

/// A place of Q: infinity or a finite prime.
struct Place {
    std::uint64_t prime = 0;  // 0 encodes infinity

    static Place infinity() { return Place{}; }
    static Place finite(std::uint64_t l) {
        if (!is_prime(l)) throw std::domain_error("Place: " + std::to_string(l) + " is not prime");
        return Place{l};
    }

    bool is_infinite() const { return prime == 0; }
    std::string str() const { return is_infinite() ? "inf" : std::to_string(prime); }

    friend auto operator<=>(const Place&, const Place&) = default;
};

enum class LiftReason {
    real,          // decided over R
    square_value,  // g(z0) is a nonzero l-adic square, so z0 itself is a point
    exact_root,    // g(z0) = 0
    hensel_root,   // v(g(z0)) > 2 v(g'(z0)): a root of g lies in Z_l
};

inline const char* to_string(LiftReason r) {
    switch (r) {
        case LiftReason::real: return "real";
        case LiftReason::square_value: return "square_value";
        case LiftReason::exact_root: return "exact_root";
        case LiftReason::hensel_root: return "hensel_root";
    }
    return "?";
}

/// Residue data behind a positive p-adic verdict.
struct LiftTrace {
    bool reciprocal = false;  // z0 lives on the reciprocal form (z0 = 0 mod l)
    Int z0;                   // residue representative, 0 <= z0 < l^precision
    int precision = 0;        // k in z0 + l^k Z_l
    std::optional<int> value_valuation;       // v_l(g(z0)); empty when g(z0) = 0
    std::optional<int> derivative_valuation;  // v_l(g'(z0)); empty when g'(z0) = 0
    LiftReason reason = LiftReason::square_value;
};

struct RationalPoint {
    Rational z;
    Rational w;
};

struct SolvabilityCertificate {
    QuarticForm form;
    Place place;
    bool solvable = false;
    std::optional<RationalPoint> witness;
    std::optional<LiftTrace> trace;
    std::size_t discs_examined = 0;
};

inline bool solvable_real(const QuarticForm& q) {
    if (q.d2() > 0 || q.d1() > 0) return true;
    return q.c() > 0 && q.c() * q.c() >= 4 * q.d1() * q.d2();
}

namespace detail {

// v_l of an integer together with its unit part modulo l (odd l) or 8 (l = 2).
struct ValueData {
    bool zero = false;
    int val = 0;
    std::uint64_t unit = 0;
};

template <class T>
ValueData value_data(T v, std::uint64_t l) {
    ValueData d;
    if (v == 0) {
        d.zero = true;
        return d;
    }
    const T ll = static_cast<T>(l);
    while (v % ll == 0) {
        v /= ll;
        ++d.val;
    }
    d.unit = reduce(v, l == 2 ? 8 : l);
    return d;
}

inline bool is_lsquare(const ValueData& d, std::uint64_t l) {
    if (d.zero) return true;
    if (d.val % 2 != 0) return false;
    if (l == 2) return d.unit == 1;
    return legendre_small(d.unit, l) == 1;
}

// g(z) = lead z^4 + mid z^2 + tail, evaluated exactly. Uses 128-bit
// arithmetic while |z| stays under a precomputed bound, cpp_int beyond it.
class ExactQuartic {
public:
    ExactQuartic(const Int& lead, const Int& mid, const Int& tail)
        : lead_(lead), mid_(mid), tail_(tail) {
        const Int big = std::max({abs(lead), abs(mid), abs(tail)});
        fast_ = big < (Int(1) << 100);
        if (fast_) {
            lead128_ = to_i128(lead);
            mid128_ = to_i128(mid);
            tail128_ = to_i128(tail);
            // 3 * big * z^4 < 2^124 and 4 * big * z^3 < 2^124.
            const long double lim = std::pow(std::ldexp(1.0L, 121) / (static_cast<long double>(big) + 1), 0.25L);
            zmax_ = from_i128(static_cast<i128>(std::floor(lim)) - 1);
        }
    }

    ValueData value(const Int& z, std::uint64_t l) const {
        if (fast_ && within(z)) {
            const i128 x = to_i128(z);
            const i128 x2 = x * x;
            return value_data<i128>(lead128_ * x2 * x2 + mid128_ * x2 + tail128_, l);
        }
        const Int x2 = z * z;
        return value_data<Int>(lead_ * x2 * x2 + mid_ * x2 + tail_, l);
    }

    ValueData derivative(const Int& z, std::uint64_t l) const {
        if (fast_ && within(z)) {
            const i128 x = to_i128(z);
            return value_data<i128>(4 * lead128_ * x * x * x + 2 * mid128_ * x, l);
        }
        return value_data<Int>(4 * lead_ * z * z * z + 2 * mid_ * z, l);
    }

    Int exact(const Int& z) const {
        const Int x2 = z * z;
        return lead_ * x2 * x2 + mid_ * x2 + tail_;
    }

private:
    bool within(const Int& z) const { return z <= zmax_ && -z <= zmax_; }

    Int lead_, mid_, tail_;
    bool fast_ = false;
    i128 lead128_ = 0, mid128_ = 0, tail128_ = 0;
    Int zmax_ = 0;
};

// Depth beyond which no disc can remain undecided. For x in Z_l one has
// min(v(g(x)), v(g'(x))) <= v(Res(g, g')), and Res(g, g') equals
// 16 d1 lead^2 (c^2 - 4 d1 d2)^2 up to sign; an open disc at depth k needs
// v(g(x)) >= k - 2 and v(g(x)) <= 2 v(g'(x)), hence k <= 2 v(Res) + 2.
inline int depth_cap(const QuarticForm& q, bool reciprocal, std::uint64_t l) {
    const Int& lead = reciprocal ? q.d1() : q.d2();
    const Int& tail = reciprocal ? q.d2() : q.d1();
    const int r = valuation(Int(16), l) + valuation(tail, l) + 2 * valuation(lead, l) +
                  2 * valuation(q.discriminant(), l);
    return 2 * r + 3;
}

enum class DiscVerdict { point, empty, open };

struct DiscSearch {
    const ExactQuartic& g;
    std::uint64_t l;
    int cap;
    std::size_t examined = 0;

    struct Hit {
        Int z0;
        int k;
        ValueData gv, dv;
        LiftReason reason;
    };

    DiscVerdict judge(const ValueData& gv, const ValueData& dv, int k, LiftReason& reason) const {
        if (gv.zero) {
            reason = LiftReason::exact_root;
            return DiscVerdict::point;
        }
        if (is_lsquare(gv, l)) {
            reason = LiftReason::square_value;
            return DiscVerdict::point;
        }
        if (!dv.zero && gv.val > 2 * dv.val) {
            reason = LiftReason::hensel_root;
            return DiscVerdict::point;
        }
        // On x + l^k Z_l, g moves by at most l^rho.
        const int rho = dv.zero ? 2 * k : std::min(dv.val + k, 2 * k);
        if (gv.val >= rho) return DiscVerdict::open;
        if (gv.val % 2 != 0) return DiscVerdict::empty;
        const int slack = rho - gv.val;  // unit part is fixed modulo l^slack
        if (l != 2) return DiscVerdict::empty;
        if (slack >= 3) return DiscVerdict::empty;
        if (slack == 2 && gv.unit % 4 == 3) return DiscVerdict::empty;
        return DiscVerdict::open;
    }

    // Depth-first over the discs below (x, k); returns the first certified point.
    std::optional<Hit> run(const Int& x0, int k0) {
        std::vector<std::pair<Int, int>> stack{{x0, k0}};
        while (!stack.empty()) {
            auto [x, k] = std::move(stack.back());
            stack.pop_back();
            ++examined;
            const ValueData gv = g.value(x, l);
            const ValueData dv = g.derivative(x, l);
            LiftReason reason{};
            const DiscVerdict verdict = judge(gv, dv, k, reason);
            if (verdict == DiscVerdict::point) return Hit{x, k, gv, dv, reason};
            if (verdict == DiscVerdict::empty) continue;
            if (k + 1 > cap)
                throw std::logic_error("local solver: disc refinement exceeded the resultant depth bound");
            const Int step = boost::multiprecision::pow(Int(l), static_cast<unsigned>(k));
            for (std::uint64_t i = l; i-- > 0;) stack.emplace_back(x + step * i, k + 1);
        }
        return std::nullopt;
    }
};

}  // namespace detail

/// Decide whether w^2 = d1 + c z^2 + d2 z^4 has a point over Q_l.
inline SolvabilityCertificate solvable_padic(const QuarticForm& q, std::uint64_t l) {
    const Place place = Place::finite(l);
    SolvabilityCertificate cert{q, place, false, std::nullopt, std::nullopt, 0};
    for (bool reciprocal : {false, true}) {
        const Int& lead = reciprocal ? q.d1() : q.d2();
        const Int& tail = reciprocal ? q.d2() : q.d1();
        detail::ExactQuartic g(lead, q.c(), tail);
        detail::DiscSearch search{g, l, detail::depth_cap(q, reciprocal, l)};
        // z ranges over Z_l, or over l Z_l for the reciprocal form.
        auto hit = reciprocal ? search.run(Int(0), 1) : search.run(Int(0), 0);
        cert.discs_examined += search.examined;
        if (!hit) continue;
        cert.solvable = true;
        LiftTrace trace;
        trace.reciprocal = reciprocal;
        trace.z0 = hit->z0;
        trace.precision = hit->k;
        if (!hit->gv.zero) trace.value_valuation = hit->gv.val;
        if (!hit->dv.zero) trace.derivative_valuation = hit->dv.val;
        trace.reason = hit->reason;
        cert.trace = trace;
        Int root;
        const Int gz = g.exact(hit->z0);
        if (is_square(gz, &root)) {
            if (!reciprocal) {
                cert.witness = RationalPoint{Rational(hit->z0), Rational(root)};
            } else if (hit->z0 != 0) {
                const Rational z0(hit->z0);
                cert.witness = RationalPoint{1 / z0, Rational(root) / (z0 * z0)};
            }
        }
        return cert;
    }
    return cert;
}

/// Re-derive a certificate's claim from its trace alone.
inline bool verify_certificate(const SolvabilityCertificate& cert) {
    if (!cert.solvable) return !cert.trace && !cert.witness;
    if (cert.witness && !cert.form.contains(cert.witness->z, cert.witness->w)) return false;
    if (cert.place.is_infinite()) return solvable_real(cert.form);
    if (!cert.trace) return false;
    const LiftTrace& t = *cert.trace;
    const std::uint64_t l = cert.place.prime;
    if (t.reciprocal && t.z0 % l != 0) return false;
    const Int& lead = t.reciprocal ? cert.form.d1() : cert.form.d2();
    const Int& tail = t.reciprocal ? cert.form.d2() : cert.form.d1();
    detail::ExactQuartic g(lead, cert.form.c(), tail);
    const auto gv = g.value(t.z0, l);
    const auto dv = g.derivative(t.z0, l);
    switch (t.reason) {
        case LiftReason::exact_root: return gv.zero;
        case LiftReason::square_value: return !gv.zero && detail::is_lsquare(gv, l);
        case LiftReason::hensel_root: return !gv.zero && !dv.zero && gv.val > 2 * dv.val;
        case LiftReason::real: return false;
    }
    return false;
}

inline SolvabilityCertificate solvable_at(const QuarticForm& q, const Place& place) {
    if (place.is_infinite()) {
        SolvabilityCertificate cert{q, place, false, std::nullopt, std::nullopt, 0};
        cert.solvable = solvable_real(q);
        if (cert.solvable) {
            LiftTrace trace;
            trace.reason = LiftReason::real;
            cert.trace = trace;
        }
        return cert;
    }
    return solvable_padic(q, place.prime);
}

/// True iff the form has points at every place in the set.
inline bool solvable_everywhere_locally(const QuarticForm& q, const std::set<Place>& places) {
    if (places.empty()) throw std::invalid_argument("solvable_everywhere_locally: empty place set");
    for (const Place& v : places)
        if (!solvable_at(q, v).solvable) return false;
    return true;
}

enum class OracleVerdict { solvable, unsolvable, unknown };

inline const char* to_string(OracleVerdict v) {
    switch (v) {
        case OracleVerdict::solvable: return "solvable";
        case OracleVerdict::unsolvable: return "unsolvable";
        case OracleVerdict::unknown: return "unknown";
    }
    return "?";
}

/// Exhaustive residue scan, used to check solvable_padic independently.
///
/// At each level k <= depth every residue z mod l^k is examined on both the
/// form (z in Z_l) and the reciprocal form (z = 0 mod l). A residue proves
/// solvability when g(z) is zero or a nonzero l-adic square, or when
/// v(g(z)) > 2 v(g'(z)). It is obstructed when v(g(z)) < k, which pins
/// v(g) on the whole class since g(z') = g(z) mod l^k, and the unit part
/// known modulo l^(k - v) already rules out squares. All residues
/// obstructed at one level proves unsolvability.
inline OracleVerdict brute_oracle(const QuarticForm& q, std::uint64_t l, int depth) {
    if (!is_prime(l)) throw std::domain_error("brute_oracle: l must be prime");
    if (depth < 1) throw std::invalid_argument("brute_oracle: depth must be positive");
    const Int big = std::max({abs(q.d1()), abs(q.c()), abs(q.d2())});
    const Int top = boost::multiprecision::pow(Int(l), static_cast<unsigned>(depth));
    if (big * 4 * boost::multiprecision::pow(top, 4) >= (Int(1) << 125))
        throw std::out_of_range("brute_oracle: form too large for the bounded scan");
    const i128 f[2][3] = {
        {detail::to_i128(q.d2()), detail::to_i128(q.c()), detail::to_i128(q.d1())},
        {detail::to_i128(q.d1()), detail::to_i128(q.c()), detail::to_i128(q.d2())},
    };
    auto vdata = [l](i128 v) {
        struct {
            bool zero;
            int val;
            std::uint64_t unit8;  // unit part mod 8 (l = 2) or mod l
        } r{v == 0, 0, 0};
        if (r.zero) return r;
        while (v % static_cast<i128>(l) == 0) {
            v /= static_cast<i128>(l);
            ++r.val;
        }
        const i128 m = l == 2 ? 8 : static_cast<i128>(l);
        r.unit8 = static_cast<std::uint64_t>(((v % m) + m) % m);
        return r;
    };
    i128 modulus = 1;
    for (int k = 1; k <= depth; ++k) {
        modulus *= static_cast<i128>(l);
        bool all_obstructed = true;
        for (int side = 0; side < 2; ++side) {
            const i128 stride = side == 0 ? 1 : static_cast<i128>(l);
            for (i128 z = 0; z < modulus; z += stride) {
                const i128 z2 = z * z;
                const auto gv = vdata(f[side][0] * z2 * z2 + f[side][1] * z2 + f[side][2]);
                if (gv.zero) return OracleVerdict::solvable;
                const bool even = gv.val % 2 == 0;
                const bool unit_square = l == 2 ? gv.unit8 == 1 : legendre_small(gv.unit8, l) == 1;
                if (even && unit_square) return OracleVerdict::solvable;
                const auto dv = vdata(4 * f[side][0] * z2 * z + 2 * f[side][1] * z);
                if (!dv.zero && gv.val > 2 * dv.val) return OracleVerdict::solvable;
                const int known = k - gv.val;  // digits of the unit part fixed on the class
                bool obstructed = false;
                if (known >= 1) {
                    if (!even) obstructed = true;
                    else if (l != 2) obstructed = true;  // unit non-residue mod l
                    else if (known >= 3) obstructed = true;
                    else if (known == 2 && gv.unit8 % 4 == 3) obstructed = true;
                }
                if (!obstructed) all_obstructed = false;
            }
        }
        if (all_obstructed) return OracleVerdict::unsolvable;
    }
    return OracleVerdict::unknown;
}

}  // namespace isodescent
