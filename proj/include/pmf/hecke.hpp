// Hecke operators on paramodular expansions through explicit right-coset
// representative lists, and a generic exact engine applying sums of
// block-upper-triangular representatives to Fourier expansions.
//
// A representative is sqrt(s2) * [[A, B], [0, D]] with rational blocks and
// s2 * A^t D = I, B A^t symmetric.  Acting on a term at index matrix T it
// contributes at T' = s2 * A^t T A with phase exponent nu = s2 * tr(T B A^t)
// and weight factor (s2 * det D)^{-k} (k even, so the sign is immaterial).
// Terms landing at non-integral (n', r', m') must cancel to zero across the
// representative sum, and every surviving phase total must be rational;
// both are asserted exactly, never within a tolerance -- a failure means
// the representative list itself is wrong, which is precisely what the
// tests hunt for.
//
// Operator tables.  The lists for T_N(q) and T*_N(q) are transcribed once,
// in one table each, with the parameter ranges (residues mod q or q^2,
// exclusions) kept as data next to the matrices.  When q | N the base lists
// are supplemented, not replaced, by the extra cosets; coset_sanity guards
// that reading.  The remaining operators are single Jacobi double cosets:
//   jdiag    diag(1, q, q^2, q)/q           (q^3 + q^2 cosets)
//   fjraise  diag(q, q, 1, 1)/sqrt(q)       (q + 1 cosets)
//   jsingle  diag(q, q^2, q, 1)/q           (a single coset)
//   ushift   I x [[1, u/q], [0, 1]]         (q single cosets)
//   vraise   diag(1, l, l, 1)/sqrt(l)       (sigma(l) cosets, l squarefree)

#pragma once

#include "pmf/cyclotomic.hpp"
#include "pmf/matrix.hpp"
#include "pmf/ntheory.hpp"
#include "pmf/paramod.hpp"
#include "pmf/rational.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace pmf {

// ---------------------------------------------------------------------------
// representatives
// ---------------------------------------------------------------------------

struct UpperRep {
    Rational s2; // square of the scalar
    Mat2 A, B, D;

    UpperRep(const Rational& s2_, const Mat2& A_, const Mat2& B_, const Mat2& D_)
        : s2(s2_), A(A_), B(B_), D(D_) {
        if (!(s2 > Rational(0))) throw std::domain_error("UpperRep: s2 must be positive");
        const Mat2 atd = s2 * (A.transpose() * D);
        if (!(atd == Mat2::identity())) throw std::domain_error("UpperRep: s2 A^t D != I");
        if (!(B * A.transpose()).is_symmetric()) throw std::domain_error("UpperRep: B A^t not symmetric");
    }

    ScaledMatrix to_scaled() const {
        return ScaledMatrix(s2, Mat4::from_blocks(A, B, Mat2::zero(), D));
    }

    Rational weight_factor(int k) const {
        if (k % 2 != 0) throw std::domain_error("UpperRep: weight must be even");
        return (s2 * D.det()).pow(-k);
    }
};

enum class OpKind { TNQ, TStarQ, JDiag, FJRaise, JSingle, UShift, VRaise };

inline std::string op_kind_name(OpKind k) {
    switch (k) {
        case OpKind::TNQ: return "tnq";
        case OpKind::TStarQ: return "tstarq";
        case OpKind::JDiag: return "jdiag";
        case OpKind::FJRaise: return "fjraise";
        case OpKind::JSingle: return "jsingle";
        case OpKind::UShift: return "ushift";
        case OpKind::VRaise: return "vraise";
    }
    return "?";
}

inline std::optional<OpKind> op_kind_from_name(const std::string& s) {
    for (OpKind k : {OpKind::TNQ, OpKind::TStarQ, OpKind::JDiag, OpKind::FJRaise, OpKind::JSingle,
                     OpKind::UShift, OpKind::VRaise})
        if (op_kind_name(k) == s) return k;
    return std::nullopt;
}

struct DoubleCosetOp {
    OpKind kind;
    std::int64_t q;     // the prime (or the index parameter for vraise)
    std::int64_t level; // ambient level N
    std::vector<UpperRep> reps;

    std::string label() const {
        std::ostringstream os;
        os << op_kind_name(kind) << "(q=" << q << ", N=" << level << ")";
        return os.str();
    }
};

inline std::size_t expected_cardinality(OpKind kind, std::int64_t q, std::int64_t N) {
    const std::size_t qq = (std::size_t)q;
    switch (kind) {
        case OpKind::TNQ: {
            std::size_t n = 1 + qq + qq * qq + qq * qq * qq;
            if (N % q == 0) n += qq * qq - 1;
            return n;
        }
        case OpKind::TStarQ: {
            std::size_t n = qq * qq * qq * qq + qq * qq * qq + qq * qq + qq;
            if (N % q == 0)
                n += (qq - 1) * (qq + 1) * (qq + 1) * qq; // the six supplement families
            return n;
        }
        case OpKind::JDiag: return qq * qq * qq + qq * qq;
        case OpKind::FJRaise: return qq + 1;
        case OpKind::JSingle: return 1;
        case OpKind::UShift: return qq;
        case OpKind::VRaise: {
            Integer s = divisor_sigma(1, q);
            return (std::size_t)s.get_ui();
        }
    }
    return 0;
}

namespace detail {

// T_N(q) base list (four families) and the q | N supplement.
inline void tnq_reps(std::int64_t q, std::int64_t N, std::vector<UpperRep>& out) {
    const Rational s2(1, q);
    const Rational qq(q);
    out.emplace_back(s2, Mat2::diag(qq, qq), Mat2::zero(), Mat2::identity());
    for (std::int64_t a = 0; a < q; ++a)
        out.emplace_back(s2, Mat2::diag(1, qq), Mat2{Rational(a), 0, 0, 0}, Mat2::diag(qq, 1));
    for (std::int64_t a = 0; a < q; ++a)
        for (std::int64_t b = 0; b < q; ++b)
            for (std::int64_t c = 0; c < q; ++c)
                out.emplace_back(s2, Mat2::identity(),
                                 Mat2{Rational(a), Rational(b), Rational(b), Rational(c, N)},
                                 Mat2::diag(qq, qq));
    for (std::int64_t c = 0; c < q; ++c)
        for (std::int64_t d = 0; d < q; ++d)
            out.emplace_back(s2, Mat2{qq, 0, Rational(-d), 1},
                             Mat2{0, 0, 0, Rational(c, N)}, Mat2{1, Rational(d), 0, qq});
    if (N % q == 0) {
        const Rational s2q2(1, q * q);
        for (std::int64_t b = 0; b < q; ++b)
            for (std::int64_t d = 0; d < q; ++d) {
                if (b == 0 && d == 0) continue;
                out.emplace_back(s2q2, Mat2{qq, 0, Rational(-d), qq},
                                 Mat2{0, Rational(b), Rational(b), 0}, Mat2{qq, Rational(d), 0, qq});
            }
    }
}

// T*_N(q) base list (six families).  jdiag_only restricts the output to the
// three families forming the Jacobi double coset of diag(1, q, q^2, q)/q.
inline void tstar_base_reps(std::int64_t q, std::int64_t N, bool jdiag_only,
                            std::vector<UpperRep>& out) {
    const Rational s2(1, q * q);
    const Rational qq(q), q2(q * q);
    if (!jdiag_only)
        out.emplace_back(s2, Mat2::diag(qq, q2), Mat2::zero(), Mat2::diag(qq, 1));
    for (std::int64_t d = 0; d < q; ++d)
        out.emplace_back(s2, Mat2{q2, 0, Rational(-q * d), qq}, Mat2::zero(),
                         Mat2{1, Rational(d), 0, qq});
    for (std::int64_t a = 0; a < q * q; ++a)
        for (std::int64_t b = 0; b < q; ++b)
            out.emplace_back(s2, Mat2::diag(1, qq),
                             Mat2{Rational(a), Rational(b), Rational(q * b), 0}, Mat2::diag(q2, qq));
    for (std::int64_t u = 1; u < q; ++u)
        for (std::int64_t b = 0; b < q; ++b)
            out.emplace_back(s2, Mat2::diag(qq, qq),
                             Mat2{Rational(u), Rational(u * b), Rational(u * b), Rational(u * b * b)},
                             Mat2::diag(qq, qq));
    if (jdiag_only) return;
    for (std::int64_t b = 0; b < q; ++b)
        for (std::int64_t d = 0; d < q; ++d)
            for (std::int64_t c = 0; c < q * q; ++c)
                out.emplace_back(s2, Mat2{qq, 0, Rational(-d), 1},
                                 Mat2{0, Rational(q * b), Rational(b), Rational(c, N)},
                                 Mat2{qq, Rational(q * d), 0, q2});
    for (std::int64_t u = 1; u < q; ++u)
        out.emplace_back(s2, Mat2::diag(qq, qq), Mat2{0, 0, 0, Rational(u, N)}, Mat2::diag(qq, qq));
}

// T*_N(q) supplement for q | N (six more families with scalar 1/q or
// 1/(q sqrt(q))).
inline void tstar_ramified_reps(std::int64_t q, std::int64_t N, std::vector<UpperRep>& out) {
    const Rational s2(1, q * q), s3(1, q * q * q);
    const Rational qq(q), q2(q * q);
    for (std::int64_t b = 1; b < q; ++b)
        for (std::int64_t c = 1; c < q; ++c)
            out.emplace_back(s2, Mat2::diag(qq, qq),
                             Mat2{0, Rational(b), Rational(b), Rational(c, N)}, Mat2::diag(qq, qq));
    for (std::int64_t b = 0; b < q; ++b)
        for (std::int64_t c = 1; c < q; ++c)
            for (std::int64_t d = 1; d < q; ++d)
                out.emplace_back(s2, Mat2{qq, 0, Rational(-d), qq},
                                 Mat2{0, Rational(b), Rational(b), Rational(c, N)},
                                 Mat2{qq, Rational(d), 0, qq});
    for (std::int64_t d = 1; d < q; ++d)
        out.emplace_back(s3, Mat2{q2, 0, Rational(-q * d), q2}, Mat2::zero(),
                         Mat2{qq, Rational(d), 0, qq});
    for (std::int64_t a = 0; a < q; ++a)
        for (std::int64_t b = 1; b < q; ++b)
            out.emplace_back(s3, Mat2::diag(qq, q2),
                             Mat2{Rational(q * a), Rational(b), Rational(q * b), 0},
                             Mat2::diag(q2, qq));
    for (std::int64_t b = 1; b < q; ++b)
        for (std::int64_t c = 0; c < q; ++c)
            for (std::int64_t d = 0; d < q; ++d)
                out.emplace_back(s3, Mat2{q2, 0, Rational(-q * d), qq},
                                 Mat2{0, Rational(q * b), Rational(b), Rational(b * d) + Rational(q * c, N)},
                                 Mat2{qq, Rational(q * d), 0, q2});
    for (std::int64_t a = 0; a < q; ++a)
        for (std::int64_t b = 0; b < q; ++b)
            for (std::int64_t c = 0; c < q; ++c)
                for (std::int64_t d = 1; d < q; ++d)
                    out.emplace_back(s3, Mat2{qq, 0, Rational(-d), qq},
                                     Mat2{Rational(q * a), Rational(q * b),
                                          Rational(-a * d + q * b), Rational(b * d) + Rational(q * c, N)},
                                     Mat2{q2, Rational(q * d), 0, q2});
}

} // namespace detail

inline DoubleCosetOp reps_for(OpKind kind, std::int64_t q, std::int64_t N) {
    if (N < 1 || !is_squarefree(N)) throw std::domain_error("reps_for: level must be squarefree");
    const bool needs_prime = kind != OpKind::VRaise;
    if (needs_prime && !is_prime(q)) throw std::domain_error("reps_for: q must be prime");
    DoubleCosetOp op{kind, q, N, {}};
    switch (kind) {
        case OpKind::TNQ:
            detail::tnq_reps(q, N, op.reps);
            break;
        case OpKind::TStarQ:
            detail::tstar_base_reps(q, N, false, op.reps);
            if (N % q == 0) detail::tstar_ramified_reps(q, N, op.reps);
            break;
        case OpKind::JDiag:
            // the coset structure of this double coset is level-independent
            // (the eigenvalue identity on Eisenstein series needs q coprime
            // to N, but the operator itself does not)
            detail::tstar_base_reps(q, N, true, op.reps);
            break;
        case OpKind::FJRaise: {
            const Rational s2(1, q), qq(q);
            op.reps.emplace_back(s2, Mat2::diag(qq, qq), Mat2::zero(), Mat2::identity());
            for (std::int64_t j = 0; j < q; ++j)
                op.reps.emplace_back(s2, Mat2::diag(1, qq), Mat2{Rational(j), 0, 0, 0},
                                     Mat2::diag(qq, 1));
            break;
        }
        case OpKind::JSingle:
            op.reps.emplace_back(Rational(1, q * q), Mat2::diag(Rational(q), Rational(q * q)),
                                 Mat2::zero(), Mat2::diag(Rational(q), 1));
            break;
        case OpKind::UShift:
            for (std::int64_t u = 0; u < q; ++u)
                op.reps.emplace_back(Rational(1), Mat2::identity(),
                                     Mat2{0, 0, 0, Rational(u, q * N)}, Mat2::identity());
            break;
        case OpKind::VRaise: {
            if (q < 1 || !is_squarefree(q))
                throw std::domain_error("reps_for: vraise index must be positive squarefree");
            const Rational s2(1, q), ql(q);
            for (std::int64_t a : divisors(q)) {
                const std::int64_t d = q / a;
                for (std::int64_t b = 0; b < d; ++b)
                    op.reps.emplace_back(s2, Mat2{Rational(a), 0, 0, ql},
                                         Mat2{Rational(b), 0, 0, 0}, Mat2{Rational(d), 0, 0, 1});
            }
            break;
        }
    }
    if (op.reps.size() != expected_cardinality(kind, q, N))
        throw std::logic_error("reps_for: cardinality mismatch for " + op.label());
    return op;
}

// ---------------------------------------------------------------------------
// the engine
// ---------------------------------------------------------------------------

enum class EngineErrorKind { FractionalResidue, IrrationalTotal, EmptyOutputBox };

class EngineError : public std::runtime_error {
public:
    EngineError(EngineErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    EngineErrorKind kind() const { return kind_; }

private:
    EngineErrorKind kind_;
};

struct EngineStats {
    std::int64_t fractional_keys = 0;   // non-integral image indices that had to cancel
    std::int64_t integral_keys = 0;     // integral image indices accumulated
    std::int64_t cancellation_failures = 0;
    std::int64_t rationality_failures = 0;

    void merge(const EngineStats& o) {
        fractional_keys += o.fractional_keys;
        integral_keys += o.integral_keys;
        cancellation_failures += o.cancellation_failures;
        rationality_failures += o.rationality_failures;
    }
};

struct ApplyResult {
    ParamodularExpansion out;
    EngineStats stats;
};

namespace detail {

// The index image, the preimage and the phase exponent are all linear in
// the integer triple (n, r, m), so each representative contributes three
// integer linear maps (v -> M v / den).  Everything in the per-coefficient
// hot loop is then 64-bit integer arithmetic; rationals only appear when a
// phase or a coefficient is actually accumulated.
struct ZLinMap {
    std::array<std::array<std::int64_t, 3>, 3> m{};
    std::int64_t den = 1;

    std::array<std::int64_t, 3> apply_num(const std::array<std::int64_t, 3>& v) const {
        return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
                m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
                m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
    }
};

struct ZLinForm {
    std::array<std::int64_t, 3> c{};
    std::int64_t den = 1;

    std::int64_t apply_num(const std::array<std::int64_t, 3>& v) const {
        return c[0] * v[0] + c[1] * v[1] + c[2] * v[2];
    }
};

inline std::int64_t to_i64(const Integer& z) {
    if (!z.fits_slong_p()) throw std::overflow_error("hecke engine: integer overflow");
    return z.get_si();
}

// evaluate a Rational-linear triple map on the index basis and scale to
// a common integer denominator
template <typename Fn>
ZLinMap make_zlinmap(Fn&& eval) {
    std::array<std::array<Rational, 3>, 3> q;
    for (int j = 0; j < 3; ++j) {
        std::array<std::int64_t, 3> basis{0, 0, 0};
        basis[j] = 1;
        const auto col = eval(basis);
        for (int i = 0; i < 3; ++i) q[i][j] = col[i];
    }
    Integer den(1);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) den = lcm(den, q[i][j].den());
    ZLinMap z;
    z.den = to_i64(den);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) z.m[i][j] = to_i64((q[i][j] * Rational(den)).num());
    return z;
}

inline Mat2 index_matrix(const std::array<std::int64_t, 3>& v, std::int64_t N) {
    return Mat2{Rational(v[0]), Rational(v[1], 2), Rational(v[1], 2), Rational(v[2] * N)};
}

inline std::array<Rational, 3> matrix_index(const Mat2& t2, std::int64_t N) {
    return {t2.a, Rational(2) * t2.b, t2.d / Rational(N)};
}

} // namespace detail

inline ApplyResult apply_op(const ParamodularExpansion& f, const DoubleCosetOp& op) {
    if (f.level() != op.level)
        throw std::domain_error("apply_op: operator level does not match the expansion");
    const int k = f.weight();
    const std::int64_t N = f.level();

    // per-representative data: weight factor, forward/preimage index maps,
    // phase linear form
    const std::size_t R = op.reps.size();
    std::vector<Rational> weight(R, Rational(0));
    std::vector<detail::ZLinMap> fwd(R), pre(R);
    std::vector<detail::ZLinForm> phase(R);
    for (std::size_t i = 0; i < R; ++i) {
        const UpperRep& rep = op.reps[i];
        weight[i] = rep.weight_factor(k);
        const Mat2 at = rep.A.transpose();
        const Mat2 ainv = rep.A.inverse();
        const Mat2 ainv_t = ainv.transpose();
        fwd[i] = detail::make_zlinmap([&](const std::array<std::int64_t, 3>& v) {
            return detail::matrix_index(rep.s2 * (at * detail::index_matrix(v, N) * rep.A), N);
        });
        pre[i] = detail::make_zlinmap([&](const std::array<std::int64_t, 3>& v) {
            return detail::matrix_index(rep.s2.inv() * (ainv_t * detail::index_matrix(v, N) * ainv), N);
        });
        Integer pden(1);
        std::array<Rational, 3> prow;
        for (int j = 0; j < 3; ++j) {
            std::array<std::int64_t, 3> basis{0, 0, 0};
            basis[j] = 1;
            prow[j] = rep.s2 * (at * detail::index_matrix(basis, N) * rep.B).trace();
            pden = lcm(pden, prow[j].den());
        }
        phase[i].den = detail::to_i64(pden);
        for (int j = 0; j < 3; ++j) phase[i].c[j] = detail::to_i64((prow[j] * Rational(pden)).num());
    }
    std::int64_t key_den = 1, phase_den = 1;
    for (std::size_t i = 0; i < R; ++i) {
        key_den = std::lcm(key_den, fwd[i].den);
        phase_den = std::lcm(phase_den, phase[i].den);
    }

    // forward accumulation: image keys scaled by key_den, phases as residues
    // modulo phase_den
    std::map<std::array<std::int64_t, 3>, std::map<std::int64_t, Rational>> acc;
    for (const auto& [t, a] : f.coeffs()) {
        const std::array<std::int64_t, 3> v{t.n, t.r, t.m};
        for (std::size_t i = 0; i < R; ++i) {
            auto key = fwd[i].apply_num(v);
            const std::int64_t kscale = key_den / fwd[i].den;
            for (auto& x : key) x *= kscale;
            std::int64_t res = (phase[i].apply_num(v) * (phase_den / phase[i].den)) % phase_den;
            if (res < 0) res += phase_den;
            auto& slot = acc[key][res];
            slot += weight[i] * a;
        }
    }

    // exactness assertions and collection of the integral part
    EngineStats stats;
    std::map<FourierIndex, Rational, FourierIndexLess> integral;
    for (const auto& [key, phases] : acc) {
        PhaseSum ps;
        for (const auto& [res, c] : phases) ps.add(Rational(res, phase_den), c);
        const auto val = ps.rational_value();
        const bool is_integral =
            key[0] % key_den == 0 && key[1] % key_den == 0 && key[2] % key_den == 0;
        if (!is_integral) {
            ++stats.fractional_keys;
            if (!val) {
                ++stats.rationality_failures;
                throw EngineError(EngineErrorKind::IrrationalTotal,
                                  "apply_op: irrational total at fractional index under " + op.label());
            }
            if (!val->is_zero()) {
                ++stats.cancellation_failures;
                throw EngineError(EngineErrorKind::FractionalResidue,
                                  "apply_op: nonzero residue at fractional index under " + op.label());
            }
            continue;
        }
        ++stats.integral_keys;
        if (!val) {
            ++stats.rationality_failures;
            throw EngineError(EngineErrorKind::IrrationalTotal,
                              "apply_op: irrational coefficient total under " + op.label());
        }
        if (!val->is_zero())
            integral[{key[0] / key_den, key[1] / key_den, key[2] / key_den}] = *val;
    }

    // output box: a cell (n, m) is determined when, for every representative
    // and every r, the preimage index is either structurally zero or inside
    // the input box
    auto cell_determined = [&](std::int64_t n, std::int64_t m) {
        const std::int64_t rb = isqrt64(4 * n * m * N);
        for (std::int64_t r = -rb; r <= rb; ++r) {
            const std::array<std::int64_t, 3> v{n, r, m};
            for (std::size_t i = 0; i < R; ++i) {
                const auto u = pre[i].apply_num(v);
                const std::int64_t den = pre[i].den;
                if (u[0] % den != 0 || u[1] % den != 0 || u[2] % den != 0) continue;
                const FourierIndex p{u[0] / den, u[1] / den, u[2] / den};
                if (!f.index_valid(p)) continue;
                if (!f.in_box(p)) return false;
            }
        }
        return true;
    };
    const std::int64_t scale = (op.kind == OpKind::VRaise) ? op.q : op.q * op.q * op.q;
    const std::int64_t cap = 2 + scale * (std::max(f.box().n_max, f.box().m_max) + 1);
    const auto box = largest_determined_box(cap, cell_determined);
    if (!box)
        throw EngineError(EngineErrorKind::EmptyOutputBox, "apply_op: empty output box under " + op.label());

    ParamodularExpansion out(k, N, *box);
    for (const auto& [t, v] : integral)
        if (out.in_box(t)) out.set_coeff(t, v);
    return {out, stats};
}

// ---------------------------------------------------------------------------
// eigenvalue extraction
// ---------------------------------------------------------------------------

struct EigenResult {
    std::optional<Rational> lambda;        // set on success
    std::optional<FourierIndex> witness;   // first index violating proportionality
    EngineStats stats;
};

inline EigenResult eigenvalue_of(const ParamodularExpansion& f, const DoubleCosetOp& op) {
    auto [g, stats] = apply_op(f, op);
    const ExpansionBox common{std::min(f.box().n_max, g.box().n_max),
                              std::min(f.box().m_max, g.box().m_max)};
    // candidate from the first nonzero coefficient of f on the common box
    std::optional<Rational> lambda;
    ParamodularExpansion fc = f.truncated(common);
    for (const auto& [t, v] : fc.coeffs()) {
        lambda = g.coeff(t) / v;
        break;
    }
    if (!lambda)
        throw std::domain_error("eigenvalue_of: input vanishes on the output box of " + op.label());
    EigenResult res;
    res.stats = stats;
    FourierIndex bad;
    const ParamodularExpansion lf = fc.scaled(*lambda);
    if (!ParamodularExpansion::agree_on_common_box(lf, g.truncated(common), &bad)) {
        res.witness = bad;
        return res;
    }
    res.lambda = lambda;
    return res;
}

// ---------------------------------------------------------------------------
// elliptic Hecke operators through the two SL2 factors
// ---------------------------------------------------------------------------

// Coefficient families of f | T_p^(up) and f | T_p^(down) on the rescaled
// lattice, with the common prefactor p^{k/2 - 1} dropped from both (recorded
// in the metadata).  Their equality is the coefficient-level form of the
// Maass condition at p.
struct RescaledFamily {
    std::int64_t p = 2;
    Rational dropped_prefactor; // p^{k/2 - 1}
    std::int64_t n_max = 0, m_max = 0, level = 1;
    std::map<FourierIndex, Rational, FourierIndexLess> values; // zero entries omitted

    Rational at(const FourierIndex& t) const {
        auto it = values.find(t);
        return it == values.end() ? Rational(0) : it->second;
    }
};

namespace detail {
inline std::optional<Rational> updown_term(const ParamodularExpansion& f, std::int64_t p, bool up,
                                           const FourierIndex& t) {
    const int k = f.weight();
    // up:   alpha(p n, r, m)   + p^{k-1} alpha(n/p, r/p, m)
    // down: alpha(n, r, p m)   + p^{k-1} alpha(n, r/p, m/p)
    const auto first = up ? f.coeff_or_zero({p * t.n, t.r, t.m}) : f.coeff_or_zero({t.n, t.r, p * t.m});
    if (!first) return std::nullopt;
    Rational acc = *first;
    const bool div_r = t.r % p == 0;
    const bool div_other = up ? (t.n % p == 0) : (t.m % p == 0);
    if (div_r && div_other) {
        const auto second = up ? f.coeff_or_zero({t.n / p, t.r / p, t.m})
                               : f.coeff_or_zero({t.n, t.r / p, t.m / p});
        if (!second) return std::nullopt;
        acc += Rational(ipow(p, (unsigned long)(k - 1))) * *second;
    }
    return acc;
}

inline RescaledFamily updown_family(const ParamodularExpansion& f, std::int64_t p, bool up) {
    if (!is_prime(p)) throw std::domain_error("t_up/t_down: p must be prime");
    RescaledFamily fam;
    fam.p = p;
    fam.level = f.level();
    fam.dropped_prefactor = Rational(ipow(p, (unsigned long)(f.weight() / 2 - 1)));
    fam.n_max = up ? f.box().n_max / p : f.box().n_max;
    fam.m_max = up ? f.box().m_max : f.box().m_max / p;
    for (std::int64_t n = 0; n <= fam.n_max; ++n)
        for (std::int64_t m = 0; m <= fam.m_max; ++m) {
            const std::int64_t rb = isqrt64(4 * n * m * f.level() * p);
            for (std::int64_t r = -rb; r <= rb; ++r) {
                const auto v = updown_term(f, p, up, {n, r, m});
                if (!v)
                    throw std::logic_error("updown_family: box bookkeeping error");
                if (!v->is_zero()) fam.values[{n, r, m}] = *v;
            }
        }
    return fam;
}
} // namespace detail

inline RescaledFamily t_up(const ParamodularExpansion& f, std::int64_t p) {
    return detail::updown_family(f, p, true);
}
inline RescaledFamily t_down(const ParamodularExpansion& f, std::int64_t p) {
    return detail::updown_family(f, p, false);
}

// exact equality on the common domain; witness is the first differing index
inline bool families_agree(const RescaledFamily& x, const RescaledFamily& y,
                           FourierIndex* witness = nullptr) {
    if (x.p != y.p || x.level != y.level) return false;
    const std::int64_t n_max = std::min(x.n_max, y.n_max), m_max = std::min(x.m_max, y.m_max);
    for (std::int64_t m = 0; m <= m_max; ++m)
        for (std::int64_t n = 0; n <= n_max; ++n) {
            const std::int64_t rb = isqrt64(4 * n * m * x.level * x.p);
            for (std::int64_t r = -rb; r <= rb; ++r) {
                const FourierIndex t{n, r, m};
                if (!(x.at(t) == y.at(t))) {
                    if (witness) *witness = t;
                    return false;
                }
            }
        }
    return true;
}

// ---------------------------------------------------------------------------
// coset sanity
// ---------------------------------------------------------------------------

struct SanityReport {
    bool pass = true;
    std::size_t cardinality = 0;
    std::vector<std::string> violations;
};

// Pairwise left-inequivalence modulo the Jacobi group (R_i R_j^{-1} must not
// be a member) plus the cardinality bookkeeping.  With check_closure the
// full permutation test runs as well: right multiplication by each generator
// of the Jacobi group must permute the cosets, which pins down the parameter
// ranges of the table and is the arbiter for the ramified supplements.
inline SanityReport coset_sanity(const DoubleCosetOp& op, bool check_closure = false) {
    SanityReport rep;
    rep.cardinality = op.reps.size();
    if (op.reps.size() != expected_cardinality(op.kind, op.q, op.level)) {
        rep.pass = false;
        rep.violations.push_back("cardinality mismatch");
    }
    std::vector<ScaledMatrix> mats;
    std::vector<ScaledMatrix> inverses;
    mats.reserve(op.reps.size());
    for (const UpperRep& r : op.reps) mats.push_back(r.to_scaled());
    for (const ScaledMatrix& m : mats) inverses.push_back(m.inverse());
    const std::int64_t N = op.level;
    for (std::size_t i = 0; i < mats.size() && rep.pass; ++i)
        for (std::size_t j = i + 1; j < mats.size(); ++j) {
            if (mats[i].scale != mats[j].scale) continue; // different sqrt class
            if (is_jacobi_member(mats[i] * inverses[j], N)) {
                rep.pass = false;
                rep.violations.push_back("representatives " + std::to_string(i) + " and " +
                                         std::to_string(j) + " are left-equivalent");
                break;
            }
        }
    if (check_closure && rep.pass) {
        // generators of the Jacobi group: embedded SL2 generators, the three
        // Heisenberg translations, and the sign flip
        auto emb_sl2 = [](std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d) {
            Mat4 m = Mat4::identity();
            m.e[0][0] = a; m.e[0][2] = b; m.e[2][0] = c; m.e[2][2] = d;
            return m;
        };
        std::vector<Mat4> gens;
        gens.push_back(emb_sl2(1, 1, 0, 1));
        gens.push_back(emb_sl2(0, -1, 1, 0));
        Mat4 hl = Mat4::identity();
        hl.e[1][0] = 1; hl.e[2][3] = -1;
        gens.push_back(hl);
        Mat4 hm = Mat4::identity();
        hm.e[0][3] = 1; hm.e[1][2] = 1;
        gens.push_back(hm);
        Mat4 hk = Mat4::identity();
        hk.e[1][3] = Rational(1, N);
        gens.push_back(hk);
        Mat4 sg = Mat4::identity();
        sg.e[1][1] = -1; sg.e[3][3] = -1;
        gens.push_back(sg);
        for (const Mat4& g : gens) {
            if (!is_jacobi_member(g, N)) {
                rep.pass = false;
                rep.violations.push_back("generator not in the Jacobi group");
                break;
            }
            std::vector<bool> hit(mats.size(), false);
            const ScaledMatrix sg4 = ScaledMatrix::rational(g);
            for (std::size_t i = 0; i < mats.size(); ++i) {
                const ScaledMatrix x = mats[i] * sg4;
                std::size_t matches = 0, last = 0;
                for (std::size_t j = 0; j < mats.size(); ++j) {
                    if (x.scale != mats[j].scale) continue;
                    if (is_jacobi_member(x * inverses[j], N)) {
                        ++matches;
                        last = j;
                    }
                }
                if (matches != 1) {
                    rep.pass = false;
                    rep.violations.push_back("closure fails: rep " + std::to_string(i) +
                                             " maps to " + std::to_string(matches) + " cosets");
                    break;
                }
                if (hit[last]) {
                    rep.pass = false;
                    rep.violations.push_back("closure not a permutation at rep " + std::to_string(last));
                    break;
                }
                hit[last] = true;
            }
            if (!rep.pass) break;
        }
    }
    return rep;
}

} // namespace pmf
