// Sparse truncated Fourier expansions of paramodular forms of degree 2 and
// squarefree level N, together with the structural operators that act purely
// on indices: Fourier-Jacobi slicing, the Fricke involutions V_d, the Siegel
// phi operator, the cusp test, and membership tests for the paramodular
// group and its Jacobi subgroup.
//
// A Fourier index (n, r, m) stands for the half-integral matrix
//   T = [[n, r/2], [r/2, m N]],   4 n m N - r^2 >= 0,
// with the level N carried by the expansion, never by the index.  The box
// (n_max, m_max) contains exactly the indices with n <= n_max, m <= m_max;
// inside the box an absent coefficient is zero, outside the box nothing is
// known.

#pragma once

#include "pmf/check_report.hpp"
#include "pmf/jacobi.hpp"
#include "pmf/matrix.hpp"
#include "pmf/ntheory.hpp"
#include "pmf/rational.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>

namespace pmf {

struct FourierIndex {
    std::int64_t n = 0;
    std::int64_t r = 0;
    std::int64_t m = 0;

    std::int64_t disc(std::int64_t level) const { return 4 * n * m * level - r * r; }

    std::string str() const {
        std::ostringstream os;
        os << "(" << n << "," << r << "," << m << ")";
        return os.str();
    }
};

// deterministic (m, n, r) ordering; matches the serialization order
struct FourierIndexLess {
    bool operator()(const FourierIndex& a, const FourierIndex& b) const {
        if (a.m != b.m) return a.m < b.m;
        if (a.n != b.n) return a.n < b.n;
        return a.r < b.r;
    }
};

inline bool operator==(const FourierIndex& a, const FourierIndex& b) {
    return a.n == b.n && a.r == b.r && a.m == b.m;
}

struct ExpansionBox {
    std::int64_t n_max = 0;
    std::int64_t m_max = 0;
    friend bool operator==(const ExpansionBox&, const ExpansionBox&) = default;
};

class ParamodularExpansion {
public:
    ParamodularExpansion(int weight, std::int64_t level, ExpansionBox box)
        : weight_(weight), level_(level), box_(box) {
        if (weight % 2 != 0) throw std::domain_error("ParamodularExpansion: weight must be even");
        if (level < 1 || !is_squarefree(level))
            throw std::domain_error("ParamodularExpansion: level must be positive and squarefree");
        if (box.n_max < 0 || box.m_max < 0)
            throw std::domain_error("ParamodularExpansion: box must be nonnegative");
    }

    int weight() const { return weight_; }
    std::int64_t level() const { return level_; }
    const ExpansionBox& box() const { return box_; }

    bool index_valid(const FourierIndex& t) const {
        return t.n >= 0 && t.m >= 0 && t.disc(level_) >= 0;
    }
    bool in_box(const FourierIndex& t) const {
        return index_valid(t) && t.n <= box_.n_max && t.m <= box_.m_max;
    }

    Rational coeff(const FourierIndex& t) const {
        if (!in_box(t)) throw std::out_of_range("ParamodularExpansion: index outside box " + t.str());
        auto it = coeffs_.find(t);
        return it == coeffs_.end() ? Rational(0) : it->second;
    }

    // 0 when the index is invalid as a Fourier index (negative entries or
    // indefinite), the stored value when inside the box, nullopt when the
    // index is valid but outside the box (unknown).
    std::optional<Rational> coeff_or_zero(const FourierIndex& t) const {
        if (!index_valid(t)) return Rational(0);
        if (t.n > box_.n_max || t.m > box_.m_max) return std::nullopt;
        auto it = coeffs_.find(t);
        return it == coeffs_.end() ? Rational(0) : it->second;
    }

    void set_coeff(const FourierIndex& t, const Rational& v) {
        if (!in_box(t)) throw std::out_of_range("ParamodularExpansion: index outside box " + t.str());
        if (v.is_zero())
            coeffs_.erase(t);
        else
            coeffs_[t] = v;
    }

    const std::map<FourierIndex, Rational, FourierIndexLess>& coeffs() const { return coeffs_; }

    ParamodularExpansion scaled(const Rational& s) const {
        ParamodularExpansion out(weight_, level_, box_);
        if (s.is_zero()) return out;
        for (const auto& [t, v] : coeffs_) out.coeffs_[t] = s * v;
        return out;
    }

    ParamodularExpansion truncated(ExpansionBox box) const {
        if (box.n_max > box_.n_max || box.m_max > box_.m_max)
            throw std::domain_error("ParamodularExpansion: cannot grow the box");
        ParamodularExpansion out(weight_, level_, box);
        for (const auto& [t, v] : coeffs_)
            if (t.n <= box.n_max && t.m <= box.m_max) out.coeffs_[t] = v;
        return out;
    }

    friend ParamodularExpansion operator+(const ParamodularExpansion& x, const ParamodularExpansion& y) {
        if (x.weight_ != y.weight_ || x.level_ != y.level_)
            throw std::domain_error("ParamodularExpansion: weight/level mismatch in sum");
        ParamodularExpansion out(x.weight_, x.level_,
                                 {std::min(x.box_.n_max, y.box_.n_max), std::min(x.box_.m_max, y.box_.m_max)});
        for (const auto& [t, v] : x.coeffs_)
            if (out.in_box(t)) out.coeffs_[t] = v;
        for (const auto& [t, v] : y.coeffs_) {
            if (!out.in_box(t)) continue;
            auto [it, fresh] = out.coeffs_.try_emplace(t, v);
            if (!fresh) it->second += v;
            if (it->second.is_zero()) out.coeffs_.erase(it);
        }
        return out;
    }

    // equality of the stored data (same box, same nonzero coefficients)
    bool operator==(const ParamodularExpansion& o) const {
        return weight_ == o.weight_ && level_ == o.level_ && box_ == o.box_ && coeffs_ == o.coeffs_;
    }

    // coefficientwise equality on the common box
    static bool agree_on_common_box(const ParamodularExpansion& x, const ParamodularExpansion& y,
                                    FourierIndex* first_mismatch = nullptr) {
        if (x.weight_ != y.weight_ || x.level_ != y.level_) return false;
        const ExpansionBox common{std::min(x.box_.n_max, y.box_.n_max),
                                  std::min(x.box_.m_max, y.box_.m_max)};
        for (std::int64_t m = 0; m <= common.m_max; ++m)
            for (std::int64_t n = 0; n <= common.n_max; ++n) {
                const std::int64_t rb = isqrt64(4 * n * m * x.level_);
                for (std::int64_t r = -rb; r <= rb; ++r) {
                    const FourierIndex t{n, r, m};
                    if (!x.index_valid(t)) continue;
                    if (!(x.coeff(t) == y.coeff(t))) {
                        if (first_mismatch) *first_mismatch = t;
                        return false;
                    }
                }
            }
        return true;
    }

private:
    int weight_;
    std::int64_t level_;
    ExpansionBox box_;
    std::map<FourierIndex, Rational, FourierIndexLess> coeffs_;
};

// iterate all valid indices in the box of f, in (m, n, r) order
template <typename Fn>
void for_each_index(const ParamodularExpansion& f, Fn&& fn) {
    for (std::int64_t m = 0; m <= f.box().m_max; ++m)
        for (std::int64_t n = 0; n <= f.box().n_max; ++n) {
            const std::int64_t rb = isqrt64(4 * n * m * f.level());
            for (std::int64_t r = -rb; r <= rb; ++r) fn(FourierIndex{n, r, m});
        }
}

// ---------------------------------------------------------------------------
// Fourier-Jacobi slicing and the Siegel phi operator
// ---------------------------------------------------------------------------

// m-th Fourier-Jacobi coefficient, a Jacobi expansion of index m N.  The
// m = 0 slice is the degenerate index-0 expansion carrying only r = 0.
inline JacobiExpansion fj_slice(const ParamodularExpansion& f, std::int64_t m) {
    if (m < 0 || m > f.box().m_max) throw std::out_of_range("fj_slice: m outside box");
    JacobiExpansion phi(f.weight(), m * f.level(), f.box().n_max);
    for (std::int64_t n = 0; n <= f.box().n_max; ++n) {
        const std::int64_t rb = isqrt64(4 * n * m * f.level());
        for (std::int64_t r = -rb; r <= rb; ++r) {
            const FourierIndex t{n, r, m};
            if (!f.index_valid(t)) continue;
            const Rational v = f.coeff(t);
            if (!v.is_zero()) phi.set_coeff(n, r, v);
        }
    }
    return phi;
}

// embed a Jacobi expansion of index m0 * N as the m0-th slice of an
// otherwise empty paramodular expansion of level N
inline ParamodularExpansion embed_jacobi(const JacobiExpansion& phi, std::int64_t level) {
    if (level < 1 || phi.index() % level != 0)
        throw std::domain_error("embed_jacobi: index must be a multiple of the level");
    const std::int64_t m0 = phi.index() / level;
    ParamodularExpansion f(phi.weight(), level, {phi.n_max(), m0});
    for (const auto& [key, v] : phi.coeffs()) f.set_coeff({key.n, key.r, m0}, v);
    return f;
}

// f | phi: the elliptic expansion n -> alpha_f(n, 0, 0)
inline std::vector<Rational> phi_operator(const ParamodularExpansion& f) {
    std::vector<Rational> a;
    a.reserve(f.box().n_max + 1);
    for (std::int64_t n = 0; n <= f.box().n_max; ++n) a.push_back(f.coeff({n, 0, 0}));
    return a;
}

// ---------------------------------------------------------------------------
// cusp test
// ---------------------------------------------------------------------------

struct CuspVerdict {
    bool is_cusp = true;
    std::optional<FourierIndex> witness;       // first nonzero singular coefficient
    bool phi_image_vanishes = true;            // the alpha(n,0,0) family alone
};

// A form in the extended group is a cusp form iff alpha(n,0,0) = 0 for all n;
// we scan every singular index 4 n m N = r^2 in the box regardless, so a
// nonzero singular coefficient anywhere is reported as a counterexample.
// The flag only asserts the caller believes f extends; it does not change
// the scan.
inline CuspVerdict is_cusp(const ParamodularExpansion& f, bool assume_extended_invariance = false) {
    (void)assume_extended_invariance;
    CuspVerdict v;
    for_each_index(f, [&](const FourierIndex& t) {
        if (t.disc(f.level()) != 0) return;
        if (f.coeff(t).is_zero()) return;
        if (t.r == 0 && t.m == 0) v.phi_image_vanishes = false;
        if (v.is_cusp) {
            v.is_cusp = false;
            v.witness = t;
        }
    });
    return v;
}

// ---------------------------------------------------------------------------
// group membership patterns
// ---------------------------------------------------------------------------

// Sigma_N: symplectic and integral with the pattern
//   [[ Z, NZ, Z,   Z  ],
//    [ Z,  Z, Z, (1/N)Z],
//    [ Z, NZ, Z,   Z  ],
//    [NZ, NZ, NZ,  Z  ]]
inline bool is_paramodular_member(const Mat4& m, std::int64_t N) {
    if (!is_symplectic(m)) return false;
    auto divides = [](const Rational& x, std::int64_t q) {
        // x in q Z
        return (x / Rational(q)).is_integer();
    };
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const Rational& x = m.e[i][j];
            if (i == 1 && j == 3) {
                if (!(x * Rational(N)).is_integer()) return false;
            } else if ((j == 1 && (i == 0 || i == 2)) || (i == 3 && j != 3)) {
                if (!divides(x, N)) return false;
            } else {
                if (!x.is_integer()) return false;
            }
        }
    return true;
}

// Jacobi subgroup: member of Sigma_N with column 2 = (0, e, 0, 0)^t and
// row 4 = (0, 0, 0, e'), e, e' in {+-1}
inline bool is_jacobi_member(const Mat4& m, std::int64_t N) {
    if (!is_paramodular_member(m, N)) return false;
    if (!m.e[0][1].is_zero() || !m.e[2][1].is_zero()) return false;
    if (!m.e[3][0].is_zero() || !m.e[3][1].is_zero() || !m.e[3][2].is_zero()) return false;
    auto pm1 = [](const Rational& x) { return x == Rational(1) || x == Rational(-1); };
    return pm1(m.e[1][1]) && pm1(m.e[3][3]);
}

inline bool is_jacobi_member(const ScaledMatrix& m, std::int64_t N) {
    return m.is_rational() && is_jacobi_member(m.rational_matrix(), N);
}
inline bool is_paramodular_member(const ScaledMatrix& m, std::int64_t N) {
    return m.is_rational() && is_paramodular_member(m.rational_matrix(), N);
}

// ---------------------------------------------------------------------------
// Fricke involutions
// ---------------------------------------------------------------------------

struct FrickeMatrix {
    std::int64_t level = 1; // N
    std::int64_t d = 1;     // divisor of N
    std::int64_t alpha = 1, beta = 0, gamma = 0, delta = 1;

    // F_d = [[V_d^{-1}, 0], [0, V_d^tr]] as an element of Sp_2(R), where
    // V_d = (1/sqrt(d)) [[alpha d, beta N], [gamma, delta d]]
    ScaledMatrix fd() const {
        const Mat2 vinv{Rational(delta * d), Rational(-beta * level), Rational(-gamma), Rational(alpha * d)};
        const Mat2 vtr{Rational(alpha * d), Rational(gamma), Rational(beta * level), Rational(delta * d)};
        return ScaledMatrix(Rational(1, d), Mat4::from_blocks(vinv, Mat2::zero(), Mat2::zero(), vtr));
    }

    // determinant identity alpha delta d - beta gamma N / d = 1
    bool valid() const {
        return level % d == 0 && alpha * delta * d - beta * gamma * (level / d) == 1;
    }
};

// Canonical V_d via the extended gcd of d and N/d (N squarefree makes them
// coprime).  d = 1 gives the identity; d = N gives [[0, N], [-1, 0]].
inline FrickeMatrix fricke_matrix(std::int64_t N, std::int64_t d) {
    if (N < 1 || !is_squarefree(N)) throw std::domain_error("fricke_matrix: level must be squarefree");
    if (d < 1 || N % d != 0) throw std::domain_error("fricke_matrix: d must divide N");
    FrickeMatrix f;
    f.level = N;
    f.d = d;
    if (d == 1) {
        f.alpha = 1; f.beta = 0; f.gamma = 0; f.delta = 1;
        return f;
    }
    if (d == N) {
        f.alpha = 0; f.beta = 1; f.gamma = -1; f.delta = 0;
        return f;
    }
    // smallest nonnegative alpha with alpha d = 1 mod N/d
    const std::int64_t q = N / d;
    std::int64_t alpha = 0;
    while ((alpha * d) % q != 1) ++alpha;
    f.alpha = alpha;
    f.delta = 1;
    f.gamma = -1;
    f.beta = (1 - alpha * d) / q;
    if (!f.valid()) throw std::logic_error("fricke_matrix: construction failed");
    return f;
}

// Index map of the Fricke involution: (n, r, m) with T' = T[V_d^{-1}].
// Computed directly from the representative; preserves gcd(n, r, m) and the
// discriminant 4 n m N - r^2.  For representatives normalized with
// beta = delta = 1 this reduces to the classical closed form
//   [[d, -gamma, gamma^2 N / d], [-2N, alpha d + gamma N/d, -2 alpha gamma N],
//    [N/d, -alpha, alpha^2 d]],
// which is why we do not hard-code that matrix: the canonical V_1 = I, for
// instance, does not have beta = delta = 1.
inline FourierIndex fricke_index_map(const FourierIndex& t, const FrickeMatrix& v) {
    if (!v.valid()) throw std::domain_error("fricke_index_map: invalid Fricke matrix");
    const std::int64_t N = v.level, d = v.d;
    // V_d^{-1} = (1/sqrt(d)) [[delta d, -beta N], [-gamma, alpha d]]
    const Rational sd(1, d);
    const Mat2 vinv{Rational(v.delta * d), Rational(-v.beta * N), Rational(-v.gamma), Rational(v.alpha * d)};
    const Mat2 t2{Rational(t.n), Rational(t.r, 2), Rational(t.r, 2), Rational(t.m * N)};
    const Mat2 img = sd * (vinv.transpose() * t2 * vinv);
    const Rational n = img.a, r = Rational(2) * img.b, mN = img.d;
    const Rational m = mN / Rational(N);
    if (!n.is_integer() || !r.is_integer() || !m.is_integer())
        throw std::logic_error("fricke_index_map: non-integral image for " + t.str());
    FourierIndex out{(std::int64_t)n.num().get_si(), (std::int64_t)r.num().get_si(),
                     (std::int64_t)m.num().get_si()};
    if (out.disc(N) != t.disc(N)) throw std::logic_error("fricke_index_map: discriminant changed");
    return out;
}

// Largest rectangle {n <= n_max, m <= m_max} such that determined(n, m)
// holds pointwise, maximizing coefficient count (ties: larger m, then n).
// determined(n, m) answers whether every coefficient of the (n, ., m) cell
// is computable from the available data; it is queried at most once per
// cell.  Returns nullopt if not even (0, 0) is determined.
template <typename Fn>
std::optional<ExpansionBox> largest_determined_box(std::int64_t cap, Fn&& determined) {
    std::map<std::pair<std::int64_t, std::int64_t>, bool> memo;
    auto det = [&](std::int64_t n, std::int64_t m) {
        auto [it, fresh] = memo.try_emplace({n, m}, false);
        if (fresh) it->second = determined(n, m);
        return it->second;
    };
    std::optional<ExpansionBox> best;
    Integer best_count(-1);
    std::int64_t n_limit = cap; // n_cap(m_cap) is non-increasing in m_cap
    for (std::int64_t m_cap = 0; m_cap <= cap; ++m_cap) {
        std::int64_t n_cap = -1;
        for (std::int64_t n = 0; n <= n_limit; ++n) {
            bool ok = true;
            for (std::int64_t m = 0; m <= m_cap && ok; ++m) ok = det(n, m);
            if (!ok) break;
            n_cap = n;
        }
        if (n_cap < 0) break;
        n_limit = n_cap;
        const Integer count = Integer(n_cap + 1) * Integer(m_cap + 1);
        if (count >= best_count) { // >= so later (larger m) rectangles win ties
            best_count = count;
            best = ExpansionBox{n_cap, m_cap};
        }
    }
    return best;
}

// f |_k F_d^{-1}: output coefficient at T is the input coefficient at
// T[V_d^{-1}], on the largest box whose preimages stay inside the input box.
inline ParamodularExpansion apply_fricke(const ParamodularExpansion& f, std::int64_t d) {
    const FrickeMatrix v = fricke_matrix(f.level(), d);
    auto cell_determined = [&](std::int64_t n, std::int64_t m) {
        const std::int64_t rb = isqrt64(4 * n * m * f.level());
        for (std::int64_t r = -rb; r <= rb; ++r) {
            const FourierIndex t{n, r, m};
            if (!f.index_valid(t)) continue;
            const FourierIndex pre = fricke_index_map(t, v);
            if (!f.in_box(pre)) return false;
        }
        return true;
    };
    const std::int64_t cap = 4 * (f.box().n_max + f.box().m_max + 1);
    const auto box = largest_determined_box(cap, cell_determined);
    if (!box) throw std::domain_error("apply_fricke: empty output box");
    ParamodularExpansion out(f.weight(), f.level(), *box);
    for_each_index(out, [&](const FourierIndex& t) {
        if (!out.index_valid(t)) return;
        const Rational val = f.coeff(fricke_index_map(t, v));
        if (!val.is_zero()) out.set_coeff(t, val);
    });
    return out;
}

} // namespace pmf
