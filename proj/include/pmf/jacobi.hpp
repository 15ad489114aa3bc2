// Truncated Fourier expansions of Jacobi forms of weight k and index M.
//
// A JacobiExpansion stores the coefficients c(n, r) for 0 <= n <= n_max and
// 4nM - r^2 >= 0; indices inside that box which are absent from the map are
// zero.  For even weight the standard invariants hold: c(n, r) = c(n, -r),
// and c(n, r) depends only on the discriminant 4nM - r^2 and on r mod 2M.
// validate() checks all of this exhaustively on the stored box.

#pragma once

#include "pmf/check_report.hpp"
#include "pmf/ntheory.hpp"
#include "pmf/rational.hpp"

#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>

namespace pmf {

struct JacobiKey {
    std::int64_t n = 0;
    std::int64_t r = 0;
    friend auto operator<=>(const JacobiKey&, const JacobiKey&) = default;
};

class JacobiExpansion {
public:
    JacobiExpansion(int weight, std::int64_t index, std::int64_t n_max)
        : weight_(weight), index_(index), n_max_(n_max) {
        if (weight % 2 != 0) throw std::domain_error("JacobiExpansion: weight must be even");
        if (index < 0) throw std::domain_error("JacobiExpansion: index must be >= 0");
        if (n_max < 0) throw std::domain_error("JacobiExpansion: n_max must be >= 0");
    }

    int weight() const { return weight_; }
    std::int64_t index() const { return index_; }
    std::int64_t n_max() const { return n_max_; }

    bool index_valid(std::int64_t n, std::int64_t r) const {
        return n >= 0 && 4 * n * index_ - r * r >= 0;
    }
    bool in_box(std::int64_t n, std::int64_t r) const { return index_valid(n, r) && n <= n_max_; }

    Rational coeff(std::int64_t n, std::int64_t r) const {
        if (!in_box(n, r)) throw std::out_of_range("JacobiExpansion: coefficient outside box");
        auto it = coeffs_.find({n, r});
        return it == coeffs_.end() ? Rational(0) : it->second;
    }

    void set_coeff(std::int64_t n, std::int64_t r, const Rational& v) {
        if (!in_box(n, r)) throw std::out_of_range("JacobiExpansion: index outside box");
        if (v.is_zero())
            coeffs_.erase({n, r});
        else
            coeffs_[{n, r}] = v;
    }

    const std::map<JacobiKey, Rational>& coeffs() const { return coeffs_; }

    bool operator==(const JacobiExpansion& o) const {
        return weight_ == o.weight_ && index_ == o.index_ && n_max_ == o.n_max_ && coeffs_ == o.coeffs_;
    }

    JacobiExpansion scaled(const Rational& s) const {
        JacobiExpansion out(weight_, index_, n_max_);
        if (s.is_zero()) return out;
        for (const auto& [key, v] : coeffs_) out.coeffs_[key] = s * v;
        return out;
    }

    // restriction to a smaller box
    JacobiExpansion truncated(std::int64_t new_n_max) const {
        if (new_n_max > n_max_) throw std::domain_error("JacobiExpansion: cannot grow the box");
        JacobiExpansion out(weight_, index_, new_n_max);
        for (const auto& [key, v] : coeffs_)
            if (key.n <= new_n_max) out.coeffs_[key] = v;
        return out;
    }

    friend JacobiExpansion operator+(const JacobiExpansion& x, const JacobiExpansion& y) {
        if (x.weight_ != y.weight_ || x.index_ != y.index_)
            throw std::domain_error("JacobiExpansion: weight/index mismatch in sum");
        JacobiExpansion out(x.weight_, x.index_, std::min(x.n_max_, y.n_max_));
        for (const auto& [key, v] : x.coeffs_)
            if (key.n <= out.n_max_) out.coeffs_[key] = v;
        for (const auto& [key, v] : y.coeffs_) {
            if (key.n > out.n_max_) continue;
            auto [it, fresh] = out.coeffs_.try_emplace(key, v);
            if (!fresh) it->second += v;
            if (it->second.is_zero()) out.coeffs_.erase(it);
        }
        return out;
    }

private:
    int weight_;
    std::int64_t index_;
    std::int64_t n_max_;
    std::map<JacobiKey, Rational> coeffs_;
};

namespace detail {
inline std::string jkey_str(std::int64_t n, std::int64_t r) {
    std::ostringstream os;
    os << "(" << n << "," << r << ")";
    return os.str();
}
} // namespace detail

// Exhaustive invariant check on the stored box.
inline CheckReport validate_jacobi(const JacobiExpansion& phi) {
    CheckReport rep;
    const std::int64_t M = phi.index();
    // stored keys must satisfy the semidefiniteness bound
    for (const auto& [key, v] : phi.coeffs()) {
        (void)v;
        ++rep.checked;
        if (!phi.in_box(key.n, key.r))
            rep.fail("stored index outside box " + detail::jkey_str(key.n, key.r));
    }
    // r -> -r symmetry and the (discriminant, r mod 2M) class function
    std::map<std::pair<std::int64_t, std::int64_t>, std::pair<JacobiKey, Rational>> cls;
    for (std::int64_t n = 0; n <= phi.n_max(); ++n) {
        const std::int64_t rb = (M > 0) ? isqrt64(4 * n * M) : 0;
        for (std::int64_t r = -rb; r <= rb; ++r) {
            if (!phi.in_box(n, r)) continue;
            ++rep.checked;
            const Rational v = phi.coeff(n, r);
            if (!(v == phi.coeff(n, -r)))
                rep.fail("c(n,r) != c(n,-r) at " + detail::jkey_str(n, r));
            if (M > 0) {
                std::int64_t rho = r % (2 * M);
                if (rho < 0) rho += 2 * M;
                const auto key = std::make_pair(4 * n * M - r * r, rho);
                auto it = cls.find(key);
                if (it == cls.end())
                    cls.emplace(key, std::make_pair(JacobiKey{n, r}, v));
                else if (!(it->second.second == v))
                    rep.fail("class (D=" + std::to_string(key.first) + ", r mod 2M=" +
                             std::to_string(key.second) + ") takes two values at " +
                             detail::jkey_str(it->second.first.n, it->second.first.r) + " and " +
                             detail::jkey_str(n, r));
            }
        }
    }
    return rep;
}

// Jacobi Eisenstein series of index 1: c(n, r) = H(k-1, 4n - r^2) / H(k-1, 0).
inline JacobiExpansion jacobi_eisenstein_index1(int k, std::int64_t n_max) {
    if (k < 4 || k % 2 != 0)
        throw std::domain_error("jacobi_eisenstein_index1: k must be even and >= 4");
    JacobiExpansion phi(k, 1, n_max);
    const Rational h0 = cohen_h(k - 1, 0);
    for (std::int64_t n = 0; n <= n_max; ++n)
        for (std::int64_t r = 0; r * r <= 4 * n; ++r) {
            const Rational c = cohen_h(k - 1, 4 * n - r * r) / h0;
            if (c.is_zero()) continue;
            phi.set_coeff(n, r, c);
            if (r > 0) phi.set_coeff(n, -r, c);
        }
    return phi;
}

// Index raising operator J_{k,M} -> J_{k,Ml}:
//   c'(n, r) = sum_{d | gcd(n, r, l)} d^{k-1} c(n l / d^2, r / d),
// with gcd(0, 0, l) = l, so c'(0, 0) = sigma_{k-1}(l) c(0, 0).  The output
// box is n_max / l: every emitted coefficient needs c up to n * l.
inline JacobiExpansion index_raise(const JacobiExpansion& phi, std::int64_t l) {
    if (l <= 0) throw std::domain_error("index_raise: l must be positive");
    const int k = phi.weight();
    JacobiExpansion out(k, phi.index() * l, phi.n_max() / l);
    for (std::int64_t n = 0; n <= out.n_max(); ++n) {
        const std::int64_t M_out = out.index();
        for (std::int64_t r = 0; r * r <= 4 * n * M_out; ++r) {
            Rational acc(0);
            std::int64_t g = gcd3(n, r, l);
            if (g == 0) g = l; // n = r = 0
            for (std::int64_t d : divisors(g)) {
                if (l % d != 0) continue;
                acc += Rational(ipow(d, (unsigned long)(k - 1))) * phi.coeff(n * l / (d * d), r / d);
            }
            if (acc.is_zero()) continue;
            out.set_coeff(n, r, acc);
            if (r > 0) out.set_coeff(n, -r, acc);
        }
    }
    return out;
}

} // namespace pmf
