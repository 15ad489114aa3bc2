// Exact arithmetic with finite sums of roots of unity.
//
// The Hecke engine accumulates terms c * e^{2 pi i nu} with rational phase
// exponents nu.  A PhaseSum keeps these as a map nu mod 1 -> coefficient and
// decides exactly whether the total is rational by reducing the associated
// polynomial modulo the cyclotomic polynomial Phi_M, M the lcm of the phase
// denominators: the sum lies in Q iff the reduced remainder is constant.
// No tolerances appear anywhere; a non-rational total is a structural error
// in the caller's representative list and is reported as such.

#pragma once

#include "pmf/rational.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <vector>

namespace pmf {

namespace detail {

using Poly = std::vector<Rational>;

// Phi_M via x^M - 1 = prod_{d | M} Phi_d, exact polynomial division.  The
// cache hands out shared immutable polynomials and is filled bottom-up for
// all divisors of M under one lock, so concurrent callers are safe.
inline std::shared_ptr<const Poly> cyclotomic_polynomial(std::int64_t M) {
    static std::mutex mu;
    static std::map<std::int64_t, std::shared_ptr<const Poly>> cache;
    std::lock_guard<std::mutex> lock(mu);
    for (std::int64_t d = 1; d <= M; ++d) {
        if (M % d != 0 || cache.count(d)) continue;
        // numerator x^d - 1, divided by Phi_e for all proper divisors e | d
        Poly num(d + 1, Rational(0));
        num[0] = Rational(-1);
        num[d] = Rational(1);
        for (std::int64_t e = 1; e < d; ++e) {
            if (d % e != 0) continue;
            const Poly& phi_e = *cache.at(e);
            Poly quot(num.size() - phi_e.size() + 1, Rational(0));
            Poly rem = num;
            for (std::int64_t i = (std::int64_t)quot.size() - 1; i >= 0; --i) {
                const Rational c = rem[i + phi_e.size() - 1];
                if (c.is_zero()) continue;
                quot[i] = c;
                for (std::size_t j = 0; j < phi_e.size(); ++j) rem[i + j] -= c * phi_e[j];
            }
            num = std::move(quot);
        }
        cache.emplace(d, std::make_shared<const Poly>(std::move(num)));
    }
    return cache.at(M);
}

} // namespace detail

class PhaseSum {
public:
    // add c * e^{2 pi i nu}
    void add(const Rational& nu, const Rational& c) {
        if (c.is_zero()) return;
        Rational frac = reduce_mod_1(nu);
        auto [it, fresh] = terms_.try_emplace(frac, c);
        if (!fresh) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    bool empty() const { return terms_.empty(); }

    // exact rational value of the sum, or nullopt if it is irrational
    std::optional<Rational> rational_value() const {
        if (terms_.empty()) return Rational(0);
        // fast path: all phases integral
        if (terms_.size() == 1 && terms_.begin()->first.is_zero()) return terms_.begin()->second;
        std::int64_t M = 1;
        for (const auto& [nu, c] : terms_) {
            (void)c;
            M = std::lcm(M, (std::int64_t)nu.den().get_si());
        }
        // polynomial sum c_j x^{e_j}, e_j = nu_j * M
        const auto phi_ptr = detail::cyclotomic_polynomial(M);
        const auto& phi = *phi_ptr;
        const std::int64_t deg_phi = (std::int64_t)phi.size() - 1;
        std::vector<Rational> poly(M, Rational(0));
        for (const auto& [nu, c] : terms_) {
            const std::int64_t e = (std::int64_t)((nu * Rational(M)).num().get_si()) % M;
            poly[e] += c;
        }
        // reduce modulo phi (monic)
        for (std::int64_t i = M - 1; i >= deg_phi; --i) {
            const Rational c = poly[i];
            if (c.is_zero()) continue;
            poly[i] = Rational(0);
            for (std::int64_t j = 0; j < deg_phi; ++j) poly[i - deg_phi + j] += -c * phi[j];
        }
        for (std::int64_t i = 1; i < std::min<std::int64_t>(M, deg_phi); ++i)
            if (!poly[i].is_zero()) return std::nullopt;
        return poly[0];
    }

private:
    static Rational reduce_mod_1(const Rational& nu) {
        // nu - floor(nu)
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), nu.num().get_mpz_t(), nu.den().get_mpz_t());
        return nu - Rational(q);
    }

    std::map<Rational, Rational> terms_;
};

} // namespace pmf
