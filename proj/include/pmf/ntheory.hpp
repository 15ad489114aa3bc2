// Exact number-theoretic kernel: Bernoulli numbers, divisor sums, Kronecker
// symbols, generalized Bernoulli numbers, Cohen's H function and the
// coefficients of the elliptic Eisenstein series E_k.
//
// Conventions.  Bernoulli numbers use B_1 = -1/2, the convention under which
//   E_k(tau) = 1 - (2k/B_k) sum_{n>=1} sigma_{k-1}(n) q^n
// has the familiar expansions E_4 = 1 + 240q + ..., E_6 = 1 - 504q - ...
// Cohen's H(r, D) is the rational function whose values give the Fourier
// coefficients of Jacobi Eisenstein series of index 1:
//   H(r, 0) = zeta(1-2r),  H(r, D) = 0 unless (-1)^r D = 0, 1 mod 4,
// and otherwise, writing (-1)^r D = D0 f^2 with D0 a fundamental
// discriminant (or 1),
//   H(r, D) = L(1-r, chi_{D0}) * sum_{d | f} mu(d) chi_{D0}(d) d^{r-1}
//             sigma_{2r-1}(f/d),
// with L(1-r, chi) = -B_{r,chi}/r evaluated through the finite character sum
// B_{r,chi} = f^{r-1} sum_{a=1..f} chi(a) B_r(a/f).

#pragma once

#include "pmf/rational.hpp"

#include <cstdint>
#include <map>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace pmf {

// ---------------------------------------------------------------------------
// small integer utilities
// ---------------------------------------------------------------------------

// floor(sqrt(n)) in exact integer arithmetic
inline std::int64_t isqrt64(std::int64_t n) {
    if (n < 0) throw std::domain_error("isqrt64: negative argument");
    if (n < 2) return n;
    std::int64_t x = n, y = (x + 1) / 2;
    while (y < x) {
        x = y;
        y = (x + n / x) / 2;
    }
    while ((x + 1) * (x + 1) <= n) ++x;
    while (x * x > n) --x;
    return x;
}

inline bool is_prime(std::int64_t n) {
    if (n < 2) return false;
    for (std::int64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

inline bool is_squarefree(std::int64_t n) {
    if (n <= 0) return false;
    for (std::int64_t d = 2; d * d <= n; ++d)
        if (n % (d * d) == 0) return false;
    return true;
}

inline std::vector<std::int64_t> divisors(std::int64_t n) {
    if (n <= 0) throw std::domain_error("divisors: n must be positive");
    std::vector<std::int64_t> small, large;
    for (std::int64_t d = 1; d * d <= n; ++d) {
        if (n % d != 0) continue;
        small.push_back(d);
        if (d != n / d) large.push_back(n / d);
    }
    for (auto it = large.rbegin(); it != large.rend(); ++it) small.push_back(*it);
    return small;
}

inline std::vector<std::pair<std::int64_t, int>> factorize(std::int64_t n) {
    if (n <= 0) throw std::domain_error("factorize: n must be positive");
    std::vector<std::pair<std::int64_t, int>> f;
    for (std::int64_t p = 2; p * p <= n; ++p) {
        if (n % p != 0) continue;
        int e = 0;
        while (n % p == 0) { n /= p; ++e; }
        f.emplace_back(p, e);
    }
    if (n > 1) f.emplace_back(n, 1);
    return f;
}

inline int moebius(std::int64_t n) {
    int mu = 1;
    for (const auto& [p, e] : factorize(n)) {
        if (e > 1) return 0;
        mu = -mu;
        (void)p;
    }
    return mu;
}

// gcd over the index triple; zeros are ignored, so gcd3(n,0,0) = n and
// gcd3(0,0,m) = m.  gcd3(0,0,0) = 0 and must be handled by the caller.
inline std::int64_t gcd3(std::int64_t a, std::int64_t b, std::int64_t c) {
    return std::gcd(std::gcd(a < 0 ? -a : a, b < 0 ? -b : b), c < 0 ? -c : c);
}

// ---------------------------------------------------------------------------
// Bernoulli numbers and polynomials
// ---------------------------------------------------------------------------

// B_0..B_n via the defining recurrence sum_{j<=m} C(m+1, j) B_j = 0, m >= 1.
// Returns a copy; the shared backing table is grown under a lock so callers
// may run concurrently.
inline std::vector<Rational> bernoulli_table(int n) {
    static std::mutex mu;
    static std::vector<Rational> table = {Rational(1), Rational(-1, 2)};
    std::lock_guard<std::mutex> lock(mu);
    while ((int)table.size() <= n) {
        const int m = (int)table.size();
        Rational acc(0);
        for (int j = 0; j < m; ++j)
            acc += Rational(binomial(m + 1, j)) * table[j];
        table.push_back(-acc / Rational(m + 1));
    }
    return std::vector<Rational>(table.begin(), table.begin() + n + 1);
}

inline Rational bernoulli_even(int k) {
    if (k < 2 || k % 2 != 0) throw std::domain_error("bernoulli_even: k must be even and >= 2");
    return bernoulli_table(k)[k];
}

// B_r(x) = sum_j C(r, j) B_j x^{r-j}
inline Rational bernoulli_polynomial(int r, const Rational& x) {
    if (r < 0) throw std::domain_error("bernoulli_polynomial: r must be >= 0");
    const auto& B = bernoulli_table(r);
    Rational acc(0);
    for (int j = 0; j <= r; ++j)
        acc += Rational(binomial(r, j)) * B[j] * x.pow(r - j);
    return acc;
}

// ---------------------------------------------------------------------------
// divisor sums
// ---------------------------------------------------------------------------

inline Integer divisor_sigma(int e, std::int64_t n) {
    if (n <= 0) throw std::domain_error("divisor_sigma: n must be positive");
    if (e < 0) throw std::domain_error("divisor_sigma: exponent must be nonnegative");
    Integer acc(0);
    for (std::int64_t d : divisors(n)) acc += ipow(d, (unsigned long)e);
    return acc;
}

// ---------------------------------------------------------------------------
// Kronecker symbol (a|b), full extension to all integers
// ---------------------------------------------------------------------------

inline int kronecker_symbol(Integer a, Integer b) {
    if (b == 0) return (a == 1 || a == -1) ? 1 : 0;
    // (a|2) = 0 for even a, +1 for a = +-1 mod 8, -1 for a = +-3 mod 8
    if (b < 0) {
        int unit = (a < 0) ? -1 : 1;
        return unit * kronecker_symbol(a, -b);
    }
    int t = 0;  // power of 2 in b
    while (b % 2 == 0) { b /= 2; ++t; }
    int result = 1;
    if (t > 0) {
        if (a % 2 == 0) return 0;
        if (t % 2 != 0) {
            Integer a8 = a % 8;
            if (a8 < 0) a8 += 8;
            result = (a8 == 1 || a8 == 7) ? 1 : -1;
        }
    }
    // now b odd and positive: Jacobi symbol by reciprocity
    a %= b;
    if (a < 0) a += b;
    while (a != 0) {
        int s = 0;
        while (a % 2 == 0) { a /= 2; ++s; }
        if (s % 2 != 0) {
            Integer b8 = b % 8;
            if (b8 == 3 || b8 == 5) result = -result;
        }
        // both odd: flip sign iff a = b = 3 mod 4
        if (a % 4 == 3 && b % 4 == 3) result = -result;
        std::swap(a, b);
        a %= b;
    }
    return (b == 1) ? result : 0;
}

inline int kronecker_symbol(std::int64_t a, std::int64_t b) {
    return kronecker_symbol(Integer((long)a), Integer((long)b));
}

// ---------------------------------------------------------------------------
// fundamental discriminants
// ---------------------------------------------------------------------------

struct FundamentalSplit {
    std::int64_t d0; // fundamental discriminant, or 1 for perfect squares
    std::int64_t f;  // conductor: delta = d0 * f^2
};

inline bool is_fundamental_discriminant(std::int64_t d) {
    if (d == 1) return true;
    if (d == 0) return false;
    std::int64_t m = d % 4;
    if (m < 0) m += 4;
    if (m == 1) return is_squarefree(d < 0 ? -d : d);
    if (m == 0) {
        std::int64_t q = d / 4;
        std::int64_t qm = q % 4;
        if (qm < 0) qm += 4;
        return (qm == 2 || qm == 3) && is_squarefree(q < 0 ? -q : q);
    }
    return false;
}

inline FundamentalSplit fundamental_discriminant(std::int64_t delta) {
    if (delta == 0) throw std::domain_error("fundamental_discriminant: delta must be nonzero");
    std::int64_t m = delta % 4;
    if (m < 0) m += 4;
    if (m == 2 || m == 3) throw std::domain_error("fundamental_discriminant: delta must be 0 or 1 mod 4");
    // split |delta| = s * g^2 with s squarefree
    std::int64_t s = (delta < 0) ? -1 : 1, g = 1;
    for (const auto& [p, e] : factorize(delta < 0 ? -delta : delta)) {
        if (e % 2 != 0) s *= p;
        for (int i = 0; i < e / 2; ++i) g *= p;
    }
    std::int64_t sm = s % 4;
    if (sm < 0) sm += 4;
    if (sm == 1) return {s, g};
    // s = 2, 3 mod 4 forces g even (else delta = 2, 3 mod 4)
    return {4 * s, g / 2};
}

// ---------------------------------------------------------------------------
// generalized Bernoulli numbers and Cohen's H
// ---------------------------------------------------------------------------

// B_{r, chi_{d0}} for the Kronecker character chi_{d0} = (d0|.) of conductor
// |d0|; d0 must be a fundamental discriminant or 1 (trivial character).
inline Rational generalized_bernoulli(int r, std::int64_t d0) {
    if (r < 1) throw std::domain_error("generalized_bernoulli: r must be >= 1");
    if (!is_fundamental_discriminant(d0))
        throw std::domain_error("generalized_bernoulli: d0 must be fundamental or 1");
    const std::int64_t f = (d0 < 0) ? -d0 : d0;
    Rational acc(0);
    for (std::int64_t a = 1; a <= f; ++a) {
        const int chi = kronecker_symbol(d0, a);
        if (chi == 0) continue;
        acc += Rational(chi) * bernoulli_polynomial(r, Rational(a, f));
    }
    return Rational(ipow(f, (unsigned long)(r - 1))) * acc;
}

inline Rational cohen_h(int r, std::int64_t D) {
    if (r < 1) throw std::domain_error("cohen_h: r must be >= 1");
    if (D < 0) throw std::domain_error("cohen_h: D must be >= 0");
    if (D == 0) return -bernoulli_even(2 * r) / Rational(2 * r);
    const std::int64_t delta = (r % 2 == 0) ? D : -D;
    std::int64_t m = delta % 4;
    if (m < 0) m += 4;
    if (m == 2 || m == 3) return Rational(0);
    const auto [d0, f] = fundamental_discriminant(delta);
    const Rational lvalue = -generalized_bernoulli(r, d0) / Rational(r);
    Rational corr(0);
    for (std::int64_t d : divisors(f)) {
        const int mu = moebius(d);
        if (mu == 0) continue;
        const int chi = kronecker_symbol(d0, d);
        if (chi == 0) continue;
        corr += Rational(mu * chi) * Rational(ipow(d, (unsigned long)(r - 1))) *
                Rational(divisor_sigma(2 * r - 1, f / d));
    }
    return lvalue * corr;
}

// ---------------------------------------------------------------------------
// elliptic Eisenstein series
// ---------------------------------------------------------------------------

// a(0..n_max) with a(0) = 1 and a(n) = -(2k/B_k) sigma_{k-1}(n).
inline std::vector<Rational> elliptic_eisenstein(int k, int n_max) {
    if (k < 4 || k % 2 != 0) throw std::domain_error("elliptic_eisenstein: k must be even and >= 4");
    if (n_max < 0) throw std::domain_error("elliptic_eisenstein: n_max must be >= 0");
    const Rational c = Rational(-2 * k) / bernoulli_even(k);
    std::vector<Rational> a;
    a.reserve(n_max + 1);
    a.emplace_back(1);
    for (int n = 1; n <= n_max; ++n) a.push_back(c * Rational(divisor_sigma(k - 1, n)));
    return a;
}

} // namespace pmf
