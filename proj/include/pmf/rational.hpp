// Exact arbitrary-precision scalars for the paramodular form library.
//
// Every coefficient, eigenvalue and phase exponent in this library is a
// Rational.  There is no floating point anywhere: all identities we verify
// are exact identities, so any rounding would turn a theorem into a
// tolerance.  Backed by GMP (mpz/mpq); values are always stored in lowest
// terms with positive denominator.

#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pmf {

using Integer = mpz_class;

inline Integer ipow(const Integer& base, unsigned long e) {
    Integer r;
    mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
    return r;
}

inline Integer ipow(long base, unsigned long e) { return ipow(Integer(base), e); }

inline Integer binomial(unsigned long n, unsigned long k) {
    Integer r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

class Rational {
public:
    Rational() : v_(0) {}
    Rational(long n) : v_(n) {}                      // NOLINT: implicit by design
    Rational(const Integer& n) : v_(n) {}            // NOLINT
    Rational(const Integer& num, const Integer& den) : v_(num, den) {
        if (den == 0) throw std::domain_error("Rational: zero denominator");
        v_.canonicalize();
    }
    Rational(long num, long den) : Rational(Integer(num), Integer(den)) {}

    static Rational from_string(const std::string& s) {
        // Accepts "a" or "a/b"; used by the JSON readers.
        mpq_class q;
        if (q.set_str(s, 10) != 0) throw std::invalid_argument("Rational: bad literal '" + s + "'");
        if (q.get_den() == 0) throw std::domain_error("Rational: zero denominator in '" + s + "'");
        q.canonicalize();
        Rational r;
        r.v_ = q;
        return r;
    }

    const Integer num() const { return v_.get_num(); }
    const Integer den() const { return v_.get_den(); }

    bool is_zero() const { return v_ == 0; }
    bool is_integer() const { return v_.get_den() == 1; }

    // Always "num/den", even for integers; keeps emitted files canonical.
    std::string str() const { return v_.get_num().get_str() + "/" + v_.get_den().get_str(); }

    Rational operator-() const { return wrap(-v_); }
    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.v_ == 0) throw std::domain_error("Rational: division by zero");
        v_ /= o.v_;
        return *this;
    }

    friend Rational operator+(Rational a, const Rational& b) { return a += b; }
    friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
    friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
    friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
    friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
    friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
    friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

    Rational pow(long e) const {
        if (e == 0) return Rational(1);
        if (e < 0) {
            if (v_ == 0) throw std::domain_error("Rational: 0^negative");
            return inv().pow(-e);
        }
        Rational r;
        r.v_ = mpq_class(ipow(Integer(v_.get_num()), (unsigned long)e),
                         ipow(Integer(v_.get_den()), (unsigned long)e));
        // num/den coprime => powers coprime, but canonicalize keeps the sign
        // convention airtight.
        r.v_.canonicalize();
        return r;
    }

    Rational inv() const {
        if (v_ == 0) throw std::domain_error("Rational: inverse of zero");
        Rational r;
        r.v_ = 1 / v_;
        return r;
    }

    int sign() const { return sgn(v_); }

private:
    static Rational wrap(const mpq_class& q) {
        Rational r;
        r.v_ = q;
        return r;
    }
    mpq_class v_;
};

} // namespace pmf
