// Small exact matrices over Q, plus the scaled representation sqrt(s) * M
// used for elements of the rational symplectic similitude group that carry a
// 1/sqrt(q) prefactor.  A ScaledMatrix is rational precisely when its scale
// is a perfect square in Q; canonicalizing the square part makes that test a
// single comparison.

#pragma once

#include "pmf/ntheory.hpp"
#include "pmf/rational.hpp"

#include <array>
#include <optional>
#include <stdexcept>

namespace pmf {

struct Mat2 {
    // [[a, b], [c, d]]
    Rational a, b, c, d;

    static Mat2 identity() { return {1, 0, 0, 1}; }
    static Mat2 zero() { return {0, 0, 0, 0}; }
    static Mat2 diag(const Rational& x, const Rational& y) { return {x, 0, 0, y}; }

    Rational det() const { return a * d - b * c; }
    Mat2 transpose() const { return {a, c, b, d}; }

    Mat2 inverse() const {
        const Rational dt = det();
        if (dt.is_zero()) throw std::domain_error("Mat2: singular");
        return {d / dt, -b / dt, -c / dt, a / dt};
    }

    friend Mat2 operator*(const Mat2& x, const Mat2& y) {
        return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
                x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
    }
    friend Mat2 operator*(const Rational& s, const Mat2& m) {
        return {s * m.a, s * m.b, s * m.c, s * m.d};
    }
    friend Mat2 operator+(const Mat2& x, const Mat2& y) {
        return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d};
    }
    friend bool operator==(const Mat2& x, const Mat2& y) {
        return x.a == y.a && x.b == y.b && x.c == y.c && x.d == y.d;
    }

    bool is_symmetric() const { return b == c; }
    Rational trace() const { return a + d; }
};

struct Mat4 {
    std::array<std::array<Rational, 4>, 4> e{};

    static Mat4 identity() {
        Mat4 m;
        for (int i = 0; i < 4; ++i) m.e[i][i] = 1;
        return m;
    }

    // block form [[A, B], [C, D]] with 2x2 blocks
    static Mat4 from_blocks(const Mat2& A, const Mat2& B, const Mat2& C, const Mat2& D) {
        Mat4 m;
        m.e[0][0] = A.a; m.e[0][1] = A.b; m.e[1][0] = A.c; m.e[1][1] = A.d;
        m.e[0][2] = B.a; m.e[0][3] = B.b; m.e[1][2] = B.c; m.e[1][3] = B.d;
        m.e[2][0] = C.a; m.e[2][1] = C.b; m.e[3][0] = C.c; m.e[3][1] = C.d;
        m.e[2][2] = D.a; m.e[2][3] = D.b; m.e[3][2] = D.c; m.e[3][3] = D.d;
        return m;
    }

    Mat2 block_a() const { return {e[0][0], e[0][1], e[1][0], e[1][1]}; }
    Mat2 block_b() const { return {e[0][2], e[0][3], e[1][2], e[1][3]}; }
    Mat2 block_c() const { return {e[2][0], e[2][1], e[3][0], e[3][1]}; }
    Mat2 block_d() const { return {e[2][2], e[2][3], e[3][2], e[3][3]}; }

    Mat4 transpose() const {
        Mat4 t;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) t.e[i][j] = e[j][i];
        return t;
    }

    friend Mat4 operator*(const Mat4& x, const Mat4& y) {
        Mat4 r;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                Rational acc(0);
                for (int k = 0; k < 4; ++k) acc += x.e[i][k] * y.e[k][j];
                r.e[i][j] = acc;
            }
        return r;
    }
    friend Mat4 operator*(const Rational& s, const Mat4& m) {
        Mat4 r;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) r.e[i][j] = s * m.e[i][j];
        return r;
    }
    friend bool operator==(const Mat4& x, const Mat4& y) {
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                if (!(x.e[i][j] == y.e[i][j])) return false;
        return true;
    }

    Mat4 inverse() const {
        // Gauss-Jordan, exact.
        Mat4 a = *this, inv = Mat4::identity();
        for (int col = 0; col < 4; ++col) {
            int pivot = -1;
            for (int row = col; row < 4; ++row)
                if (!a.e[row][col].is_zero()) { pivot = row; break; }
            if (pivot < 0) throw std::domain_error("Mat4: singular");
            std::swap(a.e[col], a.e[pivot]);
            std::swap(inv.e[col], inv.e[pivot]);
            const Rational p = a.e[col][col];
            for (int j = 0; j < 4; ++j) { a.e[col][j] /= p; inv.e[col][j] /= p; }
            for (int row = 0; row < 4; ++row) {
                if (row == col || a.e[row][col].is_zero()) continue;
                const Rational f = a.e[row][col];
                for (int j = 0; j < 4; ++j) {
                    a.e[row][j] -= f * a.e[col][j];
                    inv.e[row][j] -= f * inv.e[col][j];
                }
            }
        }
        return inv;
    }
};

// J = [[0, -I], [I, 0]]
inline const Mat4& symplectic_form() {
    static const Mat4 J = [] {
        Mat4 j;
        j.e[0][2] = -1; j.e[1][3] = -1;
        j.e[2][0] = 1;  j.e[3][1] = 1;
        return j;
    }();
    return J;
}

inline bool is_symplectic(const Mat4& m) {
    return m.transpose() * symplectic_form() * m == symplectic_form();
}

// sqrt(scale) * mat with scale > 0 rational.  Canonical form keeps scale
// squarefree (numerator and denominator squarefree), so the element is a
// rational matrix iff scale == 1.
struct ScaledMatrix {
    Rational scale; // the thing under the square root
    Mat4 mat;

    ScaledMatrix(const Rational& s, const Mat4& m) : scale(s), mat(m) {
        if (!(scale > Rational(0))) throw std::domain_error("ScaledMatrix: scale must be positive");
        canonicalize();
    }

    static ScaledMatrix rational(const Mat4& m) { return ScaledMatrix(Rational(1), m); }

    bool is_rational() const { return scale == Rational(1); }

    // valid only when is_rational()
    const Mat4& rational_matrix() const {
        if (!is_rational()) throw std::logic_error("ScaledMatrix: not rational");
        return mat;
    }

    friend ScaledMatrix operator*(const ScaledMatrix& x, const ScaledMatrix& y) {
        return ScaledMatrix(x.scale * y.scale, x.mat * y.mat);
    }

    ScaledMatrix inverse() const { return ScaledMatrix(scale.inv(), mat.inverse()); }

private:
    void canonicalize() {
        // scale = s0 * t^2 with s0 squarefree; fold t into the matrix
        auto square_split = [](const Integer& n) {
            // n > 0; returns (squarefree part, square root of the rest)
            Integer s(1), t(1);
            Integer rest = n;
            for (Integer p = 2; p * p <= rest; ++p) {
                if (rest % p != 0) continue;
                int e = 0;
                while (rest % p == 0) { rest /= p; ++e; }
                if (e % 2 != 0) s *= p;
                for (int i = 0; i < e / 2; ++i) t *= p;
            }
            s *= rest;
            return std::pair<Integer, Integer>(s, t);
        };
        const auto [ns, nt] = square_split(scale.num());
        const auto [ds, dt] = square_split(scale.den());
        scale = Rational(ns, ds);
        const Rational t = Rational(nt, dt);
        if (t != Rational(1)) mat = t * mat;
    }
};

} // namespace pmf
