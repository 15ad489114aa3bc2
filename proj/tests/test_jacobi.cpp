#include <catch2/catch_amalgamated.hpp>

#include "pmf/jacobi.hpp"
#include "pmf/ntheory.hpp"

using namespace pmf;

TEST_CASE("validate_jacobi accepts the zero expansion") {
    JacobiExpansion zero(4, 3, 5);
    const auto rep = validate_jacobi(zero);
    REQUIRE(rep.pass);
}

TEST_CASE("validate_jacobi accepts Eisenstein series and flags broken symmetry") {
    for (int k : {4, 6, 8, 10}) {
        auto e = jacobi_eisenstein_index1(k, 8);
        REQUIRE(validate_jacobi(e).pass);
    }
    auto e = jacobi_eisenstein_index1(4, 5);
    e.set_coeff(1, -1, e.coeff(1, -1) + Rational(1));
    const auto rep = validate_jacobi(e);
    REQUIRE_FALSE(rep.pass);
}

TEST_CASE("validate_jacobi flags class-function violations") {
    // c must depend only on (4nM - r^2, r mod 2M): c(1, 0) and c(2, +-2)
    // share the class (4, 0) at M = 1
    JacobiExpansion phi(4, 1, 4);
    phi.set_coeff(1, 0, Rational(7));
    phi.set_coeff(2, 2, Rational(8));
    phi.set_coeff(2, -2, Rational(8));
    REQUIRE_FALSE(validate_jacobi(phi).pass);
    phi.set_coeff(2, 2, Rational(7));
    phi.set_coeff(2, -2, Rational(7));
    REQUIRE(validate_jacobi(phi).pass);
}

TEST_CASE("index-1 Jacobi Eisenstein series has the classical coefficients") {
    const auto e4 = jacobi_eisenstein_index1(4, 3);
    REQUIRE(e4.coeff(0, 0) == Rational(1));
    REQUIRE(e4.coeff(1, 0) == Rational(126));
    REQUIRE(e4.coeff(1, 1) == Rational(56));
    REQUIRE(e4.coeff(1, -1) == Rational(56));
    REQUIRE(e4.coeff(1, 2) == Rational(1));
    // c(n, r) = H(k-1, 4n - r^2) / H(k-1, 0) by construction
    REQUIRE(e4.coeff(2, 1) == cohen_h(3, 7) / cohen_h(3, 0));
    const auto e6 = jacobi_eisenstein_index1(6, 2);
    REQUIRE(e6.coeff(0, 0) == Rational(1));
    REQUIRE(e6.coeff(1, 0) == Rational(-330));
    REQUIRE(e6.coeff(1, 1) == Rational(-88));
    REQUIRE(e6.coeff(1, 2) == Rational(1));
    REQUIRE_THROWS_AS(jacobi_eisenstein_index1(5, 3), std::domain_error);
}

TEST_CASE("index_raise basics") {
    const auto e = jacobi_eisenstein_index1(4, 12);
    SECTION("l = 1 is the identity") {
        const auto r = index_raise(e, 1);
        REQUIRE(r == e);
    }
    SECTION("constant term picks up sigma_{k-1}(l)") {
        for (std::int64_t l : {2, 3, 6}) {
            const auto r = index_raise(e, l);
            REQUIRE(r.index() == l);
            REQUIRE(r.coeff(0, 0) == Rational(divisor_sigma(3, l)));
        }
    }
    SECTION("gcd-1 entries are plain relabelings") {
        const auto r = index_raise(e, 2);
        REQUIRE(r.coeff(1, 1) == e.coeff(2, 1));
    }
    SECTION("raised series stays a valid Jacobi expansion") {
        for (std::int64_t l : {2, 3}) REQUIRE(validate_jacobi(index_raise(e, l)).pass);
    }
    REQUIRE_THROWS_AS(index_raise(e, 0), std::domain_error);
}

TEST_CASE("index_raise is multiplicative in coprime steps") {
    const auto e = jacobi_eisenstein_index1(4, 30);
    for (auto [l1, l2] : {std::pair<std::int64_t, std::int64_t>{2, 3}, {3, 2}, {2, 5}}) {
        const auto once = index_raise(index_raise(e, l1), l2);
        const auto direct = index_raise(e, l1 * l2);
        REQUIRE(once.index() == direct.index());
        const std::int64_t n_max = std::min(once.n_max(), direct.n_max());
        REQUIRE(once.truncated(n_max) == direct.truncated(n_max));
    }
}
