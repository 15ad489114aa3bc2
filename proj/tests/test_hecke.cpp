#include <catch2/catch_amalgamated.hpp>

#include "pmf/eisenstein.hpp"
#include "pmf/hecke.hpp"
#include "pmf/maass.hpp"
#include "pmf/ntheory.hpp"

#include <algorithm>
#include <random>

using namespace pmf;

namespace {

JacobiExpansion random_jacobi(int k, std::int64_t M, std::int64_t n_max, std::uint64_t seed,
                              const Rational& c00) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> num(-9, 9), den(1, 4);
    JacobiExpansion phi(k, M, n_max);
    std::map<std::pair<std::int64_t, std::int64_t>, Rational> cls;
    for (std::int64_t n = 0; n <= n_max; ++n)
        for (std::int64_t r = -isqrt64(4 * n * M); r * r <= 4 * n * M; ++r) {
            const std::int64_t D = 4 * n * M - r * r;
            std::int64_t rho = r % (2 * M);
            if (rho < 0) rho += 2 * M;
            rho = std::min(rho, 2 * M - rho);
            auto [it, fresh] = cls.try_emplace({D, rho}, Rational(0));
            if (fresh) it->second = (D == 0) ? c00 : Rational(num(rng), den(rng));
            if (!it->second.is_zero()) phi.set_coeff(n, r, it->second);
        }
    return phi;
}

DoubleCosetOp identity_op(std::int64_t N) {
    DoubleCosetOp op{OpKind::UShift, 2, N, {}};
    op.reps.emplace_back(Rational(1), Mat2::identity(), Mat2::zero(), Mat2::identity());
    return op;
}

} // namespace

TEST_CASE("coset counts match the double coset degrees") {
    for (std::int64_t q : {2, 3, 5}) {
        for (std::int64_t N : {1, 2, 3, 5, 6}) {
            if (N % q == 0) continue;
            REQUIRE(reps_for(OpKind::TNQ, q, N).reps.size() == (std::size_t)(1 + q + q * q + q * q * q));
            REQUIRE(reps_for(OpKind::TStarQ, q, N).reps.size() ==
                    (std::size_t)(q * q * q * q + q * q * q + q * q + q));
            REQUIRE(reps_for(OpKind::JDiag, q, N).reps.size() == (std::size_t)(q * q * q + q * q));
            REQUIRE(reps_for(OpKind::FJRaise, q, N).reps.size() == (std::size_t)(q + 1));
        }
        REQUIRE(reps_for(OpKind::JSingle, q, 1).reps.size() == 1);
        REQUIRE(reps_for(OpKind::UShift, q, 1).reps.size() == (std::size_t)q);
    }
    for (std::int64_t l : {1, 2, 6, 10})
        REQUIRE(reps_for(OpKind::VRaise, l, 1).reps.size() == (std::size_t)divisor_sigma(1, l).get_si());
    REQUIRE_THROWS_AS(reps_for(OpKind::TNQ, 4, 1), std::domain_error);
    REQUIRE(reps_for(OpKind::JDiag, 2, 6).reps.size() == 12); // well-defined at q | N too
    REQUIRE_THROWS_AS(reps_for(OpKind::VRaise, 4, 1), std::domain_error);
}

TEST_CASE("coset sanity: pairwise inequivalence") {
    for (std::int64_t q : {2, 3}) {
        for (std::int64_t N : {1, 2, 3, 6}) {
            for (OpKind kind : {OpKind::TNQ, OpKind::TStarQ}) {
                const auto op = reps_for(kind, q, N);
                const auto rep = coset_sanity(op);
                INFO(op.label());
                REQUIRE(rep.pass);
            }
            if (N % q != 0) {
                REQUIRE(coset_sanity(reps_for(OpKind::JDiag, q, N)).pass);
                REQUIRE(coset_sanity(reps_for(OpKind::FJRaise, q, N)).pass);
            }
        }
    }
    REQUIRE(coset_sanity(reps_for(OpKind::TNQ, 5, 1)).pass);
    REQUIRE(coset_sanity(reps_for(OpKind::VRaise, 6, 1)).pass);
    SECTION("a duplicated representative is flagged") {
        auto op = reps_for(OpKind::TNQ, 2, 1);
        op.reps.push_back(op.reps.front());
        const auto rep = coset_sanity(op);
        REQUIRE_FALSE(rep.pass);
    }
}

TEST_CASE("coset closure under right multiplication by Jacobi generators") {
    // the permutation test pins down the parameter ranges of the tables,
    // in particular the ramified supplements
    for (auto [q, N] : {std::pair<std::int64_t, std::int64_t>{2, 1}, {2, 3}, {3, 1},
                        {2, 2}, {2, 6}, {3, 3}}) {
        for (OpKind kind : {OpKind::TNQ, OpKind::TStarQ}) {
            const auto op = reps_for(kind, q, N);
            const auto rep = coset_sanity(op, true);
            INFO(op.label() + " violations: " + (rep.violations.empty() ? "" : rep.violations[0]));
            REQUIRE(rep.pass);
        }
        // the jdiag/fjraise/jsingle/ushift coset structure is level-independent
        REQUIRE(coset_sanity(reps_for(OpKind::JDiag, q, N), true).pass);
        REQUIRE(coset_sanity(reps_for(OpKind::FJRaise, q, N), true).pass);
        REQUIRE(coset_sanity(reps_for(OpKind::JSingle, q, N), true).pass);
        REQUIRE(coset_sanity(reps_for(OpKind::UShift, q, N), true).pass);
    }
    REQUIRE(coset_sanity(reps_for(OpKind::VRaise, 6, 1), true).pass);
    REQUIRE(coset_sanity(reps_for(OpKind::VRaise, 5, 2), true).pass);
}

TEST_CASE("phase sums: exact rationality decisions") {
    SECTION("full root-of-unity sums vanish") {
        for (std::int64_t M : {2, 3, 4, 5, 6, 12}) {
            PhaseSum ps;
            for (std::int64_t j = 0; j < M; ++j) ps.add(Rational(j, M), Rational(1));
            const auto v = ps.rational_value();
            REQUIRE(v.has_value());
            REQUIRE(*v == Rational(0));
        }
    }
    SECTION("sums over primitive roots give the Moebius value") {
        for (std::int64_t M : {2, 3, 4, 6, 10, 12, 30}) {
            PhaseSum ps;
            for (std::int64_t j = 0; j < M; ++j)
                if (std::gcd(j, M) == 1) ps.add(Rational(j, M), Rational(1));
            const auto v = ps.rational_value();
            REQUIRE(v.has_value());
            REQUIRE(*v == Rational(moebius(M)));
        }
    }
    SECTION("a lone primitive root of unity is irrational") {
        for (std::int64_t M : {3, 5, 8, 12}) {
            PhaseSum ps;
            ps.add(Rational(1, M), Rational(1));
            REQUIRE_FALSE(ps.rational_value().has_value());
        }
    }
    SECTION("e^{pi i} = -1 and cancellation bookkeeping") {
        PhaseSum ps;
        ps.add(Rational(1, 2), Rational(5));
        const auto v = ps.rational_value();
        REQUIRE(v.has_value());
        REQUIRE(*v == Rational(-5));
        ps.add(Rational(3, 2), Rational(-5)); // same phase mod 1, cancels
        REQUIRE(ps.empty());
    }
}

TEST_CASE("engine: identity representative leaves expansions unchanged") {
    const auto phi = random_jacobi(4, 2, 16, 71, Rational(2));
    const auto f = gritsenko_lift(phi, {4, 4});
    const auto res = apply_op(f, identity_op(2));
    REQUIRE(res.out == f);
    REQUIRE(res.stats.cancellation_failures == 0);
    REQUIRE(res.stats.rationality_failures == 0);
}

TEST_CASE("engine: single-representative index map matches the symbolic formula") {
    const std::int64_t q = 3, d = 2, N = 2;
    DoubleCosetOp op{OpKind::UShift, q, N, {}};
    op.reps.emplace_back(Rational(1, q * q), Mat2{Rational(q * q), 0, Rational(-q * d), Rational(q)},
                         Mat2::zero(), Mat2{1, Rational(d), 0, Rational(q)});
    const auto phi = random_jacobi(4, N, 36, 73, Rational(1, 3));
    const auto f = gritsenko_lift(phi, {6, 6});
    const auto res = apply_op(f, op);
    const Rational qk(ipow(q, 4)); // weight factor (s2 det D)^{-k} = q^k
    for_each_index(res.out, [&](const FourierIndex& t) {
        // preimage under (n,r,m) -> (n q^2 - r q d + m N d^2, q r - 2 m N d, m)
        const std::int64_t m = t.m;
        const std::int64_t r_num = t.r + 2 * m * N * d;
        Rational expect(0);
        if (r_num % q == 0) {
            const std::int64_t r = r_num / q;
            const std::int64_t n_num = t.n + q * d * r - m * N * d * d;
            if (n_num % (q * q) == 0) {
                const FourierIndex pre{n_num / (q * q), r, m};
                if (f.index_valid(pre)) expect = qk * f.coeff(pre);
            }
        }
        REQUIRE(res.out.coeff(t) == expect);
    });
}

TEST_CASE("engine: reduction order does not matter") {
    const auto f = siegel_eisenstein(4, 1, {4, 4});
    auto op = reps_for(OpKind::TNQ, 2, 1);
    const auto base = apply_op(f, op);
    std::mt19937_64 rng(79);
    for (int trial = 0; trial < 3; ++trial) {
        std::shuffle(op.reps.begin(), op.reps.end(), rng);
        const auto shuffled = apply_op(f, op);
        REQUIRE(shuffled.out == base.out);
    }
}

TEST_CASE("engine: a broken representative list is caught by the exactness asserts") {
    auto op = reps_for(OpKind::TNQ, 2, 1);
    op.reps.pop_back(); // drop one coset: phase sums no longer cancel
    const auto f = siegel_eisenstein(4, 1, {4, 4});
    REQUIRE_THROWS_AS(apply_op(f, op), EngineError);
}

TEST_CASE("Eisenstein eigenvalues under T_N(q)") {
    // lambda = q^k + q^2 + q + q^{3-k}; at k = 4, q = 2 this is 45/2
    const auto f = siegel_eisenstein(4, 1, {6, 6});
    const auto res = eigenvalue_of(f, reps_for(OpKind::TNQ, 2, 1));
    REQUIRE(res.lambda.has_value());
    REQUIRE(*res.lambda == Rational(45, 2));
    const auto f3 = siegel_eisenstein(4, 2, {6, 6});
    const auto res3 = eigenvalue_of(f3, reps_for(OpKind::TNQ, 3, 2));
    REQUIRE(res3.lambda.has_value());
    REQUIRE(*res3.lambda == Rational(81 + 9 + 3) + Rational(1, 3));
}

TEST_CASE("Jacobi Eisenstein eigenvalue under the iota-image operator") {
    // e*_{k,N} | jdiag = (q^k + q^{3-k}) e*_{k,N}; 33/2 at k = 4, q = 2
    const auto e = jacobi_eisenstein(4, 3, 16);
    const auto carrier = embed_jacobi(e, 3);
    const auto res = eigenvalue_of(carrier, reps_for(OpKind::JDiag, 2, 3));
    REQUIRE(res.lambda.has_value());
    REQUIRE(*res.lambda == Rational(33, 2));
}

TEST_CASE("not an eigenform: witness is produced") {
    // E plus a non-proportional lift is not an eigenform of T_N(q)
    const auto f = siegel_eisenstein(4, 1, {6, 6});
    const auto phi = random_jacobi(4, 1, 36, 83, Rational(0));
    const auto g = f + gritsenko_lift(phi, {6, 6});
    const auto res = eigenvalue_of(g, reps_for(OpKind::TNQ, 2, 1));
    REQUIRE_FALSE(res.lambda.has_value());
    REQUIRE(res.witness.has_value());
}

TEST_CASE("t_up equals t_down exactly on lifts, and differs on perturbations") {
    for (std::int64_t N : {1, 3}) {
        const auto phi = random_jacobi(4, N, 36, 89 + N, Rational(7, 2));
        const auto f = gritsenko_lift(phi, {6, 6});
        for (std::int64_t p : {2, 3}) {
            const auto up = t_up(f, p), down = t_down(f, p);
            REQUIRE(up.dropped_prefactor == Rational(p));
            REQUIRE(families_agree(up, down));
        }
        auto g = f;
        g.set_coeff({1, 1, 2}, f.coeff({1, 1, 2}) + Rational(1));
        FourierIndex w;
        REQUIRE_FALSE(families_agree(t_up(g, 2), t_down(g, 2), &w));
    }
    SECTION("zero form gives zero families") {
        const auto z = ParamodularExpansion(4, 2, {4, 4});
        REQUIRE(t_up(z, 2).values.empty());
        REQUIRE(t_down(z, 2).values.empty());
    }
}

TEST_CASE("t_down is the W_N-conjugate of t_up") {
    const auto phi = random_jacobi(4, 3, 36, 97, Rational(-1, 2));
    const auto f = gritsenko_lift(phi, {6, 6});
    const auto g = apply_fricke(f, 3); // alpha_g(n, r, m) = alpha_f(m, -r, n)
    for (std::int64_t p : {2, 5}) {
        const auto down = t_down(f, p);
        const auto up_conj = t_up(g, p);
        // conjugating the up-family by W_N swaps n <-> m and flips r
        for (std::int64_t m = 0; m <= std::min(down.m_max, up_conj.n_max); ++m)
            for (std::int64_t n = 0; n <= std::min(down.n_max, up_conj.m_max); ++n) {
                const std::int64_t rb = isqrt64(4 * n * m * 3 * p);
                for (std::int64_t r = -rb; r <= rb; ++r)
                    REQUIRE(down.at({n, r, m}) == up_conj.at({m, -r, n}));
            }
    }
}

TEST_CASE("the up/down double coset identity at a prime") {
    // f | (diag(q,q,1,1)-coset) = f | (diag(q,q^2,q,1)-coset) + f | (u-shifts)
    // holds exactly on Maass lifts, for p coprime to N and p | N alike
    for (auto [N, p] : {std::pair<std::int64_t, std::int64_t>{1, 2}, {3, 2}, {2, 2}, {1, 3}}) {
        const ExpansionBox box{p == 2 ? 8 : 12, 8};
        const auto phi = random_jacobi(4, N, box.n_max * box.m_max, 101 + N, Rational(2));
        const auto f = gritsenko_lift(phi, box);
        const auto lhs = apply_op(f, reps_for(OpKind::FJRaise, p, N)).out;
        const auto rhs = apply_op(f, reps_for(OpKind::JSingle, p, N)).out +
                         apply_op(f, reps_for(OpKind::UShift, p, N)).out;
        REQUIRE(ParamodularExpansion::agree_on_common_box(lhs, rhs));
        // a perturbation at (1,0,1) surfaces at (p,0,p) on the left and at
        // (1,0,p^2) on the right; the box above keeps (p,0,p) in view
        auto g = f;
        g.set_coeff({1, 0, 1}, f.coeff({1, 0, 1}) + Rational(1));
        const auto lhs2 = apply_op(g, reps_for(OpKind::FJRaise, p, N)).out;
        const auto rhs2 = apply_op(g, reps_for(OpKind::JSingle, p, N)).out +
                          apply_op(g, reps_for(OpKind::UShift, p, N)).out;
        REQUIRE_FALSE(ParamodularExpansion::agree_on_common_box(lhs2, rhs2));
    }
}

TEST_CASE("fjraise reproduces the q N-th Fourier-Jacobi coefficient on lifts") {
    for (auto [N, q] : {std::pair<std::int64_t, std::int64_t>{1, 2}, {3, 2}, {2, 3}}) {
        const auto phi = random_jacobi(4, N, 48, 107 + N, Rational(3, 4));
        const auto f = gritsenko_lift(phi, {8, 6});
        const auto raised = apply_op(f, reps_for(OpKind::FJRaise, q, N)).out;
        REQUIRE(raised.box().m_max >= q);
        const auto got = fj_slice(raised, q).scaled(Rational(1, q));
        const auto want = fj_slice(f.truncated({std::min<std::int64_t>(got.n_max(), f.box().n_max), q}), q);
        const std::int64_t nm = std::min(got.n_max(), want.n_max());
        REQUIRE(got.truncated(nm) == want.truncated(nm));
    }
}

TEST_CASE("operators preserve the Maass relations and the r-sign symmetry") {
    const auto phi = random_jacobi(4, 2, 36, 113, Rational(5));
    const auto f = gritsenko_lift(phi, {6, 6});
    for (OpKind kind : {OpKind::TNQ, OpKind::TStarQ}) {
        for (std::int64_t q : {2, 3}) {
            const auto g = apply_op(f, reps_for(kind, q, 2)).out;
            INFO(op_kind_name(kind) << " q=" << q);
            REQUIRE(maass_check(g).pass);
            for_each_index(g, [&](const FourierIndex& t) {
                REQUIRE(g.coeff(t) == g.coeff({t.n, -t.r, t.m}));
            });
        }
    }
}

TEST_CASE("iota-image operators at distinct primes commute on concrete forms") {
    const auto phi = random_jacobi(4, 1, 64, 127, Rational(1));
    const auto f = gritsenko_lift(phi, {8, 8});
    for (OpKind big : {OpKind::TNQ, OpKind::TStarQ}) {
        const auto op2 = reps_for(big, 2, 1);
        for (OpKind other : {OpKind::JSingle, OpKind::FJRaise, OpKind::UShift}) {
            const auto op3 = reps_for(other, 3, 1);
            const auto ab = apply_op(apply_op(f, op2).out, op3).out;
            const auto ba = apply_op(apply_op(f, op3).out, op2).out;
            INFO(op_kind_name(big) << " with " << op_kind_name(other));
            REQUIRE(ParamodularExpansion::agree_on_common_box(ab, ba));
        }
    }
}

TEST_CASE("the m = 1 slice of f | T_N(q) decomposes through the jdiag operator") {
    for (auto [N, q] : {std::pair<std::int64_t, std::int64_t>{1, 2}, {3, 2}}) {
        const auto phi = random_jacobi(4, N, 64, 131 + N, Rational(2, 3));
        const auto f = gritsenko_lift(phi, {8, 8});
        const auto lhs = fj_slice(apply_op(f, reps_for(OpKind::TNQ, q, N)).out, 1);
        const auto mid = fj_slice(apply_op(f, reps_for(OpKind::JDiag, q, N)).out, 1);
        const auto rhs = mid + fj_slice(f, 1).scaled(Rational(q * q + q)).truncated(mid.n_max());
        const std::int64_t nm = std::min(lhs.n_max(), rhs.n_max());
        REQUIRE(lhs.truncated(nm) == rhs.truncated(nm));
    }
}

TEST_CASE("index raising agrees with the engine evaluation (dual path)") {
    for (std::int64_t N : {2, 3, 6}) {
        const std::int64_t t = 3;
        const auto e1 = jacobi_eisenstein_index1(4, N * t);
        const auto carrier = embed_jacobi(e1, 1);
        const auto raised = apply_op(carrier, reps_for(OpKind::VRaise, N, 1)).out;
        REQUIRE(raised.box().m_max >= N);
        const auto engine_path = fj_slice(raised, N).scaled(Rational(1, N));
        const auto direct_path = index_raise(e1, N);
        const std::int64_t nm = std::min(engine_path.n_max(), direct_path.n_max());
        REQUIRE(engine_path.truncated(nm) == direct_path.truncated(nm));
        // and sigma_{k-1}(N) e_{k,N} is exactly this object
        const auto e_n = jacobi_eisenstein(4, N, nm).scaled(Rational(divisor_sigma(3, N)));
        REQUIRE(direct_path.truncated(nm) == e_n);
    }
}
