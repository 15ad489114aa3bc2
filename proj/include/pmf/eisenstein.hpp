// Jacobi Eisenstein series of squarefree index N and the Siegel Eisenstein
// series E_{k,N} realized through the Maass lift.
//
// e_{k,N} is produced by index-raising the index-1 Eisenstein series and
// rescaling by 1/sigma_{k-1}(N), which normalizes c(0, 0) = 1; the tests
// cross-check this construction against an independent evaluation through
// the Hecke engine (the diag(1, N, N, 1)/sqrt(N) double coset at level 1).
//
// E_{k,N} is the lift of (-2k/B_k) e_{k,N}, normalized so alpha(0,0,0) = 1.
// Its first Fourier-Jacobi coefficient is therefore (-2k/B_k) e_{k,N}
// (240 e at k = 4); beware that the reciprocal constant -B_k/(2k) also
// circulates in the literature and is inconsistent with the constant-term
// relation alpha(0,0,1-slot) = -(2k/B_k) alpha(0,0,0) enforced here.

#pragma once

#include "pmf/jacobi.hpp"
#include "pmf/maass.hpp"
#include "pmf/ntheory.hpp"
#include "pmf/paramod.hpp"

#include <stdexcept>

namespace pmf {

inline JacobiExpansion jacobi_eisenstein(int k, std::int64_t N, std::int64_t n_max) {
    if (N < 1 || !is_squarefree(N)) throw std::domain_error("jacobi_eisenstein: N must be squarefree");
    const JacobiExpansion e1 = jacobi_eisenstein_index1(k, n_max * N);
    if (N == 1) return e1;
    const JacobiExpansion raised = index_raise(e1, N);
    return raised.scaled(Rational(divisor_sigma(k - 1, N)).inv());
}

inline ParamodularExpansion siegel_eisenstein(int k, std::int64_t N, ExpansionBox box) {
    const std::int64_t need = std::max<std::int64_t>(box.n_max * box.m_max, 1);
    const JacobiExpansion e = jacobi_eisenstein(k, N, need);
    const Rational scale = Rational(-2 * k) / bernoulli_even(k);
    ParamodularExpansion f = gritsenko_lift(e.scaled(scale), box);
    const Rational c0 = f.coeff({0, 0, 0});
    if (c0.is_zero()) throw std::logic_error("siegel_eisenstein: vanishing constant term");
    return f.scaled(c0.inv()); // already 1 by construction; normalize anyway
}

} // namespace pmf
