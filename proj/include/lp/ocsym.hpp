#pragma once
// Overconvergent modular symbols: distribution-valued symbols on the Manin
// presentation of Gamma_0(N) with p | N, the U_p action in the classical
// normalization, and the noncritical-slope eigenlift of a p-stabilized
// classical symbol by U_p/alpha iteration from a zero-tails initial lift.

#include <gmpxx.h>

#include <string>
#include <vector>

#include "lp/dist.hpp"
#include "lp/modsym.hpp"
#include "lp/padic.hpp"

namespace lp {

struct OverconvergentSymbol {
  long N = 1;  // level of the presentation (divisible by p)
  long k = 2;
  long p = 0;
  long M = 0;
  PadicNumber alpha;  // U_p eigenvalue, classical normalization
  std::vector<ApproxDistribution> val;  // one distribution per generator
  long coherence = 0;  // graded precision certified by symbol_coherence
  long iterations = 0; // U_p/alpha steps performed by the lift
};

// Psi(h D0) for unimodular h: act(swap(g_j h^-1), val[j]) with swap
// exchanging the diagonal entries, so that specialization matches the
// classical right-action evaluation.
ApproxDistribution oc_eval_unimodular(const ManinSymbolSpace& S,
                                      const OverconvergentSymbol& Psi, const M2& h);
// Psi({x -> y}) through the continued-fraction decomposition.
ApproxDistribution oc_eval_path(const ManinSymbolSpace& S, const OverconvergentSymbol& Psi,
                                const Cusp& x, const Cusp& y);

// (U_p Psi)(g_i D0) = sum_{b mod p} act_up_summand(b, Psi(delta_b g_i D0)),
// delta_b = [1,b;0,p]; commutes with T_ell and intertwines the classical U_p
// under specialization.
OverconvergentSymbol up_on_symbol(const ManinSymbolSpace& S, const OverconvergentSymbol& Psi);

// Truncation to classical moments, as a level-N symbol vector.
PadicSymbol specialize_symbol(const ManinSymbolSpace& S, const OverconvergentSymbol& Psi);

// Largest M' <= M such that the eigen-equation U_p Psi = alpha Psi and path
// additivity hold in the graded sense (moment j mod p^(M'-j)).
long symbol_coherence(const ManinSymbolSpace& S, const OverconvergentSymbol& Psi);

// Eigenlift of the p-stabilized classical symbol phi (level S.N, U_p phi =
// alpha phi): moments 0..k-2 from phi, zero tails, then Psi <- (U_p/alpha)Psi
// until the tuple is graded-stable or the budget (default 2M) runs out.
// Throws on critical slope v_p(alpha) >= k-1, insufficient precision
// M <= k-1 + v_p(alpha), or a divergent iteration.
OverconvergentSymbol lift(const ManinSymbolSpace& S, const PadicSymbol& phi,
                          const PadicNumber& alpha, long M, long iters = -1);
// Iteration engine on an explicit initial tuple (for independence checks).
OverconvergentSymbol lift_from(const ManinSymbolSpace& S, std::vector<ApproxDistribution> init,
                               const PadicNumber& alpha, long iters = -1);

// Level-n piece of the measure attached to the eigensymbol, centered at a:
// moment j is alpha^(-n) p^(nj) [Psi({infty -> a/p^n})]_j, the integral of
// (x-a)^j over a + p^n Z_p.  Moments keep their honest precision (the level
// scaling exceeds the plain filtration cap), and summing the level-(n+1)
// pieces over the residues above a, recentered, returns the level-n piece.
ApproxDistribution measure_piece(const ManinSymbolSpace& S, const OverconvergentSymbol& Psi,
                                 const mpz_class& a, long n);

// Moments about center2 of a list of moments about center1,
// shift = center1 - center2: mu'_j = sum_i binom(j,i) shift^(j-i) mu_i.
std::vector<PadicNumber> recenter_moments(const std::vector<PadicNumber>& mu,
                                          const PadicNumber& shift);

struct AdmissibilityProfile {
  std::vector<double> log_norms;  // base-p log of the n-th admissibility norm
  double fitted = 0;              // least-squares growth exponent
};
// n-th norm: max over units a mod p^n and moments j of n*j - v_p of the
// j-th moment of measure_piece(a, n); growth exponent ~ v_p(alpha).
AdmissibilityProfile admissibility_profile(const ManinSymbolSpace& S,
                                           const OverconvergentSymbol& Psi, long n_max);

// Textual snapshot: one header line, then one line per generator and moment.
std::string dump_symbol(const OverconvergentSymbol& Psi);

}  // namespace lp
