#pragma once
// Finite-precision p-adic distributions on Z_p in the moment model.
//
// An ApproxDistribution of weight k (even, >= 2) stores the moments
// mu[j] = mu(z^j) for j = 0..M-1.  Filtration convention: mu[j] is
// significant modulo p^(M-j) only, and every operation caps moment j at
// absolute precision M-j on output.

#include <gmpxx.h>

#include <vector>

#include "lp/modsym.hpp"
#include "lp/padic.hpp"

namespace lp {

struct ApproxDistribution {
  long p = 0;
  long k = 2;  // weight; k-2 is the degree of the classical coefficients
  long M = 0;  // number of stored moments
  std::vector<PadicNumber> mu;  // mu[j] significant mod p^(M-j)
};

ApproxDistribution dist_zero(long p, long k, long M);
// Takes ownership of the moment vector (must have size M) and applies the
// filtration caps.
ApproxDistribution dist_from_moments(long p, long k, std::vector<PadicNumber> mu);
// Point mass at a in Z_p: moments a^j.
ApproxDistribution dist_dirac(long p, long k, const mpz_class& a, long M);

ApproxDistribution dist_add(const ApproxDistribution& a, const ApproxDistribution& b);
ApproxDistribution dist_sub(const ApproxDistribution& a, const ApproxDistribution& b);
ApproxDistribution dist_neg(const ApproxDistribution& a);
ApproxDistribution dist_scale(const ApproxDistribution& a, const PadicNumber& s);

bool dist_is_zero(const ApproxDistribution& a);
// Every moment agrees at the declared precisions.
bool dist_agree(const ApproxDistribution& a, const ApproxDistribution& b);
// Largest m <= M such that mu[j](a) = mu[j](b) mod p^(m-j) for all j < m;
// the graded comparison used by fixed-point stop rules.
long dist_coherence(const ApproxDistribution& a, const ApproxDistribution& b);

// Left action of gamma = [a,b;c,d] with p | c, p nmid d, det != 0:
//   (gamma.mu)(z^j) = mu( det^(-(k-2)/2) (az+b)^j (cz+d)^(k-2-j) ),
// negative powers of (cz+d) expanded through the geometric series in
// (c/d)z, truncated per the filtration.  A determinant of positive
// valuation is accepted only for upper-triangular matrices (c = 0, the
// diag(p,1) family); anything else throws.
ApproxDistribution act(const M2& gamma, const ApproxDistribution& mu);

// act(diag(u,1)) for a unit u: mu[j] -> u^(j-(k-2)/2) * mu[j], with no
// filtration loss beyond the precision of u itself.
ApproxDistribution act_unit_scaling(const PadicNumber& u, const ApproxDistribution& mu);

// U_p summand in the classical normalization:
//   mu'[j] = sum_m binom(j,m) p^m b^(j-m) mu[m],
// equal to p^((k-2)/2) * act([p,b;0,1], mu).  Integral, reaches the full
// filtration precision M-j in every moment, and its specialization
// intertwines with the classical |[1,b;0,p] action.
ApproxDistribution act_up_summand(long b, const ApproxDistribution& mu);

// Truncation to the k-1 classical moments; requires M >= k-1.
std::vector<PadicNumber> specialize(const ApproxDistribution& mu);

// Transition matrix of act (row j, column m), cached per (gamma, p, k, M).
// Set LP_DIST_CACHE_DIR to persist entries across runs.
using DistTransition = std::vector<std::vector<PadicNumber>>;
const DistTransition& act_transition(const M2& gamma, long p, long k, long M);

}  // namespace lp
