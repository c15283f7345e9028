#pragma once
// L-invariants of split-multiplicative elliptic curves over Q: exact
// Weierstrass invariants, the Tate parameter by p-adic inversion of the
// j-series, L = log_p(q) / ord_p(q) on the Iwasawa branch log_p(p) = 0,
// and the central-derivative identity L_p'(1) = L * L_alg checked against
// the measure pipeline on the same symbol lattice.

#include <array>
#include <map>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "lp/lfunc.hpp"
#include "lp/modsym.hpp"
#include "lp/padic.hpp"

namespace lp {

enum class ReductionType { Good, SplitMultiplicative, NonsplitMultiplicative, Additive };

struct EllipticCurveData {
  std::string label;
  std::array<mpq_class, 5> a;  // a1, a2, a3, a4, a6
  mpq_class b2, b4, b6, b8, c4, c6, disc;
  mpq_class j;
  // bad primes the given model classifies directly (it is p-minimal there)
  std::map<long, ReductionType> reduction;
  // product of the bad primes when every one of them is multiplicative;
  // 0 when some prime resists (non-minimal there, additive, or non-integral
  // model), in which case the curve cannot drive the symbol pipeline
  mpz_class conductor = 0;
};

// Derives b/c-invariants, discriminant and j from the a-invariants and
// classifies the bad reduction the model exposes. Throws on disc = 0.
EllipticCurveData curve_from_ainvs(const std::vector<mpq_class>& ainvs,
                                   const std::string& label = "");

// Quadratic twist by nonzero d, as the model y^2 = x^3 - 27 d^2 c4 x - 54 d^3 c6.
// Same j; the model is additive at primes dividing 6d.
EllipticCurveData quadratic_twist(const EllipticCurveData& E, const mpz_class& d);

// ell + 1 - #E(F_ell), counting projective points of the reduced model
// (singular point included). Equals a_ell at good primes, the U_ell
// eigenvalue +-1 at multiplicative primes, 0 at additive ones.
// Integral model required, ell-minimal.
long curve_ap(const EllipticCurveData& E, long ell);

// Classification at one prime; throws when the model leaves it ambiguous
// (v_p(c4) >= 4 and v_p(disc) >= 12, so a smaller model may exist).
ReductionType reduction_type(const EllipticCurveData& E, long p);

// The weight-2 eigenform of level conductor(E): a_ell recorded for every
// prime ell <= bound and every bad prime. Requires conductor != 0.
EigenformDesc curve_eigenform(const EllipticCurveData& E, long bound = 13);

// c_0..c_{T-1} of j(q) = 1/q + 744 + 196884 q + ..., generated from
// E_4^3 / Delta with exact integer arithmetic.
std::vector<mpz_class> j_series_tail(long T);

// Tate parameter: the unique q with j(q) = j(E) and v_p(q) = -v_p(j) > 0,
// unit part carried to relative precision >= M. Fixed-point iteration of
// q <- 1/(j - c_0 - c_1 q - ...); the recomputed j(q) is checked to agree
// with j(E) to absolute precision M - 2 at least. Throws when v_p(j) >= 0
// (no multiplicative uniformization).
PadicNumber tate_parameter(const EllipticCurveData& E, long p, long M);

// L = log_p(q) / ord_p(q). Split multiplicative at p required: the nonsplit
// refinement has eps_p = +1 and no central trivial zero, so the invariant
// is not the object the derivative identity consumes there.
PadicNumber l_invariant(const EllipticCurveData& E, long p, long M);

struct MttResult {
  std::string curve;
  long p = 0;
  long M = 0;
  ReductionType reduction = ReductionType::Good;
  bool trivial_zero = false;  // split multiplicative: forced zero at the center
  bool degenerate = false;    // classical central value 0; identity is 0 = 0
  LpReport report;            // measure-pipeline analysis at (trivial chi, s = 1)
  // split-multiplicative branch
  PadicNumber tate_q;
  long tate_ord = 0;  // ord_p(q) = -v_p(j)
  PadicNumber linv;
  PadicNumber residual;       // L_p'(1) - linv * l_alg
  long residual_digits = 0;   // digits of agreement relative to linv * l_alg
  // good-ordinary branch: interpolation at the center instead,
  // L_p(1) = p * (1 - 1/alpha)^2 * l_alg (p = the stabilization scale at k = 2)
  PadicNumber interp_residual;
  long interp_digits = 0;
};

// The two-pipeline comparison. Split multiplicative: builds the refined
// form at level conductor(E), runs the trivial-zero report, and compares
// L_p'(1) against l_invariant(E) * l_alg; both sides sit on the same
// ClassicalSymbol lattice, so no period enters. Good ordinary: checks the
// center against the interpolation formula instead. Nonsplit, additive,
// and non-ordinary good primes are refused; a vanishing L-invariant at
// working precision is an error (conjecturally impossible).
MttResult mtt_check(const EllipticCurveData& E, long p, long M);

}  // namespace lp
