#pragma once

#include <map>
#include <string>
#include <vector>

#include "lp/cyclo.hpp"
#include "lp/dist.hpp"
#include "lp/modsym.hpp"
#include "lp/ocsym.hpp"
#include "lp/padic.hpp"

namespace lp {

// Moments of the p-adic L-measure on Z_p^*, organized by level.
// pieces[n-1][a] holds, for each unit a mod p^n, the moments about the
// Teichmuller center omega(a) of the restriction of the measure to
// a + p^n Z_p.  All lifts of a to level n+1 share the same center, so
// summing the pieces above a reproduces the level-n piece literally.
// Moments keep their honest per-index precision; they are never re-capped
// to the plain filtration profile.
struct GaloisDistribution {
  long p = 0;
  long k = 2;
  long M = 0;      // moments stored per piece
  long n_max = 1;  // deepest stored level
  PadicNumber alpha;
  std::vector<std::map<long, ApproxDistribution>> pieces;
};

// Reads the measure off a coherent lifted symbol down to depth n_max.
// Error: the precision ledger must survive the depth, n_max * v_p(alpha) < M.
GaloisDistribution ev_from_symbol(const ManinSymbolSpace& S,
                                  const OverconvergentSymbol& Psi, long n_max);

// Checks that every level-n piece equals the recentered sum of its
// level-(n+1) children, at the precision both sides carry.
bool ev_level_compatible(const GaloisDistribution& ev);

// Sum of the zeroth moments at level 1: the total mass of the measure,
// equal to (1 - 1/alpha) times the refined symbol's value at {oo -> 0}.
PadicNumber ev_total_mass(const GaloisDistribution& ev);

// L_p(chi, s) = integral of chi(x) <x>^(s-1) d mu, s any p-adic number.
// The kernel on a + p^n Z_p expands through u = (x - omega(a))/omega(a):
// <x> = 1 + u exactly, so <x>^(s-1) = sum_j binom(s-1, j) u^j pairs with
// the recentered moments.  Depth n = max(cond chi, 1) must be <= n_max.
// Values lie in Q_p(zeta_{p^(c-1)}) for conductor exponent c.
CycloElement lp_value(const GaloisDistribution& ev, const DirichletChar& chi,
                      const PadicNumber& s);

// Expansion of s -> L_p(chi, s) about an integer center, degree D.
// Coefficient t pairs the exact rational u-series of
// (1+u)^(center-1) log(1+u)^t / t! with the moments.  Tame chi only:
// wild values leave the coefficient ring Z_p.
PadicPowerSeries lp_series(const GaloisDistribution& ev,
                           const DirichletChar& chi, long center, long D);

// A refined eigenform together with its lifted symbols and measures,
// ready for evaluation at any point of the (chi, s) parameter space.
struct LfuncContext {
  RefinedEigenform F;
  long M = 0;
  long n_max = 1;
  OverconvergentSymbol lift_plus;
  OverconvergentSymbol lift_minus;
  GaloisDistribution ev_plus;
  GaloisDistribution ev_minus;
};

LfuncContext make_context(const EigenformDesc& desc, long p, long M,
                          long n_max, long slope_choice = 0);

// The measure matching the parity of chi: the integrand chi(x)<x>^(s-1)
// transforms under x -> -x by chi(-1) for every s, so the opposite-parity
// measure pairs to zero.
const GaloisDistribution& ev_for(const LfuncContext& C,
                                 const DirichletChar& chi);

CycloElement lp_value(const LfuncContext& C, const DirichletChar& chi,
                      const PadicNumber& s);
PadicPowerSeries lp_series(const LfuncContext& C, const DirichletChar& chi,
                           long center, long D);

// Classical side of the interpolation identity at a critical point
// 1 <= r <= k-1, computed on the refined symbol without distributions:
//   E(psi, r) * alpha^(-nu) * sum_a psi(a) Phi({oo -> a/p^nu})((a + p^nu z)^(r-1))
// where psi = chi * omega^(1-r) taken primitive, nu its conductor exponent,
// and E(psi, r) = 1 - p^(r-1)/alpha when nu = 0, else 1.  The parity of the
// symbol is chi(-1).  Vanishing denominators surface through
// interpolation_check, not here.
CycloElement interpolation_rhs(const LfuncContext& C, const DirichletChar& chi,
                               long r);
// Same sum with a substituted U_p eigenvalue; the residual against the
// measure side is then a unit rather than zero.
CycloElement interpolation_rhs_with(const LfuncContext& C,
                                    const DirichletChar& chi, long r,
                                    const PadicNumber& up_eigenvalue);

struct InterpPoint {
  DirichletChar chi;
  long r = 1;
};

struct InterpResult {
  // Smallest relative agreement depth over all pairwise cross-ratios
  // L_i RHS_j - L_j RHS_i; with a single point, the declared precision.
  long min_digits = 0;
  bool within_precision = true;
  std::vector<std::string> rows;
};

// Pairwise cross-ratio residuals between the measure side and the classical
// side.  The lattice normalization and the stabilization scale are common to
// every point, so the ratios are convention-free.  Errors: non-critical r is
// a domain error; a vanishing classical side is a pairing error.
InterpResult interpolation_check(const LfuncContext& C,
                                 const std::vector<InterpPoint>& points);

struct FeResult {
  int eps_fit = 0;  // +1 or -1, fitted from the first usable grid point
  bool matches_root_number = false;  // against the refined eps_tilde
  // Agreement depth of L_p(chi, s) - eps chi(-1/n) <n>^(1-s) L_p(chi^-1, 2-s)
  // relative to the size of the two sides, minimized over the grid.  In the
  // {oo -> a/p^nu} path orientation used here the tame level n enters the
  // equation inverted; the sign eps is orientation-independent.
  long min_rel_digits = 0;
  bool zero_within_precision = true;
  std::vector<std::string> rows;
};

// Functional equation for weight-2 refinements (w = 0): fits the sign from
// one grid point, asserts it is +-1, checks the residual across the whole
// (chi, s) grid, and compares the sign with the eps_tilde derived from the
// Fricke involution and the refinement type.
FeResult functional_equation_check(const LfuncContext& C,
                                   const std::vector<DirichletChar>& chis,
                                   const std::vector<PadicNumber>& grid);

struct LpReport {
  std::string eigenform;
  std::string character;
  long p = 0;
  long k = 2;
  long center = 1;
  long degree = 0;
  long moments = 0;
  long depth = 1;
  bool tame = true;
  PadicPowerSeries series;  // tame characters only
  std::string value_str;    // printable value of L_p(chi, center)
  PadicNumber value;
  std::vector<PadicNumber> derivatives;  // t-th derivative at center, t >= 1
  long declared_digits = 0;              // abs prec floor across coefficients
  bool steinberg = false;
  int eps_p = 0;
  int eps_tilde = 0;
  bool trivial_zero_expected = false;  // E-set membership at this point
  long e = 0;                          // order of forced vanishing
  bool has_linv = false;
  PadicNumber empirical_linv;  // L_p'(k/2) / l_alg when e = 1
  PadicNumber l_alg;           // lattice-normalized classical central value
};

// Evaluation report at one (chi, center); series to the requested degree
// when chi is tame, bare value otherwise.
LpReport lp_report(const LfuncContext& C, const DirichletChar& chi,
                   long center, long degree);

// Trivial-zero analysis at the central point with the trivial character.
// The forced-zero set is {p} exactly when the refinement is Steinberg with
// eps_p = -1; then L_p vanishes at the center and the first derivative
// divided by the classical central value is the empirical L-invariant.
// A Steinberg refinement with eps_p = +1 stays outside the set and the
// measure itself is zero (the Euler factor 1 - 1/alpha kills the mass
// only when alpha = +1).
LpReport trivial_zero_report(const LfuncContext& C, long deriv_order = 1);

// Divides the removable factor 1 - p^(r-1)/alpha out of L_p(chi, r) for
// unramified psi = chi omega^(1-r); domain error when the factor vanishes
// (the trivial-zero case, where the quotient is not defined by this route).
CycloElement improved_lp_value(const LfuncContext& C, const DirichletChar& chi,
                               long r);

}  // namespace lp
