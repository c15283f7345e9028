#pragma once
// The multivariate trivial-zero engine: truncated power series
// L(x_1..x_e, u) over exact rationals, the u-parity functional equation,
// improvement factorizations over subsets S of the exceptional set, the
// forced divisibilities (H_S), and mechanical verification of the
// Taylor-coefficient vanishing and the diagonal-derivative identity.

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace lp {

// Sparse series in x_1..x_e and u, truncated at total degree D.
// Keys pack the exponent vector (n_1..n_e, i), 4 bits each, u last.
// The map carries no zero entries. e <= 5, D <= 12.
struct MultiSeries {
  long e = 0;
  long D = 0;
  std::map<uint32_t, mpq_class> c;
};

uint32_t ms_key(const std::vector<long>& exps);
std::vector<long> ms_exps(uint32_t key, long e);
long ms_total_degree(uint32_t key, long e);

MultiSeries ms_zero(long e, long D);
void ms_set(MultiSeries& f, const std::vector<long>& exps, const mpq_class& v);
mpq_class ms_get(const MultiSeries& f, const std::vector<long>& exps);
bool ms_equal(const MultiSeries& a, const MultiSeries& b);
MultiSeries ms_add(const MultiSeries& a, const MultiSeries& b);
MultiSeries ms_scale(const MultiSeries& a, const mpq_class& s);
MultiSeries ms_mul(const MultiSeries& a, const MultiSeries& b);

// Substitution target for one x-variable; u is never substituted.
struct SubstTarget {
  enum Kind { ToVar, ToU, ToScalar } kind = ToVar;
  long w = 0;         // ToVar: index of the target variable
  mpq_class scalar;   // ToScalar
};
// exact truncated substitution; assignment.size() == f.e
MultiSeries substitute(const MultiSeries& f, const std::vector<SubstTarget>& assignment);

// x_v -> u for every v outside the mask, x_v kept for v in the mask
MultiSeries partial_diagonal(const MultiSeries& f, unsigned long mask);

// true iff every monomial's u-exponent has the parity forced by
// L(x,-u) = eps L(x,u): even for eps = +1, odd for eps = -1
bool check_parity(const MultiSeries& f, int eps);

// least u-exponent among stored monomials; D+1 for the zero series
long u_order(const MultiSeries& f);

// A synthesized family: the top series, one analytic Euler-factor series
// per exceptional place (a member of the ideal (x_v, u), truncated to the
// band where products against the improved series resolve below D), and
// the improved series for every subset S, truncated at D - |E \ S|.
struct FamilyScenario {
  long e = 0;
  int eps_tilde = 0;  // +-1
  long D = 0;
  MultiSeries Lp;
  std::vector<MultiSeries> euler;     // index v = 0..e-1
  std::vector<MultiSeries> improved;  // index = subset mask, 0..2^e-1
};

// The u-divisibility forced at subset S: |E \ S| from the Euler factors,
// one more when (-1)^(|E\S|) = -eps (the qualifying parity).
long forced_u_order(long e, int eps_tilde, unsigned long mask);

// Random scenario satisfying parity, the factorizations, and (H_S).
// D >= e + 2 required, default e + 3. Deterministic in the seed.
FamilyScenario synthesize_scenario(long e, int eps_tilde, long D, uint64_t seed);

struct VanishingReport {
  std::vector<std::string> hypothesis_violations;
  std::vector<std::string> conclusion_violations;
  // observational: the nonzero coefficients on the minimal layer |n| + i = e
  std::vector<std::string> degree_e_support;
  bool hypotheses_ok() const { return hypothesis_violations.empty(); }
  bool conclusions_ok() const { return conclusion_violations.empty(); }
  bool all_ok() const { return hypotheses_ok() && conclusions_ok(); }
};

// Checks the hypotheses first (parity, factorization for every S, (H_S),
// Euler-factor ideal membership), then the conclusions: for i < e,
// a_i(n) = 0 whenever ||n|| < e - i, and sum over |n| = e - i of a_i(n) = 0.
VanishingReport verify_vanishing(const FamilyScenario& sc);

struct DiagonalDerivative {
  mpq_class lhs;  // e! [u^e] L((u)_v, u)
  mpq_class rhs;  // e! a_e(0)
  bool equal = false;
  long diag_u_order = 0;  // asserted >= e by the caller
};

DiagonalDerivative diagonal_derivative(const MultiSeries& Lp, long e);
DiagonalDerivative diagonal_derivative(const FamilyScenario& sc);

// Single-coefficient corruption for mutation testing. Applied in place.
struct Mutation {
  std::string piece;  // "Lp", "euler", "improved"
  long index = -1;    // euler: v, improved: mask
  uint32_t key = 0;
  mpq_class delta;
  long degree = 0;
  // true when every product the coefficient enters is truncated above D,
  // so no stored identity can see the change
  bool truncation_blind = false;
};
Mutation mutate_scenario(FamilyScenario& sc, std::mt19937_64& rng);

// hypotheses + conclusions + diagonal identity in one predicate
bool scenario_consistent(const FamilyScenario& sc);

}  // namespace lp
