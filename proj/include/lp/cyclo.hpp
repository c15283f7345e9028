#pragma once

#include <string>
#include <vector>

#include "lp/padic.hpp"

namespace lp {

// Element of Z_p[zeta_{p^m}] in the power basis of the p^m-th cyclotomic
// polynomial Phi_{p^m}(X) = sum_{i<p} X^{i p^(m-1)}; degree phi(p^m).
// m = 0 is the base ring Z_p (single coefficient).
struct CycloElement {
  long p = 0;
  long m = 0;
  std::vector<PadicNumber> a;

  long degree() const { return (long)a.size(); }
};

long cyclo_degree(long p, long m);  // phi(p^m), = 1 for m = 0

CycloElement cyclo_zero(long p, long m, long abs_prec);
CycloElement cyclo_one(long p, long m, long abs_prec);
CycloElement cyclo_from_padic(const PadicNumber& x, long m);
// zeta_{p^m}^e as a basis element (reduced mod Phi); e taken mod p^m
CycloElement cyclo_zeta(long p, long m, long e, long abs_prec);

CycloElement cyclo_add(const CycloElement& x, const CycloElement& y);
CycloElement cyclo_sub(const CycloElement& x, const CycloElement& y);
CycloElement cyclo_neg(const CycloElement& x);
CycloElement cyclo_mul(const CycloElement& x, const CycloElement& y);
CycloElement cyclo_scale(const CycloElement& x, const PadicNumber& s);
// x * zeta^e, exponent arithmetic only (no full convolution)
CycloElement cyclo_mul_zeta(const CycloElement& x, long e);

bool cyclo_is_zero(const CycloElement& x);
bool cyclo_agree(const CycloElement& x, const CycloElement& y);
// min valuation over coefficients; huge value for zero-at-precision
long cyclo_valuation(const CycloElement& x);
// smallest absolute precision over coefficients
long cyclo_abs_prec(const CycloElement& x);

// inclusion Z_p[zeta_{p^m}] -> Z_p[zeta_{p^m2}], zeta_m -> zeta_{m2}^(p^(m2-m))
CycloElement cyclo_embed(const CycloElement& x, long m2);
// Galois trace one level down (degree p for m >= 2, degree p-1 for m = 1)
CycloElement cyclo_trace_down(const CycloElement& x);

std::string cyclo_to_string(const CycloElement& x);

// Dirichlet character of (Z/p^cmod)^*, stored by index j against the
// canonical generator g = smallest positive primitive root of p^cmod:
// chi(g^k) = omega(g)^(jk mod p-1) * zeta_{p^(cmod-1)}^(jk).  cond is the
// minimal conductor exponent; order and parity are derived and cached.
struct DirichletChar {
  long p = 0;
  long cmod = 0;   // modulus exponent at which the character is presented
  long j = 0;      // index modulo phi(p^cmod)
  long cond = 0;   // conductor exponent (minimal)
  long order = 1;  // order of chi
  long parity = 1; // chi(-1)
  long t_exp = 0;  // Teichmuller part of generator image (exponent mod p-1)
  long w_level = 0, w_exp = 0;  // p-power part: cyclotomic level and exponent
};

// all phi(p^c) characters of modulus p^c, minimal conductors annotated
std::vector<DirichletChar> enumerate_chars(long p, long c);

DirichletChar trivial_char(long p);
// character of modulus p^cmod with given index
DirichletChar char_from_index(long p, long cmod, long j);
DirichletChar char_inverse(const DirichletChar& chi);
// chi * omega^t at the same modulus (modulus raised to >= 1 if needed)
DirichletChar char_mul_teich(const DirichletChar& chi, long t);
bool char_is_trivial(const DirichletChar& chi);
// value level: cyclotomic level of the character's values
long char_value_level(const DirichletChar& chi);

// chi(a); zero on multiples of p when cmod >= 1, constant 1 when cmod = 0
CycloElement chi_value(const DirichletChar& chi, const mpz_class& a, long M);
// tame characters only (value level 0)
PadicNumber chi_value_padic(const DirichletChar& chi, const mpz_class& a, long M);

// classical Gauss sum sum_a chi(a) zeta_{p^cond}^a at cyclotomic level
// max(cond, 1) for primitive chi of conductor >= 1; returns 1 at level 0
// for conductor 0 (unramified convention)
CycloElement gauss_sum(const DirichletChar& chi, long M);
// same sum carried out natively inside level m >= cond
CycloElement gauss_sum_at_level(const DirichletChar& chi, long m, long M);

// canonical generator: smallest positive primitive root of p^c
long canonical_generator(long p, long c);
// discrete log of a to base canonical_generator(p,c) in (Z/p^c)^*
long char_dlog(long p, long c, const mpz_class& a);

// CLI literal: chi{p=5,c=1,ord=2} with optional ,idx=j disambiguator.
// Without idx, the character of minimal index j with the given conductor
// exponent and order is chosen.
DirichletChar parse_char_literal(const std::string& s);
std::string char_literal(const DirichletChar& chi);

}  // namespace lp
