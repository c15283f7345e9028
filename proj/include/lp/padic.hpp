#pragma once
// Fixed-precision arithmetic in Q_p: units tracked to M significant base-p
// digits ("relative precision"), valuations unbounded in both directions.

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

namespace lp {

mpz_class pow_p(long p, long e);  // p^e, e >= 0

// value = p^v * u with u a unit mod p^M.
// zero-at-precision: u == 0, M == 0, and v holds the absolute bound
// (the value is known to be 0 mod p^v).
struct PadicNumber {
  long p = 0;
  long v = 0;
  mpz_class u;
  long M = 0;

  bool is_zero() const { return u == 0; }
  long abs_prec() const { return is_zero() ? v : v + M; }
};

PadicNumber padic_zero(long p, long abs_prec);
PadicNumber padic_one(long p, long M);

// x known mod p^abs_prec (absolute); extracts valuation/unit.
PadicNumber padic_from_integer(const mpz_class& x, long p, long abs_prec);
// exact rational a/b to M significant digits; b != 0.
PadicNumber padic_from_rational(const mpz_class& a, const mpz_class& b, long p, long M);
PadicNumber padic_from_rational(const mpq_class& q, long p, long M);

PadicNumber add(const PadicNumber& a, const PadicNumber& b);
PadicNumber sub(const PadicNumber& a, const PadicNumber& b);
PadicNumber neg(const PadicNumber& a);
PadicNumber mul(const PadicNumber& a, const PadicNumber& b);
PadicNumber mul(const PadicNumber& a, long s);
PadicNumber inv(const PadicNumber& a);
PadicNumber div(const PadicNumber& a, const PadicNumber& b);
PadicNumber pow_int(const PadicNumber& a, long e);  // e any sign

// reduce declared precision; no-ops if already coarser.
PadicNumber cap_abs(const PadicNumber& a, long abs_prec);
PadicNumber cap_rel(const PadicNumber& a, long M);

// a - b is zero at its declared precision.
bool agree(const PadicNumber& a, const PadicNumber& b);

// canonical integer representative of p^v*u mod p^K (requires v >= 0 or p^-v | it; K <= abs_prec)
mpz_class to_integer_mod(const PadicNumber& a, long K);

// Teichmuller lift of a: omega^(p-1) = 1, omega = a mod p. p = 2 uses the
// mod-4 convention (omega = +-1).
PadicNumber teichmuller(const mpz_class& a, long p, long M);
PadicNumber teichmuller_of(const PadicNumber& a);  // unit input

// log(1+t) on x = 1 + t, t = 0 mod p (mod 4 if p = 2).
PadicNumber iwasawa_log(const PadicNumber& x);
// any unit: log(x / teichmuller(x)).
PadicNumber log_unit(const PadicNumber& x);
// any nonzero x: Iwasawa branch log(p) = 0, roots of unity killed.
PadicNumber iwasawa_log_any(const PadicNumber& x);
// exp on v_p(x) >= 1 (p odd).
PadicNumber exp_p(const PadicNumber& x);

// <x> = x / (p^v * teichmuller): principal-unit projection.
PadicNumber principal_unit(const PadicNumber& x);
// <x>^e for p-adic exponent e: exp(e * log<x>).
PadicNumber pow_principal(const PadicNumber& x, const PadicNumber& e);
// binom(s, j) = s(s-1)...(s-j+1)/j! for p-adic s.
PadicNumber binom_padic(const PadicNumber& s, long j);

// truncated expansion around an integer center r.
struct PadicPowerSeries {
  long p = 0;
  long center = 0;
  std::vector<PadicNumber> c;  // c[0..D]
  long degree() const { return (long)c.size() - 1; }
};

PadicPowerSeries series_zero(long p, long center, long D, long abs_prec);
PadicPowerSeries series_add(const PadicPowerSeries& a, const PadicPowerSeries& b);
PadicPowerSeries series_mul(const PadicPowerSeries& a, const PadicPowerSeries& b);
PadicPowerSeries series_scale(const PadicPowerSeries& a, const PadicNumber& s);
PadicNumber series_eval(const PadicPowerSeries& f, const PadicNumber& s);

// <x>^(s-1) as a series in (s - r): <x>^(r-1) * sum_j log<x>^j (s-r)^j / j!.
PadicPowerSeries padic_power_series(const PadicNumber& x, long r, long D, long M);

// "p^v * (d0,d1,...) + O(p^(v+M))", digits little-endian; parses back bit-exactly.
std::string to_string(const PadicNumber& a);
PadicNumber padic_parse(const std::string& s);

std::vector<long> unit_digits(const PadicNumber& a);  // little-endian, length M

long val_p(const mpz_class& x, long p);  // v_p(x), x != 0

}  // namespace lp
