#pragma once
// Integer q-expansions: eta products, Eisenstein series, Delta, j.
// Exact mpz coefficients throughout; used as in-repo oracles and for the
// Tate-parameter series in linv.

#include <gmpxx.h>

#include <stdexcept>
#include <utility>
#include <vector>

namespace lp {

using ZSeries = std::vector<mpz_class>;  // coefficients of q^0 .. q^{n-1}

inline ZSeries zs_mul(const ZSeries& a, const ZSeries& b) {
  long n = (long)std::min(a.size(), b.size());
  ZSeries c(n, mpz_class(0));
  for (long i = 0; i < n; ++i) {
    if (a[i] == 0) continue;
    for (long j = 0; i + j < n; ++j)
      if (b[j] != 0) c[i + j] += a[i] * b[j];
  }
  return c;
}

// 1/a for a unit power series (a[0] = +-1).
inline ZSeries zs_inv_unit(const ZSeries& a, long n) {
  if (a.empty() || (a[0] != 1 && a[0] != -1))
    throw std::invalid_argument("zs_inv_unit: leading coefficient must be a unit");
  ZSeries b(n, mpz_class(0));
  b[0] = a[0];  // a[0]^{-1} = a[0] for +-1
  for (long i = 1; i < n; ++i) {
    mpz_class s = 0;
    for (long j = 1; j <= i && j < (long)a.size(); ++j) s += a[j] * b[i - j];
    b[i] = -a[0] * s;
  }
  return b;
}

// prod_{j>=1} (1 - q^{m j})^e, truncated below q^n; e >= 0.
inline ZSeries eta_euler_power(long m, long e, long n) {
  if (m < 1 || e < 0) throw std::invalid_argument("eta_euler_power: need m >= 1, e >= 0");
  ZSeries c(n, mpz_class(0));
  c[0] = 1;
  for (long j = 1; m * j < n; ++j) {
    long t = m * j;
    for (long rep = 0; rep < e; ++rep)
      for (long i = n - 1; i >= t; --i) c[i] -= c[i - t];
  }
  return c;
}

// prod_i eta(m_i z)^{e_i} including the q^{sum m_i e_i / 24} prefactor;
// requires 24 | sum m_i e_i (holomorphic integer-exponent case only).
inline ZSeries eta_product(const std::vector<std::pair<long, long>>& factors, long n) {
  long w = 0;
  for (auto& f : factors) w += f.first * f.second;
  if (w % 24 != 0) throw std::invalid_argument("eta_product: fractional q-power");
  long shift = w / 24;
  if (shift < 0 || shift >= n) throw std::invalid_argument("eta_product: truncation too short");
  ZSeries c(n, mpz_class(0));
  c[0] = 1;
  for (auto& f : factors) c = zs_mul(c, eta_euler_power(f.first, f.second, n));
  ZSeries out(n, mpz_class(0));
  for (long i = shift; i < n; ++i) out[i] = c[i - shift];
  return out;
}

// sigma_t(j) = sum of t-th powers of divisors.
inline mpz_class sigma_power(long j, long t) {
  mpz_class s = 0;
  for (long d = 1; d * d <= j; ++d) {
    if (j % d) continue;
    mpz_class a, b;
    mpz_ui_pow_ui(a.get_mpz_t(), (unsigned long)d, (unsigned long)t);
    s += a;
    long d2 = j / d;
    if (d2 != d) {
      mpz_ui_pow_ui(b.get_mpz_t(), (unsigned long)d2, (unsigned long)t);
      s += b;
    }
  }
  return s;
}

// E_4 = 1 + 240 sum sigma_3(j) q^j
inline ZSeries eisenstein_e4(long n) {
  ZSeries c(n, mpz_class(0));
  c[0] = 1;
  for (long j = 1; j < n; ++j) c[j] = 240 * sigma_power(j, 3);
  return c;
}

// Delta = q prod (1-q^j)^24
inline ZSeries delta_series(long n) { return eta_product({{1, 24}}, n); }

// j = E_4^3 / Delta as a Laurent series: returns coefficients of
// q^{-1}, q^0, q^1, ..., q^{n-2} (length n). j = q^{-1} + 744 + 196884 q + ...
inline ZSeries j_series(long n) {
  long nn = n + 2;
  ZSeries e4 = eisenstein_e4(nn);
  ZSeries num = zs_mul(zs_mul(e4, e4), e4);
  ZSeries del = delta_series(nn);
  // Delta = q * unit; divide out the leading q.
  if (del[0] != 0 || del[1] != 1) throw std::logic_error("j_series: Delta normalization");
  ZSeries unit(del.begin() + 1, del.end());
  ZSeries inv = zs_inv_unit(unit, nn - 1);
  ZSeries full = zs_mul(num, inv);  // E4^3 / (Delta/q) = q * j
  ZSeries out(n, mpz_class(0));
  for (long i = 0; i < n && i < (long)full.size(); ++i) out[i] = full[i];
  return out;
}

}  // namespace lp
