#include "lp/padic.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace lp {

mpz_class pow_p(long p, long e) {
  if (e < 0) throw std::domain_error("pow_p: negative exponent");
  // exact-zero sentinel precisions must never be materialized
  if (e > (1L << 24)) throw std::logic_error("pow_p: absurd exponent");
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), (unsigned long)p, (unsigned long)e);
  return r;
}

long val_p(const mpz_class& x, long p) {
  if (x == 0) throw std::domain_error("val_p: zero");
  mpz_class q = x, rem;
  long v = 0;
  mpz_class P(p);
  while (true) {
    mpz_class qq, rr;
    mpz_tdiv_qr(qq.get_mpz_t(), rr.get_mpz_t(), q.get_mpz_t(), P.get_mpz_t());
    if (rr != 0) break;
    q = qq;
    ++v;
  }
  return v;
}

static mpz_class mod_pk(const mpz_class& x, long p, long k) {
  if (k <= 0) return 0;
  mpz_class m = pow_p(p, k), r;
  mpz_mod(r.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
  return r;
}

static mpz_class invmod_pk(const mpz_class& x, long p, long k) {
  mpz_class m = pow_p(p, k), r;
  if (mpz_invert(r.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t()) == 0)
    throw std::domain_error("invmod_pk: non-unit");
  return r;
}

PadicNumber padic_zero(long p, long abs_prec) {
  PadicNumber z;
  z.p = p;
  z.v = abs_prec;
  z.u = 0;
  z.M = 0;
  return z;
}

PadicNumber padic_one(long p, long M) {
  PadicNumber x;
  x.p = p;
  x.v = 0;
  x.u = 1;
  x.M = M;
  return x;
}

PadicNumber padic_from_integer(const mpz_class& x, long p, long abs_prec) {
  mpz_class r = mod_pk(x, p, abs_prec);
  if (r == 0) return padic_zero(p, abs_prec);
  long t = val_p(r, p);
  PadicNumber out;
  out.p = p;
  out.v = t;
  out.M = abs_prec - t;
  mpz_class pt = pow_p(p, t);
  out.u = mod_pk(r / pt, p, out.M);
  return out;
}

PadicNumber padic_from_rational(const mpz_class& a, const mpz_class& b, long p, long M) {
  if (b == 0) throw std::domain_error("padic_from_rational: division by zero");
  if (a == 0) return padic_zero(p, M);
  long va = val_p(a, p), vb = val_p(b, p);
  mpz_class ua = a / pow_p(p, va), ub = b / pow_p(p, vb);
  PadicNumber out;
  out.p = p;
  out.v = va - vb;
  out.M = M;
  mpz_class num = mod_pk(ua, p, M);
  out.u = mod_pk(num * invmod_pk(mod_pk(ub, p, M), p, M), p, M);
  return out;
}

PadicNumber padic_from_rational(const mpq_class& q, long p, long M) {
  return padic_from_rational(q.get_num(), q.get_den(), p, M);
}

static void check_same_p(const PadicNumber& a, const PadicNumber& b) {
  if (a.p != b.p) throw std::domain_error("mixed primes");
}

PadicNumber add(const PadicNumber& a, const PadicNumber& b) {
  check_same_p(a, b);
  long p = a.p;
  if (a.is_zero() && b.is_zero()) return padic_zero(p, std::min(a.v, b.v));
  if (a.is_zero()) return cap_abs(b, a.v);
  if (b.is_zero()) return cap_abs(a, b.v);
  const PadicNumber& lo = (a.v <= b.v) ? a : b;
  const PadicNumber& hi = (a.v <= b.v) ? b : a;
  long shift = hi.v - lo.v;
  // sum known to absolute precision min(lo.v+lo.M, hi.v+hi.M)
  long absK = std::min(lo.abs_prec(), hi.abs_prec());
  long relK = absK - lo.v;
  if (relK <= 0) return padic_zero(p, absK);
  mpz_class s = lo.u;
  if (shift < relK) s += hi.u * pow_p(p, shift);
  s = mod_pk(s, p, relK);
  if (s == 0) return padic_zero(p, absK);
  long t = val_p(s, p);
  PadicNumber out;
  out.p = p;
  out.v = lo.v + t;
  out.M = relK - t;
  out.u = mod_pk(s / pow_p(p, t), p, out.M);
  return out;
}

PadicNumber neg(const PadicNumber& a) {
  if (a.is_zero()) return a;
  PadicNumber out = a;
  out.u = mod_pk(pow_p(a.p, a.M) - a.u, a.p, a.M);
  return out;
}

PadicNumber sub(const PadicNumber& a, const PadicNumber& b) { return add(a, neg(b)); }

PadicNumber mul(const PadicNumber& a, const PadicNumber& b) {
  check_same_p(a, b);
  long p = a.p;
  if (a.is_zero() || b.is_zero()) {
    // p^va*u * (0 + O(p^K)) = 0 + O(p^(va+K))
    return padic_zero(p, a.v + b.v);
  }
  PadicNumber out;
  out.p = p;
  out.v = a.v + b.v;
  out.M = std::min(a.M, b.M);
  out.u = mod_pk(a.u * b.u, p, out.M);
  return out;
}

PadicNumber mul(const PadicNumber& a, long s) {
  if (s == 0) return padic_zero(a.p, a.abs_prec());
  return mul(a, padic_from_rational(mpz_class(s), 1, a.p, a.M > 0 ? a.M : 1));
}

PadicNumber inv(const PadicNumber& a) {
  if (a.is_zero()) throw std::domain_error("inv: zero divisor");
  PadicNumber out;
  out.p = a.p;
  out.v = -a.v;
  out.M = a.M;
  out.u = invmod_pk(a.u, a.p, a.M);
  return out;
}

PadicNumber div(const PadicNumber& a, const PadicNumber& b) { return mul(a, inv(b)); }

PadicNumber pow_int(const PadicNumber& a, long e) {
  if (e == 0) return padic_one(a.p, a.is_zero() ? 1 : a.M);
  bool neg_e = e < 0;
  long n = neg_e ? -e : e;
  PadicNumber acc = padic_one(a.p, a.is_zero() ? 1 : a.M);
  PadicNumber base = a;
  while (n > 0) {
    if (n & 1) acc = mul(acc, base);
    base = mul(base, base);
    n >>= 1;
  }
  return neg_e ? inv(acc) : acc;
}

PadicNumber cap_abs(const PadicNumber& a, long abs_prec) {
  if (a.is_zero()) {
    PadicNumber z = a;
    z.v = std::min(z.v, abs_prec);
    return z;
  }
  if (a.abs_prec() <= abs_prec) return a;
  long relK = abs_prec - a.v;
  if (relK <= 0) return padic_zero(a.p, abs_prec);
  PadicNumber out = a;
  out.M = relK;
  out.u = mod_pk(a.u, a.p, relK);
  if (out.u == 0) return padic_zero(a.p, abs_prec);
  return out;
}

PadicNumber cap_rel(const PadicNumber& a, long M) {
  if (a.is_zero()) return a;
  if (a.M <= M) return a;
  return cap_abs(a, a.v + M);
}

bool agree(const PadicNumber& a, const PadicNumber& b) { return sub(a, b).is_zero(); }

mpz_class to_integer_mod(const PadicNumber& a, long K) {
  if (a.is_zero()) {
    if (K > a.v) throw std::domain_error("to_integer_mod: insufficient precision");
    return 0;
  }
  if (a.v < 0) throw std::domain_error("to_integer_mod: negative valuation");
  if (K > a.abs_prec()) throw std::domain_error("to_integer_mod: insufficient precision");
  return mod_pk(a.u * pow_p(a.p, a.v), a.p, K);
}

PadicNumber teichmuller(const mpz_class& a, long p, long M) {
  mpz_class r = mod_pk(a, p, 1);
  if (r == 0) throw std::domain_error("teichmuller: not a unit");
  if (p == 2) {
    // mod-4 convention: omega(a) = +1 for a = 1 mod 4, -1 for a = 3 mod 4.
    mpz_class a4 = mod_pk(a, 2, 2);
    PadicNumber out;
    out.p = 2;
    out.v = 0;
    out.M = M;
    out.u = (a4 == 1) ? mpz_class(1) : mod_pk(mpz_class(-1), 2, M);
    return out;
  }
  mpz_class m = pow_p(p, M);
  mpz_class x = mod_pk(a, p, M), prev;
  for (long i = 0; i < M + 2; ++i) {
    prev = x;
    mpz_powm_ui(x.get_mpz_t(), x.get_mpz_t(), (unsigned long)p, m.get_mpz_t());
    if (x == prev) break;
  }
  PadicNumber out;
  out.p = p;
  out.v = 0;
  out.M = M;
  out.u = x;
  return out;
}

PadicNumber teichmuller_of(const PadicNumber& a) {
  if (a.is_zero() || a.v != 0) throw std::domain_error("teichmuller_of: unit required");
  return teichmuller(a.u, a.p, a.M);
}

PadicNumber iwasawa_log(const PadicNumber& x) {
  long p = x.p;
  if (x.is_zero() || x.v != 0) throw std::domain_error("iwasawa_log: unit required");
  long A = x.M;  // absolute precision of x
  mpz_class one(1);
  mpz_class t = mod_pk(x.u - 1, p, A);
  if (t == 0) return padic_zero(p, A);
  long tau = val_p(t, p);
  if ((p > 2 && tau < 1) || (p == 2 && tau < 2))
    throw std::domain_error("iwasawa_log: x must be 1 mod p (mod 4 if p=2)");
  // sum (-1)^(n+1) t^n / n, exact integer handling of the p-part of n.
  // term valuation n*tau - v_p(n) >= n/2, so n <= 2A covers everything.
  mpz_class acc = 0;
  for (long n = 1; n <= 2 * A + 4; ++n) {
    long vn = (n % p == 0) ? val_p(mpz_class(n), p) : 0;
    if (n * tau - vn >= A) continue;
    mpz_class tn;
    mpz_class mod_hi = pow_p(p, A + vn);
    mpz_powm_ui(tn.get_mpz_t(), t.get_mpz_t(), (unsigned long)n, mod_hi.get_mpz_t());
    // t^n exactly divisible by p^(n*tau) >= p^vn
    tn /= pow_p(p, vn);
    long nodd = n;
    while (nodd % p == 0) nodd /= p;
    mpz_class term = mod_pk(tn * invmod_pk(mpz_class(nodd), p, A), p, A);
    if (n % 2 == 0) term = -term;
    acc = mod_pk(acc + term, p, A);
  }
  return padic_from_integer(acc, p, A);
}

PadicNumber log_unit(const PadicNumber& x) {
  if (x.is_zero() || x.v != 0) throw std::domain_error("log_unit: unit required");
  PadicNumber w = teichmuller_of(x);
  return iwasawa_log(div(x, w));
}

PadicNumber iwasawa_log_any(const PadicNumber& x) {
  if (x.is_zero()) throw std::domain_error("iwasawa_log_any: zero");
  PadicNumber unit = x;
  unit.v = 0;  // log(p) = 0 branch
  return log_unit(unit);
}

PadicNumber exp_p(const PadicNumber& x) {
  long p = x.p;
  if (p == 2) throw std::domain_error("exp_p: p=2 unsupported");
  if (x.is_zero()) return padic_one(p, x.v);
  if (x.v < 1) throw std::domain_error("exp_p: needs v_p >= 1");
  long A = x.abs_prec();
  // terms T_n = x^n/n! = p^e * t with e = n*v(x) - v_p(n!) >= n/2; cap n at 2A.
  mpz_class xu = to_integer_mod(x, A) / pow_p(p, x.v);
  mpz_class acc = 1;
  long e = 0;
  mpz_class t = 1;
  for (long n = 1; n <= 2 * A + 4; ++n) {
    long vn = (n % p == 0) ? val_p(mpz_class(n), p) : 0;
    long nodd = n;
    while (nodd % p == 0) nodd /= p;
    e += x.v - vn;
    t = mod_pk(t * xu, p, A);
    t = mod_pk(t * invmod_pk(mpz_class(nodd), p, A), p, A);
    if (e < A) acc = mod_pk(acc + t * pow_p(p, e), p, A);
  }
  return padic_from_integer(acc, p, A);
}

PadicNumber principal_unit(const PadicNumber& x) {
  if (x.is_zero()) throw std::domain_error("principal_unit: zero");
  PadicNumber unit = x;
  unit.v = 0;
  return div(unit, teichmuller_of(unit));
}

PadicNumber pow_principal(const PadicNumber& x, const PadicNumber& e) {
  PadicNumber L = iwasawa_log_any(x);
  return exp_p(mul(e, L));
}

PadicNumber binom_padic(const PadicNumber& s, long j) {
  long p = s.p;
  if (j == 0) return padic_one(p, s.is_zero() ? s.v : s.M);
  PadicNumber acc = padic_one(p, s.is_zero() ? s.v : s.M);
  for (long i = 0; i < j; ++i) acc = mul(acc, sub(s, padic_from_rational(mpz_class(i), 1, p, acc.M)));
  mpz_class fact = 1;
  for (long i = 2; i <= j; ++i) fact *= i;
  return div(acc, padic_from_rational(fact, 1, p, acc.is_zero() ? 32 : acc.M + val_p(fact, p) + 1));
}

PadicPowerSeries series_zero(long p, long center, long D, long abs_prec) {
  PadicPowerSeries f;
  f.p = p;
  f.center = center;
  f.c.assign((size_t)D + 1, padic_zero(p, abs_prec));
  return f;
}

PadicPowerSeries series_add(const PadicPowerSeries& a, const PadicPowerSeries& b) {
  if (a.p != b.p || a.center != b.center) throw std::domain_error("series_add: mismatched series");
  PadicPowerSeries out = a;
  size_t n = std::min(a.c.size(), b.c.size());
  out.c.resize(n);
  for (size_t i = 0; i < n; ++i) out.c[i] = add(a.c[i], b.c[i]);
  return out;
}

PadicPowerSeries series_mul(const PadicPowerSeries& a, const PadicPowerSeries& b) {
  if (a.p != b.p || a.center != b.center) throw std::domain_error("series_mul: mismatched series");
  long D = std::min(a.degree(), b.degree());
  PadicPowerSeries out = series_zero(a.p, a.center, D, 1 << 20);
  for (long i = 0; i <= D; ++i)
    for (long j = 0; i + j <= D; ++j)
      if (j <= b.degree()) out.c[(size_t)(i + j)] = add(out.c[(size_t)(i + j)], mul(a.c[(size_t)i], b.c[(size_t)j]));
  return out;
}

PadicPowerSeries series_scale(const PadicPowerSeries& a, const PadicNumber& s) {
  PadicPowerSeries out = a;
  for (auto& x : out.c) x = mul(x, s);
  return out;
}

PadicNumber series_eval(const PadicPowerSeries& f, const PadicNumber& s) {
  PadicNumber ds = sub(s, padic_from_rational(mpz_class(f.center), 1, f.p,
                                              s.is_zero() ? s.v : s.M));
  PadicNumber acc = padic_zero(f.p, 1 << 20);
  PadicNumber pw = padic_one(f.p, s.is_zero() ? 32 : s.M);
  for (size_t j = 0; j < f.c.size(); ++j) {
    acc = add(acc, mul(f.c[j], pw));
    pw = mul(pw, ds);
  }
  return acc;
}

PadicPowerSeries padic_power_series(const PadicNumber& x, long r, long D, long M) {
  long p = x.p;
  PadicNumber xx = cap_rel(x, M);
  PadicNumber base = principal_unit(xx);
  PadicNumber L = iwasawa_log(base);
  // <x>^(r-1)
  PadicNumber head = pow_int(base, r - 1);
  PadicPowerSeries out;
  out.p = p;
  out.center = r;
  out.c.reserve((size_t)D + 1);
  PadicNumber cj = head;
  mpz_class fact = 1;
  PadicNumber Lj = padic_one(p, M);
  for (long j = 0; j <= D; ++j) {
    if (j > 0) {
      Lj = mul(Lj, L);
      fact *= j;
    }
    PadicNumber coe = mul(head, Lj);
    coe = div(coe, padic_from_rational(fact, 1, p, M + val_p(fact, p) + 1));
    out.c.push_back(coe);
  }
  return out;
}

std::string to_string(const PadicNumber& a) {
  std::ostringstream os;
  os << a.p << "^" << a.v << " * (";
  std::vector<long> d = unit_digits(a);
  for (size_t i = 0; i < d.size(); ++i) {
    if (i) os << ",";
    os << d[i];
  }
  os << ") + O(" << a.p << "^" << a.abs_prec() << ")";
  return os.str();
}

std::vector<long> unit_digits(const PadicNumber& a) {
  std::vector<long> out;
  mpz_class u = a.u;
  for (long i = 0; i < a.M; ++i) {
    mpz_class q, r;
    mpz_class P(a.p);
    mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), u.get_mpz_t(), P.get_mpz_t());
    out.push_back(r.get_si());
    u = q;
  }
  return out;
}

PadicNumber padic_parse(const std::string& s) {
  // format: p^v * (d0,d1,...) + O(p^K)
  std::istringstream is(s);
  long p = 0, v = 0, K = 0;
  char c;
  is >> p >> c >> v;  // "p^v"
  if (c != '^') throw std::runtime_error("padic_parse: bad format");
  std::string tok;
  is >> tok;  // "*"
  is >> std::ws;
  if (is.get() != '(') throw std::runtime_error("padic_parse: bad format");
  std::vector<long> digits;
  while (true) {
    is >> std::ws;
    if (is.peek() == ')') {
      is.get();
      break;
    }
    long d;
    is >> d;
    digits.push_back(d);
    is >> std::ws;
    if (is.peek() == ',') is.get();
  }
  is >> tok;  // "+"
  is >> std::ws;
  std::string rest;
  std::getline(is, rest);
  // rest = "O(p^K)"
  auto caret = rest.find('^');
  auto close = rest.find(')');
  if (caret == std::string::npos || close == std::string::npos)
    throw std::runtime_error("padic_parse: bad O() term");
  K = std::stol(rest.substr(caret + 1, close - caret - 1));
  PadicNumber out;
  out.p = p;
  if (digits.empty()) return padic_zero(p, K);
  out.v = v;
  out.M = (long)digits.size();
  mpz_class u = 0;
  for (size_t i = digits.size(); i-- > 0;) u = u * p + digits[i];
  out.u = u;
  if (out.v + out.M != K) throw std::runtime_error("padic_parse: inconsistent precision");
  return out;
}

}  // namespace lp
