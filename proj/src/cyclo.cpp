#include "lp/cyclo.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace lp {

namespace {

constexpr long kExactPrec = 1L << 40;

long pow_long(long p, long e) {
  long r = 1;
  for (long i = 0; i < e; ++i) r *= p;
  return r;
}

long val_long(long x, long p) {
  long v = 0;
  while (x % p == 0) {
    x /= p;
    ++v;
  }
  return v;
}

}  // namespace

long cyclo_degree(long p, long m) { return m == 0 ? 1 : (p - 1) * pow_long(p, m - 1); }

CycloElement cyclo_zero(long p, long m, long abs_prec) {
  CycloElement x;
  x.p = p;
  x.m = m;
  x.a.assign((size_t)cyclo_degree(p, m), padic_zero(p, abs_prec));
  return x;
}

CycloElement cyclo_one(long p, long m, long abs_prec) {
  CycloElement x = cyclo_zero(p, m, kExactPrec);
  x.a[0] = padic_one(p, abs_prec);
  return x;
}

CycloElement cyclo_from_padic(const PadicNumber& v, long m) {
  CycloElement x = cyclo_zero(v.p, m, kExactPrec);
  x.a[0] = v;
  return x;
}

// fold exponents of a length-p^m accumulator into the power basis:
// X^e = -sum_{i=0}^{p-2} X^(i p^(m-1) + e') for e = (p-1)p^(m-1) + e'
static std::vector<PadicNumber> reduce_dense(long p, long m, std::vector<PadicNumber>& acc) {
  long phi = cyclo_degree(p, m);
  long pm1 = m == 0 ? 1 : pow_long(p, m - 1);
  long pm = (long)acc.size();
  for (long e = pm - 1; e >= phi; --e) {
    if (acc[(size_t)e].is_zero() && acc[(size_t)e].v >= kExactPrec) continue;
    PadicNumber c = acc[(size_t)e];
    acc[(size_t)e] = padic_zero(p, kExactPrec);
    long e2 = e - phi;
    for (long i = 0; i <= p - 2; ++i)
      acc[(size_t)(i * pm1 + e2)] = sub(acc[(size_t)(i * pm1 + e2)], c);
  }
  acc.resize((size_t)phi);
  return acc;
}

CycloElement cyclo_zeta(long p, long m, long e, long abs_prec) {
  long pm = pow_long(p, m);
  e %= pm;
  if (e < 0) e += pm;
  std::vector<PadicNumber> acc((size_t)pm, padic_zero(p, kExactPrec));
  acc[(size_t)e] = padic_one(p, abs_prec);
  CycloElement x;
  x.p = p;
  x.m = m;
  x.a = reduce_dense(p, m, acc);
  return x;
}

static void check_same_ring(const CycloElement& x, const CycloElement& y) {
  if (x.p != y.p || x.m != y.m) throw std::domain_error("cyclo: mixed rings");
}

CycloElement cyclo_add(const CycloElement& x, const CycloElement& y) {
  check_same_ring(x, y);
  CycloElement z = x;
  for (size_t i = 0; i < z.a.size(); ++i) z.a[i] = add(x.a[i], y.a[i]);
  return z;
}

CycloElement cyclo_sub(const CycloElement& x, const CycloElement& y) {
  check_same_ring(x, y);
  CycloElement z = x;
  for (size_t i = 0; i < z.a.size(); ++i) z.a[i] = sub(x.a[i], y.a[i]);
  return z;
}

CycloElement cyclo_neg(const CycloElement& x) {
  CycloElement z = x;
  for (auto& c : z.a) c = neg(c);
  return z;
}

CycloElement cyclo_mul(const CycloElement& x, const CycloElement& y) {
  check_same_ring(x, y);
  long p = x.p, m = x.m;
  long pm = pow_long(p, m);
  long phi = cyclo_degree(p, m);
  std::vector<PadicNumber> acc((size_t)pm, padic_zero(p, kExactPrec));
  for (long i = 0; i < phi; ++i) {
    if (x.a[(size_t)i].is_zero() && x.a[(size_t)i].v >= kExactPrec) continue;
    for (long j = 0; j < phi; ++j) {
      if (y.a[(size_t)j].is_zero() && y.a[(size_t)j].v >= kExactPrec) continue;
      long e = (i + j) % pm;
      acc[(size_t)e] = add(acc[(size_t)e], mul(x.a[(size_t)i], y.a[(size_t)j]));
    }
  }
  CycloElement z;
  z.p = p;
  z.m = m;
  z.a = reduce_dense(p, m, acc);
  return z;
}

CycloElement cyclo_scale(const CycloElement& x, const PadicNumber& s) {
  CycloElement z = x;
  for (auto& c : z.a) c = mul(c, s);
  return z;
}

CycloElement cyclo_mul_zeta(const CycloElement& x, long e) {
  long p = x.p, m = x.m;
  long pm = pow_long(p, m);
  e %= pm;
  if (e < 0) e += pm;
  std::vector<PadicNumber> acc((size_t)pm, padic_zero(p, kExactPrec));
  for (long i = 0; i < (long)x.a.size(); ++i)
    acc[(size_t)((i + e) % pm)] = x.a[(size_t)i];
  CycloElement z;
  z.p = p;
  z.m = m;
  z.a = reduce_dense(p, m, acc);
  return z;
}

bool cyclo_is_zero(const CycloElement& x) {
  for (auto& c : x.a)
    if (!c.is_zero()) return false;
  return true;
}

bool cyclo_agree(const CycloElement& x, const CycloElement& y) {
  check_same_ring(x, y);
  for (size_t i = 0; i < x.a.size(); ++i)
    if (!agree(x.a[i], y.a[i])) return false;
  return true;
}

long cyclo_valuation(const CycloElement& x) {
  long v = kExactPrec;
  for (auto& c : x.a)
    if (!c.is_zero()) v = std::min(v, c.v);
  return v;
}

long cyclo_abs_prec(const CycloElement& x) {
  long a = kExactPrec;
  for (auto& c : x.a) a = std::min(a, c.abs_prec());
  return a;
}

CycloElement cyclo_embed(const CycloElement& x, long m2) {
  if (m2 < x.m) throw std::domain_error("cyclo_embed: target level below source");
  if (m2 == x.m) return x;
  long step = pow_long(x.p, m2 - x.m);
  CycloElement z = cyclo_zero(x.p, m2, kExactPrec);
  for (long i = 0; i < (long)x.a.size(); ++i) z.a[(size_t)(i * step)] = x.a[(size_t)i];
  return z;
}

CycloElement cyclo_trace_down(const CycloElement& x) {
  long p = x.p, m = x.m;
  if (m < 1) throw std::domain_error("cyclo_trace_down: already base ring");
  long pm = pow_long(p, m);
  std::vector<PadicNumber> acc((size_t)pm, padic_zero(p, kExactPrec));
  std::vector<long> reps;
  if (m >= 2) {
    long q = pow_long(p, m - 1);
    for (long s = 0; s < p; ++s) reps.push_back(1 + s * q);
  } else {
    for (long t = 1; t < p; ++t) reps.push_back(t);
  }
  for (long t : reps)
    for (long e = 0; e < (long)x.a.size(); ++e) {
      if (x.a[(size_t)e].is_zero() && x.a[(size_t)e].v >= kExactPrec) continue;
      long te = (t * e) % pm;
      acc[(size_t)te] = add(acc[(size_t)te], x.a[(size_t)e]);
    }
  std::vector<PadicNumber> red = reduce_dense(p, m, acc);
  CycloElement z = cyclo_zero(p, m - 1, kExactPrec);
  for (long e = 0; e < (long)red.size(); ++e) {
    if (e % p == 0) {
      z.a[(size_t)(e / p)] = red[(size_t)e];
    } else if (!red[(size_t)e].is_zero()) {
      throw std::runtime_error("cyclo_trace_down: result not in subring");
    }
  }
  return z;
}

std::string cyclo_to_string(const CycloElement& x) {
  std::ostringstream os;
  os << "cyclo{p=" << x.p << ",m=" << x.m << ";";
  for (size_t i = 0; i < x.a.size(); ++i) {
    if (i) os << "; ";
    os << to_string(x.a[i]);
  }
  os << "}";
  return os.str();
}

long canonical_generator(long p, long c) {
  if (c == 0) return 1;
  long pc = pow_long(p, c);
  long n = cyclo_degree(p, c);
  for (long g = 2; g < pc; ++g) {
    if (g % p == 0) continue;
    long x = g % pc, ord = 1;
    while (x != 1) {
      x = (long)mpz_class(mpz_class(x) * g % pc).get_si();
      ++ord;
    }
    if (ord == n) return g;
  }
  throw std::runtime_error("canonical_generator: none found");
}

namespace {
std::map<std::pair<long, long>, std::vector<long>> g_dlog_cache;
std::mutex g_dlog_mutex;
}  // namespace

long char_dlog(long p, long c, const mpz_class& a) {
  if (c == 0) return 0;
  std::lock_guard<std::mutex> lock(g_dlog_mutex);
  auto key = std::make_pair(p, c);
  auto it = g_dlog_cache.find(key);
  if (it == g_dlog_cache.end()) {
    long pc = pow_long(p, c);
    long n = cyclo_degree(p, c);
    long g = canonical_generator(p, c);
    std::vector<long> table((size_t)pc, -1);
    long x = 1;
    for (long k = 0; k < n; ++k) {
      table[(size_t)x] = k;
      x = (long)mpz_class(mpz_class(x) * g % pc).get_si();
    }
    it = g_dlog_cache.emplace(key, std::move(table)).first;
  }
  long pc = pow_long(p, c);
  mpz_class r = a % pc;
  if (r < 0) r += pc;
  long idx = (long)r.get_si();
  long k = it->second[(size_t)idx];
  if (k < 0) throw std::domain_error("char_dlog: not a unit");
  return k;
}

DirichletChar char_from_index(long p, long cmod, long j) {
  if (p == 2) throw std::domain_error("characters: p = 2 unsupported");
  DirichletChar chi;
  chi.p = p;
  chi.cmod = cmod;
  if (cmod == 0) return chi;
  long n = cyclo_degree(p, cmod);
  j %= n;
  if (j < 0) j += n;
  chi.j = j;
  chi.w_level = cmod - 1;
  if (j == 0) {
    chi.cond = 0;
    chi.order = 1;
    chi.parity = 1;
    return chi;
  }
  chi.cond = cmod - std::min(val_long(j, p), cmod - 1);
  chi.order = n / std::gcd(n, j);
  chi.parity = (j % 2 == 0) ? 1 : -1;
  chi.t_exp = j % (p - 1);
  chi.w_exp = j % pow_long(p, cmod - 1);
  return chi;
}

std::vector<DirichletChar> enumerate_chars(long p, long c) {
  if (p == 2) throw std::domain_error("enumerate_chars: p = 2 unsupported");
  std::vector<DirichletChar> out;
  if (c == 0) {
    out.push_back(trivial_char(p));
    return out;
  }
  long n = cyclo_degree(p, c);
  for (long j = 0; j < n; ++j) out.push_back(char_from_index(p, c, j));
  return out;
}

DirichletChar trivial_char(long p) {
  DirichletChar chi;
  chi.p = p;
  return chi;
}

DirichletChar char_inverse(const DirichletChar& chi) {
  if (chi.cmod == 0) return chi;
  long n = cyclo_degree(chi.p, chi.cmod);
  return char_from_index(chi.p, chi.cmod, (n - chi.j) % n);
}

DirichletChar char_mul_teich(const DirichletChar& chi, long t) {
  long p = chi.p;
  t %= (p - 1);
  if (t < 0) t += p - 1;
  if (t == 0) return chi;
  long cm = std::max(chi.cmod, 1L);
  long n = cyclo_degree(p, cm);
  long q = pow_long(p, cm - 1);
  // index of omega^t at modulus p^cm: = t mod p-1, = 0 mod p^(cm-1);
  // since p^k = 1 mod p-1 this is q*t directly
  long jt = (q * t) % n;
  long j0 = (chi.cmod == 0) ? 0 : chi.j;
  return char_from_index(p, cm, (j0 + jt) % n);
}

bool char_is_trivial(const DirichletChar& chi) { return chi.cond == 0; }

long char_value_level(const DirichletChar& chi) { return std::max(0L, chi.cond - 1); }

CycloElement chi_value(const DirichletChar& chi, const mpz_class& a, long M) {
  long p = chi.p;
  long L = char_value_level(chi);
  if (chi.cmod == 0) return cyclo_one(p, 0, M);
  if (a % p == 0) return cyclo_zero(p, L, M);
  long k = char_dlog(p, chi.cmod, a);
  long n = cyclo_degree(p, chi.cmod);
  long e = (long)mpz_class(mpz_class(chi.j) * k % n).get_si();
  long te = e % (p - 1);
  PadicNumber tame = pow_int(teichmuller(mpz_class(canonical_generator(p, chi.cmod)), p, M), te);
  if (L == 0) return cyclo_from_padic(tame, 0);
  long q = pow_long(p, chi.cmod - 1);
  long we = e % q;
  long shift = pow_long(p, chi.cmod - chi.cond);
  if (we % shift != 0) throw std::runtime_error("chi_value: wild exponent not divisible");
  return cyclo_scale(cyclo_zeta(p, L, we / shift, M), tame);
}

PadicNumber chi_value_padic(const DirichletChar& chi, const mpz_class& a, long M) {
  if (char_value_level(chi) != 0) throw std::domain_error("chi_value_padic: wild character");
  CycloElement v = chi_value(chi, a, M);
  return v.a[0];
}

CycloElement gauss_sum_at_level(const DirichletChar& chi, long m, long M) {
  long p = chi.p;
  if (chi.cond == 0) return cyclo_one(p, m, M);
  if (m < chi.cond) throw std::domain_error("gauss_sum_at_level: level below conductor");
  long pc = pow_long(p, chi.cond);
  CycloElement acc = cyclo_zero(p, m, kExactPrec);
  long n = cyclo_degree(p, chi.cmod);
  long g = canonical_generator(p, chi.cmod);
  PadicNumber omega_g = teichmuller(mpz_class(g), p, M);
  long q = (chi.cmod >= 1) ? pow_long(p, chi.cmod - 1) : 1;
  long shift = pow_long(p, chi.cmod - chi.cond);
  for (long a = 1; a < pc; ++a) {
    if (a % p == 0) continue;
    long k = char_dlog(p, chi.cmod, mpz_class(a));
    long e = (long)mpz_class(mpz_class(chi.j) * k % n).get_si();
    PadicNumber tame = pow_int(omega_g, e % (p - 1));
    long E = a * pow_long(p, m - chi.cond);
    if (chi.cond >= 2) {
      long we = (e % q) / shift;  // exponent of zeta_{p^(cond-1)}
      E += we * pow_long(p, m - (chi.cond - 1));
    }
    acc = cyclo_add(acc, cyclo_scale(cyclo_zeta(p, m, E, M), tame));
  }
  return acc;
}

CycloElement gauss_sum(const DirichletChar& chi, long M) {
  if (chi.cond == 0) return cyclo_one(chi.p, 0, M);
  return gauss_sum_at_level(chi, chi.cond, M);
}

DirichletChar parse_char_literal(const std::string& s) {
  auto lb = s.find('{');
  auto rb = s.find('}');
  if (s.substr(0, 3) != "chi" || lb == std::string::npos || rb == std::string::npos)
    throw std::runtime_error("parse_char_literal: expected chi{...}");
  std::map<std::string, long> kv;
  std::string body = s.substr(lb + 1, rb - lb - 1);
  std::istringstream is(body);
  std::string item;
  while (std::getline(is, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw std::runtime_error("parse_char_literal: bad key=value");
    kv[item.substr(0, eq)] = std::stol(item.substr(eq + 1));
  }
  if (!kv.count("p")) throw std::runtime_error("parse_char_literal: missing p");
  long p = kv["p"];
  long c = kv.count("c") ? kv["c"] : 0;
  // with idx, c names the modulus exponent and idx the character index there
  if (kv.count("idx")) return char_from_index(p, c, kv["idx"]);
  if (c == 0) return trivial_char(p);
  long ord = kv.count("ord") ? kv["ord"] : 0;
  for (const DirichletChar& chi : enumerate_chars(p, c))
    if (chi.cond == c && (ord == 0 || chi.order == ord)) return chi;
  throw std::runtime_error("parse_char_literal: no character with given conductor/order");
}

std::string char_literal(const DirichletChar& chi) {
  std::ostringstream os;
  os << "chi{p=" << chi.p << ",c=" << chi.cond << ",ord=" << chi.order;
  bool minimal = false;
  if (chi.cmod == 0) {
    minimal = true;
  } else {
    for (const DirichletChar& c2 : enumerate_chars(chi.p, chi.cmod)) {
      if (c2.cond == chi.cond && c2.order == chi.order) {
        minimal = (c2.j == chi.j);
        break;
      }
    }
  }
  if (!minimal) os << ",idx=" << chi.j;
  os << "}";
  return os.str();
}

}  // namespace lp
