#include "lp/dist.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace lp {
namespace {

void check_shape(long p, long k, long M) {
  if (p < 2) throw std::domain_error("dist: p must be at least 2");
  if (k < 2 || k % 2 != 0) throw std::domain_error("dist: weight must be an even integer >= 2");
  if (M < 1) throw std::domain_error("dist: need at least one moment");
}

void check_same_shape(const ApproxDistribution& a, const ApproxDistribution& b) {
  if (a.p != b.p || a.k != b.k || a.M != b.M)
    throw std::domain_error("dist: mismatched shapes");
}

// Truncated exact rational power series in z, coefficients [0..len-1].
using QSeries = std::vector<mpq_class>;

QSeries qs_linear_pow(const mpz_class& c0, const mpz_class& c1, long e, long len) {
  QSeries r(len, mpq_class(0));
  mpz_class bin, t;
  for (long i = 0; i <= e && i < len; ++i) {
    mpz_bin_uiui(bin.get_mpz_t(), (unsigned long)e, (unsigned long)i);
    mpz_class p1, p0;
    mpz_pow_ui(p1.get_mpz_t(), c1.get_mpz_t(), (unsigned long)i);
    mpz_pow_ui(p0.get_mpz_t(), c0.get_mpz_t(), (unsigned long)(e - i));
    r[i] = mpq_class(bin * p1 * p0);
  }
  return r;
}

QSeries qs_mul(const QSeries& a, const QSeries& b, long len) {
  QSeries r(len, mpq_class(0));
  for (long i = 0; i < (long)a.size() && i < len; ++i) {
    if (a[i] == 0) continue;
    for (long j = 0; j < (long)b.size() && i + j < len; ++j) r[i + j] += a[i] * b[j];
  }
  return r;
}

QSeries qs_inv(const QSeries& a, long len) {
  if (a.empty() || a[0] == 0) throw std::domain_error("dist: series not invertible");
  QSeries r(len, mpq_class(0));
  r[0] = 1 / a[0];
  for (long i = 1; i < len; ++i) {
    mpq_class acc = 0;
    for (long t = 1; t <= i && t < (long)a.size(); ++t) acc += a[t] * r[i - t];
    r[i] = -acc / a[0];
  }
  return r;
}

void check_act_matrix(const M2& gm, long p) {
  const mpz_class det = gm[0] * gm[3] - gm[1] * gm[2];
  if (det == 0) throw std::domain_error("dist act: singular matrix");
  if (gm[2] % p != 0) throw std::domain_error("dist act: lower-left entry must be divisible by p");
  if (gm[3] % p == 0) throw std::domain_error("dist act: lower-right entry must be a p-unit");
  if (det % p == 0 && gm[2] != 0)
    throw std::domain_error("dist act: non-unit determinant only allowed for upper-triangular matrices");
}

DistTransition compute_transition(const M2& gm, long p, long k, long M) {
  check_shape(p, k, M);
  check_act_matrix(gm, p);
  const long g = k - 2;
  const mpz_class det = gm[0] * gm[3] - gm[1] * gm[2];
  const long vdet = (det % p == 0) ? val_p(det, p) : 0;
  mpz_class detg;
  mpz_pow_ui(detg.get_mpz_t(), det.get_mpz_t(), (unsigned long)(g / 2));
  const long rel = M + (g / 2) * vdet + 2;

  DistTransition T(M, std::vector<PadicNumber>(M));
  for (long j = 0; j < M; ++j) {
    QSeries A = qs_linear_pow(gm[1], gm[0], j, M);  // (az+b)^j
    QSeries B = (g - j >= 0)
                    ? qs_linear_pow(gm[3], gm[2], g - j, M)
                    : qs_inv(qs_linear_pow(gm[3], gm[2], j - g, M), M);
    QSeries P = qs_mul(A, B, M);
    for (long m = 0; m < M; ++m) {
      mpq_class c = P[m] / mpq_class(detg);
      T[j][m] = padic_from_rational(c, p, rel);
    }
  }
  return T;
}

std::string transition_key(const M2& gm, long p, long k, long M) {
  std::ostringstream os;
  os << p << '|' << k << '|' << M;
  for (int i = 0; i < 4; ++i) os << '|' << gm[i].get_str();
  return os.str();
}

bool disk_load(const std::string& dir, const std::string& key, long M, DistTransition* out) {
  std::size_t h = std::hash<std::string>{}(key);
  std::ostringstream name;
  name << dir << "/dt" << std::hex << h << ".txt";
  std::ifstream in(name.str());
  if (!in) return false;
  std::string line;
  if (!std::getline(in, line) || line != key) return false;
  DistTransition T(M, std::vector<PadicNumber>(M));
  for (long j = 0; j < M; ++j)
    for (long m = 0; m < M; ++m) {
      if (!std::getline(in, line)) return false;
      try {
        T[j][m] = padic_parse(line);
      } catch (const std::exception&) {
        return false;
      }
    }
  *out = std::move(T);
  return true;
}

void disk_store(const std::string& dir, const std::string& key, const DistTransition& T) {
  std::size_t h = std::hash<std::string>{}(key);
  std::ostringstream name;
  name << dir << "/dt" << std::hex << h << ".txt";
  const std::string tmp = name.str() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) return;
    out << key << '\n';
    for (const auto& row : T)
      for (const auto& t : row) out << to_string(t) << '\n';
    if (!out) return;
  }
  std::rename(tmp.c_str(), name.str().c_str());
}

ApproxDistribution apply_transition(const DistTransition& T, const ApproxDistribution& mu) {
  ApproxDistribution out;
  out.p = mu.p;
  out.k = mu.k;
  out.M = mu.M;
  out.mu.resize(mu.M);
  for (long j = 0; j < mu.M; ++j) {
    PadicNumber acc = mul(T[j][0], mu.mu[0]);
    for (long m = 1; m < mu.M; ++m) acc = add(acc, mul(T[j][m], mu.mu[m]));
    out.mu[j] = cap_abs(acc, mu.M - j);
  }
  return out;
}

}  // namespace

ApproxDistribution dist_zero(long p, long k, long M) {
  check_shape(p, k, M);
  ApproxDistribution d;
  d.p = p;
  d.k = k;
  d.M = M;
  d.mu.reserve(M);
  for (long j = 0; j < M; ++j) d.mu.push_back(padic_zero(p, M - j));
  return d;
}

ApproxDistribution dist_from_moments(long p, long k, std::vector<PadicNumber> mu) {
  check_shape(p, k, (long)mu.size());
  ApproxDistribution d;
  d.p = p;
  d.k = k;
  d.M = (long)mu.size();
  for (long j = 0; j < d.M; ++j) {
    if (mu[j].p != p && !(mu[j].is_zero() && mu[j].p == 0))
      throw std::domain_error("dist: moment at wrong prime");
    mu[j].p = p;
    mu[j] = cap_abs(mu[j], d.M - j);
  }
  d.mu = std::move(mu);
  return d;
}

ApproxDistribution dist_dirac(long p, long k, const mpz_class& a, long M) {
  check_shape(p, k, M);
  std::vector<PadicNumber> mu(M);
  mpz_class pw = 1;
  for (long j = 0; j < M; ++j) {
    mu[j] = padic_from_integer(pw, p, M - j);
    pw *= a;
  }
  return dist_from_moments(p, k, std::move(mu));
}

ApproxDistribution dist_add(const ApproxDistribution& a, const ApproxDistribution& b) {
  check_same_shape(a, b);
  ApproxDistribution r = a;
  for (long j = 0; j < a.M; ++j) r.mu[j] = cap_abs(add(a.mu[j], b.mu[j]), a.M - j);
  return r;
}

ApproxDistribution dist_sub(const ApproxDistribution& a, const ApproxDistribution& b) {
  check_same_shape(a, b);
  ApproxDistribution r = a;
  for (long j = 0; j < a.M; ++j) r.mu[j] = cap_abs(sub(a.mu[j], b.mu[j]), a.M - j);
  return r;
}

ApproxDistribution dist_neg(const ApproxDistribution& a) {
  ApproxDistribution r = a;
  for (long j = 0; j < a.M; ++j) r.mu[j] = neg(a.mu[j]);
  return r;
}

ApproxDistribution dist_scale(const ApproxDistribution& a, const PadicNumber& s) {
  ApproxDistribution r = a;
  for (long j = 0; j < a.M; ++j) r.mu[j] = cap_abs(mul(a.mu[j], s), a.M - j);
  return r;
}

bool dist_is_zero(const ApproxDistribution& a) {
  for (const auto& m : a.mu)
    if (!m.is_zero()) return false;
  return true;
}

bool dist_agree(const ApproxDistribution& a, const ApproxDistribution& b) {
  check_same_shape(a, b);
  for (long j = 0; j < a.M; ++j)
    if (!agree(a.mu[j], b.mu[j])) return false;
  return true;
}

long dist_coherence(const ApproxDistribution& a, const ApproxDistribution& b) {
  check_same_shape(a, b);
  // c[j] = largest m with mu[j](a) = mu[j](b) mod p^(m-j); the difference
  // is zero up to absolute precision d.v in either the zero or unit case.
  std::vector<long> c(a.M);
  for (long j = 0; j < a.M; ++j) {
    PadicNumber d = sub(a.mu[j], b.mu[j]);
    c[j] = std::max(d.v + j, 0L);
  }
  for (long m = a.M; m >= 1; --m) {
    bool ok = true;
    for (long j = 0; j < m; ++j)
      if (c[j] < m) {
        ok = false;
        break;
      }
    if (ok) return m;
  }
  return 0;
}

const DistTransition& act_transition(const M2& gm, long p, long k, long M) {
  static std::map<std::string, DistTransition> cache;
  static std::shared_mutex mx;
  const std::string key = transition_key(gm, p, k, M);
  {
    std::shared_lock<std::shared_mutex> lk(mx);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  DistTransition T;
  const char* dir = std::getenv("LP_DIST_CACHE_DIR");
  bool loaded = dir && *dir && disk_load(dir, key, M, &T);
  if (!loaded) {
    T = compute_transition(gm, p, k, M);
    if (dir && *dir) disk_store(dir, key, T);
  }
  std::unique_lock<std::shared_mutex> lk(mx);
  auto it = cache.emplace(key, std::move(T)).first;  // idempotent on races
  return it->second;
}

ApproxDistribution act(const M2& gm, const ApproxDistribution& mu) {
  check_shape(mu.p, mu.k, mu.M);
  const DistTransition& T = act_transition(gm, mu.p, mu.k, mu.M);
  return apply_transition(T, mu);
}

ApproxDistribution act_unit_scaling(const PadicNumber& u, const ApproxDistribution& mu) {
  check_shape(mu.p, mu.k, mu.M);
  if (u.is_zero() || u.v != 0) throw std::domain_error("dist: unit scaling needs a unit");
  const long g = mu.k - 2;
  ApproxDistribution out = mu;
  for (long j = 0; j < mu.M; ++j)
    out.mu[j] = cap_abs(mul(pow_int(u, j - g / 2), mu.mu[j]), mu.M - j);
  return out;
}

ApproxDistribution act_up_summand(long b, const ApproxDistribution& mu) {
  check_shape(mu.p, mu.k, mu.M);
  const long g = mu.k - 2;
  M2 gm = {mpz_class(mu.p), mpz_class(b), mpz_class(0), mpz_class(1)};
  ApproxDistribution out = act(gm, mu);
  if (g > 0) {
    PadicNumber s = padic_from_integer(pow_p(mu.p, g / 2), mu.p, (g / 2) + mu.M + 2);
    for (long j = 0; j < mu.M; ++j) out.mu[j] = cap_abs(mul(out.mu[j], s), mu.M - j);
  }
  return out;
}

std::vector<PadicNumber> specialize(const ApproxDistribution& mu) {
  check_shape(mu.p, mu.k, mu.M);
  if (mu.M < mu.k - 1) throw std::domain_error("dist: too few moments to specialize");
  return std::vector<PadicNumber>(mu.mu.begin(), mu.mu.begin() + (mu.k - 1));
}

}  // namespace lp
