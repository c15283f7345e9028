#include "lp/linv.hpp"

#include <stdexcept>
#include <utility>

namespace lp {

namespace {

long val_q(const mpq_class& x, long p) {
  // x != 0
  long v = 0;
  mpz_class n = x.get_num(), d = x.get_den(), pz = p;
  while (mpz_divisible_p(n.get_mpz_t(), pz.get_mpz_t())) {
    n /= pz;
    ++v;
  }
  while (mpz_divisible_p(d.get_mpz_t(), pz.get_mpz_t())) {
    d /= pz;
    --v;
  }
  return v;
}

// valuation of c4 with c4 = 0 treated as deeper than any minimality bound
long val_c4(const EllipticCurveData& E, long p) {
  return E.c4 == 0 ? 999 : val_q(E.c4, p);
}

bool integral_model(const EllipticCurveData& E) {
  for (const auto& ai : E.a)
    if (ai.get_den() != 1) return false;
  return true;
}

bool is_prime_long(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::vector<mpz_class> series_mul_z(const std::vector<mpz_class>& a,
                                    const std::vector<mpz_class>& b, long T) {
  std::vector<mpz_class> c(T, mpz_class(0));
  for (long i = 0; i < (long)a.size() && i < T; ++i) {
    if (a[i] == 0) continue;
    for (long j = 0; j < (long)b.size() && i + j < T; ++j) {
      if (b[j] == 0) continue;
      c[i + j] += a[i] * b[j];
    }
  }
  return c;
}

}  // namespace

EllipticCurveData curve_from_ainvs(const std::vector<mpq_class>& ainvs,
                                   const std::string& label) {
  if (ainvs.size() != 5) throw std::invalid_argument("curve_from_ainvs: need a1,a2,a3,a4,a6");
  EllipticCurveData E;
  E.label = label;
  for (int i = 0; i < 5; ++i) E.a[i] = ainvs[i];
  const mpq_class &a1 = E.a[0], &a2 = E.a[1], &a3 = E.a[2], &a4 = E.a[3], &a6 = E.a[4];
  E.b2 = a1 * a1 + 4 * a2;
  E.b4 = 2 * a4 + a1 * a3;
  E.b6 = a3 * a3 + 4 * a6;
  E.b8 = a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
  E.c4 = E.b2 * E.b2 - 24 * E.b4;
  E.c6 = -E.b2 * E.b2 * E.b2 + 36 * E.b2 * E.b4 - 216 * E.b6;
  E.disc = -E.b2 * E.b2 * E.b8 - 8 * E.b4 * E.b4 * E.b4 - 27 * E.b6 * E.b6 +
           9 * E.b2 * E.b4 * E.b6;
  if (E.disc == 0) throw std::domain_error("curve_from_ainvs: singular model");
  if (1728 * E.disc != E.c4 * E.c4 * E.c4 - E.c6 * E.c6)
    throw std::logic_error("curve_from_ainvs: c4/c6/disc identity failed");
  E.j = E.c4 * E.c4 * E.c4 / E.disc;

  if (!integral_model(E)) return E;  // no flags, conductor stays unknown

  mpz_class r = abs(E.disc.get_num());
  std::vector<long> bad;
  bool complete = true;
  for (long d = 2; d <= 1000000 && r > 1; ++d) {
    if (mpz_divisible_ui_p(r.get_mpz_t(), d)) {
      bad.push_back(d);
      while (mpz_divisible_ui_p(r.get_mpz_t(), d)) r /= d;
    }
    if (mpz_class(d) * d > r) break;
  }
  if (r > 1) {
    if (mpz_probab_prime_p(r.get_mpz_t(), 30) && r.fits_slong_p())
      bad.push_back(r.get_si());
    else
      complete = false;
  }

  bool all_mult = true;
  for (long pp : bad) {
    if (val_c4(E, pp) >= 4 && val_q(E.disc, pp) >= 12) {
      complete = false;  // a smaller model may exist at pp
      continue;
    }
    ReductionType rt;
    if (val_c4(E, pp) > 0) {
      rt = ReductionType::Additive;
      all_mult = false;
    } else {
      long app = curve_ap(E, pp);
      if (app == 1)
        rt = ReductionType::SplitMultiplicative;
      else if (app == -1)
        rt = ReductionType::NonsplitMultiplicative;
      else
        throw std::logic_error("curve_from_ainvs: multiplicative point count out of range");
    }
    E.reduction[pp] = rt;
  }
  if (complete && all_mult) {
    E.conductor = 1;
    for (long pp : bad) E.conductor *= pp;
  }
  return E;
}

EllipticCurveData quadratic_twist(const EllipticCurveData& E, const mpz_class& d) {
  if (d == 0) throw std::invalid_argument("quadratic_twist: d = 0");
  mpq_class dd(d);
  std::vector<mpq_class> a = {mpq_class(0), mpq_class(0), mpq_class(0),
                              -27 * dd * dd * E.c4, -54 * dd * dd * dd * E.c6};
  std::string name = E.label.empty() ? "twist" : E.label + "-twist-" + d.get_str();
  return curve_from_ainvs(a, name);
}

long curve_ap(const EllipticCurveData& E, long ell) {
  if (!integral_model(E)) throw std::invalid_argument("curve_ap: integral model required");
  if (ell < 2) throw std::invalid_argument("curve_ap: ell must be prime");
  if (val_c4(E, ell) >= 4 && val_q(E.disc, ell) >= 12)
    throw std::domain_error("curve_ap: model may be non-minimal at ell");
  auto red = [&](const mpq_class& x) -> long {
    return (long)mpz_fdiv_ui(x.get_num().get_mpz_t(), (unsigned long)ell);
  };
  long A1 = red(E.a[0]), A2 = red(E.a[1]), A3 = red(E.a[2]), A4 = red(E.a[3]), A6 = red(E.a[4]);
  long n = 1;  // the point at infinity
  if (ell == 2) {
    for (long x = 0; x < 2; ++x)
      for (long y = 0; y < 2; ++y) {
        long val = y * y + A1 * x * y + A3 * y - (x * x * x + A2 * x * x + A4 * x + A6);
        if (((val % 2) + 2) % 2 == 0) ++n;
      }
  } else {
    mpz_class lz = ell;
    for (long x = 0; x < ell; ++x) {
      long A = (A1 * x + A3) % ell;
      long f = ((((x + A2) * x + A4) % ell) * x + A6) % ell;
      // y^2 + A y = f; complete the square: (2y + A)^2 = A^2 + 4f
      mpz_class D = (A * A + 4 * f) % ell;
      n += 1 + mpz_legendre(D.get_mpz_t(), lz.get_mpz_t());
    }
  }
  return ell + 1 - n;
}

ReductionType reduction_type(const EllipticCurveData& E, long p) {
  auto it = E.reduction.find(p);
  if (it != E.reduction.end()) return it->second;
  if (!integral_model(E)) throw std::invalid_argument("reduction_type: integral model required");
  if (val_q(E.disc, p) == 0) return ReductionType::Good;
  if (val_c4(E, p) >= 4 && val_q(E.disc, p) >= 12)
    throw std::domain_error("reduction_type: model may be non-minimal at p");
  if (val_c4(E, p) > 0) return ReductionType::Additive;
  long app = curve_ap(E, p);
  if (app == 1) return ReductionType::SplitMultiplicative;
  if (app == -1) return ReductionType::NonsplitMultiplicative;
  throw std::logic_error("reduction_type: multiplicative point count out of range");
}

EigenformDesc curve_eigenform(const EllipticCurveData& E, long bound) {
  if (E.conductor == 0)
    throw std::domain_error(
        "curve_eigenform: conductor unavailable (non-minimal, additive, or non-integral model)");
  if (!E.conductor.fits_slong_p())
    throw std::domain_error("curve_eigenform: conductor out of range");
  EigenformDesc d;
  d.name = E.label.empty() ? ("conductor-" + E.conductor.get_str()) : E.label;
  d.N = E.conductor.get_si();
  d.k = 2;
  for (long ell = 2; ell <= bound; ++ell) {
    if (!is_prime_long(ell)) continue;
    d.ap[ell] = curve_ap(E, ell);
  }
  for (const auto& [pp, rt] : E.reduction) {
    (void)rt;
    if (pp > bound) d.ap[pp] = curve_ap(E, pp);
  }
  return d;
}

std::vector<mpz_class> j_series_tail(long T) {
  if (T < 1) throw std::invalid_argument("j_series_tail: T >= 1");
  long L = T + 1;
  std::vector<mpz_class> e4(L, mpz_class(0));
  e4[0] = 1;
  for (long n = 1; n < L; ++n) {
    mpz_class s = 0;
    for (long d = 1; d <= n; ++d)
      if (n % d == 0) s += mpz_class(d) * d * d;
    e4[n] = 240 * s;
  }
  // Delta / q = prod_{n >= 1} (1 - q^n)^24
  std::vector<mpz_class> f(L, mpz_class(0));
  f[0] = 1;
  for (long n = 1; n < L; ++n)
    for (long i = L - 1; i >= n; --i) f[i] -= f[i - n];
  auto f2 = series_mul_z(f, f, L);
  auto f4 = series_mul_z(f2, f2, L);
  auto f8 = series_mul_z(f4, f4, L);
  auto f16 = series_mul_z(f8, f8, L);
  auto f24 = series_mul_z(f16, f8, L);
  std::vector<mpz_class> invf(L, mpz_class(0));
  invf[0] = 1;
  for (long n = 1; n < L; ++n) {
    mpz_class s = 0;
    for (long i = 1; i <= n; ++i) s += f24[i] * invf[n - i];
    invf[n] = -s;
  }
  auto g = series_mul_z(series_mul_z(series_mul_z(e4, e4, L), e4, L), invf, L);
  if (g[0] != 1) throw std::logic_error("j_series_tail: leading coefficient drifted");
  std::vector<mpz_class> c(T);
  for (long n = 0; n < T; ++n) c[n] = g[n + 1];
  return c;
}

PadicNumber tate_parameter(const EllipticCurveData& E, long p, long M) {
  if (M < 1) throw std::invalid_argument("tate_parameter: M >= 1");
  long vj = val_q(E.j, p);
  if (vj >= 0)
    throw std::domain_error("tate_parameter: v_p(j) >= 0, no multiplicative uniformization");
  long vq = -vj;
  long R = M + 10 + vq;                  // relative working precision
  long T = (M + 8 + vq - 1) / vq + 2;    // dropped tail is O(p^(T vq))
  if (T < 4) T = 4;
  auto cz = j_series_tail(T);
  std::vector<PadicNumber> c(T);
  for (long n = 0; n < T; ++n) c[n] = padic_from_integer(cz[n], p, R);
  PadicNumber jp = padic_from_rational(E.j, p, R + vq);
  auto tail_at = [&](const PadicNumber& q) {
    PadicNumber acc = c[T - 1];
    for (long n = T - 2; n >= 0; --n) acc = add(mul(acc, q), c[n]);
    return acc;
  };
  PadicNumber q = inv(jp);
  for (int it = 0; it < 80; ++it) {
    PadicNumber qn = inv(sub(jp, tail_at(q)));
    bool done = agree(qn, q);
    q = qn;
    if (done) break;
  }
  if (q.v != vq) throw std::logic_error("tate_parameter: valuation drifted");
  PadicNumber res = sub(add(inv(q), tail_at(q)), jp);
  if (!res.is_zero() || res.v < M - 2)
    throw std::logic_error("tate_parameter: fixed-point residual above tolerance");
  return q;
}

PadicNumber l_invariant(const EllipticCurveData& E, long p, long M) {
  ReductionType rt = reduction_type(E, p);
  if (rt == ReductionType::NonsplitMultiplicative)
    throw std::domain_error(
        "l_invariant: nonsplit at p, the refinement has no central trivial zero");
  if (rt != ReductionType::SplitMultiplicative)
    throw std::domain_error("l_invariant: split multiplicative reduction required");
  PadicNumber q = tate_parameter(E, p, M + 2);
  PadicNumber ord = padic_from_rational(mpz_class(q.v), mpz_class(1), p, M + 8);
  return div(iwasawa_log_any(q), ord);
}

MttResult mtt_check(const EllipticCurveData& E, long p, long M) {
  MttResult R;
  R.curve = E.label;
  R.p = p;
  R.M = M;
  R.reduction = reduction_type(E, p);
  switch (R.reduction) {
    case ReductionType::Additive:
      throw std::domain_error("mtt_check: additive reduction at p");
    case ReductionType::NonsplitMultiplicative:
      throw std::domain_error(
          "mtt_check: nonsplit at p, the refinement has no central trivial zero");
    default:
      break;
  }

  EigenformDesc desc = curve_eigenform(E);
  if (R.reduction == ReductionType::Good && curve_ap(E, p) % p == 0)
    throw std::domain_error("mtt_check: ordinary prime required");

  LfuncContext C = make_context(desc, p, M, 1);
  R.report = trivial_zero_report(C, 1);

  if (R.reduction == ReductionType::Good) {
    // interpolation at the center: L_p(1) = p (1 - 1/alpha)^2 l_alg,
    // p = the stabilization scale p^(k-1) at k = 2
    R.trivial_zero = false;
    if (R.report.l_alg.is_zero()) {
      R.degenerate = true;
      return R;
    }
    PadicNumber one = padic_one(p, M + 6);
    PadicNumber euler = pow_int(sub(one, inv(C.F.alpha)), 2);
    PadicNumber expected =
        mul(mul(padic_from_integer(mpz_class(p), p, M + 6 + 1), euler), R.report.l_alg);
    R.interp_residual = sub(R.report.value, expected);
    R.interp_digits = R.interp_residual.v - expected.v;
    return R;
  }

  // split multiplicative
  if (!R.report.trivial_zero_expected)
    throw std::logic_error("mtt_check: split refinement did not land in the forced-zero set");
  R.trivial_zero = true;
  R.tate_q = tate_parameter(E, p, M + 2);
  R.tate_ord = R.tate_q.v;
  PadicNumber ord = padic_from_rational(mpz_class(R.tate_ord), mpz_class(1), p, M + 8);
  R.linv = div(iwasawa_log_any(R.tate_q), ord);
  if (R.linv.is_zero())
    throw std::logic_error("mtt_check: L-invariant vanishes at working precision");
  if (R.report.l_alg.is_zero()) {
    R.degenerate = true;  // identity degenerates to 0 = 0
    return R;
  }
  PadicNumber scale = mul(R.linv, R.report.l_alg);
  R.residual = sub(R.report.derivatives.at(0), scale);
  R.residual_digits = R.residual.v - scale.v;
  return R;
}

}  // namespace lp
