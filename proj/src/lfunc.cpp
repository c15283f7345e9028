#include "lp/lfunc.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <climits>
#include <sstream>
#include <stdexcept>

namespace lp {

namespace {

// Working precision for character values and Teichmuller centers; generous
// relative to the moment budget so the measure side limits every estimate.
long work_prec(long M) { return M + 8; }

// additive identity: absolute precision high enough never to cap a summand
PadicNumber zero_acc(long p) { return padic_zero(p, 1L << 40); }

long effective_val(const CycloElement& x) {
  return cyclo_is_zero(x) ? cyclo_abs_prec(x) : cyclo_valuation(x);
}

PadicNumber exact_integer(const mpz_class& a, long p, long M) {
  // abs prec v(a) + M so products against measured quantities never lose
  // precision to the exact factor
  if (a == 0) return zero_acc(p);
  mpz_class t = a;
  long v = 0;
  while (mpz_divisible_ui_p(t.get_mpz_t(), p)) {
    t /= p;
    ++v;
  }
  return padic_from_integer(a, p, v + M);
}

std::vector<mpq_class> qseries_mul(const std::vector<mpq_class>& a,
                                   const std::vector<mpq_class>& b, long D) {
  std::vector<mpq_class> c(D, mpq_class(0));
  for (long i = 0; i < (long)a.size() && i < D; ++i) {
    if (a[i] == 0) continue;
    for (long j = 0; j < (long)b.size() && i + j < D; ++j)
      c[i + j] += a[i] * b[j];
  }
  return c;
}

// (1+u)^(r-1) mod u^D, r any integer: generalized binomial coefficients.
std::vector<mpq_class> qseries_onepu_pow(long r, long D) {
  std::vector<mpq_class> c(D, mpq_class(0));
  mpq_class acc(1);
  c[0] = acc;
  for (long j = 1; j < D; ++j) {
    acc *= mpq_class(r - j, j);
    acc.canonicalize();
    c[j] = acc;
  }
  return c;
}

std::vector<mpq_class> qseries_log_onepu(long D) {
  std::vector<mpq_class> c(D, mpq_class(0));
  for (long j = 1; j < D; ++j) {
    c[j] = mpq_class((j % 2) ? 1 : -1, j);
    c[j].canonicalize();
  }
  return c;
}

long conductor_mod(const DirichletChar& chi) {
  long m = 1;
  for (long i = 0; i < std::max(chi.cmod, 1L); ++i) m *= chi.p;
  return m;
}

}  // namespace

GaloisDistribution ev_from_symbol(const ManinSymbolSpace& S,
                                  const OverconvergentSymbol& Psi,
                                  long n_max) {
  if (n_max < 1) throw std::invalid_argument("ev_from_symbol: n_max < 1");
  long h = Psi.alpha.v;
  if (n_max * h >= Psi.M)
    throw std::domain_error(
        "ev_from_symbol: precision ledger exhausted, n_max * v(alpha) >= M");
  GaloisDistribution ev;
  ev.p = Psi.p;
  ev.k = Psi.k;
  ev.M = Psi.M;
  ev.n_max = n_max;
  ev.alpha = Psi.alpha;
  ev.pieces.resize(n_max);
  long W = work_prec(Psi.M);
  mpz_class pn = 1;
  for (long n = 1; n <= n_max; ++n) {
    pn *= Psi.p;
    for (mpz_class a = 1; a < pn; ++a) {
      if (mpz_divisible_ui_p(a.get_mpz_t(), Psi.p)) continue;
      ApproxDistribution piece = measure_piece(S, Psi, a, n);
      PadicNumber w = teichmuller(a, Psi.p, W);
      PadicNumber shift = sub(padic_from_integer(a, Psi.p, W), w);
      ApproxDistribution re;
      re.p = piece.p;
      re.k = piece.k;
      re.M = piece.M;
      re.mu = recenter_moments(piece.mu, shift);
      ev.pieces[n - 1].emplace(a.get_si(), std::move(re));
    }
  }
  return ev;
}

bool ev_level_compatible(const GaloisDistribution& ev) {
  long p = ev.p;
  mpz_class pn = 1;
  for (long n = 1; n < ev.n_max; ++n) {
    pn *= p;
    for (const auto& [a, piece] : ev.pieces[n - 1]) {
      std::vector<PadicNumber> acc(piece.mu.size(),
                                   zero_acc(p));
      for (long t = 0; t < p; ++t) {
        long b = a + t * pn.get_si();
        auto it = ev.pieces[n].find(b);
        if (it == ev.pieces[n].end()) continue;
        // children above a share the center omega(a): literal addition
        for (size_t j = 0; j < acc.size() && j < it->second.mu.size(); ++j)
          acc[j] = add(acc[j], it->second.mu[j]);
      }
      for (size_t j = 0; j < acc.size(); ++j)
        if (!agree(acc[j], piece.mu[j])) return false;
    }
  }
  return true;
}

PadicNumber ev_total_mass(const GaloisDistribution& ev) {
  PadicNumber acc = zero_acc(ev.p);
  for (const auto& [a, piece] : ev.pieces[0]) acc = add(acc, piece.mu[0]);
  return acc;
}

CycloElement lp_value(const GaloisDistribution& ev, const DirichletChar& chi,
                      const PadicNumber& s) {
  if (chi.p != ev.p)
    throw std::invalid_argument("lp_value: character prime mismatch");
  long n = std::max(chi.cond, 1L);
  if (n > ev.n_max)
    throw std::domain_error("lp_value: conductor exceeds the stored depth");
  long p = ev.p;
  long W = work_prec(ev.M);
  long lvl = char_value_level(chi);
  PadicNumber s1 = sub(s, padic_one(p, W));
  std::vector<PadicNumber> binom(ev.M);
  for (long j = 0; j < ev.M; ++j) binom[j] = binom_padic(s1, j);
  CycloElement acc = cyclo_zero(p, lvl, W);
  for (const auto& [a, piece] : ev.pieces[n - 1]) {
    PadicNumber winv = inv(teichmuller(a, p, W));
    PadicNumber pw = padic_one(p, W);
    PadicNumber scal = zero_acc(p);
    for (long j = 0; j < (long)piece.mu.size(); ++j) {
      scal = add(scal, mul(binom[j], mul(pw, piece.mu[j])));
      pw = mul(pw, winv);
    }
    acc = cyclo_add(acc, cyclo_scale(chi_value(chi, a, W), scal));
  }
  return acc;
}

PadicPowerSeries lp_series(const GaloisDistribution& ev,
                           const DirichletChar& chi, long center, long D) {
  if (char_value_level(chi) != 0)
    throw std::invalid_argument(
        "lp_series: wild character, coefficients leave Z_p");
  if (D < 0) throw std::invalid_argument("lp_series: negative degree");
  long p = ev.p;
  long W = work_prec(ev.M);
  std::vector<mpq_class> B = qseries_onepu_pow(center, ev.M);
  std::vector<mpq_class> L = qseries_log_onepu(ev.M);
  PadicPowerSeries out;
  out.p = p;
  out.center = center;
  for (long t = 0; t <= D; ++t) {
    if (t > 0) {
      B = qseries_mul(B, L, ev.M);
      for (auto& q : B) {
        q /= t;
        q.canonicalize();
      }
    }
    PadicNumber ct = zero_acc(p);
    for (const auto& [a, piece] : ev.pieces[0]) {
      PadicNumber winv = inv(teichmuller(a, p, W));
      PadicNumber pw = padic_one(p, W);
      PadicNumber scal = zero_acc(p);
      for (long j = 0; j < (long)piece.mu.size(); ++j) {
        if (B[j] != 0)
          scal = add(scal, mul(padic_from_rational(B[j], p, W),
                               mul(pw, piece.mu[j])));
        pw = mul(pw, winv);
      }
      ct = add(ct, mul(chi_value_padic(chi, a, W), scal));
    }
    out.c.push_back(ct);
  }
  return out;
}

LfuncContext make_context(const EigenformDesc& desc, long p, long M,
                          long n_max, long slope_choice) {
  LfuncContext C;
  C.M = M;
  C.n_max = n_max;
  C.F = refine_eigenform(desc, p, M + 6, slope_choice);
  C.lift_plus = lift(C.F.space, C.F.plus_p, C.F.alpha, M);
  C.lift_minus = lift(C.F.space, C.F.minus_p, C.F.alpha, M);
  C.ev_plus = ev_from_symbol(C.F.space, C.lift_plus, n_max);
  C.ev_minus = ev_from_symbol(C.F.space, C.lift_minus, n_max);
  return C;
}

const GaloisDistribution& ev_for(const LfuncContext& C,
                                 const DirichletChar& chi) {
  return chi.parity == 1 ? C.ev_plus : C.ev_minus;
}

CycloElement lp_value(const LfuncContext& C, const DirichletChar& chi,
                      const PadicNumber& s) {
  return lp_value(ev_for(C, chi), chi, s);
}

PadicPowerSeries lp_series(const LfuncContext& C, const DirichletChar& chi,
                           long center, long D) {
  return lp_series(ev_for(C, chi), chi, center, D);
}

CycloElement interpolation_rhs_with(const LfuncContext& C,
                                    const DirichletChar& chi, long r,
                                    const PadicNumber& up_eigenvalue) {
  long p = C.F.p;
  long k = C.F.k;
  if (r < 1 || r > k - 1)
    throw std::domain_error("interpolation_rhs: r outside the critical range");
  if (chi.p != p)
    throw std::invalid_argument("interpolation_rhs: character prime mismatch");
  long W = work_prec(C.M);
  long pm1 = p - 1;
  long t = ((1 - r) % pm1 + pm1) % pm1;
  DirichletChar psi = char_mul_teich(chi, t);
  long nu = psi.cond;
  const PadicSymbol& Phi = chi.parity == 1 ? C.F.plus_p : C.F.minus_p;

  if (nu == 0) {
    std::vector<PadicNumber> vals =
        eval_path(C.F.space, Phi.big, cusp_infinity(), make_cusp(0, 1));
    PadicNumber euler =
        sub(padic_one(p, W),
            div(exact_integer(pow_p(p, r - 1), p, W), up_eigenvalue));
    return cyclo_from_padic(mul(euler, vals[r - 1]), 0);
  }

  mpz_class pnu = pow_p(p, nu);
  long lvl = char_value_level(psi);
  CycloElement acc = cyclo_zero(p, lvl, W);
  for (mpz_class a = 1; a < pnu; ++a) {
    if (mpz_divisible_ui_p(a.get_mpz_t(), p)) continue;
    std::vector<PadicNumber> vals =
        eval_path(C.F.space, Phi.big, cusp_infinity(), make_cusp(a, pnu));
    // coefficient of z^t in (a + p^nu z)^(r-1)
    PadicNumber scal = zero_acc(p);
    std::vector<mpz_class> coef(r, 0);
    mpz_class pt = 1;
    for (long tt = 0; tt <= r - 1; ++tt) {
      mpz_class bin;
      mpz_bin_uiui(bin.get_mpz_t(), r - 1, tt);
      mpz_class ap;
      mpz_pow_ui(ap.get_mpz_t(), a.get_mpz_t(), r - 1 - tt);
      coef[tt] = bin * ap * pt;
      pt *= pnu;
    }
    for (long tt = 0; tt <= r - 1; ++tt)
      scal = add(scal, mul(exact_integer(coef[tt], p, W), vals[tt]));
    acc = cyclo_add(acc, cyclo_scale(chi_value(psi, a, W), scal));
  }
  return cyclo_scale(acc, pow_int(inv(up_eigenvalue), nu));
}

CycloElement interpolation_rhs(const LfuncContext& C, const DirichletChar& chi,
                               long r) {
  return interpolation_rhs_with(C, chi, r, C.F.alpha);
}

InterpResult interpolation_check(const LfuncContext& C,
                                 const std::vector<InterpPoint>& points) {
  if (points.empty())
    throw std::invalid_argument("interpolation_check: no points");
  long p = C.F.p;
  long W = work_prec(C.M);
  std::vector<CycloElement> lhs, rhs;
  for (const auto& pt : points) {
    CycloElement L =
        lp_value(C, pt.chi, padic_from_integer(pt.r, p, W));
    CycloElement R = interpolation_rhs(C, pt.chi, pt.r);
    if (cyclo_is_zero(R)) {
      std::ostringstream os;
      os << "interpolation_check: pairing error, classical side vanishes at "
         << char_literal(pt.chi) << " r=" << pt.r;
      throw std::domain_error(os.str());
    }
    lhs.push_back(std::move(L));
    rhs.push_back(std::move(R));
  }
  InterpResult res;
  if (points.size() == 1) {
    res.min_digits = cyclo_abs_prec(lhs[0]) - effective_val(lhs[0]);
    res.rows.push_back("single point: residual 0");
    return res;
  }
  res.min_digits = LONG_MAX;
  for (size_t i = 0; i < points.size(); ++i) {
    for (size_t j = i + 1; j < points.size(); ++j) {
      long m = std::max(lhs[i].m, std::max(lhs[j].m,
                        std::max(rhs[i].m, rhs[j].m)));
      CycloElement A = cyclo_mul(cyclo_embed(lhs[i], m), cyclo_embed(rhs[j], m));
      CycloElement B = cyclo_mul(cyclo_embed(lhs[j], m), cyclo_embed(rhs[i], m));
      CycloElement d = cyclo_sub(A, B);
      long base = std::min(effective_val(A), effective_val(B));
      long digits = effective_val(d) - base;
      bool zero = cyclo_is_zero(d);
      res.min_digits = std::min(res.min_digits, digits);
      res.within_precision = res.within_precision && zero;
      std::ostringstream os;
      os << char_literal(points[i].chi) << " r=" << points[i].r << " x "
         << char_literal(points[j].chi) << " r=" << points[j].r
         << " digits=" << digits << " zero=" << (zero ? "yes" : "no");
      res.rows.push_back(os.str());
    }
  }
  return res;
}

FeResult functional_equation_check(const LfuncContext& C,
                                   const std::vector<DirichletChar>& chis,
                                   const std::vector<PadicNumber>& grid) {
  if (C.F.k != 2)
    throw std::domain_error(
        "functional_equation_check: implemented for weight 2");
  if (chis.empty() || grid.empty())
    throw std::invalid_argument("functional_equation_check: empty grid");
  long p = C.F.p;
  long W = work_prec(C.M);
  PadicNumber one = padic_one(p, W);
  PadicNumber two = padic_from_integer(2, p, W);
  PadicNumber nQ = padic_from_integer(C.F.n, p, W);

  struct Row {
    CycloElement A, B;
    std::string chi;
    std::string s;
  };
  std::vector<Row> rows;
  for (const auto& chi : chis) {
    DirichletChar chiinv = char_inverse(chi);
    mpz_class mneg = conductor_mod(chi);
    mpz_class ninv;
    mpz_invert(ninv.get_mpz_t(), mpz_class(C.F.n).get_mpz_t(),
               mneg.get_mpz_t());
    mpz_class an = ((-ninv) % mneg + mneg) % mneg;
    CycloElement cval = chi.cmod == 0 ? cyclo_one(p, 0, W)
                                      : chi_value(chi, an, W);
    for (const auto& s : grid) {
      CycloElement A = lp_value(C, chi, s);
      CycloElement B0 = lp_value(C, chiinv, sub(two, s));
      PadicNumber fac = pow_principal(nQ, sub(one, s));
      CycloElement B = cyclo_scale(cyclo_mul(cval, B0), fac);
      Row row;
      row.A = std::move(A);
      row.B = std::move(B);
      row.chi = char_literal(chi);
      row.s = to_string(s);
      rows.push_back(std::move(row));
    }
  }

  FeResult res;
  for (const auto& row : rows) {
    if (cyclo_is_zero(row.B)) continue;
    long i = 0;
    while (row.B.a[i].is_zero()) ++i;
    PadicNumber q = div(row.A.a[i], row.B.a[i]);
    if (agree(q, one)) res.eps_fit = 1;
    else if (agree(q, neg(one))) res.eps_fit = -1;
    break;
  }
  res.matches_root_number = res.eps_fit != 0 && res.eps_fit == C.F.eps_tilde;
  res.min_rel_digits = LONG_MAX;
  for (const auto& row : rows) {
    CycloElement resid =
        cyclo_sub(row.A, res.eps_fit == -1 ? cyclo_neg(row.B) : row.B);
    long base = std::min(effective_val(row.A), effective_val(row.B));
    bool both_zero = cyclo_is_zero(row.A) && cyclo_is_zero(row.B);
    long digits =
        both_zero ? effective_val(resid) : effective_val(resid) - base;
    bool zero = cyclo_is_zero(resid);
    res.min_rel_digits = std::min(res.min_rel_digits, digits);
    res.zero_within_precision = res.zero_within_precision && zero;
    std::ostringstream os;
    os << row.chi << " s=" << row.s << " digits=" << digits
       << " zero=" << (zero ? "yes" : "no");
    res.rows.push_back(os.str());
  }
  return res;
}

LpReport lp_report(const LfuncContext& C, const DirichletChar& chi,
                   long center, long degree) {
  LpReport rep;
  rep.eigenform = C.F.desc.name;
  rep.character = char_literal(chi);
  rep.p = C.F.p;
  rep.k = C.F.k;
  rep.center = center;
  rep.moments = C.M;
  rep.depth = std::max(chi.cond, 1L);
  rep.steinberg = C.F.steinberg;
  rep.eps_p = C.F.eps_p;
  rep.eps_tilde = C.F.eps_tilde;
  rep.tame = char_value_level(chi) == 0;
  if (rep.tame) {
    rep.degree = degree;
    rep.series = lp_series(C, chi, center, degree);
    rep.value = rep.series.c[0];
    rep.value_str = to_string(rep.value);
    long floor_prec = LONG_MAX;
    for (const auto& c : rep.series.c)
      floor_prec = std::min(floor_prec, c.abs_prec());
    rep.declared_digits = floor_prec;
    PadicNumber fact = padic_one(C.F.p, work_prec(C.M));
    for (long t = 1; t <= degree; ++t) {
      fact = mul(fact, padic_from_integer(t, C.F.p, work_prec(C.M)));
      rep.derivatives.push_back(mul(fact, rep.series.c[t]));
    }
  } else {
    rep.degree = 0;
    CycloElement v =
        lp_value(C, chi, padic_from_integer(center, C.F.p, work_prec(C.M)));
    rep.value_str = cyclo_to_string(v);
    rep.declared_digits = cyclo_abs_prec(v);
  }
  rep.trivial_zero_expected = char_is_trivial(chi) && center == C.F.k / 2 &&
                              C.F.steinberg && C.F.eps_p == -1;
  rep.e = rep.trivial_zero_expected ? 1 : 0;
  return rep;
}

LpReport trivial_zero_report(const LfuncContext& C, long deriv_order) {
  long p = C.F.p;
  long center = C.F.k / 2;
  DirichletChar triv = trivial_char(p);
  LpReport rep = lp_report(C, triv, center, std::max(deriv_order, 1L));
  CycloElement la = classical_special_value(C.F.space0, C.F.plus.big, triv,
                                            center - 1, work_prec(C.M));
  rep.l_alg = la.a[0];
  if (rep.e == 1 && !rep.l_alg.is_zero()) {
    rep.empirical_linv = div(rep.derivatives[0], rep.l_alg);
    rep.has_linv = true;
  }
  return rep;
}

CycloElement improved_lp_value(const LfuncContext& C, const DirichletChar& chi,
                               long r) {
  long p = C.F.p;
  long pm1 = p - 1;
  long t = ((1 - r) % pm1 + pm1) % pm1;
  if (char_mul_teich(chi, t).cond != 0)
    throw std::domain_error("improved_lp_value: no removable factor");
  long W = work_prec(C.M);
  PadicNumber euler =
      sub(padic_one(p, W),
          div(exact_integer(pow_p(p, r - 1), p, W), C.F.alpha));
  if (euler.is_zero())
    throw std::domain_error(
        "improved_lp_value: removable factor vanishes at the trivial zero");
  CycloElement v = lp_value(C, chi, padic_from_integer(r, p, W));
  return cyclo_scale(v, inv(euler));
}

}  // namespace lp
