#include "lp/ocsym.hpp"

#include <algorithm>
#include <climits>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace lp {
namespace {

M2 swap_diag(const M2& m) { return M2{m[3], m[1], m[2], m[0]}; }

// exact multiplication by p^e
PadicNumber shift_v(PadicNumber x, long e) {
  x.v += e;
  return x;
}

struct PlanTerm {
  int sign;
  long j;
  M2 sw;  // swapped conjugator, ready for act()
};

// Fixed decomposition of the U_p paths: plan[i][b] lists the unimodular
// terms of {delta_b g_i 0 -> delta_b g_i infty}, delta_b = [1,b;0,p].
using UpPlan = std::vector<std::vector<std::vector<PlanTerm>>>;

void plan_cusp(const ManinSymbolSpace& S, const Cusp& c, int sign, std::vector<PlanTerm>* out) {
  for (const M2& h : unimodular_path(c)) {
    long j = S.index_of(h[2], h[3]);
    M2 conj = m2_mul(S.lifts[j], m2_inv(h));
    if (mpz_class(conj[2] % S.N) != 0)
      throw std::logic_error("ocsym: conjugator escapes Gamma_0(N)");
    out->push_back(PlanTerm{sign, j, swap_diag(conj)});
  }
}

UpPlan make_up_plan(const ManinSymbolSpace& S, long p) {
  UpPlan plan(S.n_gen);
  for (long i = 0; i < S.n_gen; ++i) {
    plan[i].resize(p);
    for (long b = 0; b < p; ++b) {
      M2 dg = m2_mul(M2{mpz_class(1), mpz_class(b), mpz_class(0), mpz_class(p)}, S.lifts[i]);
      plan_cusp(S, make_cusp(dg[0], dg[2]), +1, &plan[i][b]);
      plan_cusp(S, make_cusp(dg[1], dg[3]), -1, &plan[i][b]);
    }
  }
  return plan;
}

OverconvergentSymbol apply_up(const ManinSymbolSpace& S, const UpPlan& plan,
                              const OverconvergentSymbol& Psi) {
  OverconvergentSymbol out = Psi;
  for (long i = 0; i < S.n_gen; ++i) {
    ApproxDistribution acc = dist_zero(Psi.p, Psi.k, Psi.M);
    for (long b = 0; b < Psi.p; ++b) {
      ApproxDistribution inner = dist_zero(Psi.p, Psi.k, Psi.M);
      for (const PlanTerm& t : plan[i][b]) {
        ApproxDistribution v = act(t.sw, Psi.val[t.j]);
        inner = (t.sign > 0) ? dist_add(inner, v) : dist_sub(inner, v);
      }
      acc = dist_add(acc, act_up_summand(b, inner));
    }
    out.val[i] = acc;
  }
  return out;
}

void check_symbol(const ManinSymbolSpace& S, const OverconvergentSymbol& Psi) {
  if (Psi.N != S.N || (long)Psi.val.size() != S.n_gen)
    throw std::domain_error("ocsym: symbol does not match the presentation");
  if (Psi.N % Psi.p != 0) throw std::domain_error("ocsym: level must be divisible by p");
}

double fit_slope(const std::vector<double>& y) {
  const long n = (long)y.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (long i = 0; i < n; ++i) {
    double x = (double)(i + 1);
    sx += x;
    sy += y[i];
    sxx += x * x;
    sxy += x * y[i];
  }
  double den = n * sxx - sx * sx;
  return den == 0 ? 0 : (n * sxy - sx * sy) / den;
}

}  // namespace

ApproxDistribution oc_eval_unimodular(const ManinSymbolSpace& S, const OverconvergentSymbol& Psi,
                                      const M2& h) {
  check_symbol(S, Psi);
  if (m2_det(h) != 1) throw std::invalid_argument("ocsym: matrix not in SL2(Z)");
  long j = S.index_of(h[2], h[3]);
  M2 conj = m2_mul(S.lifts[j], m2_inv(h));
  if (mpz_class(conj[2] % S.N) != 0)
    throw std::logic_error("ocsym: conjugator escapes Gamma_0(N)");
  return act(swap_diag(conj), Psi.val[j]);
}

ApproxDistribution oc_eval_path(const ManinSymbolSpace& S, const OverconvergentSymbol& Psi,
                                const Cusp& x, const Cusp& y) {
  check_symbol(S, Psi);
  ApproxDistribution out = dist_zero(Psi.p, Psi.k, Psi.M);
  for (const M2& h : unimodular_path(y)) out = dist_add(out, oc_eval_unimodular(S, Psi, h));
  for (const M2& h : unimodular_path(x)) out = dist_sub(out, oc_eval_unimodular(S, Psi, h));
  return out;
}

OverconvergentSymbol up_on_symbol(const ManinSymbolSpace& S, const OverconvergentSymbol& Psi) {
  check_symbol(S, Psi);
  return apply_up(S, make_up_plan(S, Psi.p), Psi);
}

PadicSymbol specialize_symbol(const ManinSymbolSpace& S, const OverconvergentSymbol& Psi) {
  check_symbol(S, Psi);
  PadicSymbol out;
  out.N = S.N;
  out.k = Psi.k;
  out.p = Psi.p;
  out.big.resize(S.dim_total);
  for (long i = 0; i < S.n_gen; ++i) {
    std::vector<PadicNumber> th = specialize(Psi.val[i]);
    for (long m = 0; m <= S.g; ++m) out.big[flat_index(S, i, m)] = th[m];
  }
  return out;
}

long symbol_coherence(const ManinSymbolSpace& S, const OverconvergentSymbol& Psi) {
  check_symbol(S, Psi);
  long c = Psi.M;
  // eigen-equation residual
  OverconvergentSymbol u = up_on_symbol(S, Psi);
  PadicNumber ia = inv(Psi.alpha);
  for (long i = 0; i < S.n_gen; ++i)
    c = std::min(c, dist_coherence(dist_scale(u.val[i], ia), Psi.val[i]));
  // path additivity across fixed triples {x -> w} + {w -> y} = {x -> y}
  const long triples[3][6] = {
      {0, 1, 1, 2, 1, 0},   // 0, 1/2, infty
      {1, 3, 2, 7, 1, 5},   // 1/3, 2/7, 1/5
      {1, 0, 3, 7, 2, 11},  // infty, 3/7, 2/11
  };
  for (const auto& t : triples) {
    Cusp x = make_cusp(t[0], t[1]), w = make_cusp(t[2], t[3]), y = make_cusp(t[4], t[5]);
    ApproxDistribution whole = oc_eval_path(S, Psi, x, y);
    ApproxDistribution split = dist_add(oc_eval_path(S, Psi, x, w), oc_eval_path(S, Psi, w, y));
    c = std::min(c, dist_coherence(whole, split));
  }
  return c;
}

OverconvergentSymbol lift_from(const ManinSymbolSpace& S, std::vector<ApproxDistribution> init,
                               const PadicNumber& alpha, long iters) {
  if ((long)init.size() != S.n_gen) throw std::domain_error("ocsym: wrong tuple size");
  OverconvergentSymbol cur;
  cur.N = S.N;
  cur.k = S.k;
  cur.p = init.empty() ? 0 : init[0].p;
  cur.M = init.empty() ? 0 : init[0].M;
  cur.alpha = alpha;
  cur.val = std::move(init);
  check_symbol(S, cur);
  if (alpha.is_zero()) throw std::domain_error("ocsym: alpha must be nonzero");
  if (alpha.v >= S.k - 1) throw std::domain_error("ocsym: critical slope");
  if (iters < 0) iters = 2 * cur.M;

  const UpPlan plan = make_up_plan(S, cur.p);
  const PadicNumber ia = inv(alpha);
  bool stable = (iters == 0);
  for (long t = 0; t < iters; ++t) {
    OverconvergentSymbol next = apply_up(S, plan, cur);
    for (long i = 0; i < S.n_gen; ++i) next.val[i] = dist_scale(next.val[i], ia);
    stable = true;
    for (long i = 0; i < S.n_gen && stable; ++i) stable = dist_agree(next.val[i], cur.val[i]);
    cur.val = std::move(next.val);
    cur.iterations = t + 1;
    if (stable) break;
  }
  if (!stable) throw std::runtime_error("ocsym: U_p iteration did not stabilize");
  cur.coherence = symbol_coherence(S, cur);
  if (cur.coherence < 1) throw std::runtime_error("ocsym: U_p iteration diverged");
  return cur;
}

OverconvergentSymbol lift(const ManinSymbolSpace& S, const PadicSymbol& phi,
                          const PadicNumber& alpha, long M, long iters) {
  if (phi.N != S.N || phi.k != S.k || (long)phi.big.size() != S.dim_total)
    throw std::domain_error("ocsym: classical symbol does not match the presentation");
  if (phi.p != alpha.p) throw std::domain_error("ocsym: mismatched primes");
  if (alpha.is_zero()) throw std::domain_error("ocsym: alpha must be nonzero");
  if (alpha.v >= S.k - 1) throw std::domain_error("ocsym: critical slope");
  if (M <= S.k - 1 + alpha.v) throw std::domain_error("ocsym: not enough moments for this slope");

  std::vector<ApproxDistribution> init(S.n_gen);
  for (long i = 0; i < S.n_gen; ++i) {
    std::vector<PadicNumber> mu(M);
    for (long m = 0; m < M; ++m) {
      if (m <= S.g) {
        const PadicNumber& w = phi.big[flat_index(S, i, m)];
        if (!w.is_zero() && w.v < 0)
          throw std::domain_error("ocsym: classical symbol is not p-integral");
        mu[m] = w;
      } else {
        mu[m] = padic_zero(phi.p, M - m);
      }
    }
    init[i] = dist_from_moments(phi.p, phi.k, std::move(mu));
  }
  return lift_from(S, std::move(init), alpha, iters);
}

ApproxDistribution measure_piece(const ManinSymbolSpace& S, const OverconvergentSymbol& Psi,
                                 const mpz_class& a, long n) {
  check_symbol(S, Psi);
  if (n < 1) throw std::domain_error("ocsym: measure piece needs level n >= 1");
  if (a % Psi.p == 0) throw std::domain_error("ocsym: residue must be a p-unit");
  ApproxDistribution mu = oc_eval_path(S, Psi, cusp_infinity(), make_cusp(a, pow_p(Psi.p, n)));
  PadicNumber ian = pow_int(inv(Psi.alpha), n);
  ApproxDistribution out;
  out.p = Psi.p;
  out.k = Psi.k;
  out.M = Psi.M;
  out.mu.resize(Psi.M);
  // moment j gains the level scaling p^(nj); keep the honest precision
  // rather than re-capping at the plain filtration
  for (long j = 0; j < Psi.M; ++j) out.mu[j] = shift_v(mul(ian, mu.mu[j]), n * j);
  return out;
}

std::vector<PadicNumber> recenter_moments(const std::vector<PadicNumber>& mu,
                                          const PadicNumber& shift) {
  const long n = (long)mu.size();
  std::vector<PadicNumber> out(n);
  long rel = 8;
  for (const auto& m : mu) rel = std::max(rel, m.M + 4);
  for (long j = 0; j < n; ++j) {
    PadicNumber acc = mu[j];
    for (long i = 0; i < j; ++i) {
      mpz_class bin;
      mpz_bin_uiui(bin.get_mpz_t(), (unsigned long)j, (unsigned long)i);
      PadicNumber c = padic_from_rational(bin, mpz_class(1), shift.p, rel);
      acc = add(acc, mul(c, mul(pow_int(shift, j - i), mu[i])));
    }
    out[j] = acc;
  }
  return out;
}

AdmissibilityProfile admissibility_profile(const ManinSymbolSpace& S,
                                           const OverconvergentSymbol& Psi, long n_max) {
  check_symbol(S, Psi);
  AdmissibilityProfile prof;
  for (long n = 1; n <= n_max; ++n) {
    mpz_class pn = pow_p(Psi.p, n);
    long best = LONG_MIN;
    for (mpz_class a = 1; a < pn; ++a) {
      if (a % Psi.p == 0) continue;
      ApproxDistribution nu = measure_piece(S, Psi, a, n);
      for (long j = 0; j < Psi.M; ++j)
        if (!nu.mu[j].is_zero()) best = std::max(best, n * j - nu.mu[j].v);
    }
    prof.log_norms.push_back(best == LONG_MIN ? 0.0 : (double)best);
  }
  prof.fitted = fit_slope(prof.log_norms);
  return prof;
}

std::string dump_symbol(const OverconvergentSymbol& Psi) {
  std::ostringstream os;
  os << "level " << Psi.N << " weight " << Psi.k << " prime " << Psi.p << " moments " << Psi.M
     << " alpha " << to_string(Psi.alpha) << " coherence " << Psi.coherence << " iterations "
     << Psi.iterations << '\n';
  for (long i = 0; i < (long)Psi.val.size(); ++i)
    for (long j = 0; j < Psi.M; ++j)
      os << i << ' ' << j << ' ' << to_string(Psi.val[i].mu[j]) << '\n';
  return os.str();
}

}  // namespace lp
