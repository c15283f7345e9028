#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "lp/dist.hpp"
#include "lp/modsym.hpp"
#include "lp/ocsym.hpp"
#include "lp/padic.hpp"

using namespace lp;

namespace {

EigenformDesc desc_11a() {
  EigenformDesc d;
  d.name = "11a";
  d.N = 11;
  d.k = 2;
  d.ap = {{2, -2}, {3, -1}, {5, 1}, {11, 1}};
  return d;
}

EigenformDesc desc_6_4() {
  EigenformDesc d;
  d.name = "6.4.a.a";
  d.N = 6;
  d.k = 4;
  d.ap = {{2, -2}, {3, -3}, {5, 6}, {7, -16}};
  return d;
}

// zero-tails tuple over the generators of S, from a classical symbol
std::vector<ApproxDistribution> naive_tuple(const ManinSymbolSpace& S, const PadicSymbol& phi,
                                            long M, bool junk_tails) {
  std::vector<ApproxDistribution> init(S.n_gen);
  for (long i = 0; i < S.n_gen; ++i) {
    std::vector<PadicNumber> mu(M);
    for (long m = 0; m < M; ++m) {
      if (m <= S.g)
        mu[m] = phi.big[flat_index(S, i, m)];
      else if (junk_tails)
        mu[m] = padic_from_integer(1 + 7 * i + 13 * m, phi.p, M - m);
      else
        mu[m] = padic_zero(phi.p, M - m);
    }
    init[i] = dist_from_moments(phi.p, phi.k, std::move(mu));
  }
  return init;
}

OverconvergentSymbol wrap_tuple(const ManinSymbolSpace& S, std::vector<ApproxDistribution> init,
                                const PadicNumber& alpha) {
  OverconvergentSymbol Psi;
  Psi.N = S.N;
  Psi.k = S.k;
  Psi.p = init[0].p;
  Psi.M = init[0].M;
  Psi.alpha = alpha;
  Psi.val = std::move(init);
  return Psi;
}

}  // namespace

TEST_CASE("evaluation specializes to the classical symbol") {
  RefinedEigenform F = refine_eigenform(desc_11a(), 3, 8);
  const ManinSymbolSpace& S = F.space;
  const long M = 8;
  // arbitrary tails must not affect specialized evaluations
  OverconvergentSymbol Psi = wrap_tuple(S, naive_tuple(S, F.plus_p, M, true), F.alpha);

  const Cusp paths[3][2] = {
      {make_cusp(0, 1), cusp_infinity()},
      {make_cusp(1, 3), make_cusp(2, 5)},
      {cusp_infinity(), make_cusp(4, 9)},
  };
  for (const auto& pr : paths) {
    ApproxDistribution v = oc_eval_path(S, Psi, pr[0], pr[1]);
    std::vector<PadicNumber> th = specialize(v);
    std::vector<PadicNumber> cl = eval_path(S, F.plus_p.big, pr[0], pr[1]);
    for (long m = 0; m <= S.g; ++m) CHECK(agree(th[m], cl[m]));
  }
}

TEST_CASE("U_p on symbols intertwines with the classical operator") {
  RefinedEigenform F = refine_eigenform(desc_11a(), 3, 7);
  const ManinSymbolSpace& S = F.space;
  OverconvergentSymbol Psi = wrap_tuple(S, naive_tuple(S, F.plus_p, 7, true), F.alpha);
  OverconvergentSymbol U = up_on_symbol(S, Psi);
  PadicSymbol thU = specialize_symbol(S, U);
  std::vector<PadicNumber> Uth = hecke_apply(S, specialize_symbol(S, Psi).big, 3);
  for (long t = 0; t < S.dim_total; ++t) CHECK(agree(thU.big[t], Uth[t]));
}

TEST_CASE("the ordinary lift is a graded U_p eigensymbol") {
  const long M = 8;
  RefinedEigenform F = refine_eigenform(desc_11a(), 3, M);
  const ManinSymbolSpace& S = F.space;
  OverconvergentSymbol Psi = lift(S, F.plus_p, F.alpha, M);

  // converged well before the budget, to full graded precision
  CHECK(Psi.iterations < 2 * M);
  CHECK(Psi.coherence >= M - 1);

  // specializes back to the stabilized classical symbol
  PadicSymbol th = specialize_symbol(S, Psi);
  for (long t = 0; t < S.dim_total; ++t) CHECK(agree(th.big[t], F.plus_p.big[t]));

  // eigen-equation, moment by moment
  OverconvergentSymbol U = up_on_symbol(S, Psi);
  for (long i = 0; i < S.n_gen; ++i)
    CHECK(dist_agree(dist_scale(U.val[i], inv(F.alpha)), Psi.val[i]));

  // minus sign lifts too
  OverconvergentSymbol Psim = lift(S, F.minus_p, F.alpha, M);
  CHECK(Psim.coherence >= M - 1);
}

TEST_CASE("independent initial tuples converge to the same lift") {
  const long M = 7;
  RefinedEigenform F = refine_eigenform(desc_11a(), 3, M);
  const ManinSymbolSpace& S = F.space;
  OverconvergentSymbol A = lift_from(S, naive_tuple(S, F.plus_p, M, false), F.alpha);
  OverconvergentSymbol B = lift_from(S, naive_tuple(S, F.plus_p, M, true), F.alpha);
  for (long i = 0; i < S.n_gen; ++i) CHECK(dist_agree(A.val[i], B.val[i]));
}

TEST_CASE("weight-four slope-one lift") {
  const long M = 9;
  RefinedEigenform F = refine_eigenform(desc_6_4(), 3, M);
  REQUIRE(F.slope == 1);
  const ManinSymbolSpace& S = F.space;
  OverconvergentSymbol Psi = lift(S, F.plus_p, F.alpha, M);
  CHECK(Psi.coherence >= 4);

  PadicSymbol th = specialize_symbol(S, Psi);
  for (long t = 0; t < S.dim_total; ++t) CHECK(agree(th.big[t], F.plus_p.big[t]));

  AdmissibilityProfile prof = admissibility_profile(S, Psi, 3);
  CHECK(std::abs(prof.fitted - 1.0) <= 0.25);
}

TEST_CASE("ordinary admissibility profile is bounded") {
  const long M = 7;
  RefinedEigenform F = refine_eigenform(desc_11a(), 3, M);
  OverconvergentSymbol Psi = lift(F.space, F.plus_p, F.alpha, M);
  AdmissibilityProfile prof = admissibility_profile(F.space, Psi, 4);
  CHECK(std::abs(prof.fitted) <= 0.25);
}

TEST_CASE("measure pieces satisfy level compatibility") {
  const long M = 8, p = 3;
  RefinedEigenform F = refine_eigenform(desc_11a(), p, M);
  const ManinSymbolSpace& S = F.space;
  OverconvergentSymbol Psi = lift(S, F.plus_p, F.alpha, M);
  for (long a : {1L, 2L}) {
    ApproxDistribution lhs = measure_piece(S, Psi, a, 1);
    std::vector<PadicNumber> sum(M, padic_zero(p, 4 * M));
    for (long b = 0; b < p; ++b) {
      ApproxDistribution up = measure_piece(S, Psi, a + b * p, 2);
      // recenter from a + b p to a: shift = (a + b p) - a
      std::vector<PadicNumber> rec =
          recenter_moments(up.mu, padic_from_integer(b * p, p, 3 * M));
      for (long j = 0; j < M; ++j) sum[j] = add(sum[j], rec[j]);
    }
    for (long j = 0; j < M; ++j) CHECK(agree(lhs.mu[j], sum[j]));
  }
}

TEST_CASE("measure pieces keep the level scaling in their precision") {
  const long M = 7;
  RefinedEigenform F = refine_eigenform(desc_11a(), 3, M);
  OverconvergentSymbol Psi = lift(F.space, F.plus_p, F.alpha, M);
  ApproxDistribution nu = measure_piece(F.space, Psi, mpz_class(1), 2);
  for (long j = 0; j < M; ++j) {
    if (nu.mu[j].is_zero()) continue;
    CHECK(nu.mu[j].v >= 2 * j);            // integral of (x-1)^j over 1 + 9 Z_3
    CHECK(nu.mu[j].abs_prec() >= M - j);   // scaling beat the plain filtration
  }
}

TEST_CASE("guards: criticality, precision floor, divergence") {
  const long M = 6;
  RefinedEigenform F = refine_eigenform(desc_11a(), 3, M);
  const ManinSymbolSpace& S = F.space;

  // critical slope: the k-1 refinement of 11a at 3 has v(beta) = 1 = k-1
  Stabilization crit = p_stabilize(F.space0, S, F.plus, 3, M, 1);
  CHECK_THROWS_AS(lift(S, crit.sym, crit.alpha, M + 3), std::domain_error);

  // precision floor M > k-1+slope
  CHECK_THROWS_AS(lift(S, F.plus_p, F.alpha, 1), std::domain_error);

  // wrong eigenvalue never stabilizes (-alpha is a unit, so not critical)
  PadicNumber bad = neg(F.alpha);
  CHECK_THROWS_AS(lift(S, F.plus_p, bad, M), std::runtime_error);
}

TEST_CASE("textual dump") {
  const long M = 6;
  RefinedEigenform F = refine_eigenform(desc_11a(), 3, M);
  OverconvergentSymbol Psi = lift(F.space, F.plus_p, F.alpha, M);
  std::string s = dump_symbol(Psi);
  CHECK(s.find("level 33 weight 2 prime 3 moments 6") == 0);
  long lines = 0;
  for (char ch : s)
    if (ch == '\n') ++lines;
  CHECK(lines == 1 + F.space.n_gen * M);
}
