#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <numeric>

#include "lp/modsym.hpp"
#include "lp/qseries.hpp"

using namespace lp;

namespace {

// dim S_k(Gamma_0(N)) by the standard index/elliptic-point/cusp count.
long dim_cusp_forms(long N, long k) {
  long mu = N;
  long nu2 = 1, nu3 = 1, nuinf = 0;
  long n = N;
  for (long q = 2; q * q <= n; ++q)
    if (n % q == 0) {
      mu = mu / q * (q + 1);
      while (n % q == 0) n /= q;
      if (q == 2)
        nu2 *= 1;
      else if (q % 4 == 1)
        nu2 *= 2;
      else
        nu2 *= 0;
      if (q == 3)
        nu3 *= 1;
      else if (q % 3 == 1)
        nu3 *= 2;
      else
        nu3 *= 0;
    }
  if (n > 1) {
    long q = n;
    mu = mu / q * (q + 1);
    nu2 *= (q == 2) ? 1 : (q % 4 == 1 ? 2 : 0);
    nu3 *= (q == 3) ? 1 : (q % 3 == 1 ? 2 : 0);
  }
  if (N % 4 == 0) nu2 = 0;
  if (N % 9 == 0) nu3 = 0;
  auto phi = [](long m) {
    long r = m;
    for (long q = 2; q * q <= m; ++q)
      if (m % q == 0) {
        r = r / q * (q - 1);
        while (m % q == 0) m /= q;
      }
    if (m > 1) r = r / m * (m - 1);
    return r;
  };
  for (long d = 1; d <= N; ++d)
    if (N % d == 0) nuinf += phi(std::gcd(d, N / d));
  long twelve_g = 12 + mu - 3 * nu2 - 4 * nu3 - 6 * nuinf;
  REQUIRE(twelve_g % 12 == 0);
  long genus = twelve_g / 12;
  if (k == 2) return genus;
  return (k - 1) * (genus - 1) + (k / 2 - 1) * nuinf + (k / 4) * nu2 + (k / 3) * nu3;
}

// brute-force trace of Frobenius for y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6
long curve_ap(long p, long a1, long a2, long a3, long a4, long a6) {
  long count = 1;  // point at infinity
  for (long x = 0; x < p; ++x)
    for (long y = 0; y < p; ++y) {
      long lhs = (y * y + a1 * x * y + a3 * y) % p;
      long rhs = ((x * x * x + a2 * x * x + a4 * x + a6) % p + p) % p;
      if (((lhs - rhs) % p + p) % p == 0) ++count;
    }
  return p + 1 - count;
}

QVec sym_coords(const ManinSymbolSpace& S, const ClassicalSymbol& phi) {
  return coords_of(S, phi.big);
}

bool qvec_eq_scaled(const QVec& lhs, const QVec& rhs, const mpq_class& s) {
  if (lhs.size() != rhs.size()) return false;
  for (size_t i = 0; i < lhs.size(); ++i)
    if (lhs[i] != s * rhs[i]) return false;
  return true;
}

Cusp cusp_apply(const M2& g, const Cusp& x) {
  return make_cusp(g[0] * x.num + g[1] * x.den, g[2] * x.num + g[3] * x.den);
}

}  // namespace

TEST_CASE("q-series oracles") {
  ZSeries j = j_series(4);
  CHECK(j[0] == 1);
  CHECK(j[1] == 744);
  CHECK(j[2] == 196884);
  CHECK(j[3] == 21493760);

  ZSeries de = delta_series(8);
  CHECK(de[1] == 1);
  CHECK(de[2] == -24);
  CHECK(de[3] == 252);
  CHECK(de[7] == -16744);

  ZSeries f11 = eta_product({{1, 2}, {11, 2}}, 15);
  long expect11[] = {0, 1, -2, -1, 2, 1, 2, -2, 0, -2, -2, 1, -2, 4, 4};
  for (long i = 0; i < 15; ++i) CHECK(f11[i] == expect11[i]);

  ZSeries f6 = eta_product({{1, 2}, {2, 2}, {3, 2}, {6, 2}}, 9);
  long expect6[] = {0, 1, -2, -3, 4, 6, 6, -16, -8};
  for (long i = 0; i < 9; ++i) CHECK(f6[i] == expect6[i]);
}

TEST_CASE("point counts agree with the eta products") {
  // 11a: y^2 + y = x^3 - x^2 - 10x - 20
  CHECK(curve_ap(2, 0, -1, 1, -10, -20) == -2);
  CHECK(curve_ap(3, 0, -1, 1, -10, -20) == -1);
  CHECK(curve_ap(5, 0, -1, 1, -10, -20) == 1);
  CHECK(curve_ap(7, 0, -1, 1, -10, -20) == -2);
  // 17a: y^2 + xy + y = x^3 - x^2 - x - 14
  CHECK(curve_ap(2, 1, -1, 1, -1, -14) == -1);
  CHECK(curve_ap(3, 1, -1, 1, -1, -14) == 0);
  CHECK(curve_ap(5, 1, -1, 1, -1, -14) == -2);
}

TEST_CASE("2x2 integer matrix helpers") {
  M2 a = {1, 2, 3, 7};
  M2 b = {2, 1, 1, 1};
  CHECK(m2_det(a) == 1);
  CHECK(m2_det(b) == 1);
  M2 ab = m2_mul(a, b);
  CHECK(m2_det(ab) == 1);
  M2 id = m2_mul(a, m2_inv(a));
  CHECK(id == M2{1, 0, 0, 1});
  CHECK_THROWS_AS(m2_inv(M2{2, 0, 0, 1}), std::invalid_argument);
}

TEST_CASE("polynomial action matrices compose contravariantly") {
  long g = 4;
  M2 x = {1, 2, 3, 7};
  M2 y = {0, -1, 1, -1};
  auto Cx = action_matrix(x, g);
  auto Cy = action_matrix(y, g);
  auto Cxy = action_matrix(m2_mul(x, y), g);
  for (long m = 0; m <= g; ++m)
    for (long r = 0; r <= g; ++r) {
      mpz_class acc = 0;
      for (long s = 0; s <= g; ++s) acc += Cy[m][s] * Cx[s][r];
      CHECK(Cxy[m][r] == acc);
    }

  auto Cid = action_matrix(M2{1, 0, 0, 1}, g);
  auto Cneg = action_matrix(M2{-1, 0, 0, -1}, g);
  for (long m = 0; m <= g; ++m)
    for (long r = 0; r <= g; ++r) {
      CHECK(Cid[m][r] == (m == r ? 1 : 0));
      CHECK(Cneg[m][r] == (m == r ? 1 : 0));  // even weight: -1 acts trivially
    }
}

TEST_CASE("cuspidal dimensions match the standard formula") {
  struct Row {
    long N, k, dim;
  };
  // last column: dim S_k(Gamma_0(N)), checked by hand against the formula
  Row rows[] = {{1, 2, 0},  {11, 2, 1}, {13, 2, 0}, {14, 2, 1}, {15, 2, 1}, {17, 2, 1},
                {5, 4, 1},  {6, 4, 1},  {7, 4, 1},  {3, 6, 1},  {1, 12, 1}};
  for (const Row& r : rows) {
    CHECK(dim_cusp_forms(r.N, r.k) == r.dim);
    ManinSymbolSpace S = build_space(r.N, r.k);
    CHECK(cuspidal_dimension(S) == 2 * r.dim);
  }
  ManinSymbolSpace S11 = build_space(11, 2);
  CHECK(S11.dim_space == 3);
  CHECK(S11.n_gen == 12);

  CHECK_THROWS_AS(build_space(100, 42), std::length_error);
  CHECK_THROWS_AS(build_space(11, 3), std::invalid_argument);
  CHECK_THROWS_AS(build_space(0, 2), std::invalid_argument);
}

TEST_CASE("path evaluation is consistent and equivariant") {
  for (auto [N, k] : {std::pair<long, long>{11, 2}, {3, 6}}) {
    ManinSymbolSpace S = build_space(N, k);
    REQUIRE(S.dim_space > 0);
    QVec big(S.dim_total);
    for (long t = 0; t < S.dim_total; ++t) big[t] = S.basis[t][0];

    // unimodular evaluation agrees with the path {h 0 -> h infinity}
    M2 hs[] = {{1, 0, 0, 1}, {0, -1, 1, 0}, {1, 2, 3, 7}, {-2, 1, -5, 2}, {7, 3, 2, 1}};
    for (const M2& h : hs) {
      REQUIRE(m2_det(h) == 1);
      QVec a = eval_unimodular(S, big, h);
      QVec b = eval_path(S, big, make_cusp(h[1], h[3]), make_cusp(h[0], h[2]));
      CHECK(a == b);
    }

    // Gamma_0(N)-equivariance: Phi(gamma D) = Phi(D)|gamma^{-1}
    M2 gammas[] = {{1, 1, 0, 1}, {1, 0, N, 1}, {N + 1, 1, N, 1}};
    Cusp x = make_cusp(0, 1), y = make_cusp(5, 7);
    QVec v = eval_path(S, big, x, y);
    for (const M2& gm : gammas) {
      REQUIRE(m2_det(gm) == 1);
      QVec lhs = eval_path(S, big, cusp_apply(gm, x), cusp_apply(gm, y));
      auto C = action_matrix(m2_inv(gm), S.g);
      for (long m = 0; m <= S.g; ++m) {
        mpq_class acc = 0;
        for (long r = 0; r <= S.g; ++r) acc += mpq_class(C[m][r]) * v[r];
        CHECK(lhs[m] == acc);
      }
    }

    // paths compose: {x->y} + {y->z} = {x->z}
    Cusp z = make_cusp(-3, 8);
    QVec xy = eval_path(S, big, x, y);
    QVec yz = eval_path(S, big, y, z);
    QVec xz = eval_path(S, big, x, z);
    for (long m = 0; m <= S.g; ++m) CHECK(xy[m] + yz[m] == xz[m]);
  }
}

TEST_CASE("eigensymbols of 11a match independent Hecke data") {
  ManinSymbolSpace S = build_space(11, 2);
  std::map<long, mpz_class> rec = {{2, -2}};
  ClassicalSymbol plus = eigen_symbol(S, rec, +1);
  ClassicalSymbol minus = eigen_symbol(S, rec, -1);

  // norm_scalar * big is the primitive integer vector of the Manin lattice
  CHECK(plus.norm_scalar == 10);
  CHECK(minus.norm_scalar == 2);
  mpz_class G = 0;
  for (const auto& x : plus.big) {
    mpq_class y = x * plus.norm_scalar;
    CHECK(y.get_den() == 1);
    G = gcd(G, y.get_num());
  }
  CHECK(G == 1);

  ZSeries f = eta_product({{1, 2}, {11, 2}}, 14);
  for (const ClassicalSymbol& phi : {plus, minus}) {
    QVec c = sym_coords(S, phi);
    for (long ell : {3L, 5L, 7L, 11L, 13L}) {
      QVec img = qmat_apply(hecke_matrix(S, ell), c);
      CHECK(qvec_eq_scaled(img, c, mpq_class(f[ell])));
    }
    QVec i_img = qmat_apply(S.iota, c);
    CHECK(qvec_eq_scaled(i_img, c, mpq_class(phi.sign)));
  }

  QMat T2 = hecke_matrix(S, 2), T3 = hecke_matrix(S, 3);
  CHECK(qmat_mul(T2, T3) == qmat_mul(T3, T2));

  // overdetermined or inconsistent records are rejected
  CHECK_THROWS_AS(eigen_symbol(S, {{2, 5}}, +1), std::domain_error);
}

TEST_CASE("eigensymbols of the weight-4 level-6 form") {
  ManinSymbolSpace S = build_space(6, 4);
  std::map<long, mpz_class> rec = {{2, -2}, {3, -3}, {5, 6}};
  ZSeries f = eta_product({{1, 2}, {2, 2}, {3, 2}, {6, 2}}, 8);
  for (int sign : {+1, -1}) {
    ClassicalSymbol phi = eigen_symbol(S, rec, sign);
    QVec c = sym_coords(S, phi);
    QVec img = qmat_apply(hecke_matrix(S, 7), c);
    CHECK(qvec_eq_scaled(img, c, mpq_class(f[7])));  // T_7 = -16, not in the record
  }
}

TEST_CASE("classical special values of 11a") {
  ManinSymbolSpace S = build_space(11, 2);
  ClassicalSymbol plus = eigen_symbol(S, {{2, -2}}, +1);
  ClassicalSymbol minus = eigen_symbol(S, {{2, -2}}, -1);

  // L(11a, 1) corresponds to the path {infinity -> 0}; famous value 1/5
  mpq_class v = eval_path(S, plus.big, cusp_infinity(), make_cusp(0, 1))[0];
  CHECK((v == mpq_class(1, 5) || v == mpq_class(-1, 5)));

  // same for 17a: L(17a,1)/Omega = 1/4
  {
    ManinSymbolSpace S17 = build_space(17, 2);
    ClassicalSymbol p17 = eigen_symbol(S17, {{2, -1}}, +1);
    mpq_class v17 = eval_path(S17, p17.big, cusp_infinity(), make_cusp(0, 1))[0];
    CHECK((v17 == mpq_class(1, 4) || v17 == mpq_class(-1, 4)));
  }

  CycloElement triv7 = classical_special_value(S, plus.big, trivial_char(7), 0, 12);
  CHECK(triv7.m == 0);
  CHECK(agree(triv7.a[0], padic_from_rational(v, 7, 12)));

  // parity: the trivial character pairs to zero against the minus symbol,
  // odd characters pair to zero against the plus symbol
  CHECK(cyclo_is_zero(classical_special_value(S, minus.big, trivial_char(7), 0, 12)));
  DirichletChar quad3 = char_from_index(3, 1, 1);
  CHECK(quad3.parity == -1);
  CHECK(cyclo_is_zero(classical_special_value(S, plus.big, quad3, 0, 12)));

  // quadratic character mod 3 against the minus symbol: nonzero, and equal to
  // the exact rational combination phi(1/3) - phi(2/3)
  mpq_class r1 = eval_path(S, minus.big, cusp_infinity(), make_cusp(1, 3))[0];
  mpq_class r2 = eval_path(S, minus.big, cusp_infinity(), make_cusp(2, 3))[0];
  mpq_class r = r1 - r2;
  CHECK(r != 0);
  CycloElement sv = classical_special_value(S, minus.big, quad3, 0, 12);
  CHECK(sv.m == 0);
  CHECK(agree(sv.a[0], padic_from_rational(r, 3, 12)));

  // odd quartic characters mod 5: individually irrational, but the sum over
  // the Galois orbit is 2(phi(1/5) - phi(4/5))
  DirichletChar psi = char_from_index(5, 1, 1);
  DirichletChar psibar = char_from_index(5, 1, 3);
  CHECK(psi.order == 4);
  CHECK(psi.parity == -1);
  CHECK(psibar.order == 4);
  CHECK(cyclo_is_zero(classical_special_value(S, plus.big, psi, 0, 10)));
  CycloElement s1 = classical_special_value(S, minus.big, psi, 0, 10);
  CycloElement s2 = classical_special_value(S, minus.big, psibar, 0, 10);
  CycloElement ssum = cyclo_add(s1, s2);
  mpq_class q1 = eval_path(S, minus.big, cusp_infinity(), make_cusp(1, 5))[0];
  mpq_class q4 = eval_path(S, minus.big, cusp_infinity(), make_cusp(4, 5))[0];
  CHECK(agree(ssum.a[0], padic_from_rational(2 * (q1 - q4), 5, 10)));

  // p-adic symbol overload agrees with the exact one
  PadicSymbol mp = to_padic_symbol(S, minus, 3, 12);
  CycloElement sv_p = classical_special_value(S, mp.big, quad3, 0);
  CHECK(agree(sv_p.a[0], sv.a[0]));
}

TEST_CASE("p-stabilization of 11a at 3") {
  ManinSymbolSpace S11 = build_space(11, 2);
  ManinSymbolSpace S33 = build_space(33, 2);
  ClassicalSymbol plus = eigen_symbol(S11, {{2, -2}}, +1);
  long M = 12;

  Stabilization st = p_stabilize(S11, S33, plus, 3, M);
  CHECK(st.ap == -1);
  CHECK(st.alpha.v == 0);
  CHECK(to_integer_mod(st.alpha, 2) == 2);  // alpha = 2 mod 9
  PadicNumber rel = add(add(mul(st.alpha, st.alpha), st.alpha), padic_from_integer(3, 3, M + 1));
  CHECK(agree(rel, padic_zero(3, M)));  // alpha^2 + alpha + 3 = 0

  auto U = hecke_apply(S33, st.sym.big, 3);
  for (long t = 0; t < S33.dim_total; ++t) CHECK(agree(U[t], mul(st.alpha, st.sym.big[t])));

  // critical-slope companion: beta = 3/alpha, also a U_3 eigenvector
  Stabilization st2 = p_stabilize(S11, S33, plus, 3, M, 1);
  CHECK(st2.alpha.v == 1);
  CHECK(agree(mul(st.alpha, st2.alpha), padic_from_integer(3, 3, M + 1)));
  auto U2 = hecke_apply(S33, st2.sym.big, 3);
  for (long t = 0; t < S33.dim_total; ++t) CHECK(agree(U2[t], mul(st2.alpha, st2.sym.big[t])));

  // minus symbol gives the same a_p
  ClassicalSymbol minus = eigen_symbol(S11, {{2, -2}}, -1);
  Stabilization sm = p_stabilize(S11, S33, minus, 3, M);
  CHECK(sm.ap == -1);

  CHECK_THROWS_AS(p_stabilize(S11, S33, plus, 3, M, 2), std::invalid_argument);

  // supersingular p: refinement is irrational over Q_p
  ManinSymbolSpace S17 = build_space(17, 2);
  ManinSymbolSpace S51 = build_space(51, 2);
  ClassicalSymbol p17 = eigen_symbol(S17, {{2, -1}}, +1);
  CHECK_THROWS_AS(p_stabilize(S17, S51, p17, 3, 6), std::domain_error);
}

TEST_CASE("root numbers") {
  ManinSymbolSpace S11 = build_space(11, 2);
  CHECK(root_number(S11, eigen_symbol(S11, {{2, -2}}, +1)) == 1);
  CHECK(root_number(S11, eigen_symbol(S11, {{2, -2}}, -1)) == 1);

  ManinSymbolSpace S17 = build_space(17, 2);
  CHECK(root_number(S17, eigen_symbol(S17, {{2, -1}}, +1)) == 1);
  CHECK(root_number(S17, eigen_symbol(S17, {{2, -1}}, -1)) == 1);

  ManinSymbolSpace S6 = build_space(6, 4);
  std::map<long, mpz_class> rec = {{2, -2}, {3, -3}, {5, 6}};
  CHECK(root_number(S6, eigen_symbol(S6, rec, +1)) == 1);
  CHECK(root_number(S6, eigen_symbol(S6, rec, -1)) == 1);
}

TEST_CASE("eigenform descriptors round-trip") {
  EigenformDesc d;
  d.name = "6.4.a.a";
  d.N = 6;
  d.k = 4;
  d.ap = {{2, -2}, {3, -3}, {5, 6}, {7, -16}};
  save_eigenform_desc(d, "tmp_desc.eigen");
  EigenformDesc e = load_eigenform_desc("tmp_desc.eigen");
  CHECK(e.name == d.name);
  CHECK(e.N == d.N);
  CHECK(e.k == d.k);
  CHECK(e.ap == d.ap);
  std::remove("tmp_desc.eigen");

  EigenformDesc f = load_eigenform_desc(LP_SOURCE_DIR "/data/11a.eigen");
  CHECK(f.name == "11a");
  CHECK(f.N == 11);
  CHECK(f.k == 2);
  CHECK(f.ap.at(2) == -2);
  CHECK(f.ap.at(11) == 1);

  {
    std::ofstream bad("tmp_bad.eigen");
    bad << "name: x\nlevel: 11\n";  // no weight, no a_p
  }
  CHECK_THROWS_AS(load_eigenform_desc("tmp_bad.eigen"), std::runtime_error);
  std::remove("tmp_bad.eigen");
  CHECK_THROWS_AS(load_eigenform_desc("no_such_file.eigen"), std::runtime_error);
}

TEST_CASE("refined eigenforms") {
  EigenformDesc d11 = load_eigenform_desc(LP_SOURCE_DIR "/data/11a.eigen");
  EigenformDesc d17 = load_eigenform_desc(LP_SOURCE_DIR "/data/17a.eigen");
  EigenformDesc d6 = load_eigenform_desc(LP_SOURCE_DIR "/data/6-4-a-a.eigen");

  SUBCASE("11a at 3: ordinary, good reduction") {
    RefinedEigenform F = refine_eigenform(d11, 3, 10);
    CHECK_FALSE(F.steinberg);
    CHECK(F.space.N == 33);
    CHECK(F.slope == 0);
    CHECK(to_integer_mod(F.alpha, 1) == 2);
    CHECK(F.eps_global == 1);
    CHECK(F.eps_tilde == 1);
    CHECK(F.plus_p.N == 33);
    CHECK(F.plus_p.p == 3);
  }

  SUBCASE("11a at 11: Steinberg, split") {
    RefinedEigenform F = refine_eigenform(d11, 11, 10);
    CHECK(F.steinberg);
    CHECK(F.n == 1);
    CHECK(F.slope == 0);
    CHECK(agree(F.alpha, padic_one(11, 10)));
    CHECK(F.eps_p == -1);
    CHECK(F.eps_global == 1);
    CHECK(F.eps_tilde == -1);
    CHECK(F.space.N == 11);
    auto U = hecke_apply(F.space, F.plus_p.big, 11);
    for (long t = 0; t < F.space.dim_total; ++t)
      CHECK(agree(U[t], mul(F.alpha, F.plus_p.big[t])));
  }

  SUBCASE("6.4.a.a at 3: Steinberg of slope 1") {
    RefinedEigenform F = refine_eigenform(d6, 3, 8);
    CHECK(F.steinberg);
    CHECK(F.n == 2);
    CHECK(F.slope == 1);
    CHECK(agree(F.alpha, padic_from_integer(-3, 3, 9)));
    CHECK(F.eps_p == 1);
    CHECK(F.eps_global == 1);
    CHECK(F.eps_tilde == 1);
    auto U = hecke_apply(F.space, F.minus_p.big, 3);
    for (long t = 0; t < F.space.dim_total; ++t)
      CHECK(agree(U[t], mul(F.alpha, F.minus_p.big[t])));
  }

  SUBCASE("17a at 5: ordinary") {
    RefinedEigenform F = refine_eigenform(d17, 5, 8);
    CHECK_FALSE(F.steinberg);
    CHECK(F.space.N == 85);
    CHECK(F.slope == 0);
    CHECK(to_integer_mod(F.alpha, 1) == 3);  // unit root of X^2 + 2X + 5
    CHECK(F.eps_global == 1);
  }

  SUBCASE("unsupported refinements are rejected") {
    CHECK_THROWS_AS(refine_eigenform(d11, 2, 6), std::domain_error);     // 2 | a_2
    CHECK_THROWS_AS(refine_eigenform(d11, 3, 6, 1), std::domain_error);  // critical slope
  }
}

TEST_CASE("p-adic symbols preserve exact zeros") {
  ManinSymbolSpace S = build_space(11, 2);
  ClassicalSymbol plus = eigen_symbol(S, {{2, -2}}, +1);
  PadicSymbol ps = to_padic_symbol(S, plus, 5, 9);
  long zeros = 0;
  for (long t = 0; t < S.dim_total; ++t) {
    if (plus.big[t] == 0) {
      CHECK(ps.big[t].is_zero());
      ++zeros;
    } else {
      CHECK(agree(ps.big[t], padic_from_rational(plus.big[t], 5, 9)));
      CHECK(ps.big[t].M == 9);
    }
  }
  CHECK(zeros < S.dim_total);
}
