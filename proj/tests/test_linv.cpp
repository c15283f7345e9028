#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <stdexcept>
#include <vector>

#include "lp/linv.hpp"
#include "lp/padic.hpp"

using namespace lp;

namespace {

EllipticCurveData curve_11a() {
  return curve_from_ainvs({mpq_class(0), mpq_class(-1), mpq_class(1), mpq_class(-10),
                           mpq_class(-20)},
                          "11a1");
}

EllipticCurveData curve_15a() {
  return curve_from_ainvs({mpq_class(1), mpq_class(1), mpq_class(1), mpq_class(-10),
                           mpq_class(-10)},
                          "15a1");
}

}  // namespace

TEST_CASE("weierstrass invariants and reduction classification") {
  EllipticCurveData E = curve_11a();
  CHECK(E.c4 == 496);
  CHECK(E.c6 == 20008);
  CHECK(E.disc == -161051);  // -11^5
  CHECK(E.j == mpq_class(-122023936, 161051));
  CHECK(E.conductor == 11);
  REQUIRE(E.reduction.count(11) == 1);
  CHECK(E.reduction.at(11) == ReductionType::SplitMultiplicative);
  CHECK(reduction_type(E, 3) == ReductionType::Good);

  EllipticCurveData F = curve_15a();
  CHECK(F.disc == 50625);  // 3^4 5^4
  CHECK(F.conductor == 15);
  CHECK(F.reduction.at(3) == ReductionType::NonsplitMultiplicative);
  CHECK(F.reduction.at(5) == ReductionType::SplitMultiplicative);

  CHECK_THROWS_AS(curve_from_ainvs({mpq_class(0), mpq_class(0), mpq_class(0), mpq_class(0),
                                    mpq_class(0)},
                                   "cusp"),
                  std::domain_error);
}

TEST_CASE("point counts match the eta-product coefficients") {
  // (eta(z) eta(11z))^2 and eta(z) eta(3z) eta(5z) eta(15z), expanded exactly
  EllipticCurveData E = curve_11a();
  std::vector<std::pair<long, long>> a11 = {{2, -2}, {3, -1}, {5, 1},   {7, -2},
                                            {11, 1}, {13, 4}, {17, -2}, {19, 0}};
  for (auto [l, al] : a11) CHECK(curve_ap(E, l) == al);

  EllipticCurveData F = curve_15a();
  std::vector<std::pair<long, long>> a15 = {{2, -1}, {3, -1}, {5, 1}, {7, 0}, {11, -4}, {13, -2}};
  for (auto [l, al] : a15) CHECK(curve_ap(F, l) == al);

  EigenformDesc d = curve_eigenform(E);
  CHECK(d.N == 11);
  CHECK(d.k == 2);
  CHECK(d.ap.at(2) == -2);
  CHECK(d.ap.at(11) == 1);
  CHECK(d.ap.size() == 6);  // ell <= 13
}

TEST_CASE("j-series tail") {
  auto c = j_series_tail(6);
  CHECK(c[0] == 744);
  CHECK(c[1] == 196884);
  CHECK(c[2] == 21493760);
  CHECK(c[3] == mpz_class("864299970"));
  CHECK(c[4] == mpz_class("20245856256"));
  CHECK(c[5] == mpz_class("333202640600"));
}

TEST_CASE("tate parameter: valuation, fixed point, precision") {
  EllipticCurveData E = curve_11a();
  PadicNumber q = tate_parameter(E, 11, 10);
  CHECK(q.v == 5);  // ord_11(q) = -v_11(j)
  CHECK(q.M >= 10);

  // recompute j(q) independently of the internal check
  auto c = j_series_tail(8);
  PadicNumber acc = padic_zero(11, 1L << 40);
  PadicNumber qn = padic_one(11, q.M);
  for (long n = 0; n < 8; ++n) {
    acc = add(acc, mul(padic_from_integer(c[n], 11, 40), qn));
    qn = mul(qn, q);
  }
  PadicNumber jq = add(inv(q), acc);
  PadicNumber res = sub(jq, padic_from_rational(E.j, 11, 20));
  CHECK(res.is_zero());
  CHECK(res.v >= 8);  // |j(q) - j| <= p^-(M-2)

  EllipticCurveData F = curve_15a();
  CHECK(tate_parameter(F, 5, 10).v == 4);
  CHECK(tate_parameter(F, 3, 10).v == 4);  // nonsplit still uniformizes

  CHECK_THROWS_AS(tate_parameter(E, 3, 8), std::domain_error);  // good at 3
}

TEST_CASE("l-invariant: value, homogeneity, twist invariance") {
  EllipticCurveData E = curve_11a();
  PadicNumber L = l_invariant(E, 11, 12);
  // regression pin, first nine digits
  CHECK(agree(cap_rel(L, 9), padic_parse("11^1 * (6,5,7,7,7,7,4,3,6) + O(11^10)")));
  CHECK(!L.is_zero());
  CHECK(L.v == 1);

  // log kills Teichmuller roots of unity
  PadicNumber q = tate_parameter(E, 11, 10);
  PadicNumber zeta = teichmuller(mpz_class(2), 11, q.M);
  CHECK(agree(iwasawa_log_any(q), iwasawa_log_any(mul(q, zeta))));

  // quadratic twist by 5: additive at 5, but still split at 11 with the same q
  EllipticCurveData T = quadratic_twist(E, 5);
  CHECK(T.conductor == 0);  // the twisted model resists classification at 2 and 3
  CHECK(T.j == E.j);
  CHECK(reduction_type(T, 11) == ReductionType::SplitMultiplicative);
  CHECK(reduction_type(T, 5) == ReductionType::Additive);
  CHECK(agree(l_invariant(E, 11, 8), l_invariant(T, 11, 8)));
  CHECK_THROWS_AS(curve_eigenform(T), std::domain_error);

  // nonsplit refusal
  EllipticCurveData F = curve_15a();
  CHECK_THROWS_AS(l_invariant(F, 3, 8), std::domain_error);
}

TEST_CASE("mtt identity at 11a, p = 11") {
  EllipticCurveData E = curve_11a();
  MttResult R = mtt_check(E, 11, 10);
  CHECK(R.trivial_zero);
  CHECK(!R.degenerate);
  CHECK(R.tate_ord == 5);

  // forced zero at the center, derivative nonzero
  CHECK(R.report.value.is_zero());
  CHECK(R.report.value.v - R.report.l_alg.v >= 4);
  CHECK(!R.report.derivatives.at(0).is_zero());

  // lattice-normalized central value: -1/5
  CHECK(agree(R.report.l_alg, padic_from_rational(mpq_class(-1, 5), 11, 10)));

  // the two pipelines agree: L_p'(1) = L * l_alg
  CHECK(R.residual.is_zero());
  CHECK(R.residual_digits >= 4);
  CHECK(agree(R.report.empirical_linv, R.linv));
}

TEST_CASE("mtt identity at 15a, p = 5") {
  EllipticCurveData F = curve_15a();
  MttResult R = mtt_check(F, 5, 8);
  CHECK(R.trivial_zero);
  CHECK(R.tate_ord == 4);
  CHECK(R.report.value.is_zero());
  CHECK(agree(R.report.l_alg, padic_from_rational(mpq_class(-1, 8), 5, 10)));
  CHECK(R.residual.is_zero());
  CHECK(R.residual_digits >= 3);
}

TEST_CASE("mtt at a good ordinary prime checks interpolation instead") {
  EllipticCurveData E = curve_11a();
  MttResult R = mtt_check(E, 3, 8);
  CHECK(!R.trivial_zero);
  CHECK(!R.report.value.is_zero());
  CHECK(R.interp_residual.is_zero());
  CHECK(R.interp_digits >= 5);
}

TEST_CASE("mtt guards") {
  EllipticCurveData E = curve_11a();
  EllipticCurveData F = curve_15a();
  CHECK_THROWS_AS(mtt_check(F, 3, 6), std::domain_error);   // nonsplit
  CHECK_THROWS_AS(mtt_check(E, 19, 6), std::domain_error);  // a_19 = 0, not ordinary
  EllipticCurveData T = quadratic_twist(E, 5);
  CHECK_THROWS_AS(mtt_check(T, 5, 6), std::domain_error);  // additive
}
