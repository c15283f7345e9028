#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "lp/cyclo.hpp"

using namespace lp;

namespace {

CycloElement zpow(long p, long m, long e, long M) { return cyclo_zeta(p, m, e, M); }

CycloElement cpow(CycloElement x, long e) {
  CycloElement acc = cyclo_one(x.p, x.m, 64);
  for (long i = 0; i < e; ++i) acc = cyclo_mul(acc, x);
  return acc;
}

CycloElement random_elt(long p, long m, long M, std::mt19937_64& rng) {
  CycloElement x = cyclo_zero(p, m, M);
  for (auto& c : x.a) c = padic_from_integer(mpz_class((long)(rng() % 100000) - 50000), p, M);
  return x;
}

}  // namespace

TEST_CASE("cyclotomic ring identities") {
  for (long p : {3L, 5L}) {
    for (long m : {1L, 2L}) {
      long M = 8;
      long pm = 1;
      for (long i = 0; i < m; ++i) pm *= p;
      CycloElement z = zpow(p, m, 1, M);
      CHECK(cyclo_agree(cpow(z, pm), cyclo_one(p, m, M)));
      // Phi_{p^m}(zeta) = 0
      long q = pm / p;
      CycloElement s = cyclo_zero(p, m, M);
      for (long i = 0; i < p; ++i) s = cyclo_add(s, zpow(p, m, i * q, M));
      CHECK(cyclo_is_zero(s));
      // exponent arithmetic
      CHECK(cyclo_agree(cyclo_mul(zpow(p, m, 3, M), zpow(p, m, pm - 1, M)), zpow(p, m, 2, M)));
      CHECK(cyclo_agree(cyclo_mul_zeta(zpow(p, m, 3, M), pm - 1), zpow(p, m, 2, M)));
    }
  }
}

TEST_CASE("ring axioms on random elements") {
  std::mt19937_64 rng(11);
  long p = 5, m = 2, M = 7;
  for (int i = 0; i < 10; ++i) {
    CycloElement x = random_elt(p, m, M, rng);
    CycloElement y = random_elt(p, m, M, rng);
    CycloElement w = random_elt(p, m, M, rng);
    CHECK(cyclo_agree(cyclo_mul(x, y), cyclo_mul(y, x)));
    CHECK(cyclo_agree(cyclo_mul(x, cyclo_add(y, w)),
                      cyclo_add(cyclo_mul(x, y), cyclo_mul(x, w))));
    CHECK(cyclo_agree(cyclo_mul(cyclo_mul(x, y), w), cyclo_mul(x, cyclo_mul(y, w))));
  }
}

TEST_CASE("embedding is a ring map and trace recovers degree") {
  std::mt19937_64 rng(12);
  long p = 5, M = 7;
  CycloElement x = random_elt(p, 1, M, rng);
  CycloElement y = random_elt(p, 1, M, rng);
  CHECK(cyclo_agree(cyclo_embed(cyclo_mul(x, y), 2),
                    cyclo_mul(cyclo_embed(x, 2), cyclo_embed(y, 2))));
  CHECK(cyclo_agree(cyclo_embed(zpow(p, 1, 1, M), 2), zpow(p, 2, p, M)));

  // trace after embedding multiplies by the step degree
  CycloElement up = cyclo_embed(x, 2);
  CHECK(cyclo_agree(cyclo_trace_down(up), cyclo_scale(x, padic_from_integer(mpz_class(p), p, M))));

  CycloElement base = cyclo_from_padic(padic_from_integer(mpz_class(42), p, M), 0);
  CHECK(cyclo_agree(cyclo_trace_down(cyclo_embed(base, 1)),
                    cyclo_scale(base, padic_from_integer(mpz_class(p - 1), p, M))));

  // trace of a primitive p-th root of unity is -1
  CHECK(cyclo_agree(cyclo_trace_down(zpow(p, 1, 1, M)),
                    cyclo_from_padic(padic_from_integer(mpz_class(-1), p, M), 0)));
}

TEST_CASE("character enumeration counts and conductors") {
  auto t = enumerate_chars(5, 0);
  REQUIRE(t.size() == 1);
  CHECK(char_is_trivial(t[0]));

  auto c51 = enumerate_chars(5, 1);
  REQUIRE(c51.size() == 4);
  std::vector<long> orders;
  for (auto& chi : c51) orders.push_back(chi.order);
  std::sort(orders.begin(), orders.end());
  CHECK(orders == std::vector<long>({1, 2, 4, 4}));

  auto c32 = enumerate_chars(3, 2);
  REQUIRE(c32.size() == 6);
  long prim = 0, tame = 0, triv = 0;
  std::vector<long> ords32;
  for (auto& chi : c32) {
    if (chi.cond == 2) ++prim;
    if (chi.cond == 1) ++tame;
    if (chi.cond == 0) ++triv;
    ords32.push_back(chi.order);
  }
  // primitive characters mod 9 number phi(9) - phi(3) = 4
  CHECK(prim == 4);
  CHECK(tame == 1);
  CHECK(triv == 1);
  std::sort(ords32.begin(), ords32.end());
  CHECK(ords32 == std::vector<long>({1, 2, 3, 3, 6, 6}));

  CHECK_THROWS(enumerate_chars(2, 1));
}

TEST_CASE("parity bit equals evaluated chi(-1)") {
  long M = 6;
  std::vector<std::pair<long, long>> cases = {{3, 2}, {5, 2}, {7, 1}};
  for (auto pc : cases) {
    for (auto& chi : enumerate_chars(pc.first, pc.second)) {
      CycloElement v = chi_value(chi, mpz_class(-1), M);
      CycloElement expect = cyclo_scale(cyclo_one(chi.p, char_value_level(chi), M),
                                        padic_from_integer(mpz_class(chi.parity), chi.p, M));
      CHECK(cyclo_agree(v, expect));
    }
  }
}

TEST_CASE("characters are totally multiplicative") {
  std::mt19937_64 rng(13);
  long M = 6;
  std::vector<std::pair<long, long>> cases = {{3, 2}, {5, 2}, {7, 1}};
  for (auto pc : cases) {
    long p = pc.first;
    long pcmod = 1;
    for (long i = 0; i < pc.second; ++i) pcmod *= p;
    for (auto& chi : enumerate_chars(p, pc.second)) {
      for (int i = 0; i < 1000; ++i) {
        mpz_class a((long)(rng() % (unsigned long)(pcmod * 3)) + 1);
        mpz_class b((long)(rng() % (unsigned long)(pcmod * 3)) + 1);
        CHECK(cyclo_agree(chi_value(chi, a * b, M),
                          cyclo_mul(chi_value(chi, a, M), chi_value(chi, b, M))));
      }
    }
  }
}

TEST_CASE("conductor minimality by brute force") {
  long M = 6;
  std::vector<std::pair<long, long>> cases = {{3, 3}, {5, 2}};
  for (auto pc : cases) {
    long p = pc.first, c = pc.second;
    long pcmod = 1;
    for (long i = 0; i < c; ++i) pcmod *= p;
    for (auto& chi : enumerate_chars(p, c)) {
      if (chi.cond == 0) continue;
      long pcond = 1;
      for (long i = 0; i < chi.cond; ++i) pcond *= p;
      // chi factors through modulus p^cond
      bool factors = true;
      for (long a = 1; a < pcmod && factors; ++a) {
        if (a % p == 0) continue;
        factors = cyclo_agree(chi_value(chi, mpz_class(a), M),
                              chi_value(chi, mpz_class(a + pcond), M));
      }
      CHECK(factors);
      // but not through p^(cond-1)
      long plow = pcond / p;
      bool separated = false;
      for (long a = 1; a < pcmod && !separated; ++a) {
        if (a % p == 0) continue;
        separated = !cyclo_agree(chi_value(chi, mpz_class(a), M),
                                 chi_value(chi, mpz_class(a + plow), M));
      }
      CHECK(separated);
    }
  }
}

TEST_CASE("gauss sums: frozen values and tau pairing") {
  long M = 8;
  DirichletChar triv = trivial_char(5);
  CHECK(cyclo_agree(gauss_sum(triv, M), cyclo_one(5, 0, M)));

  DirichletChar quad5 = parse_char_literal("chi{p=5,c=1,ord=2}");
  CHECK(quad5.parity == 1);
  CycloElement tau = gauss_sum(quad5, M);
  CHECK(cyclo_agree(cyclo_mul(tau, tau),
                    cyclo_scale(cyclo_one(5, 1, M), padic_from_integer(mpz_class(5), 5, M))));

  DirichletChar quad3 = parse_char_literal("chi{p=3,c=1,ord=2}");
  CHECK(quad3.parity == -1);
  CycloElement tau3 = gauss_sum(quad3, M);
  CHECK(cyclo_agree(cyclo_mul(tau3, tau3),
                    cyclo_scale(cyclo_one(3, 1, M), padic_from_integer(mpz_class(-3), 3, M))));

  std::vector<std::pair<long, long>> cases = {{3, 2}, {5, 2}};
  for (auto pc : cases) {
    for (auto& chi : enumerate_chars(pc.first, pc.second)) {
      if (chi.cond == 0) continue;
      long lvl = chi.cond;
      long pcond = 1;
      for (long i = 0; i < chi.cond; ++i) pcond *= chi.p;
      CycloElement t1 = gauss_sum_at_level(chi, lvl, M);
      CycloElement t2 = gauss_sum_at_level(char_inverse(chi), lvl, M);
      CycloElement prod = cyclo_mul(t1, t2);
      CycloElement expect = cyclo_scale(cyclo_one(chi.p, lvl, M),
                                        padic_from_integer(mpz_class(chi.parity * pcond), chi.p, M));
      CHECK(cyclo_agree(prod, expect));
    }
  }
}

TEST_CASE("gauss sum level embedding compatibility") {
  long M = 7;
  for (auto lit : {"chi{p=5,c=1,ord=2}", "chi{p=5,c=1,ord=4}", "chi{p=3,c=2,ord=6}"}) {
    DirichletChar chi = parse_char_literal(lit);
    CycloElement native = gauss_sum_at_level(chi, chi.cond + 1, M);
    CycloElement embedded = cyclo_embed(gauss_sum(chi, M), chi.cond + 1);
    CHECK(cyclo_agree(native, embedded));
  }
}

TEST_CASE("teichmuller twisting of characters") {
  std::mt19937_64 rng(14);
  long M = 6;
  for (auto lit : {"chi{p=3,c=2,ord=6}", "chi{p=5,c=1,ord=4}", "chi{p=5,c=0}"}) {
    DirichletChar chi = parse_char_literal(lit);
    long p = chi.p;
    for (long tw = 0; tw < p - 1; ++tw) {
      DirichletChar twisted = char_mul_teich(chi, tw);
      for (int i = 0; i < 20; ++i) {
        mpz_class a((long)(rng() % 1000) + 1);
        if (a % p == 0) ++a;
        long lvl = std::max(char_value_level(chi), char_value_level(twisted));
        CycloElement lhs = cyclo_embed(chi_value(twisted, a, M), lvl);
        CycloElement w = cyclo_from_padic(pow_int(teichmuller(a, p, M), tw), 0);
        CycloElement rhs = cyclo_mul(cyclo_embed(chi_value(chi, a, M), lvl), cyclo_embed(w, lvl));
        CHECK(cyclo_agree(lhs, rhs));
      }
    }
  }
  // omega twist of the quadratic character at p=3 is trivial on units
  DirichletChar quad3 = parse_char_literal("chi{p=3,c=1,ord=2}");
  DirichletChar tw = char_mul_teich(quad3, 1);
  CHECK(tw.cond == 0);
}

TEST_CASE("character literals round trip") {
  for (auto lit : {"chi{p=5,c=1,ord=2}", "chi{p=5,c=1,ord=4}", "chi{p=3,c=2,ord=6}",
                   "chi{p=7,c=1,ord=3}", "chi{p=5,c=0}"}) {
    DirichletChar chi = parse_char_literal(lit);
    DirichletChar back = parse_char_literal(char_literal(chi));
    CHECK(back.p == chi.p);
    CHECK(back.cond == chi.cond);
    CHECK(back.order == chi.order);
    CHECK(back.parity == chi.parity);
    long M = 6;
    for (long a = 1; a < 30; ++a) {
      if (a % chi.p == 0) continue;
      CHECK(cyclo_agree(chi_value(chi, mpz_class(a), M), chi_value(back, mpz_class(a), M)));
    }
  }
  DirichletChar byidx = parse_char_literal("chi{p=3,c=2,idx=1}");
  CHECK(byidx.cond == 2);
  CHECK(byidx.order == 6);
}
