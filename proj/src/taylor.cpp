#include "lp/taylor.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace lp {

namespace {

constexpr long kMaxVars = 5;
constexpr long kMaxDegree = 12;  // 4-bit exponent slots

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument("taylor: " + msg);
}

long vec_sum(const std::vector<long>& v) {
  long s = 0;
  for (long t : v) s += t;
  return s;
}

// raw-engine draws; std::uniform_int_distribution is implementation-defined
uint64_t rnd_below(std::mt19937_64& rng, uint64_t k) { return rng() % k; }

mpq_class rnd_coeff(std::mt19937_64& rng) {
  long num = 1 + static_cast<long>(rnd_below(rng, 9));
  if (rnd_below(rng, 2) == 1) num = -num;
  long den = 1 + static_cast<long>(rnd_below(rng, 3));
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

std::vector<std::vector<long>> enumerate_exponents(long slots, long cap) {
  std::vector<std::vector<long>> out;
  std::vector<long> cur(slots, 0);
  std::function<void(long, long)> rec = [&](long pos, long left) {
    if (pos == slots) {
      out.push_back(cur);
      return;
    }
    for (long t = 0; t <= left; ++t) {
      cur[pos] = t;
      rec(pos + 1, left - t);
    }
    cur[pos] = 0;
  };
  rec(0, cap);
  return out;
}

long popcount_mask(unsigned long mask, long e) {
  long n = 0;
  for (long v = 0; v < e; ++v)
    if (mask & (1ul << v)) ++n;
  return n;
}

void ms_accum(MultiSeries& f, uint32_t key, const mpq_class& delta) {
  if (delta == 0) return;
  auto it = f.c.find(key);
  if (it == f.c.end()) {
    f.c.emplace(key, delta);
  } else {
    it->second += delta;
    if (it->second == 0) f.c.erase(it);
  }
}

MultiSeries ms_one(long e, long D) {
  MultiSeries f = ms_zero(e, D);
  f.c.emplace(0u, mpq_class(1));
  return f;
}

MultiSeries ms_truncate(const MultiSeries& f, long cap) {
  MultiSeries out = ms_zero(f.e, f.D);
  for (const auto& [k, q] : f.c)
    if (ms_total_degree(k, f.e) <= cap) out.c.emplace(k, q);
  return out;
}

// exact division by u^m; throws if a monomial sits below u^m
MultiSeries ms_shift_u(const MultiSeries& f, long m) {
  MultiSeries out = ms_zero(f.e, f.D);
  uint32_t ukey = static_cast<uint32_t>(m) << (4 * f.e);
  for (const auto& [k, q] : f.c) {
    long i = (k >> (4 * f.e)) & 0xf;
    if (i < m) throw std::logic_error("taylor: inexact division by a power of u");
    out.c.emplace(k - ukey, q);
  }
  return out;
}

// inverse of a series with nonzero constant term, to the ring truncation
MultiSeries ms_inverse(const MultiSeries& g) {
  auto it = g.c.find(0u);
  if (it == g.c.end()) throw std::logic_error("taylor: inverting a non-unit series");
  mpq_class g0 = it->second;
  MultiSeries n = ms_scale(g, mpq_class(-1) / g0);
  ms_accum(n, 0u, mpq_class(1));  // n = 1 - g/g0, no constant term
  MultiSeries total = ms_one(g.e, g.D);
  MultiSeries term = ms_one(g.e, g.D);
  for (long t = 1; t <= g.D; ++t) {
    term = ms_mul(term, n);
    if (term.c.empty()) break;
    total = ms_add(total, term);
  }
  return ms_scale(total, mpq_class(1) / g0);
}

std::string render_monomial(uint32_t key, long e) {
  auto exps = ms_exps(key, e);
  std::ostringstream os;
  bool any = false;
  for (long v = 0; v < e; ++v) {
    if (exps[v] == 0) continue;
    if (any) os << " ";
    os << "x" << (v + 1);
    if (exps[v] > 1) os << "^" << exps[v];
    any = true;
  }
  if (exps[e] > 0) {
    if (any) os << " ";
    os << "u";
    if (exps[e] > 1) os << "^" << exps[e];
    any = true;
  }
  if (!any) os << "1";
  return os.str();
}

std::string render_mask(unsigned long mask, long e) {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (long v = 0; v < e; ++v) {
    if (!(mask & (1ul << v))) continue;
    if (!first) os << ",";
    os << (v + 1);
    first = false;
  }
  os << "}";
  return os.str();
}

// Linear conditions forced on the coefficient band of total degree <= e:
// for every subset S, every q < d_S and every n_S, the sum of a_i(n) over
// |n_{E\S}| + i = q vanishes. Returns a kernel basis, cached per (e, rho).
using KernelVector = std::map<uint32_t, mpq_class>;

const std::vector<KernelVector>& low_band_kernel(long e, long rho) {
  static std::map<std::pair<long, long>, std::vector<KernelVector>> cache;
  auto found = cache.find({e, rho});
  if (found != cache.end()) return found->second;

  std::vector<uint32_t> cols;
  std::map<uint32_t, int> colidx;
  for (const auto& ex : enumerate_exponents(e + 1, e)) {
    if (ex[e] % 2 != rho) continue;
    uint32_t k = ms_key(ex);
    colidx.emplace(k, static_cast<int>(cols.size()));
    cols.push_back(k);
  }

  using Row = std::map<int, mpq_class>;
  std::vector<Row> rows;
  int eps = rho == 0 ? 1 : -1;
  for (unsigned long mask = 0; mask < (1ul << e); ++mask) {
    std::vector<long> sbits, rbits;
    for (long v = 0; v < e; ++v)
      (mask & (1ul << v)) ? sbits.push_back(v) : rbits.push_back(v);
    long d = forced_u_order(e, eps, mask);
    for (long q = 0; q < d; ++q) {
      for (const auto& ns : enumerate_exponents(static_cast<long>(sbits.size()), e - q)) {
        Row row;
        for (const auto& nr : enumerate_exponents(static_cast<long>(rbits.size()), q)) {
          long i = q - vec_sum(nr);
          if (i % 2 != rho) continue;
          std::vector<long> ex(e + 1, 0);
          for (size_t j = 0; j < sbits.size(); ++j) ex[sbits[j]] = ns[j];
          for (size_t j = 0; j < rbits.size(); ++j) ex[rbits[j]] = nr[j];
          ex[e] = i;
          row[colidx.at(ms_key(ex))] += 1;
        }
        if (!row.empty()) rows.push_back(std::move(row));
      }
    }
  }

  // exact reduced row echelon form
  std::vector<std::pair<int, Row>> pivots;
  // f by value: the caller's coefficient lives in r and is erased mid-loop
  auto axpy = [](Row& r, mpq_class f, const Row& src) {
    for (const auto& [ci, cv] : src) {
      auto it = r.find(ci);
      if (it == r.end()) {
        mpq_class nv = -f * cv;
        if (nv != 0) r.emplace(ci, nv);
      } else {
        it->second -= f * cv;
        if (it->second == 0) r.erase(it);
      }
    }
  };
  for (Row row : rows) {
    for (const auto& [pc, pr] : pivots) {
      auto it = row.find(pc);
      if (it != row.end()) axpy(row, it->second, pr);
    }
    if (row.empty()) continue;
    int pcol = row.begin()->first;
    mpq_class lead = row.begin()->second;
    for (auto& [ci, cv] : row) cv /= lead;
    for (auto& [pc, pr] : pivots) {
      auto it = pr.find(pcol);
      if (it != pr.end()) axpy(pr, it->second, row);
    }
    pivots.emplace_back(pcol, std::move(row));
  }

  std::set<int> pivcols;
  for (const auto& [pc, pr] : pivots) pivcols.insert(pc);
  std::vector<KernelVector> basis;
  for (int j = 0; j < static_cast<int>(cols.size()); ++j) {
    if (pivcols.count(j)) continue;
    KernelVector vec;
    vec[cols[j]] = 1;
    for (const auto& [pc, pr] : pivots) {
      auto it = pr.find(j);
      if (it != pr.end() && it->second != 0) vec[cols[pc]] = -it->second;
    }
    basis.push_back(std::move(vec));
  }
  auto [it2, ok] = cache.emplace(std::make_pair(e, rho), std::move(basis));
  (void)ok;
  return it2->second;
}

long monomial_u_exp(uint32_t key, long e) { return (key >> (4 * e)) & 0xf; }

long support_size(uint32_t key, long e) {
  long n = 0;
  for (long v = 0; v < e; ++v)
    if ((key >> (4 * v)) & 0xf) ++n;
  return n;
}

long x_degree(uint32_t key, long e) {
  long n = 0;
  for (long v = 0; v < e; ++v) n += (key >> (4 * v)) & 0xf;
  return n;
}

long euler_band(long e, int eps_tilde, long D) {
  long rho = eps_tilde == 1 ? 0 : 1;
  long sigma0 = (rho != e % 2) ? 1 : 0;
  return D - e + 1 - sigma0;
}

long min_degree(const MultiSeries& f) {
  long best = f.D + 1;
  for (const auto& [k, q] : f.c) best = std::min(best, ms_total_degree(k, f.e));
  return best;
}

}  // namespace

uint32_t ms_key(const std::vector<long>& exps) {
  uint32_t k = 0;
  for (size_t j = 0; j < exps.size(); ++j)
    k |= static_cast<uint32_t>(exps[j] & 0xf) << (4 * j);
  return k;
}

std::vector<long> ms_exps(uint32_t key, long e) {
  std::vector<long> exps(e + 1);
  for (long j = 0; j <= e; ++j) exps[j] = (key >> (4 * j)) & 0xf;
  return exps;
}

long ms_total_degree(uint32_t key, long e) {
  long d = 0;
  for (long j = 0; j <= e; ++j) d += (key >> (4 * j)) & 0xf;
  return d;
}

MultiSeries ms_zero(long e, long D) {
  require(e >= 1 && e <= kMaxVars, "variable count out of range");
  require(D >= 0 && D <= kMaxDegree, "truncation degree out of range");
  MultiSeries f;
  f.e = e;
  f.D = D;
  return f;
}

void ms_set(MultiSeries& f, const std::vector<long>& exps, const mpq_class& v) {
  require(static_cast<long>(exps.size()) == f.e + 1, "exponent vector size mismatch");
  long d = 0;
  for (long t : exps) {
    require(t >= 0 && t <= kMaxDegree, "exponent out of range");
    d += t;
  }
  require(d <= f.D, "monomial beyond truncation");
  uint32_t k = ms_key(exps);
  if (v == 0)
    f.c.erase(k);
  else
    f.c[k] = v;
}

mpq_class ms_get(const MultiSeries& f, const std::vector<long>& exps) {
  auto it = f.c.find(ms_key(exps));
  return it == f.c.end() ? mpq_class(0) : it->second;
}

bool ms_equal(const MultiSeries& a, const MultiSeries& b) {
  return a.e == b.e && a.c == b.c;
}

MultiSeries ms_add(const MultiSeries& a, const MultiSeries& b) {
  require(a.e == b.e, "variable count mismatch");
  MultiSeries out = ms_zero(a.e, std::min(a.D, b.D));
  out.c = a.c;
  for (const auto& [k, q] : b.c) ms_accum(out, k, q);
  return out;
}

MultiSeries ms_scale(const MultiSeries& a, const mpq_class& s) {
  MultiSeries out = ms_zero(a.e, a.D);
  if (s == 0) return out;
  for (const auto& [k, q] : a.c) out.c.emplace(k, q * s);
  return out;
}

MultiSeries ms_mul(const MultiSeries& a, const MultiSeries& b) {
  require(a.e == b.e, "variable count mismatch");
  MultiSeries out = ms_zero(a.e, std::min(a.D, b.D));
  for (const auto& [ka, qa] : a.c) {
    long da = ms_total_degree(ka, a.e);
    for (const auto& [kb, qb] : b.c) {
      if (da + ms_total_degree(kb, a.e) > out.D) continue;
      // slots cannot carry: every slot sum stays <= D <= 12 < 16
      ms_accum(out, ka + kb, qa * qb);
    }
  }
  return out;
}

MultiSeries substitute(const MultiSeries& f, const std::vector<SubstTarget>& assignment) {
  require(static_cast<long>(assignment.size()) == f.e, "assignment size mismatch");
  for (const auto& t : assignment)
    if (t.kind == SubstTarget::ToVar)
      require(t.w >= 0 && t.w < f.e, "substitution target out of range");
  MultiSeries out = ms_zero(f.e, f.D);
  for (const auto& [key, coeff] : f.c) {
    auto exps = ms_exps(key, f.e);
    std::vector<long> ne(f.e + 1, 0);
    ne[f.e] = exps[f.e];
    mpq_class cc = coeff;
    bool dead = false;
    for (long v = 0; v < f.e && !dead; ++v) {
      long n = exps[v];
      if (n == 0) continue;
      const SubstTarget& t = assignment[v];
      switch (t.kind) {
        case SubstTarget::ToVar:
          ne[t.w] += n;
          break;
        case SubstTarget::ToU:
          ne[f.e] += n;
          break;
        case SubstTarget::ToScalar:
          if (t.scalar == 0) {
            dead = true;
          } else {
            for (long r = 0; r < n; ++r) cc *= t.scalar;
          }
          break;
      }
    }
    if (dead) continue;
    ms_accum(out, ms_key(ne), cc);
  }
  return out;
}

MultiSeries partial_diagonal(const MultiSeries& f, unsigned long mask) {
  std::vector<SubstTarget> a(f.e);
  for (long v = 0; v < f.e; ++v) {
    if (mask & (1ul << v)) {
      a[v].kind = SubstTarget::ToVar;
      a[v].w = v;
    } else {
      a[v].kind = SubstTarget::ToU;
    }
  }
  return substitute(f, a);
}

bool check_parity(const MultiSeries& f, int eps) {
  require(eps == 1 || eps == -1, "sign must be +-1");
  long rho = eps == 1 ? 0 : 1;
  for (const auto& [k, q] : f.c)
    if (monomial_u_exp(k, f.e) % 2 != rho) return false;
  return true;
}

long u_order(const MultiSeries& f) {
  long best = f.D + 1;
  for (const auto& [k, q] : f.c) best = std::min(best, monomial_u_exp(k, f.e));
  return best;
}

long forced_u_order(long e, int eps_tilde, unsigned long mask) {
  require(eps_tilde == 1 || eps_tilde == -1, "sign must be +-1");
  long m = e - popcount_mask(mask, e);
  long rho = eps_tilde == 1 ? 0 : 1;
  bool qualifying = (m % 2) == 1 - rho;
  return m + (qualifying ? 1 : 0);
}

FamilyScenario synthesize_scenario(long e, int eps_tilde, long D, uint64_t seed) {
  require(e >= 1 && e <= kMaxVars, "exceptional set size out of range");
  require(eps_tilde == 1 || eps_tilde == -1, "sign must be +-1");
  if (D < e + 2 || D > kMaxDegree)
    throw std::length_error(
        "taylor: truncation degree must satisfy e+2 <= D <= 12; resize and retry");

  const long rho = eps_tilde == 1 ? 0 : 1;
  std::mt19937_64 rng(seed);

  // analytic Euler factors: members of (x_v, u) with generic linear terms,
  // truncated to the band their products can resolve below D
  const long band = euler_band(e, eps_tilde, D);
  std::vector<MultiSeries> euler;
  for (long v = 0; v < e; ++v) {
    MultiSeries C = ms_zero(e, D);
    for (const auto& ex : enumerate_exponents(e + 1, band)) {
      long deg = vec_sum(ex);
      if (deg <= 1) continue;
      if (ex[v] == 0 && ex[e] == 0) continue;
      if (rnd_below(rng, 10) < 6) ms_accum(C, ms_key(ex), rnd_coeff(rng));
    }
    mpq_class av = rnd_coeff(rng);
    mpq_class bv = rnd_coeff(rng);
    while (av + bv == 0) bv = rnd_coeff(rng);
    std::vector<long> lx(e + 1, 0), lu(e + 1, 0);
    lx[v] = 1;
    lu[e] = 1;
    ms_set(C, lx, av);
    ms_set(C, lu, bv);
    euler.push_back(std::move(C));
  }

  // master improved factor: its u^0 layer is confined to the support
  // pattern that keeps every qualifying specialization one order deeper
  MultiSeries Lstar = ms_zero(e, D);
  for (const auto& ex : enumerate_exponents(e + 1, D - e)) {
    if (ex[e] == 0) {
      if (rho == 1) continue;
      bool full = true;
      for (long v = 0; v < e; ++v)
        if (ex[v] == 0) full = false;
      if (!full) continue;
    }
    if (rnd_below(rng, 10) < 7) ms_accum(Lstar, ms_key(ex), rnd_coeff(rng));
  }

  MultiSeries raw = Lstar;
  for (const auto& C : euler) raw = ms_mul(raw, C);

  // parity projection: the functional-equation half of the product survives
  MultiSeries Lp = ms_zero(e, D);
  for (const auto& [k, q] : raw.c)
    if (monomial_u_exp(k, e) % 2 == rho) Lp.c.emplace(k, q);

  // admissible monomial layer: every subset constraint met term by term
  for (const auto& ex : enumerate_exponents(e + 1, D)) {
    if (ex[e] % 2 != rho) continue;
    std::vector<long> xs(ex.begin(), ex.begin() + e);
    std::sort(xs.begin(), xs.end());
    bool ok = true;
    long prefix = 0;
    for (long m = 0; m <= e && ok; ++m) {
      if (m > 0) prefix += xs[m - 1];
      long dm = m + ((m % 2) == 1 - rho ? 1 : 0);
      if (ex[e] + prefix < dm) ok = false;
    }
    if (!ok) continue;
    if (rnd_below(rng, 10) < 5) ms_accum(Lp, ms_key(ex), rnd_coeff(rng));
  }

  // exact kernel of the constraint system on the degree <= e band: the
  // minimal-layer structure lives here (cancellations, not divisibility)
  for (const auto& vec : low_band_kernel(e, rho)) {
    if (rnd_below(rng, 10) >= 7) continue;
    mpq_class s = rnd_coeff(rng);
    for (const auto& [k, q] : vec) ms_accum(Lp, k, s * q);
  }

  if (Lp.c.empty())
    throw std::length_error("taylor: projection left no coefficients at this degree; resize");

  // improved series: exact quotient by u^m times the unit Euler cofactor
  std::vector<MultiSeries> improved;
  for (unsigned long mask = 0; mask < (1ul << e); ++mask) {
    long m = e - popcount_mask(mask, e);
    MultiSeries sub = partial_diagonal(Lp, mask);
    if (u_order(sub) < m)
      throw std::logic_error("taylor: constructed series misses a forced divisibility");
    MultiSeries Q = ms_shift_u(sub, m);
    MultiSeries G = ms_one(e, D);
    for (long v = 0; v < e; ++v) {
      if (mask & (1ul << v)) continue;
      G = ms_mul(G, ms_shift_u(partial_diagonal(euler[v], mask), 1));
    }
    improved.push_back(ms_truncate(ms_mul(Q, ms_inverse(G)), D - m));
  }

  FamilyScenario sc;
  sc.e = e;
  sc.eps_tilde = eps_tilde;
  sc.D = D;
  sc.Lp = std::move(Lp);
  sc.euler = std::move(euler);
  sc.improved = std::move(improved);
  if (!scenario_consistent(sc)) {
    std::string msg = "taylor: synthesized scenario failed its own verification";
    VanishingReport rep = verify_vanishing(sc);
    for (const auto& v : rep.hypothesis_violations) msg += "\n  [hypothesis] " + v;
    for (const auto& v : rep.conclusion_violations) msg += "\n  [conclusion] " + v;
    DiagonalDerivative dd = diagonal_derivative(sc);
    if (!dd.equal) msg += "\n  [diagonal] lhs != rhs";
    throw std::logic_error(msg);
  }
  return sc;
}

VanishingReport verify_vanishing(const FamilyScenario& sc) {
  VanishingReport rep;
  const long e = sc.e;
  require(sc.eps_tilde == 1 || sc.eps_tilde == -1, "sign must be +-1");
  require(static_cast<long>(sc.euler.size()) == e, "one Euler factor per place required");
  require(sc.improved.size() == (1ul << e), "one improved series per subset required");

  // hypotheses: the functional-equation parity
  if (!check_parity(sc.Lp, sc.eps_tilde))
    rep.hypothesis_violations.push_back("parity: a monomial of L violates L(x,-u) = eps L(x,u)");

  // hypotheses: Euler factors live in (x_v, u) and vanish to order exactly
  // one under every specialization that sends their place to the diagonal
  for (long v = 0; v < e; ++v) {
    const MultiSeries& C = sc.euler[v];
    for (const auto& [k, q] : C.c) {
      auto ex = ms_exps(k, e);
      if (ex[v] == 0 && ex[e] == 0) {
        rep.hypothesis_violations.push_back("euler factor " + std::to_string(v + 1) +
                                            ": monomial " + render_monomial(k, e) +
                                            " outside the ideal (x_v, u)");
      }
    }
    if (u_order(partial_diagonal(C, 0)) != 1)
      rep.hypothesis_violations.push_back("euler factor " + std::to_string(v + 1) +
                                          ": diagonal vanishing order is not one");
  }

  // hypotheses: factorization through the improved series at every subset,
  // and the extra u-power at qualifying subsets
  for (unsigned long mask = 0; mask < (1ul << e); ++mask) {
    long m = e - popcount_mask(mask, e);
    MultiSeries lhs = partial_diagonal(sc.Lp, mask);
    MultiSeries rhs = sc.improved[mask];
    for (long v = 0; v < e; ++v) {
      if (mask & (1ul << v)) continue;
      rhs = ms_mul(rhs, partial_diagonal(sc.euler[v], mask));
    }
    if (!ms_equal(lhs, rhs))
      rep.hypothesis_violations.push_back("factorization fails at S = " + render_mask(mask, e));
    long d = forced_u_order(e, sc.eps_tilde, mask);
    if (d > m && u_order(lhs) < d)
      rep.hypothesis_violations.push_back("forced divisibility u^" + std::to_string(d) +
                                          " fails at S = " + render_mask(mask, e));
  }

  // conclusions: coefficient vanishing below the support threshold
  for (const auto& [k, q] : sc.Lp.c) {
    long i = monomial_u_exp(k, e);
    long supp = support_size(k, e);
    if (i < e && supp < e - i)
      rep.conclusion_violations.push_back("a_" + std::to_string(i) + "(" +
                                          render_monomial(k & ~(0xfu << (4 * e)), e) +
                                          ") nonzero with support " + std::to_string(supp) +
                                          " < " + std::to_string(e - i));
    if (x_degree(k, e) + i == e) {
      std::ostringstream os;
      os << render_monomial(k, e) << " : " << q;
      rep.degree_e_support.push_back(os.str());
    }
  }

  // conclusions: the layer sums on |n| = e - i
  for (long i = 0; i < e; ++i) {
    mpq_class s = 0;
    for (const auto& n : enumerate_exponents(e, e - i)) {
      if (vec_sum(n) != e - i) continue;
      std::vector<long> ex(n);
      ex.push_back(i);
      s += ms_get(sc.Lp, ex);
    }
    if (s != 0)
      rep.conclusion_violations.push_back("sum of a_" + std::to_string(i) + "(n) over |n| = " +
                                          std::to_string(e - i) + " equals " + s.get_str() +
                                          ", expected 0");
  }
  return rep;
}

DiagonalDerivative diagonal_derivative(const MultiSeries& Lp, long e) {
  require(Lp.e == e, "variable count mismatch");
  MultiSeries diag = partial_diagonal(Lp, 0);
  std::vector<long> ue(e + 1, 0);
  ue[e] = e;
  mpq_class fact = 1;
  for (long t = 2; t <= e; ++t) fact *= t;
  DiagonalDerivative dd;
  dd.lhs = fact * ms_get(diag, ue);
  dd.rhs = fact * ms_get(Lp, ue);
  dd.equal = dd.lhs == dd.rhs;
  dd.diag_u_order = u_order(diag);
  return dd;
}

DiagonalDerivative diagonal_derivative(const FamilyScenario& sc) {
  return diagonal_derivative(sc.Lp, sc.e);
}

Mutation mutate_scenario(FamilyScenario& sc, std::mt19937_64& rng) {
  const long e = sc.e;
  const long n_pieces = 1 + e + static_cast<long>(1ul << e);
  long pick = static_cast<long>(rnd_below(rng, static_cast<uint64_t>(n_pieces)));

  Mutation mut;
  MultiSeries* target = nullptr;
  long cap = sc.D;
  if (pick == 0) {
    mut.piece = "Lp";
    target = &sc.Lp;
  } else if (pick <= e) {
    mut.piece = "euler";
    mut.index = pick - 1;
    target = &sc.euler[mut.index];
    cap = euler_band(e, sc.eps_tilde, sc.D);
  } else {
    mut.piece = "improved";
    mut.index = pick - 1 - e;
    target = &sc.improved[mut.index];
    cap = sc.D - (e - popcount_mask(static_cast<unsigned long>(mut.index), e));
  }

  auto monos = enumerate_exponents(e + 1, cap);
  if (mut.piece == "euler") {
    // draw only where some factorization product still resolves the change:
    // corruptions past every product's truncation test nothing
    long vis = -1;
    for (unsigned long mask = 0; mask < (1ul << e); ++mask) {
      if (mask & (1ul << mut.index)) continue;
      long m = e - popcount_mask(mask, e);
      long floor_ls = min_degree(sc.improved[mask]);
      if (floor_ls > sc.D) continue;
      vis = std::max(vis, sc.D - floor_ls - (m - 1));
    }
    std::vector<std::vector<long>> kept;
    for (const auto& mx : monos) {
      bool in_ideal = mx[mut.index] != 0 || mx[e] != 0;
      if (!in_ideal || vec_sum(mx) <= vis) kept.push_back(mx);
    }
    monos = std::move(kept);
  }
  const auto& ex = monos[rnd_below(rng, monos.size())];
  mut.key = ms_key(ex);
  mut.degree = vec_sum(ex);
  mut.delta = rnd_coeff(rng);
  ms_accum(*target, mut.key, mut.delta);

  // an Euler-factor coefficient is invisible exactly when every
  // factorization product it enters resolves above the truncation
  mut.truncation_blind = false;
  if (mut.piece == "euler") {
    auto exps = ms_exps(mut.key, e);
    if (exps[mut.index] != 0 || exps[e] != 0) {  // still inside (x_v, u)
      bool blind = true;
      for (unsigned long mask = 0; mask < (1ul << e) && blind; ++mask) {
        if (mask & (1ul << mut.index)) continue;
        long m = e - popcount_mask(mask, e);
        long floor_ls = min_degree(sc.improved[mask]);
        if (floor_ls > sc.D) continue;  // zero series cannot witness the change
        if (mut.degree + floor_ls + (m - 1) <= sc.D) blind = false;
      }
      mut.truncation_blind = blind;
    }
  }
  return mut;
}

bool scenario_consistent(const FamilyScenario& sc) {
  VanishingReport rep = verify_vanishing(sc);
  if (!rep.all_ok()) return false;
  DiagonalDerivative dd = diagonal_derivative(sc);
  return dd.equal && dd.diag_u_order >= sc.e;
}

}  // namespace lp
