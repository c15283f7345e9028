#include "lp/modsym.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lp {

namespace {

constexpr long kExactZeroPrec = 1L << 40;  // absolute bound carried by exact zeros

const M2 kSigma = {0, -1, 1, 0};
const M2 kTau = {0, -1, 1, -1};
const M2 kTau2 = {-1, 1, -1, 0};  // tau^2; tau^3 = 1
const M2 kEta = {1, 0, 0, -1};

bool is_prime_l(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

long gcd_l(long a, long b) {
  while (b) {
    long t = a % b;
    a = b;
    b = t;
  }
  return a < 0 ? -a : a;
}

PadicNumber pmul_z(const PadicNumber& a, const mpz_class& z) {
  if (z == 0) return padic_zero(a.p, kExactZeroPrec);
  if (a.is_zero()) return padic_zero(a.p, a.v + val_p(z, a.p));
  return mul(a, padic_from_integer(z, a.p, val_p(z, a.p) + a.M));
}

PadicNumber pmul_q(const PadicNumber& a, const mpq_class& q) {
  if (q == 0) return padic_zero(a.p, kExactZeroPrec);
  if (a.is_zero()) {
    long vq = val_p(q.get_num(), a.p) - val_p(q.get_den(), a.p);
    return padic_zero(a.p, a.v + vq);
  }
  return mul(a, padic_from_rational(q, a.p, a.M));
}

// ---- generic coefficient-ring hooks (exact rationals / p-adics) ----

mpq_class scaled(const mpq_class& x, const mpz_class& c) { return mpq_class(c) * x; }
PadicNumber scaled(const PadicNumber& x, const mpz_class& c) { return pmul_z(x, c); }

void accum(mpq_class& a, const mpq_class& b) { a += b; }
void accum(PadicNumber& a, const PadicNumber& b) { a = add(a, b); }

mpq_class zero_like(const mpq_class&) { return mpq_class(0); }
PadicNumber zero_like(const PadicNumber& x) { return padic_zero(x.p, kExactZeroPrec); }

mpq_class negate(const mpq_class& a) { return -a; }
PadicNumber negate(const PadicNumber& a) { return neg(a); }

// {infty -> x} as a sum of unimodular h D0 (continued-fraction convergents).
std::vector<M2> cf_terms(const Cusp& x) {
  std::vector<M2> out;
  if (x.den == 0) return out;
  mpz_class a = x.num, b = x.den;
  mpz_class pp = 0, qq = 1;  // p_{t-2}, q_{t-2}
  mpz_class pm = 1, qm = 0;  // p_{t-1}, q_{t-1}
  long sign = -1;            // (-1)^{t-1} at t = 0
  while (b != 0) {
    mpz_class at, rem;
    mpz_fdiv_qr(at.get_mpz_t(), rem.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    mpz_class pt = at * pm + pp;
    mpz_class qt = at * qm + qq;
    out.push_back(M2{sign * pt, pm, sign * qt, qm});
    pp = pm;
    qq = qm;
    pm = pt;
    qm = qt;
    a = b;
    b = rem;
    sign = -sign;
  }
  return out;
}

template <typename T>
std::vector<T> eval_unimodular_impl(const ManinSymbolSpace& S, const std::vector<T>& big,
                                    const M2& h) {
  if (m2_det(h) != 1) throw std::invalid_argument("eval_unimodular: matrix not in SL2(Z)");
  long j = S.index_of(h[2], h[3]);
  M2 conj = m2_mul(S.lifts[j], m2_inv(h));
  if (mpz_class(conj[2] % S.N) != 0)
    throw std::logic_error("eval_unimodular: conjugator escapes Gamma_0(N)");
  auto C = action_matrix(conj, S.g);
  std::vector<T> out;
  out.reserve(S.g + 1);
  for (long m = 0; m <= S.g; ++m) {
    T acc = zero_like(big[0]);
    for (long r = 0; r <= S.g; ++r) accum(acc, scaled(big[flat_index(S, j, r)], C[m][r]));
    out.push_back(acc);
  }
  return out;
}

template <typename T>
std::vector<T> eval_path_impl(const ManinSymbolSpace& S, const std::vector<T>& big, const Cusp& x,
                              const Cusp& y) {
  std::vector<T> out(S.g + 1, zero_like(big[0]));
  auto add_endpoint = [&](const Cusp& c, bool plus) {
    for (const M2& h : cf_terms(c)) {
      auto v = eval_unimodular_impl(S, big, h);
      for (long m = 0; m <= S.g; ++m) accum(out[m], plus ? v[m] : negate(v[m]));
    }
  };
  add_endpoint(y, true);
  add_endpoint(x, false);
  return out;
}

std::vector<M2> hecke_cosets(long N, long ell) {
  if (!is_prime_l(ell)) throw std::invalid_argument("hecke: ell must be prime");
  std::vector<M2> cosets;
  for (long b = 0; b < ell; ++b) cosets.push_back(M2{1, b, 0, ell});
  if (N % ell != 0) cosets.push_back(M2{ell, 0, 0, 1});
  return cosets;
}

// (T Phi)(g_i D0) for all generators, on a big coefficient vector.
template <typename T>
std::vector<T> hecke_big(const ManinSymbolSpace& S, const std::vector<T>& big,
                         const std::vector<M2>& cosets) {
  std::vector<T> out(S.dim_total, zero_like(big[0]));
  for (long i = 0; i < S.n_gen; ++i) {
    std::vector<T> val(S.g + 1, zero_like(big[0]));
    for (const M2& delta : cosets) {
      M2 dg = m2_mul(delta, S.lifts[i]);
      auto v = eval_path_impl(S, big, make_cusp(dg[1], dg[3]), make_cusp(dg[0], dg[2]));
      auto C = action_matrix(delta, S.g);
      for (long m = 0; m <= S.g; ++m)
        for (long r = 0; r <= S.g; ++r) accum(val[m], scaled(v[r], C[m][r]));
    }
    for (long m = 0; m <= S.g; ++m) out[flat_index(S, i, m)] = val[m];
  }
  return out;
}

M2 lift_to_sl2(long c, long d, long N) {
  if (N == 1) return M2{1, 0, 0, 1};
  mpz_class c0 = c, d0 = d;
  if (c0 == 0) c0 = N;
  for (long t = 0;; ++t) {
    mpz_class cand = d0 + t * mpz_class(N);
    if (gcd(c0, cand) == 1) {
      d0 = cand;
      break;
    }
    if (t > 4 * N + 4) throw std::logic_error("lift_to_sl2: no coprime lift found");
  }
  // a*d0 + t*c0 = 1 -> det [a, -t; c0, d0] = 1
  mpz_class gg, a, t;
  mpz_gcdext(gg.get_mpz_t(), a.get_mpz_t(), t.get_mpz_t(), d0.get_mpz_t(), c0.get_mpz_t());
  if (gg != 1) throw std::logic_error("lift_to_sl2: bottom row not coprime");
  return M2{a, -t, c0, d0};
}

long smallest_prime_coprime(long N) {
  long ell = 2;
  while (N % ell == 0 || !is_prime_l(ell)) ++ell;
  return ell;
}

using ZMat = std::vector<std::vector<mpz_class>>;

// integer row echelon by unimodular operations, sweeping the first
// limit_cols columns; returns the rank
long zmat_echelon(ZMat& A, long limit_cols) {
  long rows = (long)A.size(), cols = rows ? (long)A[0].size() : 0, r = 0;
  for (long c = 0; c < limit_cols && c < cols && r < rows; ++c) {
    long piv = -1;
    for (long i = r; i < rows; ++i)
      if (A[i][c] != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(A[r], A[piv]);
    for (long i = r + 1; i < rows; ++i)
      while (A[i][c] != 0) {
        mpz_class q = A[r][c] / A[i][c];
        for (long j = 0; j < cols; ++j) A[r][j] -= q * A[i][j];
        std::swap(A[r], A[i]);
      }
    if (A[r][c] < 0)
      for (long j = 0; j < cols; ++j) A[r][j] = -A[r][j];
    ++r;
  }
  return r;
}

// basis rows of the saturated lattice {y : y B = 0}
ZMat zmat_left_kernel(const ZMat& B) {
  long d = (long)B.size(), e = d ? (long)B[0].size() : 0;
  ZMat M(d, std::vector<mpz_class>(e + d, mpz_class(0)));
  for (long i = 0; i < d; ++i) {
    for (long j = 0; j < e; ++j) M[i][j] = B[i][j];
    M[i][e + i] = 1;
  }
  zmat_echelon(M, e);
  ZMat out;
  for (long i = 0; i < d; ++i) {
    bool zero = true;
    for (long j = 0; j < e; ++j)
      if (M[i][j] != 0) {
        zero = false;
        break;
      }
    if (!zero) continue;
    std::vector<mpz_class> row(M[i].begin() + e, M[i].end());
    bool nz = false;
    for (const auto& x : row)
      if (x != 0) nz = true;
    if (nz) out.push_back(row);
  }
  return out;
}

// gcd of the pairings of the functional (given by V-coordinates) against the
// integral cuspidal sublattice of the Manin quotient; 0 for an Eisenstein
// functional
mpq_class cuspidal_pairing_gcd(const ManinSymbolSpace& S, const QVec& coords) {
  long d = S.dim_space;
  mpz_class D = 1;
  for (long t = 0; t < S.dim_total; ++t)
    for (long j = 0; j < d; ++j) D = lcm(D, S.basis[t][j].get_den());
  ZMat L(S.dim_total, std::vector<mpz_class>(d));
  for (long t = 0; t < S.dim_total; ++t)
    for (long j = 0; j < d; ++j) {
      mpq_class scaled_entry = S.basis[t][j] * mpq_class(D);
      L[t][j] = scaled_entry.get_num();  // den divides D
    }
  long rank = zmat_echelon(L, d);
  L.resize(rank);

  // the cuspidal part of the quotient is cut out by the kernel of
  // (T_{ell0} - 1 - ell0^{k-1})^d on the dual side
  long ell0 = smallest_prime_coprime(S.N);
  QMat T = hecke_matrix(S, ell0);
  mpq_class eig = 1 + mpq_class(pow_p(ell0, S.k - 1));
  QMat W = qmat_pow(qmat_sub(T, qmat_scale(qmat_identity(d), eig)), d);
  QMat K = qmat_kernel(W);
  long e = qmat_cols(K);

  mpz_class DK = 1;
  for (long i = 0; i < d; ++i)
    for (long j = 0; j < e; ++j) DK = lcm(DK, K[i][j].get_den());
  ZMat BK(rank, std::vector<mpz_class>(e, mpz_class(0)));
  for (long i = 0; i < rank; ++i)
    for (long j = 0; j < e; ++j) {
      mpq_class acc = 0;
      for (long s = 0; s < d; ++s) acc += mpq_class(L[i][s]) * K[s][j];
      acc *= DK;
      BK[i][j] = acc.get_num();  // den divides DK
    }
  ZMat Y = zmat_left_kernel(BK);

  mpz_class g = 0;
  for (const auto& y : Y) {
    mpq_class v = 0;
    for (long i = 0; i < rank; ++i)
      for (long s = 0; s < d; ++s) v += mpq_class(mpz_class(y[i] * L[i][s])) * coords[s];
    if (v.get_den() != 1) throw std::logic_error("cuspidal_pairing_gcd: non-integral pairing");
    g = gcd(g, v.get_num());
  }
  return mpq_class(g) / mpq_class(D);
}

PadicNumber hensel_unit_root(const mpz_class& ap, long p, long k, long M) {
  // unit root of X^2 - ap X + p^{k-1}; requires p nmid ap
  mpz_class pk = pow_p(p, M);
  mpz_class c0 = pow_p(p, k - 1);
  mpz_class x = ((ap % pk) + pk) % pk;
  for (long it = 0; it < 64; ++it) {
    mpz_class f = (x * x - ap * x + c0) % pk;
    if (f == 0) break;
    mpz_class fp = (2 * x - ap) % pk;
    mpz_class fpinv;
    if (!mpz_invert(fpinv.get_mpz_t(), fp.get_mpz_t(), pk.get_mpz_t()))
      throw std::logic_error("hensel_unit_root: derivative not a unit");
    x = ((x - f * fpinv) % pk + pk) % pk;
  }
  if ((x * x - ap * x + c0) % pk != 0) throw std::logic_error("hensel_unit_root: no convergence");
  if (x % p == 0) throw std::logic_error("hensel_unit_root: root not a unit");
  return padic_from_integer(x, p, M);
}

}  // namespace

M2 m2_mul(const M2& x, const M2& y) {
  return M2{x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2],
            x[2] * y[1] + x[3] * y[3]};
}

mpz_class m2_det(const M2& x) { return x[0] * x[3] - x[1] * x[2]; }

M2 m2_inv(const M2& x) {
  mpz_class d = m2_det(x);
  if (d == 1) return M2{x[3], -x[1], -x[2], x[0]};
  if (d == -1) return M2{-x[3], x[1], x[2], -x[0]};
  throw std::invalid_argument("m2_inv: determinant not a unit");
}

std::vector<std::vector<mpz_class>> action_matrix(const M2& gm, long g) {
  const mpz_class &a = gm[0], &b = gm[1], &c = gm[2], &d = gm[3];
  std::vector<std::vector<mpz_class>> C(g + 1, std::vector<mpz_class>(g + 1, mpz_class(0)));
  for (long m = 0; m <= g; ++m) {
    // (a + cz)^{g-m} and (b + dz)^m
    std::vector<mpz_class> A(g - m + 1), B(m + 1);
    for (long s = 0; s <= g - m; ++s) {
      mpz_class bin;
      mpz_bin_uiui(bin.get_mpz_t(), (unsigned long)(g - m), (unsigned long)s);
      mpz_class pa, pc;
      mpz_pow_ui(pa.get_mpz_t(), a.get_mpz_t(), (unsigned long)(g - m - s));
      mpz_pow_ui(pc.get_mpz_t(), c.get_mpz_t(), (unsigned long)s);
      A[s] = bin * pa * pc;
    }
    for (long t = 0; t <= m; ++t) {
      mpz_class bin;
      mpz_bin_uiui(bin.get_mpz_t(), (unsigned long)m, (unsigned long)t);
      mpz_class pb, pd;
      mpz_pow_ui(pb.get_mpz_t(), b.get_mpz_t(), (unsigned long)(m - t));
      mpz_pow_ui(pd.get_mpz_t(), d.get_mpz_t(), (unsigned long)t);
      B[t] = bin * pb * pd;
    }
    for (long s = 0; s <= g - m; ++s)
      for (long t = 0; t <= m; ++t) C[m][s + t] += A[s] * B[t];
  }
  return C;
}

Cusp make_cusp(const mpz_class& num, const mpz_class& den) {
  if (num == 0 && den == 0) throw std::invalid_argument("make_cusp: 0/0");
  if (den == 0) return Cusp{1, 0};
  mpz_class g = gcd(num, den);
  mpz_class n = num / g, d = den / g;
  if (d < 0) {
    n = -n;
    d = -d;
  }
  return Cusp{n, d};
}

long ManinSymbolSpace::index_of(const mpz_class& c, const mpz_class& d) const {
  long ci = (long)mpz_fdiv_ui(c.get_mpz_t(), (unsigned long)N);
  long di = (long)mpz_fdiv_ui(d.get_mpz_t(), (unsigned long)N);
  long idx = p1_table[ci * N + di];
  if (idx < 0) throw std::invalid_argument("index_of: (c:d) not in P^1(Z/N)");
  return idx;
}

ManinSymbolSpace build_space(long N, long k) {
  if (N < 1 || k < 2 || k % 2 != 0)
    throw std::invalid_argument("build_space: need N >= 1 and even weight k >= 2");
  if (N * (k - 1) > 4000)
    throw std::length_error("build_space: N*(k-1) exceeds the dense-linear-algebra guard 4000");
  ManinSymbolSpace S;
  S.N = N;
  S.k = k;
  S.g = k - 2;

  // P^1(Z/N): label unit orbits of coprime pairs, canonical = lex-min member.
  std::vector<long> units;
  if (N == 1)
    units.push_back(0);
  else
    for (long u = 1; u < N; ++u)
      if (gcd_l(u, N) == 1) units.push_back(u);
  S.p1_table.assign(N * N, -1);
  for (long c = 0; c < N; ++c)
    for (long d = 0; d < N; ++d) {
      if (N > 1 && gcd_l(gcd_l(c, d), N) != 1) continue;
      if (S.p1_table[c * N + d] != -1) continue;
      long bc = c, bd = d;
      std::vector<std::pair<long, long>> orbit;
      for (long u : units) {
        long uc = (u * c) % N, ud = (u * d) % N;
        orbit.push_back({uc, ud});
        if (uc < bc || (uc == bc && ud < bd)) {
          bc = uc;
          bd = ud;
        }
      }
      long idx = S.n_gen++;
      S.p1.push_back({bc, bd});
      for (auto& o : orbit) S.p1_table[o.first * N + o.second] = idx;
    }
  for (auto& cd : S.p1) S.lifts.push_back(lift_to_sl2(cd.first, cd.second, N));
  S.dim_total = S.n_gen * (k - 1);

  // Manin relations: w + w|sigma = 0 and w + w|tau + w|tau^2 = 0, written on
  // the chosen lifts; k even, so the torsion unit -1 imposes nothing.
  long g = S.g;
  QMat rel = qmat_zero(2 * S.n_gen * (g + 1), S.dim_total);
  auto add_eval_block = [&](long r0, const M2& h) {
    long j = S.index_of(h[2], h[3]);
    M2 conj = m2_mul(S.lifts[j], m2_inv(h));
    if (mpz_class(conj[2] % N) != 0 || m2_det(conj) != 1)
      throw std::logic_error("build_space: relation conjugator escapes Gamma_0(N)");
    auto C = action_matrix(conj, g);
    for (long m = 0; m <= g; ++m)
      for (long r = 0; r <= g; ++r) rel[r0 + m][flat_index(S, j, r)] += mpq_class(C[m][r]);
  };
  long row = 0;
  for (long i = 0; i < S.n_gen; ++i) {
    for (long m = 0; m <= g; ++m) rel[row + m][flat_index(S, i, m)] += 1;
    add_eval_block(row, m2_mul(S.lifts[i], kSigma));
    row += g + 1;
    for (long m = 0; m <= g; ++m) rel[row + m][flat_index(S, i, m)] += 1;
    add_eval_block(row, m2_mul(S.lifts[i], kTau));
    add_eval_block(row, m2_mul(S.lifts[i], kTau2));
    row += g + 1;
  }
  S.basis = qmat_kernel(rel, &S.coord_rows);
  S.dim_space = qmat_cols(S.basis);

  // Sign involution (iota Phi)(D) = Phi(eta D)|eta on basis coordinates.
  S.iota = qmat_zero(S.dim_space, S.dim_space);
  for (long col = 0; col < S.dim_space; ++col) {
    QVec v(S.dim_total);
    for (long t = 0; t < S.dim_total; ++t) v[t] = S.basis[t][col];
    QVec out(S.dim_total, mpq_class(0));
    for (long i = 0; i < S.n_gen; ++i) {
      M2 h = m2_mul(m2_mul(kEta, S.lifts[i]), kEta);
      long j = S.index_of(h[2], h[3]);
      M2 full = m2_mul(m2_mul(S.lifts[j], m2_inv(h)), kEta);
      auto C = action_matrix(full, g);
      for (long m = 0; m <= g; ++m) {
        mpq_class acc = 0;
        for (long r = 0; r <= g; ++r) acc += mpq_class(C[m][r]) * v[flat_index(S, j, r)];
        out[flat_index(S, i, m)] = acc;
      }
    }
    QVec c = coords_of(S, out);
    for (long i = 0; i < S.dim_space; ++i) S.iota[i][col] = c[i];
  }
  if (S.dim_space > 0 && qmat_mul(S.iota, S.iota) != qmat_identity(S.dim_space))
    throw std::logic_error("build_space: sign involution does not square to 1");
  return S;
}

QVec coords_of(const ManinSymbolSpace& S, const QVec& big) {
  if ((long)big.size() != S.dim_total) throw std::invalid_argument("coords_of: wrong length");
  QVec c(S.dim_space);
  for (long j = 0; j < S.dim_space; ++j) c[j] = big[S.coord_rows[j]];
  QVec rec = qmat_apply(S.basis, c);
  if (rec != big) throw std::domain_error("coords_of: vector violates the Manin relations");
  return c;
}

QVec big_of(const ManinSymbolSpace& S, const QVec& coords) { return qmat_apply(S.basis, coords); }

std::vector<M2> unimodular_path(const Cusp& x) { return cf_terms(x); }

QVec eval_unimodular(const ManinSymbolSpace& S, const QVec& big, const M2& h) {
  return eval_unimodular_impl(S, big, h);
}
std::vector<PadicNumber> eval_unimodular(const ManinSymbolSpace& S,
                                         const std::vector<PadicNumber>& big, const M2& h) {
  return eval_unimodular_impl(S, big, h);
}

QVec eval_path(const ManinSymbolSpace& S, const QVec& big, const Cusp& x, const Cusp& y) {
  return eval_path_impl(S, big, x, y);
}
std::vector<PadicNumber> eval_path(const ManinSymbolSpace& S, const std::vector<PadicNumber>& big,
                                   const Cusp& x, const Cusp& y) {
  return eval_path_impl(S, big, x, y);
}

QMat hecke_matrix(const ManinSymbolSpace& S, long ell) {
  auto cosets = hecke_cosets(S.N, ell);
  QMat T = qmat_zero(S.dim_space, S.dim_space);
  for (long col = 0; col < S.dim_space; ++col) {
    QVec v(S.dim_total);
    for (long t = 0; t < S.dim_total; ++t) v[t] = S.basis[t][col];
    QVec out = hecke_big(S, v, cosets);
    QVec c = coords_of(S, out);
    for (long i = 0; i < S.dim_space; ++i) T[i][col] = c[i];
  }
  return T;
}

std::vector<PadicNumber> hecke_apply(const ManinSymbolSpace& S,
                                     const std::vector<PadicNumber>& big, long ell) {
  return hecke_big(S, big, hecke_cosets(S.N, ell));
}

long cuspidal_dimension(const ManinSymbolSpace& S) {
  if (S.dim_space == 0) return 0;
  long ell0 = smallest_prime_coprime(S.N);
  QMat T = hecke_matrix(S, ell0);
  mpq_class eig = mpq_class(1) + mpq_class(pow_p(ell0, S.k - 1));
  QMat A = qmat_sub(T, qmat_scale(qmat_identity(S.dim_space), eig));
  QMat P = qmat_pow(A, S.dim_space);
  return qmat_cols(qmat_column_space(P));
}

ClassicalSymbol eigen_symbol(const ManinSymbolSpace& S, const std::map<long, mpz_class>& record,
                             int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("eigen_symbol: sign must be +-1");
  long d = S.dim_space;
  QMat M = qmat_zero((long)(record.size() + 1) * d, d);
  long r0 = 0;
  for (const auto& [ell, a] : record) {
    QMat T = hecke_matrix(S, ell);
    for (long i = 0; i < d; ++i)
      for (long j = 0; j < d; ++j) M[r0 + i][j] = T[i][j] - (i == j ? mpq_class(a) : mpq_class(0));
    r0 += d;
  }
  for (long i = 0; i < d; ++i)
    for (long j = 0; j < d; ++j)
      M[r0 + i][j] = S.iota[i][j] - (i == j ? mpq_class(sign) : mpq_class(0));
  QMat K = (d > 0) ? qmat_kernel(M) : qmat_zero(0, 0);
  if (qmat_cols(K) != 1)
    throw std::domain_error("eigen_symbol: joint eigenspace has dimension " +
                            std::to_string(qmat_cols(K)));
  QVec coords(d);
  for (long i = 0; i < d; ++i) coords[i] = K[i][0];
  QVec big = qmat_apply(S.basis, coords);

  // primitive integer vector in the Manin lattice, first nonzero positive
  mpz_class L = 1;
  for (const auto& x : big) L = lcm(L, x.get_den());
  mpz_class G = 0;
  for (const auto& x : big) G = gcd(G, mpz_class(x.get_num() * (L / x.get_den())));
  if (G == 0) throw std::logic_error("eigen_symbol: zero eigenvector");
  mpq_class scale = make_q(L, G);
  for (const auto& x : big)
    if (x != 0) {
      if (x < 0) scale = -scale;
      break;
    }
  for (auto& x : big) x *= scale;
  for (auto& x : coords) x *= scale;

  // rescale so the values on the (1 + sign*iota)-image of the integral
  // cuspidal homology generate Z; reproduces L(11a,1)/Omega = 1/5.
  // Eisenstein symbols pair to zero with it and keep the primitive scaling.
  mpq_class g0 = cuspidal_pairing_gcd(S, coords);
  mpq_class lattice_gen = (g0 != 0) ? mpq_class(2 * g0) : mpq_class(1);
  for (auto& x : big) x /= lattice_gen;

  ClassicalSymbol phi;
  phi.N = S.N;
  phi.k = S.k;
  phi.big = big;
  phi.record = record;
  phi.sign = sign;
  phi.norm_scalar = lattice_gen;
  return phi;
}

PadicSymbol to_padic_symbol(const ManinSymbolSpace& S, const ClassicalSymbol& phi, long p,
                            long M) {
  PadicSymbol out;
  out.N = S.N;
  out.k = S.k;
  out.p = p;
  out.big.reserve(S.dim_total);
  for (const auto& x : phi.big)
    out.big.push_back(x == 0 ? padic_zero(p, kExactZeroPrec) : padic_from_rational(x, p, M));
  return out;
}

Stabilization p_stabilize(const ManinSymbolSpace& SN, const ManinSymbolSpace& SNp,
                          const ClassicalSymbol& phi, long p, long M, long slope_choice) {
  if (!is_prime_l(p)) throw std::invalid_argument("p_stabilize: p must be prime");
  if (SN.N % p == 0) throw std::invalid_argument("p_stabilize: p divides the level");
  if (SNp.N != SN.N * p || SNp.k != SN.k || phi.N != SN.N)
    throw std::invalid_argument("p_stabilize: space mismatch");
  long g = SN.g;

  // old span at level Np: v0 = phi, v1 = phi|diag(p,1)
  QVec v0(SNp.dim_total), v1(SNp.dim_total);
  M2 delta = {p, 0, 0, 1};
  for (long i = 0; i < SNp.n_gen; ++i) {
    QVec e = eval_unimodular(SN, phi.big, SNp.lifts[i]);
    M2 dg = m2_mul(delta, SNp.lifts[i]);
    QVec w = eval_path(SN, phi.big, make_cusp(dg[1], dg[3]), make_cusp(dg[0], dg[2]));
    for (long m = 0; m <= g; ++m) {
      v0[flat_index(SNp, i, m)] = e[m];
      v1[flat_index(SNp, i, m)] = mpq_class(pow_p(p, g - m)) * w[m];
    }
  }
  coords_of(SNp, v0);  // membership checks
  coords_of(SNp, v1);

  QMat span = qmat_zero(SNp.dim_total, 2);
  for (long t = 0; t < SNp.dim_total; ++t) {
    span[t][0] = v0[t];
    span[t][1] = v1[t];
  }
  if (qmat_rank(span) != 2) throw std::domain_error("p_stabilize: old span is degenerate");

  auto cosets = hecke_cosets(SNp.N, p);
  QVec Uv0 = hecke_big(SNp, v0, cosets);
  QVec Uv1 = hecke_big(SNp, v1, cosets);
  QVec c0 = qmat_solve(span, Uv0);  // throws if U_p leaves the span (it cannot)
  QVec c1 = qmat_solve(span, Uv1);
  mpq_class A00 = c0[0], A10 = c0[1], A01 = c1[0], A11 = c1[1];

  mpq_class tr = A00 + A11;
  mpq_class det = A00 * A11 - A01 * A10;
  if (tr.get_den() != 1) throw std::logic_error("p_stabilize: non-integral U_p trace");
  if (det != mpq_class(pow_p(p, SN.k - 1)))
    throw std::logic_error("p_stabilize: U_p determinant is not p^{k-1}");
  mpz_class ap = tr.get_num();

  if (mpz_class(ap % p) == 0)
    throw std::domain_error(
        "p_stabilize: p | a_p; refinement lives in a quadratic extension (unsupported)");
  PadicNumber alpha = hensel_unit_root(ap, p, SN.k, M);
  if (slope_choice == SN.k - 1) {
    alpha = div(padic_from_integer(pow_p(p, SN.k - 1), p, SN.k - 1 + M), alpha);
  } else if (slope_choice != 0) {
    throw std::invalid_argument("p_stabilize: slope_choice must be 0 or k-1");
  }

  // eigenvector of A for alpha
  PadicNumber x0, x1;
  auto q2p = [&](const mpq_class& q) { return padic_from_rational(q, p, M); };
  if (A01 != 0) {
    x0 = q2p(A01);
    x1 = sub(alpha, q2p(A00));
  } else if (A10 != 0) {
    x0 = sub(alpha, q2p(A11));
    x1 = q2p(A10);
  } else {
    // diagonal span: alpha must match a diagonal entry
    if (agree(alpha, q2p(A00))) {
      x0 = padic_one(p, M);
      x1 = padic_zero(p, kExactZeroPrec);
    } else {
      x0 = padic_zero(p, kExactZeroPrec);
      x1 = padic_one(p, M);
    }
  }

  Stabilization st;
  st.alpha = alpha;
  st.ap = ap;
  st.sym.N = SNp.N;
  st.sym.k = SNp.k;
  st.sym.p = p;
  st.sym.big.reserve(SNp.dim_total);
  for (long t = 0; t < SNp.dim_total; ++t)
    st.sym.big.push_back(add(pmul_q(x0, v0[t]), pmul_q(x1, v1[t])));
  return st;
}

CycloElement classical_special_value(const ManinSymbolSpace& S, const QVec& big,
                                     const DirichletChar& chi, long j, long M) {
  if (j < 0 || j > S.g) throw std::invalid_argument("classical_special_value: j out of range");
  long p = chi.p, c = chi.cond;
  long lvl = char_value_level(chi);
  if (c == 0) {
    QVec v = eval_path(S, big, cusp_infinity(), make_cusp(0, 1));
    return cyclo_from_padic(v[j] == 0 ? padic_zero(p, kExactZeroPrec)
                                      : padic_from_rational(v[j], p, M),
                            lvl);
  }
  CycloElement acc = cyclo_zero(p, lvl, kExactZeroPrec);
  mpz_class pc = pow_p(p, c);
  for (mpz_class a = 1; a < pc; ++a) {
    if (a % p == 0) continue;
    QVec v = eval_path(S, big, cusp_infinity(), make_cusp(a, pc));
    if (v[j] == 0) continue;
    CycloElement ca = chi_value(chi, a, M);
    acc = cyclo_add(acc, cyclo_scale(ca, padic_from_rational(v[j], p, M)));
  }
  return acc;
}

CycloElement classical_special_value(const ManinSymbolSpace& S,
                                     const std::vector<PadicNumber>& big,
                                     const DirichletChar& chi, long j) {
  if (j < 0 || j > S.g) throw std::invalid_argument("classical_special_value: j out of range");
  long p = chi.p, c = chi.cond;
  long lvl = char_value_level(chi);
  if (c == 0) {
    auto v = eval_path(S, big, cusp_infinity(), make_cusp(0, 1));
    return cyclo_from_padic(v[j], lvl);
  }
  CycloElement acc = cyclo_zero(p, lvl, kExactZeroPrec);
  mpz_class pc = pow_p(p, c);
  for (mpz_class a = 1; a < pc; ++a) {
    if (a % p == 0) continue;
    auto v = eval_path(S, big, cusp_infinity(), make_cusp(a, pc));
    long Mc = v[j].is_zero() ? 1 : v[j].M;
    CycloElement ca = chi_value(chi, a, Mc);
    acc = cyclo_add(acc, cyclo_scale(ca, v[j]));
  }
  return acc;
}

int root_number(const ManinSymbolSpace& S, const ClassicalSymbol& phi) {
  long g = S.g;
  M2 w = {0, -1, S.N, 0};
  auto C = action_matrix(w, g);
  QVec out(S.dim_total, mpq_class(0));
  for (long i = 0; i < S.n_gen; ++i) {
    M2 wg = m2_mul(w, S.lifts[i]);
    QVec v = eval_path(S, phi.big, make_cusp(wg[1], wg[3]), make_cusp(wg[0], wg[2]));
    for (long m = 0; m <= g; ++m) {
      mpq_class acc = 0;
      for (long r = 0; r <= g; ++r) acc += mpq_class(C[m][r]) * v[r];
      out[flat_index(S, i, m)] = acc;
    }
  }
  long t0 = -1;
  for (long t = 0; t < S.dim_total; ++t)
    if (phi.big[t] != 0) {
      t0 = t;
      break;
    }
  if (t0 < 0) throw std::invalid_argument("root_number: zero symbol");
  mpq_class mu = out[t0] / phi.big[t0];
  for (long t = 0; t < S.dim_total; ++t)
    if (out[t] != mu * phi.big[t])
      throw std::domain_error("root_number: symbol is not a Fricke eigenvector");
  mpq_class wn = mu / mpq_class(pow_p(S.N, g / 2));
  if (wn != 1 && wn != -1)
    throw std::domain_error("root_number: Fricke eigenvalue is not +-N^{(k-2)/2}");
  int sgn = (wn == 1) ? 1 : -1;
  return ((S.k / 2) % 2 == 0) ? sgn : -sgn;
}

EigenformDesc load_eigenform_desc(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_eigenform_desc: cannot open " + path);
  EigenformDesc d;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    std::string key = line.substr(0, colon);
    std::string val = line.substr(colon + 1);
    auto strip = [](std::string& s) {
      while (!s.empty() && isspace((unsigned char)s.front())) s.erase(s.begin());
      while (!s.empty() && isspace((unsigned char)s.back())) s.pop_back();
    };
    strip(key);
    strip(val);
    if (key.empty() || val.empty()) continue;
    if (key == "name")
      d.name = val;
    else if (key == "level")
      d.N = std::stol(val);
    else if (key == "weight")
      d.k = std::stol(val);
    else if (key.size() > 1 && key[0] == 'a')
      d.ap[std::stol(key.substr(1))] = mpz_class(val);
    else
      throw std::runtime_error("load_eigenform_desc: unknown key '" + key + "'");
  }
  if (d.name.empty() || d.N < 1 || d.k < 2 || d.ap.empty())
    throw std::runtime_error("load_eigenform_desc: incomplete descriptor " + path);
  return d;
}

void save_eigenform_desc(const EigenformDesc& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_eigenform_desc: cannot open " + path);
  out << "name: " << d.name << "\n";
  out << "level: " << d.N << "\n";
  out << "weight: " << d.k << "\n";
  for (const auto& [ell, a] : d.ap) out << "a" << ell << ": " << a.get_str() << "\n";
}

RefinedEigenform refine_eigenform(const EigenformDesc& desc, long p, long M, long slope_choice) {
  if (!is_prime_l(p)) throw std::invalid_argument("refine_eigenform: p must be prime");
  RefinedEigenform F;
  F.desc = desc;
  F.p = p;
  F.k = desc.k;
  F.space0 = build_space(desc.N, desc.k);
  F.plus = eigen_symbol(F.space0, desc.ap, +1);
  F.minus = eigen_symbol(F.space0, desc.ap, -1);
  F.eps_global = root_number(F.space0, F.plus);
  if (root_number(F.space0, F.minus) != F.eps_global)
    throw std::logic_error("refine_eigenform: root numbers of the two signs disagree");

  if (desc.N % p == 0) {
    if ((desc.N / p) % p == 0)
      throw std::invalid_argument("refine_eigenform: p^2 | N is outside the Steinberg case");
    F.steinberg = true;
    F.n = desc.N / p;
    auto it = desc.ap.find(p);
    if (it == desc.ap.end())
      throw std::invalid_argument("refine_eigenform: descriptor lacks a_p for p | N");
    long half = (desc.k - 2) / 2;
    mpz_class pk2 = pow_p(p, half);
    if (it->second != pk2 && it->second != -pk2)
      throw std::domain_error("refine_eigenform: a_p is not +-p^{(k-2)/2}; not Steinberg at p");
    F.eps_p = (it->second == pk2) ? -1 : +1;  // eps_p = -a_p p^{-(k-2)/2}
    F.alpha = padic_from_integer(it->second, p, half + M);
    F.slope = half;
    F.space = F.space0;
    F.plus_p = to_padic_symbol(F.space0, F.plus, p, M);
    F.minus_p = to_padic_symbol(F.space0, F.minus, p, M);
  } else {
    F.steinberg = false;
    F.n = desc.N;
    F.eps_p = 0;
    F.space = build_space(desc.N * p, desc.k);
    Stabilization sp = p_stabilize(F.space0, F.space, F.plus, p, M, slope_choice);
    Stabilization sm = p_stabilize(F.space0, F.space, F.minus, p, M, slope_choice);
    auto it = desc.ap.find(p);
    if (it != desc.ap.end() && (sp.ap != it->second || sm.ap != it->second))
      throw std::logic_error("refine_eigenform: computed a_p disagrees with the descriptor");
    if (sp.ap != sm.ap)
      throw std::logic_error("refine_eigenform: signs yield different a_p");
    F.alpha = sp.alpha;
    F.slope = F.alpha.v;
    F.plus_p = sp.sym;
    F.minus_p = sm.sym;
  }
  F.eps_tilde = F.eps_global * (F.steinberg ? F.eps_p : 1);
  if (F.slope >= F.k - 1)
    throw std::domain_error("refine_eigenform: critical slope refinement is not liftable");
  return F;
}

}  // namespace lp
