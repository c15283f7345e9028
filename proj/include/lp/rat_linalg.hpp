#pragma once
// Dense exact linear algebra over Q (gmp rationals). Sized for the symbol
// spaces behind the guard in modsym, not for general numerics.

#include <gmpxx.h>

#include <stdexcept>
#include <vector>

namespace lp {

using QVec = std::vector<mpq_class>;
using QMat = std::vector<std::vector<mpq_class>>;  // row-major

inline mpq_class make_q(const mpz_class& num, const mpz_class& den) {
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

inline long qmat_rows(const QMat& A) { return (long)A.size(); }
inline long qmat_cols(const QMat& A) { return A.empty() ? 0 : (long)A[0].size(); }

inline QMat qmat_zero(long rows, long cols) { return QMat(rows, QVec(cols, mpq_class(0))); }

inline QMat qmat_identity(long n) {
  QMat A = qmat_zero(n, n);
  for (long i = 0; i < n; ++i) A[i][i] = 1;
  return A;
}

inline QMat qmat_transpose(const QMat& A) {
  QMat B = qmat_zero(qmat_cols(A), qmat_rows(A));
  for (long i = 0; i < qmat_rows(A); ++i)
    for (long j = 0; j < qmat_cols(A); ++j) B[j][i] = A[i][j];
  return B;
}

inline QMat qmat_mul(const QMat& A, const QMat& B) {
  if (qmat_cols(A) != qmat_rows(B)) throw std::invalid_argument("qmat_mul: shape mismatch");
  QMat C = qmat_zero(qmat_rows(A), qmat_cols(B));
  for (long i = 0; i < qmat_rows(A); ++i)
    for (long t = 0; t < qmat_cols(A); ++t) {
      if (A[i][t] == 0) continue;
      for (long j = 0; j < qmat_cols(B); ++j) C[i][j] += A[i][t] * B[t][j];
    }
  return C;
}

inline QVec qmat_apply(const QMat& A, const QVec& v) {
  if (qmat_cols(A) != (long)v.size()) throw std::invalid_argument("qmat_apply: shape mismatch");
  QVec out(qmat_rows(A), mpq_class(0));
  for (long i = 0; i < qmat_rows(A); ++i)
    for (long j = 0; j < qmat_cols(A); ++j)
      if (A[i][j] != 0 && v[j] != 0) out[i] += A[i][j] * v[j];
  return out;
}

inline QMat qmat_add(const QMat& A, const QMat& B) {
  QMat C = A;
  for (long i = 0; i < qmat_rows(A); ++i)
    for (long j = 0; j < qmat_cols(A); ++j) C[i][j] += B[i][j];
  return C;
}

inline QMat qmat_sub(const QMat& A, const QMat& B) {
  QMat C = A;
  for (long i = 0; i < qmat_rows(A); ++i)
    for (long j = 0; j < qmat_cols(A); ++j) C[i][j] -= B[i][j];
  return C;
}

inline QMat qmat_scale(const QMat& A, const mpq_class& s) {
  QMat C = A;
  for (auto& row : C)
    for (auto& x : row) x *= s;
  return C;
}

inline QMat qmat_pow(const QMat& A, long e) {
  if (qmat_rows(A) != qmat_cols(A)) throw std::invalid_argument("qmat_pow: not square");
  if (e < 0) throw std::invalid_argument("qmat_pow: negative exponent");
  QMat R = qmat_identity(qmat_rows(A));
  QMat B = A;
  while (e > 0) {
    if (e & 1) R = qmat_mul(R, B);
    e >>= 1;
    if (e > 0) B = qmat_mul(B, B);
  }
  return R;
}

// In-place reduced row echelon form; returns the rank. pivot_cols, if given,
// receives the pivot column of each of the first rank rows.
inline long qmat_rref(QMat& A, std::vector<long>* pivot_cols = nullptr) {
  long rows = qmat_rows(A), cols = qmat_cols(A);
  if (pivot_cols) pivot_cols->clear();
  long r = 0;
  for (long c = 0; c < cols && r < rows; ++c) {
    long piv = -1;
    for (long i = r; i < rows; ++i)
      if (A[i][c] != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(A[r], A[piv]);
    mpq_class inv = 1 / A[r][c];
    for (long j = c; j < cols; ++j) A[r][j] *= inv;
    for (long i = 0; i < rows; ++i) {
      if (i == r || A[i][c] == 0) continue;
      mpq_class f = A[i][c];
      for (long j = c; j < cols; ++j) A[i][j] -= f * A[r][j];
    }
    if (pivot_cols) pivot_cols->push_back(c);
    ++r;
  }
  return r;
}

inline long qmat_rank(QMat A) { return qmat_rref(A); }

// Kernel {x : Ax = 0}; columns of the result form a basis. Each basis vector
// carries 1 at "its" free column and 0 at the other free columns, so the
// coordinates of any kernel element can be read off at the free columns.
inline QMat qmat_kernel(const QMat& A, std::vector<long>* free_cols = nullptr) {
  long cols = qmat_cols(A);
  QMat R = A;
  std::vector<long> piv;
  long rank = qmat_rref(R, &piv);
  std::vector<bool> is_piv(cols, false);
  for (long c : piv) is_piv[c] = true;
  std::vector<long> free_list;
  for (long c = 0; c < cols; ++c)
    if (!is_piv[c]) free_list.push_back(c);
  QMat K = qmat_zero(cols, (long)free_list.size());
  for (long t = 0; t < (long)free_list.size(); ++t) {
    long f = free_list[t];
    K[f][t] = 1;
    for (long r = 0; r < rank; ++r) K[piv[r]][t] = -R[r][f];
  }
  if (free_cols) *free_cols = free_list;
  return K;
}

// Basis of the column space; columns of the result.
inline QMat qmat_column_space(const QMat& A) {
  QMat T = qmat_transpose(A);
  long rank = qmat_rref(T);
  QMat B = qmat_zero(qmat_cols(A), rank);
  for (long r = 0; r < rank; ++r)
    for (long i = 0; i < qmat_cols(A); ++i) B[i][r] = T[r][i];
  return B;
}

// Solve Ax = b exactly (free variables 0); throws if inconsistent.
inline QVec qmat_solve(const QMat& A, const QVec& b) {
  long rows = qmat_rows(A), cols = qmat_cols(A);
  if ((long)b.size() != rows) throw std::invalid_argument("qmat_solve: shape mismatch");
  QMat Aug = qmat_zero(rows, cols + 1);
  for (long i = 0; i < rows; ++i) {
    for (long j = 0; j < cols; ++j) Aug[i][j] = A[i][j];
    Aug[i][cols] = b[i];
  }
  std::vector<long> piv;
  long rank = qmat_rref(Aug, &piv);
  for (long r = 0; r < rank; ++r)
    if (piv[r] == cols) throw std::domain_error("qmat_solve: inconsistent system");
  QVec x(cols, mpq_class(0));
  for (long r = 0; r < rank; ++r) x[piv[r]] = Aug[r][cols];
  return x;
}

}  // namespace lp
