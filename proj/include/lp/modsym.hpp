#pragma once
// Classical modular symbols for Gamma_0(N), even weight k >= 2: Manin
// presentation, Hecke action, eigen symbols, p-stabilization, twisted special
// values and root numbers. All classical linear algebra is exact-rational;
// base change to PadicNumber happens once, when a refinement is chosen.

#include <array>
#include <map>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "lp/cyclo.hpp"
#include "lp/padic.hpp"
#include "lp/rat_linalg.hpp"

namespace lp {

// 2x2 integer matrix, row-major [a, b; c, d].
using M2 = std::array<mpz_class, 4>;

M2 m2_mul(const M2& x, const M2& y);
M2 m2_inv(const M2& x);  // det(x) = +-1 required
mpz_class m2_det(const M2& x);

// Matrix of the right action of gamma on functionals: values live on the
// monomials z^0..z^g and (L|gamma)(z^m) = sum_r act[m][r] L(z^r) with
// act[m][r] = [z^r] (a+cz)^{g-m} (b+dz)^m. Composition: act(xy) = act(y)act(x).
std::vector<std::vector<mpz_class>> action_matrix(const M2& gamma, long g);

// Point of P^1(Q): num/den coprime, den >= 0; infinity = (1, 0).
struct Cusp {
  mpz_class num, den;
};
Cusp make_cusp(const mpz_class& num, const mpz_class& den);
inline Cusp cusp_infinity() { return Cusp{1, 0}; }

struct ManinSymbolSpace {
  long N = 1;
  long k = 2;
  long g = 0;  // k - 2
  std::vector<std::pair<long, long>> p1;  // canonical (c, d) per generator
  std::vector<M2> lifts;                  // unimodular lift of each generator
  std::vector<long> p1_table;             // (c*N + d) -> generator index
  long n_gen = 0;
  long dim_total = 0;  // n_gen * (k - 1)
  QMat basis;          // dim_total x dim_space; kernel of the Manin relations
  std::vector<long> coord_rows;  // rows where the basis restricts to identity
  long dim_space = 0;
  QMat iota;  // sign involution on basis coordinates; iota^2 = 1

  long index_of(const mpz_class& c, const mpz_class& d) const;
};

// Guard: N*(k-1) <= 4000 (dense exact linear algebra).
ManinSymbolSpace build_space(long N, long k);

inline long flat_index(const ManinSymbolSpace& S, long i, long m) { return i * (S.k - 1) + m; }

// Coordinates w.r.t. basis; throws if the vector violates the relations.
QVec coords_of(const ManinSymbolSpace& S, const QVec& big);
QVec big_of(const ManinSymbolSpace& S, const QVec& coords);

// Unimodular terms of the continued-fraction decomposition
// {infty -> x} = sum_t h_t D0 (empty when x is infinity).
std::vector<M2> unimodular_path(const Cusp& x);

// Phi(h D0) for unimodular h, as the (g+1)-vector of values at z^0..z^g.
QVec eval_unimodular(const ManinSymbolSpace& S, const QVec& big, const M2& h);
std::vector<PadicNumber> eval_unimodular(const ManinSymbolSpace& S,
                                         const std::vector<PadicNumber>& big, const M2& h);

// Phi({x -> y}) via the continued-fraction decomposition into unimodular paths.
QVec eval_path(const ManinSymbolSpace& S, const QVec& big, const Cusp& x, const Cusp& y);
std::vector<PadicNumber> eval_path(const ManinSymbolSpace& S, const std::vector<PadicNumber>& big,
                                   const Cusp& x, const Cusp& y);

// T_ell (ell nmid N) or U_ell (ell | N) on basis coordinates.
QMat hecke_matrix(const ManinSymbolSpace& S, long ell);
// Same operator applied to a big vector (p-adic coefficients).
std::vector<PadicNumber> hecke_apply(const ManinSymbolSpace& S,
                                     const std::vector<PadicNumber>& big, long ell);

long cuspidal_dimension(const ManinSymbolSpace& S);

struct ClassicalSymbol {
  long N = 1, k = 2;
  QVec big;  // length dim_total
  std::map<long, mpz_class> record;
  int sign = +1;
  // generator of the integral eigenlattice: norm_scalar * big is the
  // primitive integer vector of the Manin lattice
  mpq_class norm_scalar = 1;
};

// Unique joint eigenvector, scaled so its values on the (1 + sign*iota)-image
// of the integral cuspidal homology generate Z; throws a multiplicity error
// (reporting the dimension) if the eigenspace is not a line.
ClassicalSymbol eigen_symbol(const ManinSymbolSpace& S, const std::map<long, mpz_class>& record,
                             int sign);

struct PadicSymbol {
  long N = 1, k = 2, p = 0;
  std::vector<PadicNumber> big;
};

PadicSymbol to_padic_symbol(const ManinSymbolSpace& S, const ClassicalSymbol& phi, long p, long M);

struct Stabilization {
  PadicNumber alpha;  // chosen U_p eigenvalue, classical normalization
  mpz_class ap;       // trace of U_p on the old span (= a_p of the form)
  PadicSymbol sym;    // level N*p symbol with U_p sym = alpha sym
};

// p nmid N. slope_choice 0 -> unit root (requires p nmid a_p);
// slope_choice k-1 -> the complementary root p^{k-1}/alpha.
Stabilization p_stabilize(const ManinSymbolSpace& SN, const ManinSymbolSpace& SNp,
                          const ClassicalSymbol& phi, long p, long M, long slope_choice = 0);

// sum_{a mod p^c} chi(a) * Phi({infty -> a/p^c})(z^j), c = conductor exponent.
CycloElement classical_special_value(const ManinSymbolSpace& S, const QVec& big,
                                     const DirichletChar& chi, long j, long M);
CycloElement classical_special_value(const ManinSymbolSpace& S,
                                     const std::vector<PadicNumber>& big,
                                     const DirichletChar& chi, long j);

// Sign of the completed functional equation, from the Fricke action on the
// symbol line: eps = (-1)^{k/2} mu / N^{(k-2)/2} where W_N phi = mu phi.
int root_number(const ManinSymbolSpace& S, const ClassicalSymbol& phi);

struct EigenformDesc {
  std::string name;
  long N = 1, k = 2;
  std::map<long, mpz_class> ap;
};
EigenformDesc load_eigenform_desc(const std::string& path);
void save_eigenform_desc(const EigenformDesc& d, const std::string& path);

struct RefinedEigenform {
  EigenformDesc desc;
  long p = 0, k = 2;
  long n = 1;  // tame level
  bool steinberg = false;
  int eps_p = 0;  // +-1 when Steinberg at p
  int eps_global = 0;
  int eps_tilde = 0;  // eps_global * (eps_p if Steinberg)
  long slope = 0;     // v_p(alpha)
  PadicNumber alpha;
  ManinSymbolSpace space0;  // level of the eigenform
  ManinSymbolSpace space;   // level of the refined symbols (N or N*p)
  ClassicalSymbol plus, minus;
  PadicSymbol plus_p, minus_p;  // U_p-eigensymbols with eigenvalue alpha
};

// Build symbols for desc, pick the refinement at p, stabilize both signs.
// M is the relative p-adic working precision of alpha and the symbols.
RefinedEigenform refine_eigenform(const EigenformDesc& desc, long p, long M,
                                  long slope_choice = 0);

}  // namespace lp
