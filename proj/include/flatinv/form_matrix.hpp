// Exterior algebra on up to 8 anticommuting generators with square-matrix
// coefficients.  This is the workhorse algebra in which all characteristic
// forms, superconnection squares and heat-form traces are evaluated.
//
// Multi-indices are bitmasks over the generators; a term (mask, B) stands for
// e^{i1} ∧ ... ∧ e^{ik} ⊗ B with i1 < ... < ik the set bits of mask.

#ifndef FLATINV_FORM_MATRIX_HPP
#define FLATINV_FORM_MATRIX_HPP

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace flatinv {

using Complex = std::complex<double>;

// Parity of the shuffle moving the generators of `right` through those of
// `left` (disjoint masks).  +1 or -1.
inline int shuffle_sign(std::uint32_t left, std::uint32_t right) {
  int swaps = 0;
  for (std::uint32_t j = right; j != 0; j &= j - 1) {
    const int bit = std::countr_zero(j);
    swaps += std::popcount(left >> (bit + 1));
  }
  return (swaps & 1) ? -1 : 1;
}

template <class MatT>
class BasicFormMatrix {
 public:
  BasicFormMatrix() : num_generators_(0), fiber_dim_(0) {}
  BasicFormMatrix(int num_generators, int fiber_dim)
      : num_generators_(num_generators), fiber_dim_(fiber_dim) {
    if (num_generators < 0 || num_generators > 8)
      throw std::invalid_argument("form_matrix: need 0 <= N <= 8 generators");
    if (fiber_dim < 0) throw std::invalid_argument("form_matrix: negative fiber dim");
  }

  static BasicFormMatrix identity(int num_generators, int fiber_dim) {
    BasicFormMatrix a(num_generators, fiber_dim);
    a.add_term(0, MatT::Identity(fiber_dim, fiber_dim));
    return a;
  }

  static BasicFormMatrix from_term(int num_generators, std::uint32_t mask, const MatT& coeff) {
    BasicFormMatrix a(num_generators, static_cast<int>(coeff.rows()));
    a.add_term(mask, coeff);
    return a;
  }

  int num_generators() const { return num_generators_; }
  int fiber_dim() const { return fiber_dim_; }
  const std::map<std::uint32_t, MatT>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  void add_term(std::uint32_t mask, const MatT& coeff) {
    check_mask(mask);
    if (coeff.rows() != fiber_dim_ || coeff.cols() != fiber_dim_)
      throw std::invalid_argument("form_matrix: coefficient dimension mismatch");
    auto it = terms_.find(mask);
    if (it == terms_.end())
      terms_.emplace(mask, coeff);
    else
      it->second += coeff;
  }

  MatT coeff(std::uint32_t mask) const {
    auto it = terms_.find(mask);
    if (it == terms_.end()) return MatT::Zero(fiber_dim_, fiber_dim_);
    return it->second;
  }

  BasicFormMatrix& operator+=(const BasicFormMatrix& o) {
    require_compatible(o);
    for (const auto& [mask, c] : o.terms_) add_term(mask, c);
    return *this;
  }
  BasicFormMatrix& operator-=(const BasicFormMatrix& o) {
    require_compatible(o);
    for (const auto& [mask, c] : o.terms_) add_term(mask, MatT(-c));
    return *this;
  }
  friend BasicFormMatrix operator+(BasicFormMatrix a, const BasicFormMatrix& b) { return a += b; }
  friend BasicFormMatrix operator-(BasicFormMatrix a, const BasicFormMatrix& b) { return a -= b; }

  template <class Scalar>
  BasicFormMatrix& scale(const Scalar& s) {
    for (auto& [mask, c] : terms_) c = MatT(c * s);
    return *this;
  }
  template <class Scalar>
  friend BasicFormMatrix operator*(const Scalar& s, BasicFormMatrix a) {
    return a.scale(s);
  }

  // Keeps only the terms of form degree k.
  BasicFormMatrix degree_component(int k) const {
    BasicFormMatrix out(num_generators_, fiber_dim_);
    for (const auto& [mask, c] : terms_)
      if (std::popcount(mask) == k) out.add_term(mask, c);
    return out;
  }

  BasicFormMatrix even_part() const { return parity_part(0); }
  BasicFormMatrix odd_part() const { return parity_part(1); }

  void drop_zero_terms(double tol = 0.0) {
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (coeff_is_zero(it->second, tol))
        it = terms_.erase(it);
      else
        ++it;
    }
  }

 private:
  BasicFormMatrix parity_part(int parity) const {
    BasicFormMatrix out(num_generators_, fiber_dim_);
    for (const auto& [mask, c] : terms_)
      if ((std::popcount(mask) & 1) == parity) out.add_term(mask, c);
    return out;
  }

  void check_mask(std::uint32_t mask) const {
    if (mask >> num_generators_)
      throw std::invalid_argument("form_matrix: multi-index outside generator range");
  }
  void require_compatible(const BasicFormMatrix& o) const {
    if (o.num_generators_ != num_generators_ || o.fiber_dim_ != fiber_dim_)
      throw std::invalid_argument("form_matrix: incompatible operands");
  }
  static bool coeff_is_zero(const MatT& c, double tol);

  int num_generators_;
  int fiber_dim_;
  std::map<std::uint32_t, MatT> terms_;
};

// Graded product: matrix coefficients multiply in order, generator masks merge
// with the shuffle sign.
template <class MatT>
BasicFormMatrix<MatT> wedge(const BasicFormMatrix<MatT>& a, const BasicFormMatrix<MatT>& b) {
  if (a.num_generators() != b.num_generators() || a.fiber_dim() != b.fiber_dim())
    throw std::invalid_argument("wedge: incompatible operands");
  BasicFormMatrix<MatT> out(a.num_generators(), a.fiber_dim());
  for (const auto& [ma, ca] : a.terms()) {
    for (const auto& [mb, cb] : b.terms()) {
      if (ma & mb) continue;
      const int sign = shuffle_sign(ma, mb);
      MatT prod = ca * cb;
      if (sign < 0) prod = -prod;
      out.add_term(ma | mb, prod);
    }
  }
  return out;
}

// Z2-grading data.  tau is the involution; trace against tau gives Tr_s.
template <class MatT>
struct BasicGrading {
  MatT tau;
};

// Supertrace Tr_s[a] = Tr[tau a], extended termwise over form degrees.
// Result is a scalar form (fiber dimension 1).
template <class MatT>
BasicFormMatrix<MatT> supertrace(const BasicFormMatrix<MatT>& a, const BasicGrading<MatT>& g) {
  if (g.tau.rows() != a.fiber_dim() || g.tau.cols() != a.fiber_dim())
    throw std::invalid_argument("supertrace: grading dimension mismatch");
  BasicFormMatrix<MatT> out(a.num_generators(), 1);
  for (const auto& [mask, c] : a.terms()) {
    MatT tr = MatT::Zero(1, 1);
    tr(0, 0) = (g.tau * c).trace();
    out.add_term(mask, tr);
  }
  return out;
}

// Plain trace per term (no grading twist); scalar form result.
template <class MatT>
BasicFormMatrix<MatT> form_trace(const BasicFormMatrix<MatT>& a) {
  BasicFormMatrix<MatT> out(a.num_generators(), 1);
  for (const auto& [mask, c] : a.terms()) {
    MatT tr = MatT::Zero(1, 1);
    tr(0, 0) = c.trace();
    out.add_term(mask, tr);
  }
  return out;
}

// Supercommutator [a, b] = ab - (-1)^{|a||b|} ba for homogeneous a, b.  The
// graded sign is handled termwise, so mixed-degree inputs are fine.
template <class MatT>
BasicFormMatrix<MatT> supercommutator(const BasicFormMatrix<MatT>& a,
                                      const BasicFormMatrix<MatT>& b) {
  BasicFormMatrix<MatT> out(a.num_generators(), a.fiber_dim());
  for (const auto& [ma, ca] : a.terms()) {
    for (const auto& [mb, cb] : b.terms()) {
      if (ma & mb) continue;
      const int sign = shuffle_sign(ma, mb);
      MatT prod = ca * cb;
      if (sign < 0) prod = -prod;
      out.add_term(ma | mb, prod);
      const int degsign = ((std::popcount(ma) * std::popcount(mb)) & 1) ? -1 : 1;
      const int bsign = shuffle_sign(mb, ma) * degsign;
      MatT prod2 = cb * ca;
      if (bsign > 0) prod2 = -prod2;
      out.add_term(mb | ma, prod2);
    }
  }
  return out;
}

// Transpose in the sense of Bismut-Lott: degree-j coefficients pick up the
// sign (-1)^{j(j+1)/2} and transpose without conjugation.
template <class MatT>
BasicFormMatrix<MatT> form_transpose(const BasicFormMatrix<MatT>& a) {
  BasicFormMatrix<MatT> out(a.num_generators(), a.fiber_dim());
  for (const auto& [mask, c] : a.terms()) {
    const int j = std::popcount(mask);
    const int sign = ((j * (j + 1) / 2) & 1) ? -1 : 1;
    MatT t = c.transpose();
    if (sign < 0) t = -t;
    out.add_term(mask, t);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Complex-coefficient instantiation and the transcendental operations.

using FormMatrix = BasicFormMatrix<Eigen::MatrixXcd>;
using Grading = BasicGrading<Eigen::MatrixXcd>;

template <>
inline bool BasicFormMatrix<Eigen::MatrixXcd>::coeff_is_zero(const Eigen::MatrixXcd& c,
                                                             double tol) {
  return c.size() == 0 || c.cwiseAbs().maxCoeff() <= tol;
}

inline double max_coeff_norm(const FormMatrix& a) {
  double m = 0.0;
  for (const auto& [mask, c] : a.terms())
    if (c.size() > 0) m = std::max(m, c.cwiseAbs().maxCoeff());
  return m;
}

inline double total_coeff_norm(const FormMatrix& a) {
  double s = 0.0;
  for (const auto& [mask, c] : a.terms()) s += c.norm();
  return s;
}

inline bool all_finite(const FormMatrix& a) {
  for (const auto& [mask, c] : a.terms())
    if (!c.allFinite()) return false;
  return true;
}

// exp(-a) by scaling-and-squaring with a truncated Taylor series evaluated in
// the full algebra.  Body and soul need not commute, so no body/soul split.
inline FormMatrix exp_neg(const FormMatrix& a) {
  if (!all_finite(a)) throw std::invalid_argument("exp_neg: non-finite coefficients");
  const int n = a.num_generators();
  const int r = a.fiber_dim();
  FormMatrix m = -1.0 * a;
  int squarings = 0;
  double norm = total_coeff_norm(m);
  while (norm > 0.5 && squarings < 60) {
    m.scale(0.5);
    norm *= 0.5;
    ++squarings;
  }
  FormMatrix sum = FormMatrix::identity(n, r);
  FormMatrix term = FormMatrix::identity(n, r);
  for (int k = 1; k <= 80; ++k) {
    term = wedge(term, m);
    term.scale(1.0 / k);
    sum += term;
    if (total_coeff_norm(term) < 1e-18) break;
  }
  for (int s = 0; s < squarings; ++s) sum = wedge(sum, sum);
  sum.drop_zero_terms(0.0);
  return sum;
}

// Principal branch of (2 i pi)^{1/2}.
inline Complex sqrt_two_i_pi() {
  return std::sqrt(2.0 * M_PI) * std::polar(1.0, M_PI / 4.0);
}

// Normalization phi: degree-k terms scaled by (2 i pi)^{-k/2}.
inline FormMatrix phi(const FormMatrix& a) {
  const Complex root = sqrt_two_i_pi();
  FormMatrix out(a.num_generators(), a.fiber_dim());
  for (const auto& [mask, c] : a.terms()) {
    const int k = std::popcount(mask);
    out.add_term(mask, Eigen::MatrixXcd(c * std::pow(root, -k)));
  }
  return out;
}

inline FormMatrix phi_inverse(const FormMatrix& a) {
  const Complex root = sqrt_two_i_pi();
  FormMatrix out(a.num_generators(), a.fiber_dim());
  for (const auto& [mask, c] : a.terms()) {
    const int k = std::popcount(mask);
    out.add_term(mask, Eigen::MatrixXcd(c * std::pow(root, k)));
  }
  return out;
}

inline FormMatrix cos_form(const FormMatrix& a) {
  const Complex i(0.0, 1.0);
  FormMatrix out = exp_neg(-i * a) + exp_neg(i * a);
  out.scale(0.5);
  return out;
}

inline FormMatrix sin_form(const FormMatrix& a) {
  const Complex i(0.0, 1.0);
  FormMatrix out = exp_neg(-i * a) - exp_neg(i * a);
  out.scale(Complex(0.0, -0.5));
  return out;
}

// f(z) = z e^{z^2} evaluated in the algebra.
inline FormMatrix f_of(const FormMatrix& x) {
  return wedge(x, exp_neg(-1.0 * wedge(x, x)));
}

// f'(z) = e^{z^2}(1 + 2 z^2) evaluated in the algebra.
inline FormMatrix f_prime_of(const FormMatrix& x) {
  const FormMatrix x2 = wedge(x, x);
  FormMatrix poly = FormMatrix::identity(x.num_generators(), x.fiber_dim()) + 2.0 * x2;
  return wedge(exp_neg(-1.0 * x2), poly);
}

}  // namespace flatinv

#endif  // FLATINV_FORM_MATRIX_HPP
