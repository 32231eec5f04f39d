// Exact-arithmetic matrix backend for the form algebra.  Only the ring
// operations are provided; this mode exists for wedge/supertrace identities,
// not for exponentials.

#ifndef FLATINV_RATIONAL_HPP
#define FLATINV_RATIONAL_HPP

#include <boost/rational.hpp>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "flatinv/form_matrix.hpp"

namespace flatinv {

using Rational = boost::rational<std::int64_t>;

class RationalMat {
 public:
  RationalMat() : rows_(0), cols_(0) {}
  RationalMat(int rows, int cols) : rows_(rows), cols_(cols), data_(rows * cols, Rational(0)) {}

  static RationalMat Zero(int r, int c) { return RationalMat(r, c); }
  static RationalMat Identity(int r, int c) {
    RationalMat m(r, c);
    for (int i = 0; i < r && i < c; ++i) m(i, i) = Rational(1);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  Rational& operator()(int i, int j) { return data_[i * cols_ + j]; }
  const Rational& operator()(int i, int j) const { return data_[i * cols_ + j]; }

  Rational trace() const {
    Rational t(0);
    for (int i = 0; i < rows_ && i < cols_; ++i) t += (*this)(i, i);
    return t;
  }

  RationalMat transpose() const {
    RationalMat m(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) m(j, i) = (*this)(i, j);
    return m;
  }

  RationalMat operator-() const {
    RationalMat m(rows_, cols_);
    for (std::size_t k = 0; k < data_.size(); ++k) m.data_[k] = -data_[k];
    return m;
  }
  RationalMat& operator+=(const RationalMat& o) {
    require_same_shape(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  friend RationalMat operator+(RationalMat a, const RationalMat& b) { return a += b; }
  friend RationalMat operator-(RationalMat a, const RationalMat& b) { return a += -b; }
  friend RationalMat operator*(const RationalMat& a, const RationalMat& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("RationalMat: shape mismatch");
    RationalMat m(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) {
        const Rational& aik = a(i, k);
        if (aik == Rational(0)) continue;
        for (int j = 0; j < b.cols_; ++j) m(i, j) += aik * b(k, j);
      }
    return m;
  }
  friend RationalMat operator*(RationalMat a, const Rational& s) {
    for (auto& v : a.data_) v *= s;
    return a;
  }

  bool is_zero() const {
    for (const auto& v : data_)
      if (v != Rational(0)) return false;
    return true;
  }

 private:
  void require_same_shape(const RationalMat& o) const {
    if (o.rows_ != rows_ || o.cols_ != cols_)
      throw std::invalid_argument("RationalMat: shape mismatch");
  }
  int rows_, cols_;
  std::vector<Rational> data_;
};

using RationalFormMatrix = BasicFormMatrix<RationalMat>;
using RationalGrading = BasicGrading<RationalMat>;

template <>
inline bool BasicFormMatrix<RationalMat>::coeff_is_zero(const RationalMat& c, double) {
  return c.is_zero();
}

inline bool is_exact_zero(const RationalFormMatrix& a) {
  for (const auto& [mask, c] : a.terms())
    if (!c.is_zero()) return false;
  return true;
}

}  // namespace flatinv

#endif  // FLATINV_RATIONAL_HPP
