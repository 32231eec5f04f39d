// Exact integer matrix kit: Smith normal form with unimodular transforms,
// kernel lattices and exact linear solves.  Torsion orders are the payload,
// so everything here runs over arbitrary-precision integers.

#ifndef FLATINV_EXACT_INT_HPP
#define FLATINV_EXACT_INT_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <stdexcept>
#include <vector>

namespace flatinv {

using BigInt = boost::multiprecision::cpp_int;
using BigRat = boost::multiprecision::cpp_rational;

struct IntMat {
  int rows = 0, cols = 0;
  std::vector<BigInt> data;

  IntMat() = default;
  IntMat(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c) {}
  BigInt& operator()(int i, int j) { return data[static_cast<std::size_t>(i) * cols + j]; }
  const BigInt& operator()(int i, int j) const {
    return data[static_cast<std::size_t>(i) * cols + j];
  }
  static IntMat identity(int n) {
    IntMat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }
  bool is_zero() const {
    for (const auto& v : data)
      if (v != 0) return false;
    return true;
  }
};

inline IntMat mul(const IntMat& a, const IntMat& b) {
  if (a.cols != b.rows) throw std::invalid_argument("IntMat: shape mismatch");
  IntMat m(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int k = 0; k < a.cols; ++k) {
      if (a(i, k) == 0) continue;
      for (int j = 0; j < b.cols; ++j) m(i, j) += a(i, k) * b(k, j);
    }
  return m;
}

struct SmithResult {
  IntMat s;                      // s = u * a * v, diagonal with divisibility chain
  IntMat u, v;                   // unimodular
  int rank = 0;                  // number of nonzero invariant factors
  std::vector<BigInt> factors;   // positive invariant factors
};

// Smith normal form by pivoting on a minimal nonzero entry.
inline SmithResult smith_normal_form(IntMat a) {
  SmithResult res;
  res.u = IntMat::identity(a.rows);
  res.v = IntMat::identity(a.cols);

  auto swap_rows = [&](int r1, int r2) {
    if (r1 == r2) return;
    for (int j = 0; j < a.cols; ++j) std::swap(a(r1, j), a(r2, j));
    for (int j = 0; j < a.rows; ++j) std::swap(res.u(r1, j), res.u(r2, j));
  };
  auto swap_cols = [&](int c1, int c2) {
    if (c1 == c2) return;
    for (int i = 0; i < a.rows; ++i) std::swap(a(i, c1), a(i, c2));
    for (int i = 0; i < a.cols; ++i) std::swap(res.v(i, c1), res.v(i, c2));
  };
  auto add_row = [&](int dst, int src, const BigInt& f) {  // row dst += f * row src
    for (int j = 0; j < a.cols; ++j) a(dst, j) += f * a(src, j);
    for (int j = 0; j < a.rows; ++j) res.u(dst, j) += f * res.u(src, j);
  };
  auto add_col = [&](int dst, int src, const BigInt& f) {
    for (int i = 0; i < a.rows; ++i) a(i, dst) += f * a(i, src);
    for (int i = 0; i < a.cols; ++i) res.v(i, dst) += f * res.v(i, src);
  };
  auto negate_row = [&](int r) {
    for (int j = 0; j < a.cols; ++j) a(r, j) = -a(r, j);
    for (int j = 0; j < a.rows; ++j) res.u(r, j) = -res.u(r, j);
  };

  int t = 0;
  while (t < a.rows && t < a.cols) {
    // Find a minimal-magnitude nonzero pivot in the trailing block.
    int pi = -1, pj = -1;
    BigInt best = 0;
    for (int i = t; i < a.rows; ++i)
      for (int j = t; j < a.cols; ++j) {
        if (a(i, j) == 0) continue;
        BigInt m = abs(a(i, j));
        if (pi < 0 || m < best) {
          best = m;
          pi = i;
          pj = j;
        }
      }
    if (pi < 0) break;
    swap_rows(t, pi);
    swap_cols(t, pj);

    bool clean = false;
    while (!clean) {
      clean = true;
      for (int i = t + 1; i < a.rows; ++i) {
        if (a(i, t) == 0) continue;
        BigInt q = a(i, t) / a(t, t);
        add_row(i, t, -q);
        if (a(i, t) != 0) {
          swap_rows(t, i);
          clean = false;
        }
      }
      for (int j = t + 1; j < a.cols; ++j) {
        if (a(t, j) == 0) continue;
        BigInt q = a(t, j) / a(t, t);
        add_col(j, t, -q);
        if (a(t, j) != 0) {
          swap_cols(t, j);
          clean = false;
        }
      }
    }
    if (a(t, t) < 0) negate_row(t);
    ++t;
  }
  res.s = a;  // diagonal; the transforms satisfy s = u a v
  res.rank = t;
  // The invariant-factor chain follows from the diagonal by gcd/lcm sorting.
  std::vector<BigInt> d;
  for (int i = 0; i < t; ++i) d.push_back(a(i, i));
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = i + 1; j < d.size(); ++j) {
      BigInt g = gcd(d[i], d[j]);
      BigInt l = d[i] / g * d[j];
      d[i] = g;
      d[j] = l;
    }
  res.factors = d;
  return res;
}

// Columns forming a basis of the (saturated) integer kernel lattice of a.
inline IntMat kernel_basis(const IntMat& a) {
  SmithResult sn = smith_normal_form(a);
  const int k = a.cols - sn.rank;
  IntMat out(a.cols, k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < a.cols; ++i) out(i, j) = sn.v(i, sn.rank + j);
  return out;
}

// Solves k * x = b exactly, where the columns of b lie in the lattice spanned
// by the columns of k (full column rank).  Throws if no integral solution.
inline IntMat solve_in_lattice(const IntMat& k, const IntMat& b) {
  SmithResult sn = smith_normal_form(k);  // s = u k v
  if (sn.rank != k.cols) throw std::invalid_argument("solve_in_lattice: basis not independent");
  // k = u^{-1} s v^{-1}; x = v s^{+} u b, requiring exact division.
  IntMat ub = mul(sn.u, b);
  IntMat y(k.cols, b.cols);
  for (int i = 0; i < sn.rank; ++i)
    for (int j = 0; j < b.cols; ++j) {
      if (ub(i, j) % sn.s(i, i) != 0)
        throw std::invalid_argument("solve_in_lattice: non-integral solution");
      y(i, j) = ub(i, j) / sn.s(i, i);
    }
  for (int i = sn.rank; i < ub.rows; ++i)
    for (int j = 0; j < b.cols; ++j)
      if (ub(i, j) != 0) throw std::invalid_argument("solve_in_lattice: inconsistent system");
  return mul(sn.v, y);
}

}  // namespace flatinv

#endif  // FLATINV_EXACT_INT_HPP
