// Finite cochain complexes with preferred volumes: field and integral
// cohomology, Reidemeister torsion, additivity residuals, and the
// torsion/volume K-group classes.

#ifndef FLATINV_BASED_COMPLEX_HPP
#define FLATINV_BASED_COMPLEX_HPP

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "exact_int.hpp"

namespace flatinv {

// Cochain complex 0 -> C^0 -> ... -> C^len -> 0 with a volume scale per
// degree.  d[p] maps C^p to C^{p+1}; volumes[p] is the covolume assigned to
// the standard basis of C^p.
struct BasedComplex {
  std::vector<int> ranks;
  std::vector<Eigen::MatrixXd> d;  // d[p] has shape ranks[p+1] x ranks[p]
  std::vector<double> volumes;

  int length() const { return static_cast<int>(ranks.size()) - 1; }

  int euler_characteristic() const {
    int chi = 0, sign = 1;
    for (int r : ranks) {
      chi += sign * r;
      sign = -sign;
    }
    return chi;
  }

  void validate(double tol = 1e-9) const {
    const int len = length();
    if (static_cast<int>(d.size()) != len)
      throw std::invalid_argument("BasedComplex: need one differential per adjacent pair");
    if (volumes.size() != ranks.size())
      throw std::invalid_argument("BasedComplex: need one volume per degree");
    for (double v : volumes)
      if (!(v > 0.0)) throw std::invalid_argument("BasedComplex: volumes must be positive");
    for (int p = 0; p < len; ++p) {
      if (d[p].rows() != ranks[p + 1] || d[p].cols() != ranks[p])
        throw std::invalid_argument("BasedComplex: differential shape mismatch");
      if (p + 1 < len && d[p].size() > 0 && d[p + 1].size() > 0) {
        Eigen::MatrixXd sq = d[p + 1] * d[p];
        if (sq.size() > 0 && sq.cwiseAbs().maxCoeff() > tol)
          throw std::invalid_argument("BasedComplex: d^2 != 0");
      }
    }
  }

  Eigen::MatrixXd differential(int p) const {
    if (p < 0 || p >= length()) return Eigen::MatrixXd::Zero(0, p >= 0 && p < static_cast<int>(ranks.size()) ? ranks[p] : 0);
    return d[p];
  }
};

inline IntMat to_int_mat(const Eigen::MatrixXd& m, double tol = 1e-6) {
  IntMat out(static_cast<int>(m.rows()), static_cast<int>(m.cols()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      double v = m(i, j);
      long long r = std::llround(v);
      if (std::abs(v - static_cast<double>(r)) > tol)
        throw std::invalid_argument("to_int_mat: entry is not an integer");
      out(i, j) = r;
    }
  return out;
}

inline int matrix_rank(const Eigen::MatrixXd& m, double tol = 1e-10) {
  if (m.rows() == 0 || m.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  double cut = tol * std::max(1.0, s.size() > 0 ? s(0) : 0.0);
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > cut) ++r;
  return r;
}

inline int betti_number(const BasedComplex& c, int p) {
  const Eigen::MatrixXd dp = c.differential(p);
  const Eigen::MatrixXd dm = p > 0 ? c.differential(p - 1) : Eigen::MatrixXd::Zero(c.ranks[p], 0);
  return c.ranks[p] - matrix_rank(dp) - matrix_rank(dm);
}

// Orthonormal basis of the harmonic subspace of C^p (standard inner product;
// scaling the metric by a scalar per degree leaves this subspace unchanged).
inline Eigen::MatrixXd harmonic_basis(const BasedComplex& c, int p) {
  const int r = c.ranks[p];
  if (r == 0) return Eigen::MatrixXd::Zero(0, 0);
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(r, r);
  if (p < c.length()) lap += c.d[p].transpose() * c.d[p];
  if (p > 0) lap += c.d[p - 1] * c.d[p - 1].transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap);
  const int h = betti_number(c, p);
  return es.eigenvectors().leftCols(h);
}

// Integral cohomology of a complex whose differentials have integer entries.
struct IntegralCohomology {
  int free_rank = 0;
  std::vector<BigInt> torsion;  // invariant factors > 1
  BigInt torsion_order = 1;
  // Integral cocycles in C^p whose classes form a basis of the free part.
  Eigen::MatrixXd free_representatives;
};

inline IntegralCohomology cohomology_integral(const BasedComplex& c, int p) {
  IntegralCohomology out;
  const int r = c.ranks[p];
  IntMat dp = p < c.length() ? to_int_mat(c.d[p]) : IntMat(0, r);
  IntMat dm = p > 0 ? to_int_mat(c.d[p - 1]) : IntMat(r, 0);

  IntMat ker = kernel_basis(dp);  // r x k, saturated lattice
  const int k = ker.cols;
  if (k == 0) {
    out.free_representatives = Eigen::MatrixXd::Zero(r, 0);
    return out;
  }
  // Express the image of d^{p-1} in the kernel basis; the quotient is H^p.
  IntMat x = dm.cols > 0 ? solve_in_lattice(ker, dm) : IntMat(k, 0);
  SmithResult sn = x.cols > 0 ? smith_normal_form(x) : SmithResult{};
  if (x.cols == 0) {
    sn.u = IntMat::identity(k);
    sn.rank = 0;
  }
  out.free_rank = k - sn.rank;
  for (const auto& f : sn.factors)
    if (f > 1) {
      out.torsion.push_back(f);
      out.torsion_order *= f;
    }
  // With s = u x v, the quotient Z^k / im(x) splits along the rows of u:
  // rows sn.rank..k-1 of u give the free part.  Pull back to C^p through the
  // kernel basis: free generators are ker * u^{-1} columns; equivalently the
  // columns of ker * (u inverse).  u is unimodular, so invert exactly.
  // The dual description: generators of the free quotient are the images of
  // the basis vectors e_i (i >= rank) under u^{-1} composed with ker.
  // Compute u^{-1} by solving u * y = I over the integers.
  IntMat uinv = solve_in_lattice(sn.u, IntMat::identity(k));
  out.free_representatives = Eigen::MatrixXd::Zero(r, out.free_rank);
  for (int j = 0; j < out.free_rank; ++j)
    for (int i = 0; i < r; ++i) {
      BigInt acc = 0;
      for (int t = 0; t < k; ++t) acc += ker(i, t) * uinv(t, sn.rank + j);
      out.free_representatives(i, j) = static_cast<double>(acc);
    }
  return out;
}

// Volume data on a cohomology group: cocycle representatives of a preferred
// basis together with the covolume that basis is declared to have.
struct HVolume {
  Eigen::MatrixXd representatives;
  double covolume = 1.0;
};

namespace detail {

inline double log_det_prime_laplacian(const BasedComplex& c, int p, const std::vector<double>& g) {
  const int r = c.ranks[p];
  if (r == 0) return 0.0;
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(r, r);
  if (p < c.length()) lap += (g[p + 1] / g[p]) * (c.d[p].transpose() * c.d[p]);
  if (p > 0) lap += (g[p] / g[p - 1]) * (c.d[p - 1] * c.d[p - 1].transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap, Eigen::EigenvaluesOnly);
  const int h = betti_number(c, p);
  double acc = 0.0;
  for (int i = h; i < r; ++i) {
    if (es.eigenvalues()(i) <= 0.0)
      throw std::runtime_error("log_det_prime_laplacian: nonpositive nonzero mode");
    acc += std::log(es.eigenvalues()(i));
  }
  return acc;
}

}  // namespace detail

// Reidemeister torsion of the complex with its volume data.  Normalized so
// that 0 -> R --c--> R -> 0 with unit volumes has T = ln|c|.  Cohomology
// volumes enter through the mismatch between the metric volume on harmonics
// and the declared covolume of the preferred basis.
inline double reidemeister_torsion(const BasedComplex& c,
                                   const std::map<int, HVolume>& vols_on_h = {}) {
  c.validate();
  const int len = c.length();
  std::vector<double> g(len + 1);
  for (int p = 0; p <= len; ++p)
    g[p] = c.ranks[p] > 0 ? std::pow(c.volumes[p], -2.0 / c.ranks[p]) : 1.0;

  double t = 0.0;
  for (int p = 0; p <= len; ++p) {
    const int sign = (p % 2 == 0) ? 1 : -1;
    t -= 0.5 * sign * p * detail::log_det_prime_laplacian(c, p, g);

    const int h = betti_number(c, p);
    if (h == 0) continue;
    auto it = vols_on_h.find(p);
    if (it == vols_on_h.end()) continue;  // default: metric harmonic basis, term vanishes
    const Eigen::MatrixXd& reps = it->second.representatives;
    const double w = it->second.covolume;
    if (reps.cols() != h || reps.rows() != c.ranks[p])
      throw std::invalid_argument("reidemeister_torsion: representative shape mismatch");
    // Metric covolume of the harmonic projections of the preferred basis
    // (the projector is metric independent: the scaling is scalar per degree).
    Eigen::MatrixXd hb = harmonic_basis(c, p);
    Eigen::MatrixXd proj = hb * (hb.transpose() * reps);
    Eigen::MatrixXd gram = g[p] * (proj.transpose() * proj);
    double det = gram.determinant();
    if (!(det > 0.0))
      throw std::runtime_error("reidemeister_torsion: degenerate cohomology basis");
    double vol_l2 = 0.5 * std::log(det);
    t += sign * (vol_l2 + std::log(w));
  }
  return t;
}

// Additivity of torsion over a short exact sequence of complexes
// 0 -> B -> C -> D -> 0, degreewise maps i[p]: B^p -> C^p, j[p]: C^p -> D^p.
// Returns |T(B) - T(C) + T(D) - T(H) - sum_p (-1)^p T(B^p, C^p, D^p)|, where
// H is the long exact cohomology sequence viewed as an acyclic complex.
// Cohomology volumes are taken to be the metric harmonic volumes throughout.
inline double milnor_additivity_residual(const BasedComplex& b, const BasedComplex& c,
                                         const BasedComplex& d,
                                         const std::vector<Eigen::MatrixXd>& i_maps,
                                         const std::vector<Eigen::MatrixXd>& j_maps) {
  const int len = b.length();
  if (c.length() != len || d.length() != len)
    throw std::invalid_argument("milnor_additivity_residual: length mismatch");

  auto scaled_harmonics = [](const BasedComplex& x, int p) {
    double gp = x.ranks[p] > 0 ? std::pow(x.volumes[p], -2.0 / x.ranks[p]) : 1.0;
    return Eigen::MatrixXd(harmonic_basis(x, p) / std::sqrt(gp));
  };

  // The long exact sequence in scaled-orthonormal harmonic bases.
  std::vector<Eigen::MatrixXd> hb(len + 1), hc(len + 1), hd(len + 1);
  std::vector<double> gb(len + 1), gc(len + 1), gd(len + 1);
  for (int p = 0; p <= len; ++p) {
    hb[p] = scaled_harmonics(b, p);
    hc[p] = scaled_harmonics(c, p);
    hd[p] = scaled_harmonics(d, p);
    gb[p] = b.ranks[p] > 0 ? std::pow(b.volumes[p], -2.0 / b.ranks[p]) : 1.0;
    gc[p] = c.ranks[p] > 0 ? std::pow(c.volumes[p], -2.0 / c.ranks[p]) : 1.0;
    gd[p] = d.ranks[p] > 0 ? std::pow(d.volumes[p], -2.0 / d.ranks[p]) : 1.0;
  }
  auto class_coords = [](const Eigen::MatrixXd& basis, double g, const Eigen::MatrixXd& z) {
    // Coordinates of the harmonic part of z in the scaled-orthonormal basis.
    return Eigen::MatrixXd(g * (basis.transpose() * z));
  };

  BasedComplex h;
  h.ranks.assign(3 * (len + 1), 0);
  h.volumes.assign(3 * (len + 1), 1.0);
  for (int p = 0; p <= len; ++p) {
    h.ranks[3 * p] = static_cast<int>(hb[p].cols());
    h.ranks[3 * p + 1] = static_cast<int>(hc[p].cols());
    h.ranks[3 * p + 2] = static_cast<int>(hd[p].cols());
  }
  h.d.resize(3 * (len + 1) - 1);
  for (int p = 0; p <= len; ++p) {
    h.d[3 * p] = class_coords(hc[p], gc[p], i_maps[p] * hb[p]);
    h.d[3 * p + 1] = class_coords(hd[p], gd[p], j_maps[p] * hc[p]);
    if (p < len) {
      // Connecting map: lift along j, apply d, pull back along i.
      Eigen::MatrixXd lift = j_maps[p].completeOrthogonalDecomposition().solve(
          Eigen::MatrixXd(hd[p]));
      Eigen::MatrixXd w = c.d[p] * lift;
      Eigen::MatrixXd pre = i_maps[p + 1].completeOrthogonalDecomposition().solve(w);
      h.d[3 * p + 2] = class_coords(hb[p + 1], gb[p + 1], pre);
    }
  }

  double lhs = reidemeister_torsion(b) - reidemeister_torsion(c) + reidemeister_torsion(d);
  // The long exact sequence carries odd overall parity here; for an acyclic
  // complex a degree shift negates the torsion.
  double rhs = -reidemeister_torsion(h);
  for (int p = 0; p <= len; ++p) {
    BasedComplex ses;
    ses.ranks = {b.ranks[p], c.ranks[p], d.ranks[p]};
    ses.volumes = {b.volumes[p], c.volumes[p], d.volumes[p]};
    ses.d = {i_maps[p], j_maps[p]};
    double t = reidemeister_torsion(ses);
    rhs += (p % 2 == 0 ? 1.0 : -1.0) * t;
  }
  return std::abs(lhs - rhs);
}

// Class in the real-plus-integer K-group of torsion pairs: (r, n) with
// r = ln|torsion| - ln(covolume) and n the free rank.
struct K0volElement {
  double r = 0.0;
  long n = 0;

  K0volElement operator+(const K0volElement& o) const { return {r + o.r, n + o.n}; }
  K0volElement operator-(const K0volElement& o) const { return {r - o.r, n - o.n}; }
  K0volElement operator-() const { return {-r, -n}; }
  K0volElement scaled(int k) const { return {k * r, k * n}; }
};

inline K0volElement k0vol_class(const BigInt& torsion_order, int free_rank, double covolume) {
  if (torsion_order <= 0) throw std::invalid_argument("k0vol_class: torsion order must be positive");
  return {std::log(torsion_order.convert_to<double>()) - std::log(covolume), free_rank};
}

inline K0volElement a_map(double torsion) { return {-torsion, 0}; }

}  // namespace flatinv

#endif  // FLATINV_BASED_COMPLEX_HPP
