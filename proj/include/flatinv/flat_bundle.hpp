// Flat complex vector bundles over a grid, given by commuting per-axis
// holonomies and a Hermitian metric field.  Produces the odd characteristic
// forms c_k and c of Bismut-Lott type and the Borel group cocycles.

#ifndef FLATINV_FLAT_BUNDLE_HPP
#define FLATINV_FLAT_BUNDLE_HPP

#include <algorithm>
#include <numeric>

#include "flatinv/grid.hpp"

namespace flatinv {

// Principal matrix power via eigendecomposition.  Adequate for the
// diagonalizable holonomies this library generates and ingests.
inline Eigen::MatrixXcd matrix_power(const Eigen::MatrixXcd& m, double s) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("matrix_power: eigendecomposition failed");
  Eigen::VectorXcd lam = es.eigenvalues();
  for (int i = 0; i < lam.size(); ++i) lam(i) = std::pow(lam(i), s);
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().inverse();
}

inline double commutator_norm(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  if (a.size() == 0) return 0.0;
  return (a * b - b * a).cwiseAbs().maxCoeff();
}

class FlatBundle {
 public:
  // Builds the bundle with the default metric h(x) = G(x)^dagger G(x),
  // G(x) = prod_a U_a^{-x_a / L_a}; the twist identity then holds by
  // construction.
  FlatBundle(const BaseGrid& grid, std::vector<Eigen::MatrixXcd> holonomies)
      : FlatBundle(grid, std::move(holonomies), GridField(), true) {}

  FlatBundle(const BaseGrid& grid, std::vector<Eigen::MatrixXcd> holonomies, GridField metric)
      : FlatBundle(grid, std::move(holonomies), std::move(metric), false) {}

  const BaseGrid& grid() const { return grid_; }
  int rank() const { return rank_; }
  const std::vector<Eigen::MatrixXcd>& holonomies() const { return holonomies_; }
  const GridField& metric() const { return metric_; }

  // omega(nabla, h) = h^{-1} (nabla h), realized nodewise as h^{-1} dh with a
  // central finite difference.  Degree-1 End(E)-valued field, conjugation
  // twist.
  GridField omega() const {
    if (grid_.dim == 0) {
      GridField out(grid_, rank_);
      return out;  // no 1-forms over a point
    }
    GridField dh = exterior_d(metric_);
    GridField out(grid_, rank_);
    for (int a = 0; a < grid_.dim; ++a) out.set_twist(a, AxisTwist::conjugation(holonomies_[a]));
    for (int n = 0; n < grid_.num_nodes(); ++n) {
      const Eigen::MatrixXcd h = metric_.at(n).coeff(0);
      Eigen::FullPivLU<Eigen::MatrixXcd> lu(h);
      if (!lu.isInvertible()) throw std::runtime_error("omega: singular metric node");
      const FormMatrix hinv = FormMatrix::from_term(grid_.dim, 0, lu.inverse());
      out.at(n) = wedge(hinv, dh.at(n));
    }
    return out;
  }

  // c_k = (2 i pi)^{-(k-1)/2} 2^{-k} Tr[omega^k], k odd.  Real scalar k-form.
  GridField c_k(int k) const {
    if (k % 2 == 0) throw std::invalid_argument("c_k: k must be odd");
    if (k > grid_.dim) throw std::invalid_argument("c_k: k exceeds base dimension");
    const GridField om = omega();
    const Complex norm =
        std::pow(sqrt_two_i_pi(), -(k - 1)) * std::pow(2.0, -k);
    GridField out(grid_, 1);
    for (int n = 0; n < grid_.num_nodes(); ++n) {
      FormMatrix p = om.at(n);
      for (int j = 1; j < k; ++j) p = wedge(p, om.at(n));
      out.at(n) = norm * form_trace(p);
    }
    return out;
  }

  // c = sum_j c_{2j+1} / j!, truncated at the base dimension.
  GridField c_total() const {
    GridField out(grid_, 1);
    double factorial = 1.0;
    for (int j = 0; 2 * j + 1 <= grid_.dim; ++j) {
      if (j > 0) factorial *= j;
      GridField term = c_k(2 * j + 1);
      term.scale(1.0 / factorial);
      out += term;
    }
    return out;
  }

 private:
  FlatBundle(const BaseGrid& grid, std::vector<Eigen::MatrixXcd> holonomies, GridField metric,
             bool build_default_metric)
      : grid_(grid), holonomies_(std::move(holonomies)) {
    grid_.validate();
    if (static_cast<int>(holonomies_.size()) != grid_.dim)
      throw std::invalid_argument("FlatBundle: one holonomy per axis required");
    rank_ = grid_.dim > 0 ? static_cast<int>(holonomies_[0].rows()) : 0;
    for (const auto& u : holonomies_) {
      if (u.rows() != u.cols() || static_cast<int>(u.rows()) != rank_)
        throw std::invalid_argument("FlatBundle: holonomy shape mismatch");
      if (rank_ == 0) continue;
      Eigen::FullPivLU<Eigen::MatrixXcd> lu(u);
      if (!lu.isInvertible()) throw std::invalid_argument("FlatBundle: singular holonomy");
    }
    for (std::size_t i = 0; i < holonomies_.size(); ++i)
      for (std::size_t j = i + 1; j < holonomies_.size(); ++j)
        if (commutator_norm(holonomies_[i], holonomies_[j]) > 1e-12)
          throw std::invalid_argument("FlatBundle: holonomies do not commute");

    if (grid_.dim == 0) {
      rank_ = metric.fiber_dim();
      metric_ = metric;
      return;
    }
    metric_ = build_default_metric ? default_metric() : std::move(metric);
    validate_metric();
  }

  GridField default_metric() const {
    GridField h(grid_, rank_);
    std::vector<Eigen::MatrixXcd> inv_roots;  // U_a^{-1/resolution_a}
    for (int a = 0; a < grid_.dim; ++a)
      inv_roots.push_back(matrix_power(holonomies_[a], -1.0 / grid_.resolution[a]));
    for (int n = 0; n < grid_.num_nodes(); ++n) {
      const auto idx = grid_.node_coords(n);
      Eigen::MatrixXcd g = Eigen::MatrixXcd::Identity(rank_, rank_);
      for (int a = 0; a < grid_.dim; ++a) g *= matrix_power(inv_roots[a], idx[a]);
      Eigen::MatrixXcd hm = g.adjoint() * g;
      hm = 0.5 * (hm + hm.adjoint());  // enforce exact Hermitianness
      h.at(n) = FormMatrix::from_term(grid_.dim, 0, hm);
    }
    for (int a = 0; a < grid_.dim; ++a) h.set_twist(a, AxisTwist::metric(holonomies_[a]));
    return h;
  }

  void validate_metric() const {
    if (metric_.fiber_dim() != rank_ || !(metric_.grid() == grid_))
      throw std::invalid_argument("FlatBundle: metric field layout mismatch");
    if (rank_ == 0) return;
    for (int n = 0; n < grid_.num_nodes(); ++n) {
      const Eigen::MatrixXcd h = metric_.at(n).coeff(0);
      if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("FlatBundle: metric not Hermitian");
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
      if (es.eigenvalues().minCoeff() <= 0.0)
        throw std::invalid_argument("FlatBundle: metric not positive-definite");
    }
  }

  BaseGrid grid_;
  int rank_ = 0;
  std::vector<Eigen::MatrixXcd> holonomies_;
  GridField metric_;
};

// Borel cocycle Phi_k(M_1, ..., M_k) = sum_{sigma in S_k} sign(sigma)
// Tr[M_{sigma(1)} ... M_{sigma(k)}].  Inputs must be Hermitian.
inline double borel_cocycle(const std::vector<Eigen::MatrixXcd>& ms) {
  const int k = static_cast<int>(ms.size());
  if (k < 1 || k > 6) throw std::invalid_argument("borel_cocycle: need 1 <= k <= 6");
  const int n = static_cast<int>(ms[0].rows());
  for (const auto& m : ms) {
    if (m.rows() != n || m.cols() != n)
      throw std::invalid_argument("borel_cocycle: dimension mismatch");
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12)
      throw std::invalid_argument("borel_cocycle: non-Hermitian input");
  }
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  Complex sum = 0.0;
  do {
    int inversions = 0;
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j)
        if (perm[i] > perm[j]) ++inversions;
    Eigen::MatrixXcd prod = ms[perm[0]];
    for (int i = 1; i < k; ++i) prod *= ms[perm[i]];
    sum += ((inversions & 1) ? -1.0 : 1.0) * prod.trace();
  } while (std::next_permutation(perm.begin(), perm.end()));
  return sum.real();
}

}  // namespace flatinv

#endif  // FLATINV_FLAT_BUNDLE_HPP
