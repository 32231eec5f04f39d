// Discrete base manifolds (point, circle, torus) carrying fields of
// matrix-valued forms, with a second-order finite-difference exterior
// derivative, interior products and integration over fundamental cycles.

#ifndef FLATINV_GRID_HPP
#define FLATINV_GRID_HPP

#include <array>
#include <functional>
#include <stdexcept>
#include <vector>

#include "flatinv/form_matrix.hpp"

namespace flatinv {

enum class GridKind { point, circle, torus };

struct BaseGrid {
  int dim = 0;                      // 0 <= d <= 3
  std::array<int, 3> resolution{};  // nodes per axis
  std::array<double, 3> periods{};  // circumference per axis
  GridKind kind = GridKind::point;

  static BaseGrid point() { return BaseGrid{}; }
  static BaseGrid circle(int nodes, double period = 2.0 * M_PI) {
    BaseGrid g;
    g.dim = 1;
    g.resolution[0] = nodes;
    g.periods[0] = period;
    g.kind = GridKind::circle;
    g.validate();
    return g;
  }
  static BaseGrid torus(int nx, int ny, double lx = 2.0 * M_PI, double ly = 2.0 * M_PI) {
    BaseGrid g;
    g.dim = 2;
    g.resolution = {nx, ny, 0};
    g.periods = {lx, ly, 0.0};
    g.kind = GridKind::torus;
    g.validate();
    return g;
  }

  void validate() const {
    if (dim < 0 || dim > 3) throw std::invalid_argument("BaseGrid: dim out of range");
    if ((dim == 0) != (kind == GridKind::point))
      throw std::invalid_argument("BaseGrid: point kind iff dim == 0");
    for (int a = 0; a < dim; ++a) {
      if (resolution[a] < 3) throw std::invalid_argument("BaseGrid: resolution too small");
      if (periods[a] <= 0.0) throw std::invalid_argument("BaseGrid: nonpositive period");
    }
  }

  int num_nodes() const {
    int n = 1;
    for (int a = 0; a < dim; ++a) n *= resolution[a];
    return n;
  }
  double spacing(int axis) const { return periods[axis] / resolution[axis]; }
  double coordinate(int axis, int index) const { return spacing(axis) * index; }

  int node_index(const std::array<int, 3>& idx) const {
    int n = 0;
    for (int a = dim - 1; a >= 0; --a) n = n * resolution[a] + idx[a];
    return n;
  }
  std::array<int, 3> node_coords(int node) const {
    std::array<int, 3> idx{};
    for (int a = 0; a < dim; ++a) {
      idx[a] = node % resolution[a];
      node /= resolution[a];
    }
    return idx;
  }

  bool operator==(const BaseGrid& o) const {
    return dim == o.dim && resolution == o.resolution && periods == o.periods && kind == o.kind;
  }
};

// Equivariance rule across one full period of an axis:
//   value(x + L e_a) = left * value(x) * right.
struct AxisTwist {
  Eigen::MatrixXcd left;
  Eigen::MatrixXcd right;

  static AxisTwist trivial(int r) {
    return AxisTwist{Eigen::MatrixXcd::Identity(r, r), Eigen::MatrixXcd::Identity(r, r)};
  }
  // Conjugation value -> U value U^{-1}.
  static AxisTwist conjugation(const Eigen::MatrixXcd& u) {
    return AxisTwist{u, u.inverse()};
  }
  // Metric rule h -> U^{-dagger} h U^{-1}.
  static AxisTwist metric(const Eigen::MatrixXcd& u) {
    const Eigen::MatrixXcd uinv = u.inverse();
    return AxisTwist{uinv.adjoint(), uinv};
  }

  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& v) const { return left * v * right; }
  Eigen::MatrixXcd apply_inverse(const Eigen::MatrixXcd& v) const {
    return left.inverse() * v * right.inverse();
  }
};

class GridField {
 public:
  GridField() = default;
  GridField(const BaseGrid& grid, int fiber_dim)
      : grid_(grid), fiber_dim_(fiber_dim),
        values_(grid.num_nodes(), FormMatrix(grid.dim, fiber_dim)) {
    for (int a = 0; a < grid.dim; ++a) twists_.push_back(AxisTwist::trivial(fiber_dim));
  }

  static GridField constant(const BaseGrid& grid, const FormMatrix& v) {
    GridField f(grid, v.fiber_dim());
    for (auto& node : f.values_) node = v;
    return f;
  }

  const BaseGrid& grid() const { return grid_; }
  int fiber_dim() const { return fiber_dim_; }
  int num_nodes() const { return static_cast<int>(values_.size()); }

  FormMatrix& at(int node) { return values_[node]; }
  const FormMatrix& at(int node) const { return values_[node]; }
  FormMatrix& at(const std::array<int, 3>& idx) { return values_[grid_.node_index(idx)]; }
  const FormMatrix& at(const std::array<int, 3>& idx) const {
    return values_[grid_.node_index(idx)];
  }

  void set_twist(int axis, const AxisTwist& t) { twists_[axis] = t; }
  const AxisTwist& twist(int axis) const { return twists_[axis]; }

  // Value at a logical index that may lie one period outside the grid; the
  // twist rule is applied when crossing a seam.
  FormMatrix value_wrapped(std::array<int, 3> idx) const {
    std::array<int, 3> shifts{};
    for (int a = 0; a < grid_.dim; ++a) {
      while (idx[a] >= grid_.resolution[a]) {
        idx[a] -= grid_.resolution[a];
        ++shifts[a];
      }
      while (idx[a] < 0) {
        idx[a] += grid_.resolution[a];
        --shifts[a];
      }
    }
    FormMatrix v = at(idx);
    for (int a = 0; a < grid_.dim; ++a) {
      for (int s = 0; s < shifts[a]; ++s) v = map_coeffs(v, twists_[a], false);
      for (int s = 0; s < -shifts[a]; ++s) v = map_coeffs(v, twists_[a], true);
    }
    return v;
  }

  double max_norm() const {
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, max_coeff_norm(v));
    return m;
  }

  GridField& operator+=(const GridField& o) {
    require_same_layout(o);
    for (int n = 0; n < num_nodes(); ++n) values_[n] += o.values_[n];
    return *this;
  }
  GridField& operator-=(const GridField& o) {
    require_same_layout(o);
    for (int n = 0; n < num_nodes(); ++n) values_[n] -= o.values_[n];
    return *this;
  }
  friend GridField operator+(GridField a, const GridField& b) { return a += b; }
  friend GridField operator-(GridField a, const GridField& b) { return a -= b; }
  template <class Scalar>
  GridField& scale(const Scalar& s) {
    for (auto& v : values_) v.scale(s);
    return *this;
  }

  // Applies op nodewise; the twist is inherited unchanged.
  GridField map(const std::function<FormMatrix(const FormMatrix&)>& op) const {
    GridField out = *this;
    for (auto& v : out.values_) v = op(v);
    return out;
  }

 private:
  static FormMatrix map_coeffs(const FormMatrix& v, const AxisTwist& t, bool inverse) {
    FormMatrix out(v.num_generators(), v.fiber_dim());
    for (const auto& [mask, c] : v.terms())
      out.add_term(mask, inverse ? t.apply_inverse(c) : t.apply(c));
    return out;
  }
  void require_same_layout(const GridField& o) const {
    if (!(o.grid_ == grid_) || o.fiber_dim_ != fiber_dim_)
      throw std::invalid_argument("GridField: incompatible fields");
  }

  BaseGrid grid_;
  int fiber_dim_ = 0;
  std::vector<FormMatrix> values_;
  std::vector<AxisTwist> twists_;
};

// Central second-order finite-difference exterior derivative.  The axis
// generator is wedged on the left; seams are crossed with the twist rule.
inline GridField exterior_d(const GridField& f) {
  const BaseGrid& g = f.grid();
  if (g.dim < 1) throw std::invalid_argument("exterior_d: no derivative on a point");
  GridField out(g, f.fiber_dim());
  for (int a = 0; a < g.dim; ++a) out.set_twist(a, f.twist(a));
  for (int n = 0; n < g.num_nodes(); ++n) {
    const auto idx = g.node_coords(n);
    FormMatrix acc(g.dim, f.fiber_dim());
    for (int a = 0; a < g.dim; ++a) {
      auto up = idx, dn = idx;
      ++up[a];
      --dn[a];
      FormMatrix diff = f.value_wrapped(up) - f.value_wrapped(dn);
      diff.scale(1.0 / (2.0 * g.spacing(a)));
      const FormMatrix da = FormMatrix::from_term(
          g.dim, 1u << a, Eigen::MatrixXcd::Identity(f.fiber_dim(), f.fiber_dim()));
      acc += wedge(da, diff);
    }
    out.at(n) = acc;
  }
  return out;
}

// Trapezoidal integral of the degree-|axes| component over the sub-torus
// through the origin node spanned by the given axes.  Scalar fields only.
inline Complex integrate_cycle(const GridField& f, const std::vector<int>& axes) {
  const BaseGrid& g = f.grid();
  if (f.fiber_dim() != 1)
    throw std::invalid_argument("integrate_cycle: scalar (fiber_dim 1) fields only");
  std::uint32_t mask = 0;
  for (int a : axes) {
    if (a < 0 || a >= g.dim) throw std::invalid_argument("integrate_cycle: bad axis");
    mask |= 1u << a;
  }
  double weight = 1.0;
  for (int a : axes) weight *= g.spacing(a);

  // Iterate over the sub-grid spanned by the chosen axes, other indices 0.
  Complex sum = 0.0;
  std::vector<int> order(axes.begin(), axes.end());
  const int k = static_cast<int>(order.size());
  std::vector<int> counter(k, 0);
  while (true) {
    std::array<int, 3> idx{};
    for (int j = 0; j < k; ++j) idx[order[j]] = counter[j];
    sum += f.at(idx).coeff(mask)(0, 0);
    int j = 0;
    for (; j < k; ++j) {
      if (++counter[j] < g.resolution[order[j]]) break;
      counter[j] = 0;
    }
    if (j == k) break;
    if (k == 0) break;
  }
  if (k == 0) sum = f.at(std::array<int, 3>{}).coeff(0)(0, 0);
  return sum * weight;
}

// Pairing against the fundamental cycle oriented by the classifying-map
// convention, which reverses each grid axis: an extra (-1) per axis.  With
// this orientation the circle pairing of c_1 against a holonomy lambda > 0
// returns +ln(lambda).
inline Complex cycle_pairing(const GridField& f, const std::vector<int>& axes) {
  const double orient = (axes.size() % 2 == 0) ? 1.0 : -1.0;
  return orient * integrate_cycle(f, axes);
}

// Interior product with the direction of the first axis: drops generator 0
// from each multi-index containing it (with the shuffle sign), deletes the
// other terms.
inline GridField contract_parameter(const GridField& f) {
  const BaseGrid& g = f.grid();
  if (g.dim < 1) throw std::invalid_argument("contract_parameter: needs dim >= 1");
  return f.map([&](const FormMatrix& v) {
    FormMatrix out(v.num_generators(), v.fiber_dim());
    for (const auto& [mask, c] : v.terms()) {
      if (!(mask & 1u)) continue;
      // Generator 0 is leftmost in the canonical order, so no extra sign.
      out.add_term(mask & ~1u, c);
    }
    return out;
  });
}

}  // namespace flatinv

#endif  // FLATINV_GRID_HPP
