#include <flatinv/grid.hpp>

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

using namespace flatinv;
using Eigen::MatrixXcd;

namespace {

GridField scalar_field(const BaseGrid& g, const std::function<double(double, double)>& f) {
  GridField out(g, 1);
  for (int n = 0; n < g.num_nodes(); ++n) {
    const auto idx = g.node_coords(n);
    const double x = g.dim > 0 ? g.coordinate(0, idx[0]) : 0.0;
    const double y = g.dim > 1 ? g.coordinate(1, idx[1]) : 0.0;
    out.at(n) = FormMatrix::from_term(g.dim, 0, MatrixXcd::Constant(1, 1, f(x, y)));
  }
  return out;
}

}  // namespace

TEST_CASE("grid layouts") {
  CHECK(BaseGrid::point().num_nodes() == 1);
  CHECK(BaseGrid::point().dim == 0);
  CHECK(BaseGrid::circle(16, 2.0).num_nodes() == 16);
  CHECK(BaseGrid::torus(4, 6, 1.0, 1.5).num_nodes() == 24);
  BaseGrid t = BaseGrid::torus(4, 6, 1.0, 1.5);
  const auto idx = t.node_coords(t.num_nodes() - 1);
  CHECK(idx[0] == 3);
  CHECK(idx[1] == 5);
}

TEST_CASE("exterior derivative is second-order accurate") {
  auto err_at = [](int res) {
    BaseGrid g = BaseGrid::circle(res, 1.0);
    GridField f = scalar_field(g, [](double x, double) { return std::sin(2 * M_PI * x); });
    GridField df = exterior_d(f);
    double worst = 0.0;
    for (int n = 0; n < g.num_nodes(); ++n) {
      const double x = g.coordinate(0, n);
      const double exact = 2 * M_PI * std::cos(2 * M_PI * x);
      worst = std::max(worst, std::abs(df.at(n).coeff(1u)(0, 0) - exact));
    }
    return worst;
  };
  const double e32 = err_at(32), e64 = err_at(64);
  CHECK(e32 / e64 > 3.0);
  CHECK(e32 / e64 < 5.0);
}

TEST_CASE("d squares to zero on the torus") {
  BaseGrid g = BaseGrid::torus(12, 12, 1.0, 1.0);
  GridField f = scalar_field(g, [](double x, double y) {
    return std::sin(2 * M_PI * x) * std::cos(2 * M_PI * y);
  });
  GridField ddf = exterior_d(exterior_d(f));
  CHECK(ddf.max_norm() < 1e-12);
}

TEST_CASE("cycle pairing integrates exact periods to zero and picks up winding") {
  BaseGrid g = BaseGrid::circle(64, 1.0);
  // d(sin) integrates to zero around the circle.
  GridField f = scalar_field(g, [](double x, double) { return std::sin(2 * M_PI * x); });
  CHECK(std::abs(cycle_pairing(exterior_d(f), {0})) < 1e-12);
  // A constant-coefficient 1-form integrates to (orientation) x period.
  GridField w(g, 1);
  for (int n = 0; n < g.num_nodes(); ++n)
    w.at(n) = FormMatrix::from_term(1, 1u, MatrixXcd::Constant(1, 1, 1.0));
  CHECK(std::abs(cycle_pairing(w, {0}) - Complex(-1.0)) < 1e-12);
}

TEST_CASE("twisted fields differentiate consistently across the seam") {
  // Field v(x) = U^{-x/L} c with conjugation twist: exterior_d must see a
  // smooth field; residual against the exact derivative is O(h^2).
  auto err_at = [](int res) {
    BaseGrid g = BaseGrid::circle(res, 1.0);
    MatrixXcd u(1, 1);
    u(0, 0) = 2.0;
    GridField f(g, 1);
    f.set_twist(0, AxisTwist::metric(u));
    for (int n = 0; n < g.num_nodes(); ++n) {
      const double x = g.coordinate(0, n);
      f.at(n) = FormMatrix::from_term(1, 0,
                                      MatrixXcd::Constant(1, 1, std::pow(2.0, -2.0 * x)));
    }
    GridField df = exterior_d(f);
    double worst = 0.0;
    for (int n = 0; n < g.num_nodes(); ++n) {
      const double x = g.coordinate(0, n);
      const double exact = -2.0 * std::log(2.0) * std::pow(2.0, -2.0 * x);
      worst = std::max(worst, std::abs(df.at(n).coeff(1u)(0, 0) - exact));
    }
    return worst;
  };
  const double e32 = err_at(32), e64 = err_at(64);
  CHECK(e32 / e64 > 3.0);
  CHECK(e32 / e64 < 5.0);
}
