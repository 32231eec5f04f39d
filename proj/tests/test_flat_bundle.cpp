#include <flatinv/flat_bundle.hpp>
#include <flatinv/superconnection.hpp>

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

using namespace flatinv;
using Eigen::MatrixXcd;

TEST_CASE("line bundle over the circle: closed-form odd class") {
  // Oracle, derived independently: with holonomy a > 0 and the parallel
  // metric h(x) = a^{-2x/L}, omega = h^{-1} dh = -(2 ln a / L) dx, so
  // c_1 = omega/2 = -(ln a / L) dx and its pairing with the oriented
  // fundamental cycle is +ln a.
  for (double a : {2.0, 3.0, 5.0}) {
    BaseGrid g = BaseGrid::circle(64, 1.0);
    MatrixXcd u(1, 1);
    u(0, 0) = a;
    FlatBundle fb(g, {u});
    const Complex pair = cycle_pairing(fb.c_total(), {0});
    CHECK(std::abs(pair - Complex(std::log(a))) < 1e-10);
  }
}

TEST_CASE("odd class is conjugation invariant") {
  BaseGrid g = BaseGrid::circle(32, 1.0);
  MatrixXcd u(2, 2);
  u << 2.0, 0.0, 0.0, 0.5;
  MatrixXcd s(2, 2);
  s << 1.0, 0.7, -0.2, 1.1;
  FlatBundle fb(g, {u});
  FlatBundle fc(g, {s * u * s.inverse()});
  CHECK(std::abs(cycle_pairing(fb.c_total(), {0}) - cycle_pairing(fc.c_total(), {0})) < 1e-9);
}

TEST_CASE("unitary holonomy has vanishing odd class") {
  BaseGrid g = BaseGrid::circle(48, 1.0);
  MatrixXcd u(2, 2);
  const double th = 0.6;
  u << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  FlatBundle fb(g, {u});
  CHECK(std::abs(cycle_pairing(fb.c_total(), {0})) < 1e-10);
}

TEST_CASE("torus pairing is additive over commuting holonomies") {
  BaseGrid g = BaseGrid::torus(16, 16, 1.0, 1.0);
  MatrixXcd u(1, 1), v(1, 1);
  u(0, 0) = 2.0;
  v(0, 0) = 3.0;
  FlatBundle fb(g, {u, v});
  GridField c = fb.c_total();
  CHECK(std::abs(cycle_pairing(c, {0}) - Complex(std::log(2.0))) < 1e-9);
  CHECK(std::abs(cycle_pairing(c, {1}) - Complex(std::log(3.0))) < 1e-9);
}

TEST_CASE("constructor rejects invalid data") {
  BaseGrid g = BaseGrid::circle(8, 1.0);
  MatrixXcd singular = MatrixXcd::Zero(2, 2);
  CHECK_THROWS(FlatBundle(g, {singular}));
  BaseGrid t = BaseGrid::torus(4, 4, 1.0, 1.0);
  MatrixXcd a(2, 2), b(2, 2);
  a << 1, 1, 0, 1;
  b << 1, 0, 1, 1;  // does not commute with a
  CHECK_THROWS(FlatBundle(t, {a, b}));
}

TEST_CASE("borel cocycle: alternation and normalization") {
  MatrixXcd h1(2, 2), h2(2, 2);
  h1 << 1.0, Complex(0.0, 0.5), Complex(0.0, -0.5), 0.3;
  h2 << 0.2, 0.4, 0.4, -1.0;
  // Phi_1 = tr, Phi_2(M, M) = 0 by antisymmetry.
  CHECK(std::abs(borel_cocycle({h1}) - h1.trace().real()) < 1e-14);
  CHECK(std::abs(borel_cocycle({h1, h1})) < 1e-12);
  CHECK(std::abs(borel_cocycle({h1, h2}) + borel_cocycle({h2, h1})) < 1e-12);
  MatrixXcd bad(2, 2);
  bad << 0.0, 1.0, 0.0, 0.0;
  CHECK_THROWS(borel_cocycle({bad}));
}
