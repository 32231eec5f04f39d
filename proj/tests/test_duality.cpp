#include <flatinv/duality.hpp>
#include <flatinv/instances.hpp>

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

using namespace flatinv;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;

TEST_CASE("signature of constant symmetric pairings") {
  MatrixXcd p(3, 3);
  p.setZero();
  p(0, 0) = 2.0;
  p(1, 1) = -1.0;
  p(2, 2) = 0.5;
  CHECK(signature(p) == 1);
  CHECK_THROWS(signature(MatrixXcd::Zero(2, 2)));
}

TEST_CASE("symplectic normal form on known blocks") {
  // R(pi/3) has angle multiset {pi/3}; diag(2, 1/2) is purely hyperbolic.
  MatrixXd r(2, 2);
  const double th = M_PI / 3.0;
  r << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  SymplecticNormalForm nf = symplectic_normal_form(r);
  REQUIRE(nf.angles.size() == 1);
  CHECK(std::abs(nf.angles[0] - th) < 1e-10);
  CHECK(nf.hyperbolic_rank == 0);

  MatrixXd hyp(2, 2);
  hyp << 2.0, 0.0, 0.0, 0.5;
  nf = symplectic_normal_form(hyp);
  CHECK(nf.angles.empty());
  CHECK(nf.hyperbolic_rank == 2);
}

TEST_CASE("normal form is invariant under symplectic conjugation") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    instances::AssembledSymplectic a = instances::assembled_symplectic(seed, 1, 1);
    SymplecticNormalForm nf = symplectic_normal_form(a.matrix);
    REQUIRE(nf.angles.size() == a.angles.size());
    for (std::size_t i = 0; i < a.angles.size(); ++i)
      CHECK(std::abs(nf.angles[i] - a.angles[i]) < 1e-8);
    CHECK(nf.hyperbolic_rank == a.hyperbolic_rank);
  }
}

TEST_CASE("duality bundle rejects inadmissible data") {
  BaseGrid g = BaseGrid::circle(8, 1.0);
  MatrixXd om = MatrixXd::Zero(2, 2);
  om(0, 1) = 1.0;
  om(1, 0) = -1.0;
  // J = +Omega makes <.,.> = (., J.) negative-definite: rejected.
  GridField jf(g, 2);
  for (int n = 0; n < g.num_nodes(); ++n)
    jf.at(n) = FormMatrix::from_term(1, 0, MatrixXcd(om.cast<Complex>()));
  CHECK_THROWS(DualityBundle(g, -1, om.cast<Complex>(),
                             instances::identity_holonomies(g, 2), jf));
  // J = -Omega is admissible.
  GridField jg(g, 2);
  for (int n = 0; n < g.num_nodes(); ++n)
    jg.at(n) = FormMatrix::from_term(1, 0, MatrixXcd((-om).cast<Complex>()));
  CHECK_NOTHROW(DualityBundle(g, -1, om.cast<Complex>(),
                              instances::identity_holonomies(g, 2), jg));
}

TEST_CASE("p-form equals the Chern character difference nodewise") {
  BaseGrid g = BaseGrid::torus(10, 10, 1.0, 1.0);
  for (int eps : {1, -1}) {
    DualityBundle b = (eps == 1) ? instances::random_duality_bundle(g, 1, 2, 1, 5)
                                 : instances::random_duality_bundle(g, -1, 2, 0, 6);
    auto [chp, chm] = b.chern_plus_minus();
    CHECK((b.p_form() - (chp - chm)).max_norm() < 1e-10);
  }
}

TEST_CASE("p-form is closed and real on the torus") {
  BaseGrid g = BaseGrid::torus(16, 16, 1.0, 1.0);
  DualityBundle b = instances::random_duality_bundle(g, -1, 2, 0, 9, 0.3);
  GridField p = b.p_form();
  CHECK(exterior_d(p).max_norm() < 1e-10);
  double imag = 0.0;
  for (int n = 0; n < g.num_nodes(); ++n)
    for (const auto& [mask, c] : p.at(n).terms())
      imag = std::max(imag, c.imag().cwiseAbs().maxCoeff());
  CHECK(imag < 1e-10);
}

TEST_CASE("rank-one bundles with eps=-1 pairing force p = 0") {
  // With a one-dimensional fibre there is no real J with J^2 = -1, so the
  // smallest eps=-1 bundle is rank 2 with off-diagonal J and vanishing p.
  BaseGrid g = BaseGrid::circle(16, 1.0);
  DualityBundle b = instances::random_duality_bundle(g, -1, 1, 0, 3);
  CHECK(b.p_form().max_norm() < 1e-12);
}

TEST_CASE("heat supertrace at a point is conserved") {
  instances::DoubledData d = instances::doubled_data(1, 1, 1, 2, 21);
  DualityComplex dc = instances::random_duality_complex(BaseGrid::point(), d, 22, 0.5);
  const double a = dc.heat_trace(0.05).real();
  const double b = dc.heat_trace(5.0).real();
  const double c = dc.heat_trace(50.0).real();
  CHECK(std::abs(a - b) < 1e-8);
  CHECK(std::abs(b - c) < 1e-8);
  DualityComplex h = dc.induced_duality();
  const double tr_jh = h.bundle().j_field().at(0).coeff(0).trace().real();
  CHECK(std::abs(c - tr_jh) < 1e-8);
  CHECK(std::abs(tr_jh - 2.0) < 1e-10);  // middle block of signature two survives
}

TEST_CASE("flat pair squares vanish nodewise") {
  instances::DoubledData d = instances::doubled_data(-1, 1, 0, 2, 31, true, 0, true);
  BaseGrid g = BaseGrid::circle(24, 1.0);
  DualityComplex dc = instances::random_duality_complex(g, d, 32, 0.4);
  CHECK((dc.v() * dc.v()).cwiseAbs().maxCoeff() < 1e-12);
  for (int n = 0; n < g.num_nodes(); ++n) {
    const MatrixXcd vs = dc.v_star_at(n);
    CHECK((vs * vs).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("induced duality of an acyclic complex is the zero bundle") {
  instances::DoubledData d = instances::doubled_data(1, 1, 1, 0, 41);
  DualityComplex dc = instances::random_duality_complex(BaseGrid::circle(16, 1.0), d, 42, 0.3);
  DualityComplex h = dc.induced_duality();
  CHECK(h.rank() == 0);
  CHECK(h.p_form().max_norm() == 0.0);
}

TEST_CASE("eta integrand derivative matches the p-form derivative in t") {
  // d/dt p(t) = d eta(t): finite differences in t against the exterior
  // derivative on a coarse circle; the match is limited by discretization.
  instances::DoubledData d = instances::doubled_data(-1, 2, 1, 0, 51, false);
  BaseGrid g = BaseGrid::circle(48, 1.0);
  DualityComplex dc = instances::random_duality_complex(g, d, 52, 0.4);
  const double t0 = 0.7, dt = 1e-4;
  GridField dp = (dc.p_of_t(t0 + dt) - dc.p_of_t(t0 - dt)).scale(1.0 / (2 * dt));
  GridField de = exterior_d(dc.eta_t(t0));
  CHECK((dp - de).max_norm() < 5e-2 * std::max(1.0, dp.max_norm()));
}
