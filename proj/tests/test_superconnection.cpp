#include <flatinv/instances.hpp>
#include <flatinv/superconnection.hpp>

#include <catch2/catch_amalgamated.hpp>
#include <cmath>

using namespace flatinv;
using Eigen::MatrixXcd;

namespace {

FlatComplexBundle two_term_point(double c) {
  BaseGrid g = BaseGrid::point();
  MatrixXcd v = MatrixXcd::Zero(2, 2);
  v(1, 0) = c;
  GridField met(g, 2);
  met.at(0) = FormMatrix::from_term(0, 0, MatrixXcd::Identity(2, 2));
  return FlatComplexBundle(FlatBundle(g, {}, met), {1, 1}, v);
}

}  // namespace

TEST_CASE("point torsion form reproduces minus the log of the differential") {
  for (double c : {0.5, 1.7, 4.0}) {
    GridField tf = two_term_point(c).torsion_form(1e-8, 1e8, 1e-12);
    CHECK(std::abs(tf.at(0).coeff(0)(0, 0).real() + std::log(c)) < 1e-9);
    CHECK(std::abs(tf.at(0).coeff(0)(0, 0).imag()) < 1e-12);
  }
}

TEST_CASE("f-form with trivial grading equals the odd class") {
  BaseGrid g = BaseGrid::circle(48, 1.0);
  MatrixXcd u(2, 2);
  u << 2.0, 0.3, 0.0, 0.7;
  FlatBundle fb(g, {u});
  CHECK((f_form(fb) - fb.c_total()).max_norm() < 1e-12);
}

TEST_CASE("graded weights count the number operator") {
  FlatComplexBundle fc = two_term_point(2.0);
  CHECK(fc.d_weight() == -1);            // sum (-1)^i i rank_i = -1
  CHECK(fc.d_weight_cohomology() == 0);  // acyclic
}

TEST_CASE("transgression of the torsion form on the circle") {
  BaseGrid g = BaseGrid::circle(48, 1.0);
  FlatComplexBundle fc = instances::random_complex_bundle(g, {1, 2, 1}, 42);
  GridField tf = fc.torsion_form(1e-6, 1e6, 1e-9);
  GridField fe = f_form(fc.bundle(), fc.grading());
  auto hb = fc.cohomology_bundle();
  GridField fh = f_form(hb.bundle, hb.tau);
  CHECK((exterior_d(tf) - (fe - fh)).max_norm() < 5e-3);
}

TEST_CASE("cohomology bundle of an acyclic complex is empty") {
  FlatComplexBundle fc = two_term_point(2.0);
  auto hb = fc.cohomology_bundle();
  int total = 0;
  for (int r : hb.graded_ranks) total += r;
  CHECK(total == 0);
}

TEST_CASE("complex constructor validates its axioms") {
  BaseGrid g = BaseGrid::circle(8, 1.0);
  MatrixXcd u = 2.0 * MatrixXcd::Identity(2, 2);
  MatrixXcd bad_square(2, 2);
  bad_square << 0.0, 1.0, 1.0, 0.0;  // v^2 != 0
  CHECK_THROWS(FlatComplexBundle(FlatBundle(g, {u}), {1, 1}, bad_square));
  MatrixXcd not_commuting = MatrixXcd::Zero(2, 2);
  not_commuting(1, 0) = 1.0;
  MatrixXcd diag(2, 2);
  diag << 2.0, 0.0, 0.0, 3.0;
  CHECK_THROWS(FlatComplexBundle(FlatBundle(g, {diag}), {1, 1}, not_commuting));
}
