#include <flatinv/form_matrix.hpp>
#include <flatinv/rational.hpp>

#include <catch2/catch_amalgamated.hpp>
#include <random>

using namespace flatinv;
using Eigen::MatrixXcd;

namespace {

MatrixXcd rand_mat(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> nd;
  MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = Complex(nd(rng), nd(rng));
  return m;
}

FormMatrix rand_form(std::mt19937_64& rng, int gens, int dim, int nterms = 3) {
  std::uniform_int_distribution<std::uint32_t> mask(0, (1u << gens) - 1);
  FormMatrix a(gens, dim);
  for (int t = 0; t < nterms; ++t) a.add_term(mask(rng), rand_mat(rng, dim));
  return a;
}

double norm_of(const FormMatrix& a) { return max_coeff_norm(a); }

}  // namespace

TEST_CASE("wedge is associative and distributes") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 5; ++rep) {
    FormMatrix a = rand_form(rng, 3, 2), b = rand_form(rng, 3, 2), c = rand_form(rng, 3, 2);
    CHECK(norm_of(wedge(wedge(a, b), c) - wedge(a, wedge(b, c))) < 1e-12);
    CHECK(norm_of(wedge(a, b + c) - (wedge(a, b) + wedge(a, c))) < 1e-12);
  }
}

TEST_CASE("scalar generators anticommute") {
  FormMatrix dx = FormMatrix::from_term(2, 1u, MatrixXcd::Identity(1, 1));
  FormMatrix dy = FormMatrix::from_term(2, 2u, MatrixXcd::Identity(1, 1));
  FormMatrix s = wedge(dx, dy) + wedge(dy, dx);
  CHECK(norm_of(s) < 1e-15);
  CHECK(norm_of(wedge(dx, dx)) < 1e-15);
}

TEST_CASE("supertrace kills supercommutators") {
  std::mt19937_64 rng(11);
  MatrixXcd tau = MatrixXcd::Zero(4, 4);
  for (int i = 0; i < 4; ++i) tau(i, i) = i < 2 ? 1.0 : -1.0;
  Grading g{tau};
  for (int rep = 0; rep < 10; ++rep) {
    FormMatrix a = rand_form(rng, 3, 4), b = rand_form(rng, 3, 4);
    CHECK(norm_of(supertrace(supercommutator(a, b), g)) < 1e-12);
  }
}

TEST_CASE("supertrace of supercommutators vanishes exactly in rational mode") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<std::int64_t> num(-5, 5);
  std::uniform_int_distribution<std::int64_t> den(1, 4);
  std::uniform_int_distribution<std::uint32_t> mask(0, 7);
  RationalMat tau(4, 4);
  for (int i = 0; i < 4; ++i) tau(i, i) = Rational(i < 2 ? 1 : -1);
  RationalGrading g{tau};
  auto rand_rat_form = [&]() {
    RationalFormMatrix a(3, 4);
    for (int t = 0; t < 3; ++t) {
      RationalMat c(4, 4);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) c(i, j) = Rational(num(rng), den(rng));
      a.add_term(mask(rng), c);
    }
    return a;
  };
  for (int rep = 0; rep < 100; ++rep) {
    RationalFormMatrix a = rand_rat_form(), b = rand_rat_form();
    CHECK(is_exact_zero(supertrace(supercommutator(a, b), g)));
  }
}

TEST_CASE("form transpose squares to the identity and reverses products") {
  std::mt19937_64 rng(17);
  FormMatrix a = rand_form(rng, 3, 3), b = rand_form(rng, 3, 3);
  CHECK(norm_of(form_transpose(form_transpose(a)) - a) < 1e-12);
  // (a b)^T = (-1)^{|a||b|} b^T a^T term by term; check on pure terms.
  FormMatrix x = FormMatrix::from_term(3, 1u, rand_mat(rng, 3));
  FormMatrix y = FormMatrix::from_term(3, 2u, rand_mat(rng, 3));
  FormMatrix lhs = form_transpose(wedge(x, y));
  FormMatrix rhs = wedge(form_transpose(y), form_transpose(x));
  rhs.scale(-1.0);  // both factors are odd
  CHECK(norm_of(lhs - rhs) < 1e-12);
}

TEST_CASE("exp_neg matches the truncated series on nilpotent input") {
  // a = N + dx M with N strictly upper triangular: exp(-a) is polynomial.
  MatrixXcd n = MatrixXcd::Zero(3, 3);
  n(0, 1) = 0.7;
  n(1, 2) = -0.3;
  MatrixXcd m = MatrixXcd::Random(3, 3);
  FormMatrix a = FormMatrix::from_term(2, 0, n) + FormMatrix::from_term(2, 1u, m);
  FormMatrix series = FormMatrix::identity(2, 3);
  FormMatrix pow = FormMatrix::identity(2, 3);
  double fact = 1.0;
  for (int k = 1; k <= 12; ++k) {
    pow = wedge(pow, a);
    fact *= -k;
    FormMatrix term = pow;
    term.scale(1.0 / fact);
    series += term;
  }
  CHECK(norm_of(exp_neg(a) - series) < 1e-12);
}

TEST_CASE("exp_neg of commuting terms multiplies") {
  MatrixXcd m = MatrixXcd::Identity(2, 2) * Complex(0.4, 0.1);
  FormMatrix a = FormMatrix::from_term(2, 0, m);
  FormMatrix b = FormMatrix::from_term(2, 0, MatrixXcd(2.0 * m));
  CHECK(norm_of(wedge(exp_neg(a), exp_neg(b)) - exp_neg(a + b)) < 1e-12);
}

TEST_CASE("cos and sin forms satisfy the Euler identity degreewise") {
  std::mt19937_64 rng(23);
  FormMatrix x = rand_form(rng, 3, 2);
  x.scale(0.2);
  // cos(x)^2 + sin(x)^2 = 1 when x commutes with itself: use a single term.
  MatrixXcd m = rand_mat(rng, 2);
  FormMatrix y = FormMatrix::from_term(2, 0, m);
  FormMatrix unit = wedge(cos_form(y), cos_form(y)) + wedge(sin_form(y), sin_form(y));
  CHECK(norm_of(unit - FormMatrix::identity(2, 2)) < 1e-10);
}

TEST_CASE("phi rescales degree k by (2 i pi)^{-k/2}") {
  MatrixXcd m = MatrixXcd::Identity(1, 1);
  FormMatrix two = FormMatrix::from_term(2, 3u, m);  // degree 2
  FormMatrix out = phi(two);
  const Complex expect = 1.0 / (2.0 * Complex(0.0, 1.0) * M_PI);
  CHECK(std::abs(out.coeff(3u)(0, 0) - expect) < 1e-14);
  CHECK(std::abs(sqrt_two_i_pi() * sqrt_two_i_pi() - 2.0 * Complex(0.0, 1.0) * M_PI) < 1e-14);
}

TEST_CASE("f and its derivative are consistent under finite differences") {
  MatrixXcd m = MatrixXcd::Identity(1, 1) * 0.3;
  FormMatrix x = FormMatrix::from_term(1, 0, m);
  const double h = 1e-6;
  FormMatrix xp = FormMatrix::from_term(1, 0, MatrixXcd(m.array() + h));
  FormMatrix xm = FormMatrix::from_term(1, 0, MatrixXcd(m.array() - h));
  FormMatrix fd = f_of(xp) - f_of(xm);
  fd.scale(1.0 / (2.0 * h));
  CHECK(norm_of(fd - f_prime_of(x)) < 1e-8);
}
