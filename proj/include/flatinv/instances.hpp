// Seeded generators for the instance families exercised by the verification
// suites: random flat bundles with commuting holonomies, graded flat complex
// bundles, duality bundles/complexes built by hyperbolic doubling, and
// assembled symplectic matrices with known normal forms.
#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "duality.hpp"
#include "superconnection.hpp"

namespace flatinv {
namespace instances {

inline std::mt19937_64 rng_from(std::uint64_t seed) { return std::mt19937_64(seed); }

inline Eigen::MatrixXd gauss(std::mt19937_64& rng, int rows, int cols, double scale = 1.0) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = scale * nd(rng);
  return m;
}

inline Eigen::MatrixXcd gaussc(std::mt19937_64& rng, int rows, int cols, double scale = 1.0) {
  std::normal_distribution<double> nd;
  Eigen::MatrixXcd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = scale * Complex(nd(rng), nd(rng));
  return m;
}

// Periodic scalar weight used to modulate the x-dependence of generated
// fields; distinct harmonics per axis keep torus fields genuinely 2d.
inline double trig_weight(const BaseGrid& grid, int node, int harmonic) {
  double s = 0.0;
  const auto idx = grid.node_coords(node);
  for (int a = 0; a < grid.dim; ++a) {
    const double x = grid.coordinate(a, idx[a]) / grid.periods[a];
    s += (a % 2 == 0) ? std::sin(2.0 * M_PI * harmonic * x + 0.3 * a)
                      : std::cos(2.0 * M_PI * harmonic * x + 0.3 * a);
  }
  return s;
}

// Random flat bundle: commuting holonomies U_a = exp(K_a) with a shared
// eigenbasis, default parallel-transport metric perturbed by a periodic
// positive factor Q(x) = B(x)^dagger B(x), which preserves the metric twist
// identity.
inline FlatBundle random_flat_bundle(const BaseGrid& grid, int rank, std::uint64_t seed,
                                     double spread = 0.4) {
  std::mt19937_64 rng = rng_from(seed);
  Eigen::MatrixXcd basis;
  do {
    basis = gaussc(rng, rank, rank, 1.0);
  } while (std::abs(Eigen::FullPivLU<Eigen::MatrixXcd>(basis).determinant()) < 1e-3);
  std::vector<Eigen::MatrixXcd> logs, hols;
  for (int a = 0; a < grid.dim; ++a) {
    Eigen::VectorXcd d = gaussc(rng, rank, 1, spread);
    Eigen::MatrixXcd k = basis * d.asDiagonal() * basis.inverse();
    logs.push_back(k);
    hols.push_back(k.exp());
  }
  Eigen::MatrixXcd h1 = gaussc(rng, rank, rank, 0.25);
  Eigen::MatrixXcd h2 = gaussc(rng, rank, rank, 0.25);
  h1 = (h1 + h1.adjoint()).eval();
  h2 = (h2 + h2.adjoint()).eval();
  GridField met(grid, rank);
  for (int n = 0; n < grid.num_nodes(); ++n) {
    Eigen::MatrixXcd e = Eigen::MatrixXcd::Zero(rank, rank);
    const auto idx = grid.node_coords(n);
    for (int a = 0; a < grid.dim; ++a)
      e -= (grid.coordinate(a, idx[a]) / grid.periods[a]) * logs[a];
    const Eigen::MatrixXcd g = e.exp();
    const Eigen::MatrixXcd b =
        Eigen::MatrixXcd(trig_weight(grid, n, 1) * h1 + trig_weight(grid, n, 2) * h2).exp();
    met.at(n) = FormMatrix::from_term(grid.dim, 0, Eigen::MatrixXcd(g.adjoint() * b.adjoint() * b * g));
  }
  return FlatBundle(grid, hols, met);
}

// Random graded flat complex bundle: scalar holonomies (so v commutes with
// them for free), strictly degree-raising random v, randomized metric.
inline FlatComplexBundle random_complex_bundle(const BaseGrid& grid,
                                               const std::vector<int>& graded_ranks,
                                               std::uint64_t seed, double spread = 0.3) {
  std::mt19937_64 rng = rng_from(seed);
  int rank = 0;
  std::vector<int> offsets;
  for (int r : graded_ranks) {
    offsets.push_back(rank);
    rank += r;
  }
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(rank, rank);
  Eigen::MatrixXcd prev;  // block of one degree lower, for the v^2 = 0 constraint
  for (std::size_t i = 0; i + 1 < graded_ranks.size(); ++i) {
    if (graded_ranks[i] > 0 && graded_ranks[i + 1] > 0) {
      Eigen::MatrixXcd b = gaussc(rng, graded_ranks[i + 1], graded_ranks[i], 1.0);
      if (prev.size() > 0) {
        // Kill the composite b * prev by projecting b off the range of prev.
        const Eigen::MatrixXcd proj =
            prev * prev.completeOrthogonalDecomposition().pseudoInverse();
        b = (b * (Eigen::MatrixXcd::Identity(graded_ranks[i], graded_ranks[i]) - proj)).eval();
      }
      v.block(offsets[i + 1], offsets[i], graded_ranks[i + 1], graded_ranks[i]) = b;
      prev = b;
    } else {
      prev.resize(0, 0);
    }
  }
  std::vector<Eigen::MatrixXcd> hols;
  std::vector<Complex> logs;
  std::normal_distribution<double> nd;
  for (int a = 0; a < grid.dim; ++a) {
    const Complex k(spread * nd(rng), spread * nd(rng));
    logs.push_back(k);
    hols.push_back(Eigen::MatrixXcd(std::exp(k) * Eigen::MatrixXcd::Identity(rank, rank)));
  }
  Eigen::MatrixXcd h1 = gaussc(rng, rank, rank, 0.25);
  h1 = (h1 + h1.adjoint()).eval();
  GridField met(grid, rank);
  for (int n = 0; n < grid.num_nodes(); ++n) {
    Complex e = 0.0;
    const auto idx = grid.node_coords(n);
    for (int a = 0; a < grid.dim; ++a)
      e -= (grid.coordinate(a, idx[a]) / grid.periods[a]) * logs[a];
    const Complex g = std::exp(e);
    const Eigen::MatrixXcd b = Eigen::MatrixXcd(trig_weight(grid, n, 1) * h1).exp();
    met.at(n) = FormMatrix::from_term(grid.dim, 0,
                                      Eigen::MatrixXcd(std::norm(g) * (b.adjoint() * b)));
  }
  FlatBundle fb(grid, hols, met);
  return FlatComplexBundle(fb, graded_ranks, v);
}

// Duality-complex scaffold built by hyperbolic doubling of V = V^0 (+) V^1
// with an optional self-paired middle summand W of dimension m: the fibre is
// [V^0 | V^1, W, V^1T | V^0T] with graded ranks {r0, r1 + m + r1, r0}, top
// degree n = 2.  v couples only through the doubled part, so v^2 = 0 holds
// identically.  For eps = 1, W carries the symmetric pairing diag(I_p, -I_q)
// (signature p - q survives in tr J); for eps = -1 it carries the standard
// symplectic form (m even).
struct DoubledData {
  int eps = 1;
  int r0 = 0, r1 = 0, m = 0;
  std::vector<int> graded_ranks;
  Eigen::MatrixXcd pairing;
  Eigen::MatrixXd pairing_real;
  Eigen::MatrixXcd v;
  Eigen::MatrixXd j0;

  int rank() const { return 2 * r0 + 2 * r1 + m; }

  // Random pairing-skew, degree-preserving algebra element (exp of it
  // conjugates admissible J's to admissible J's).
  Eigen::MatrixXd lie(std::mt19937_64& rng, double scale = 0.5) const {
    const int r = rank();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(r, r);
    const int mid = 2 * r1 + m;
    a.block(0, 0, r0, r0) = gauss(rng, r0, r0, scale);
    a.block(r0, r0, mid, mid) = gauss(rng, mid, mid, scale);
    a.block(r0 + mid, r0 + mid, r0, r0) = gauss(rng, r0, r0, scale);
    return Eigen::MatrixXd(
        0.5 * (a - pairing_real.inverse() * a.transpose() * pairing_real));
  }
};

inline DoubledData doubled_data(int eps, int r0, int r1, int m, std::uint64_t seed,
                                bool injective_w1 = true, int w_minus = 0,
                                bool couple_w = false) {
  if (eps == -1 && m % 2 != 0)
    throw std::invalid_argument("doubled_data: eps = -1 needs even middle dimension");
  if (couple_w && !(eps == -1 && r0 == 1 && m >= 2))
    throw std::invalid_argument(
        "doubled_data: W-coupling needs eps = -1 and a line in degree 0 (else v^2 != 0)");
  DoubledData d;
  d.eps = eps;
  d.r0 = r0;
  d.r1 = r1;
  d.m = m;
  d.graded_ranks = {r0, 2 * r1 + m, r0};
  const int r = d.rank();
  const int o1 = r0, ow = r0 + r1, o1t = r0 + r1 + m, o0t = r0 + 2 * r1 + m;
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(r, r);
  p.block(0, o0t, r0, r0) = Eigen::MatrixXd::Identity(r0, r0);
  p.block(o0t, 0, r0, r0) = eps * Eigen::MatrixXd::Identity(r0, r0);
  p.block(o1, o1t, r1, r1) = Eigen::MatrixXd::Identity(r1, r1);
  p.block(o1t, o1, r1, r1) = eps * Eigen::MatrixXd::Identity(r1, r1);
  Eigen::MatrixXd pw;
  if (eps == 1) {
    if (w_minus < 0 || w_minus > m)
      throw std::invalid_argument("doubled_data: bad middle signature");
    pw = Eigen::MatrixXd::Identity(m, m);
    for (int i = m - w_minus; i < m; ++i) pw(i, i) = -1.0;
  } else {
    pw = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m / 2; ++i) {
      pw(i, m / 2 + i) = 1.0;
      pw(m / 2 + i, i) = -1.0;
    }
  }
  p.block(ow, ow, m, m) = pw;
  d.pairing_real = p;
  d.pairing = p.cast<Complex>();

  std::mt19937_64 rng = rng_from(seed);
  Eigen::MatrixXd w1 = gauss(rng, r1, r0, 0.8);
  if (!injective_w1 && r0 > 0 && r1 > 0) w1.col(0).setZero();
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(r, r);
  v.block(o1, 0, r1, r0) = w1.cast<Complex>();
  v.block(o0t, o1t, r0, r1) = (-w1.transpose()).cast<Complex>();
  if (couple_w) {
    // V^0 is a line: the pairing-dual leg -w^T P_W is automatically nilpotent
    // against w because w^T P_W w is a 1x1 antisymmetric form.
    const Eigen::MatrixXd w = gauss(rng, m, 1, 0.8);
    v.block(ow, 0, m, 1) = w.cast<Complex>();
    v.block(o0t, ow, 1, m) = (-w.transpose() * pw).cast<Complex>();
  }
  d.v = v;

  Eigen::MatrixXd j0 = Eigen::MatrixXd::Zero(r, r);
  const double b = (eps == 1) ? 1.0 : -1.0;  // J[V0, V0T] = b, J[V0T, V0] = 1, b*1 = eps
  j0.block(0, o0t, r0, r0) = b * Eigen::MatrixXd::Identity(r0, r0);
  j0.block(o0t, 0, r0, r0) = Eigen::MatrixXd::Identity(r0, r0);
  j0.block(o1, o1t, r1, r1) = b * Eigen::MatrixXd::Identity(r1, r1);
  j0.block(o1t, o1, r1, r1) = Eigen::MatrixXd::Identity(r1, r1);
  // W block: an admissible involution/complex structure with P_W J_W positive.
  j0.block(ow, ow, m, m) = (eps == 1) ? pw : Eigen::MatrixXd(-pw);
  d.j0 = j0;
  return d;
}

// J(x) = g(x) J0 g(x)^{-1} with g built from pairing-skew degree-preserving
// generators modulated by periodic weights; trivial holonomies.
inline GridField doubled_j_field(const BaseGrid& grid, const DoubledData& d, std::mt19937_64& rng,
                                 double amplitude = 0.5, int max_harmonic = 0) {
  const int r = d.rank();
  std::vector<Eigen::MatrixXd> gens;
  // Generator k is modulated by trig harmonic k + 1; capping the harmonic
  // keeps the field resolvable on coarse grids (harmonic m needs >> 2m nodes
  // per axis before central differences enter their quadratic regime).
  int ngen = std::max(1, 2 * grid.dim);
  if (max_harmonic > 0) ngen = std::min(ngen, max_harmonic);
  for (int k = 0; k < ngen; ++k) gens.push_back(d.lie(rng, amplitude));
  GridField jf(grid, r);
  for (int n = 0; n < grid.num_nodes(); ++n) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(r, r);
    for (int k = 0; k < ngen; ++k) a += trig_weight(grid, n, k + 1) * gens[k];
    const Eigen::MatrixXd g = a.exp();
    jf.at(n) = FormMatrix::from_term(grid.dim, 0,
                                     Eigen::MatrixXcd((g * d.j0 * g.inverse()).cast<Complex>()));
  }
  return jf;
}

inline std::vector<Eigen::MatrixXcd> identity_holonomies(const BaseGrid& grid, int rank) {
  return std::vector<Eigen::MatrixXcd>(grid.dim, Eigen::MatrixXcd::Identity(rank, rank));
}

inline DualityComplex random_duality_complex(const BaseGrid& grid, const DoubledData& d,
                                             std::uint64_t seed, double amplitude = 0.5,
                                             int max_harmonic = 0) {
  std::mt19937_64 rng = rng_from(seed);
  GridField jf = doubled_j_field(grid, d, rng, amplitude, max_harmonic);
  return DualityComplex(grid, d.graded_ranks, d.eps, d.pairing, d.v,
                        identity_holonomies(grid, d.rank()), jf);
}

// Ungraded duality bundle: eps = 1 conjugates J0 = diag(I_p, -I_q) by
// exp(o(p, q)) elements; eps = -1 conjugates the standard complex structure
// by exp(sp(2k)) elements.
inline DualityBundle random_duality_bundle(const BaseGrid& grid, int eps, int p, int q,
                                           std::uint64_t seed, double amplitude = 0.4) {
  std::mt19937_64 rng = rng_from(seed);
  int r;
  Eigen::MatrixXd pair, j0;
  if (eps == 1) {
    r = p + q;
    pair = Eigen::MatrixXd::Identity(r, r);
    for (int i = p; i < r; ++i) pair(i, i) = -1.0;
    j0 = pair;
  } else {
    r = 2 * p;  // q ignored
    pair = Eigen::MatrixXd::Zero(r, r);
    for (int i = 0; i < p; ++i) {
      pair(i, p + i) = 1.0;
      pair(p + i, i) = -1.0;
    }
    j0 = -pair;
  }
  auto lie = [&](double s) {
    Eigen::MatrixXd a = gauss(rng, r, r, s);
    return Eigen::MatrixXd(0.5 * (a - pair.inverse() * a.transpose() * pair));
  };
  const int ngen = std::max(1, 2 * grid.dim);
  std::vector<Eigen::MatrixXd> gens;
  for (int k = 0; k < ngen; ++k) gens.push_back(lie(amplitude));
  GridField jf(grid, r);
  for (int n = 0; n < grid.num_nodes(); ++n) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(r, r);
    for (int k = 0; k < ngen; ++k) a += trig_weight(grid, n, k + 1) * gens[k];
    const Eigen::MatrixXd g = a.exp();
    jf.at(n) = FormMatrix::from_term(grid.dim, 0,
                                     Eigen::MatrixXcd((g * j0 * g.inverse()).cast<Complex>()));
  }
  return DualityBundle(grid, eps, pair.cast<Complex>(), identity_holonomies(grid, r), jf);
}

// Random symplectic matrix in Sp(2k): exp of a random element of sp(2k).
inline Eigen::MatrixXd random_symplectic(std::mt19937_64& rng, int k, double scale = 0.4) {
  const int r = 2 * k;
  Eigen::MatrixXd om = Eigen::MatrixXd::Zero(r, r);
  for (int i = 0; i < k; ++i) {
    om(i, k + i) = 1.0;
    om(k + i, i) = -1.0;
  }
  Eigen::MatrixXd a = gauss(rng, r, r, scale);
  a = (0.5 * (a - om.inverse() * a.transpose() * om)).eval();
  return a.exp();
}

// Assembled symplectic matrix with known normal form: direct sum (in the
// standard (q_1..q_k, p_1..p_k) basis) of rotation blocks R(theta_i) on the
// (q_i, p_i) planes and hyperbolic stretches diag(l, 1/l), conjugated by a
// random symplectic matrix.  Returns the matrix together with the expected
// sorted angle multiset and hyperbolic rank.
struct AssembledSymplectic {
  Eigen::MatrixXd matrix;
  std::vector<double> angles;  // sorted
  int hyperbolic_rank = 0;
};

inline AssembledSymplectic assembled_symplectic(std::uint64_t seed, int elliptic, int hyperbolic,
                                                double conj_scale = 0.4) {
  std::mt19937_64 rng = rng_from(seed);
  std::uniform_real_distribution<double> ang(0.15, M_PI - 0.15);
  std::uniform_real_distribution<double> str(1.3, 3.0);
  std::uniform_int_distribution<int> sign(0, 1);
  const int k = elliptic + hyperbolic;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * k, 2 * k);
  AssembledSymplectic out;
  for (int i = 0; i < elliptic; ++i) {
    double th = ang(rng);
    if (sign(rng)) th = -th;
    out.angles.push_back(th);
    // R(th) on the (q_i, p_i) plane: positive Krein sign for +th.
    m(i, i) = std::cos(th);
    m(i, k + i) = -std::sin(th);
    m(k + i, i) = std::sin(th);
    m(k + i, k + i) = std::cos(th);
  }
  for (int i = elliptic; i < k; ++i) {
    const double l = str(rng);
    m(i, i) = l;
    m(k + i, k + i) = 1.0 / l;
  }
  out.hyperbolic_rank = 2 * hyperbolic;
  std::sort(out.angles.begin(), out.angles.end());
  const Eigen::MatrixXd g = random_symplectic(rng, k, conj_scale);
  out.matrix = g * m * g.inverse();
  return out;
}

}  // namespace instances
}  // namespace flatinv
