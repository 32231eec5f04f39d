// Twisted cochain complexes of small CW models and the pushforward to a
// point: cell structures carry group-ring differentials that are evaluated
// on a representation of the fundamental group.

#ifndef FLATINV_LOCAL_SYSTEM_HPP
#define FLATINV_LOCAL_SYSTEM_HPP

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "based_complex.hpp"

namespace flatinv {

// A word in the fundamental group: generator indices, sign encodes inverses
// (+k means generator k-1, -k its inverse).  The empty word is the identity.
using GroupWord = std::vector<int>;

struct GroupRingTerm {
  long coeff;
  GroupWord word;
};
using GroupRingElt = std::vector<GroupRingTerm>;

// Cell structure with twisted cochain differentials written over the group
// ring; cochain[p] is a cells[p+1] x cells[p] array of ring elements.
struct CWLocalSystem {
  std::string name;
  int num_generators = 0;
  std::vector<int> cells;
  std::vector<std::vector<std::vector<GroupRingElt>>> cochain;

  int dimension() const { return static_cast<int>(cells.size()) - 1; }

  int euler_characteristic() const {
    int chi = 0, sign = 1;
    for (int n : cells) {
      chi += sign * n;
      sign = -sign;
    }
    return chi;
  }
};

inline Eigen::MatrixXd evaluate_word(const GroupWord& w, const std::vector<Eigen::MatrixXd>& rho,
                                     int m) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(m, m);
  for (int g : w) {
    if (g == 0) throw std::invalid_argument("evaluate_word: zero letter");
    int idx = std::abs(g) - 1;
    if (idx >= static_cast<int>(rho.size()))
      throw std::invalid_argument("evaluate_word: generator out of range");
    if (g > 0)
      out = out * rho[idx];
    else
      out = out * rho[idx].inverse();
  }
  return out;
}

// Evaluates the twisted cochain complex for a representation.  Volumes are
// vol_v per copy of the fiber, one copy per cell.
inline BasedComplex evaluate_local_system(const CWLocalSystem& cw,
                                          const std::vector<Eigen::MatrixXd>& rho,
                                          double vol_v = 1.0, int fiber_dim = 0) {
  if (static_cast<int>(rho.size()) != cw.num_generators)
    throw std::invalid_argument("evaluate_local_system: wrong number of holonomies");
  const int m = cw.num_generators > 0 ? static_cast<int>(rho[0].rows())
                                      : (fiber_dim > 0 ? fiber_dim : 1);
  for (const auto& u : rho)
    if (u.rows() != m || u.cols() != m)
      throw std::invalid_argument("evaluate_local_system: holonomy shape mismatch");

  BasedComplex out;
  for (int n : cw.cells) {
    out.ranks.push_back(n * m);
    out.volumes.push_back(std::pow(vol_v, n));
  }
  const int dim = cw.dimension();
  for (int p = 0; p < dim; ++p) {
    Eigen::MatrixXd dmat = Eigen::MatrixXd::Zero(cw.cells[p + 1] * m, cw.cells[p] * m);
    for (int i = 0; i < cw.cells[p + 1]; ++i)
      for (int j = 0; j < cw.cells[p]; ++j) {
        Eigen::MatrixXd block = Eigen::MatrixXd::Zero(m, m);
        for (const auto& term : cw.cochain[p][i][j])
          block += term.coeff * evaluate_word(term.word, rho, m);
        dmat.block(i * m, j * m, m, m) = block;
      }
    out.d.push_back(std::move(dmat));
  }
  out.validate();
  return out;
}

// The pushforward of (V, vol) to a point: -a(T) + sum_p (-1)^p [(H^p, vol)],
// with cohomology volumes normalized on integral bases.  The representation
// must take values in GL(m, Z).
inline K0volElement pushforward_point(const CWLocalSystem& cw,
                                      const std::vector<Eigen::MatrixXd>& rho,
                                      double vol_v = 1.0, int fiber_dim = 0) {
  BasedComplex c = evaluate_local_system(cw, rho, vol_v, fiber_dim);
  std::map<int, HVolume> hv;
  K0volElement classes{0.0, 0};
  for (int p = 0; p <= c.length(); ++p) {
    IntegralCohomology hp = cohomology_integral(c, p);
    const int sign = (p % 2 == 0) ? 1 : -1;
    K0volElement cls = k0vol_class(hp.torsion_order, hp.free_rank, 1.0);
    classes = classes + cls.scaled(sign);
    if (hp.free_rank > 0) hv[p] = HVolume{hp.free_representatives, 1.0};
  }
  double t = reidemeister_torsion(c, hv);
  return -a_map(t) + classes;
}

// Residual of the point pushforward against chi(Z) copies of the fiber class.
inline std::pair<double, long> prop12_residual(const CWLocalSystem& cw,
                                               const std::vector<Eigen::MatrixXd>& rho,
                                               double vol_v = 1.0, int fiber_dim = 0) {
  K0volElement lhs = pushforward_point(cw, rho, vol_v, fiber_dim);
  const int m = cw.num_generators > 0 ? static_cast<int>(rho[0].rows())
                                      : (fiber_dim > 0 ? fiber_dim : 1);
  K0volElement rhs = k0vol_class(1, m, vol_v).scaled(cw.euler_characteristic());
  K0volElement diff = lhs - rhs;
  return {std::abs(diff.r), diff.n};
}

// Cell structures used throughout: a point, two points, a circle with one or
// two cells per dimension, the sphere, the projective plane, and the torus.

inline CWLocalSystem cw_point() {
  CWLocalSystem cw;
  cw.name = "point";
  cw.cells = {1};
  return cw;
}

inline CWLocalSystem cw_two_points() {
  CWLocalSystem cw;
  cw.name = "two-points";
  cw.cells = {2};
  return cw;
}

inline CWLocalSystem cw_circle() {
  CWLocalSystem cw;
  cw.name = "circle";
  cw.num_generators = 1;
  cw.cells = {1, 1};
  cw.cochain = {{{GroupRingElt{{1, {1}}, {-1, {}}}}}};  // rho(g) - 1
  return cw;
}

inline CWLocalSystem cw_circle_subdivided() {
  CWLocalSystem cw;
  cw.name = "circle-subdivided";
  cw.num_generators = 1;
  cw.cells = {2, 2};
  // Vertices v0, v1; edge e0 from v0 to v1, edge e1 from v1 back to v0
  // carrying the generator.
  cw.cochain = {{{GroupRingElt{{-1, {}}}, GroupRingElt{{1, {}}}},
                 {GroupRingElt{{1, {1}}}, GroupRingElt{{-1, {}}}}}};
  return cw;
}

inline CWLocalSystem cw_sphere() {
  CWLocalSystem cw;
  cw.name = "sphere";
  cw.cells = {1, 0, 1};
  cw.cochain = {{}, {}};
  cw.cochain[0] = {};                       // no 1-cells
  cw.cochain[1] = {{GroupRingElt{}}};       // attaching map collapses, d = 0
  return cw;
}

inline CWLocalSystem cw_projective_plane() {
  CWLocalSystem cw;
  cw.name = "projective-plane";
  cw.num_generators = 1;
  cw.cells = {1, 1, 1};
  cw.cochain = {{{GroupRingElt{{1, {1}}, {-1, {}}}}},   // rho(g) - 1
                {{GroupRingElt{{1, {1}}, {1, {}}}}}};   // rho(g) + 1
  return cw;
}

inline CWLocalSystem cw_torus() {
  CWLocalSystem cw;
  cw.name = "torus";
  cw.num_generators = 2;
  cw.cells = {1, 2, 1};
  cw.cochain.resize(2);
  cw.cochain[0] = {{GroupRingElt{{1, {1}}, {-1, {}}}},
                   {GroupRingElt{{1, {2}}, {-1, {}}}}};
  // Fox derivatives of the relator a b a^{-1} b^{-1} for commuting holonomies.
  cw.cochain[1] = {{GroupRingElt{{1, {}}, {-1, {2}}},
                    GroupRingElt{{1, {1}}, {-1, {}}}}};
  return cw;
}

inline std::vector<CWLocalSystem> cw_library() {
  return {cw_point(),  cw_two_points(),       cw_circle(), cw_circle_subdivided(),
          cw_sphere(), cw_projective_plane(), cw_torus()};
}

}  // namespace flatinv

#endif  // FLATINV_LOCAL_SYSTEM_HPP
