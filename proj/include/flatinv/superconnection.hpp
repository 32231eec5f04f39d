// Flat complexes of flat bundles and their superconnection torsion forms:
// the rescaled superconnection, the number-operator transgression integrand,
// the Hodge cohomology bundle, and the torsion form itself.

#ifndef FLATINV_SUPERCONNECTION_HPP
#define FLATINV_SUPERCONNECTION_HPP

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <vector>

#include "flat_bundle.hpp"
#include "quadrature.hpp"

namespace flatinv {

// Odd characteristic form of a flat bundle with metric and an optional
// grading: (2 i pi)^{1/2} phi Tr_s[f(omega/2)], f(z) = z exp(z^2).  With the
// trivial grading this equals the total odd form c(nabla, h).
inline GridField f_form(const FlatBundle& fb, const Eigen::MatrixXcd& tau) {
  GridField om = fb.omega();
  Grading g{tau};
  GridField out(fb.grid(), 1);
  for (int node = 0; node < om.num_nodes(); ++node) {
    FormMatrix x = om.at(node);
    x.scale(0.5);
    out.at(node) = phi(supertrace(f_of(x), g)).scale(sqrt_two_i_pi());
  }
  return out;
}

inline GridField f_form(const FlatBundle& fb) {
  return f_form(fb, Eigen::MatrixXcd::Identity(fb.rank(), fb.rank()));
}

// A flat cochain complex of flat bundles: the total bundle carries a constant
// cochain map v raising the grading degree by one, commuting with the
// holonomies.
class FlatComplexBundle {
 public:
  FlatComplexBundle(FlatBundle bundle, std::vector<int> graded_ranks, Eigen::MatrixXcd v,
                    double tol = 1e-12)
      : bundle_(std::move(bundle)), graded_ranks_(std::move(graded_ranks)), v_(std::move(v)) {
    const int r = bundle_.rank();
    int total = 0;
    for (int n : graded_ranks_) {
      if (n < 0) throw std::invalid_argument("FlatComplexBundle: negative rank");
      total += n;
    }
    if (total != r) throw std::invalid_argument("FlatComplexBundle: grading ranks must sum to rank");
    if (v_.rows() != r || v_.cols() != r)
      throw std::invalid_argument("FlatComplexBundle: v shape mismatch");
    if ((v_ * v_).norm() > tol * std::max(1.0, v_.norm() * v_.norm()))
      throw std::invalid_argument("FlatComplexBundle: v^2 != 0");
    for (const auto& u : bundle_.holonomies())
      if ((u * v_ - v_ * u).norm() > tol * std::max(1.0, u.norm() * v_.norm()))
        throw std::invalid_argument("FlatComplexBundle: v does not commute with holonomies");
    // Block structure: v must raise the grading degree by exactly one.
    std::vector<int> offsets(graded_ranks_.size() + 1, 0);
    for (std::size_t i = 0; i < graded_ranks_.size(); ++i)
      offsets[i + 1] = offsets[i] + graded_ranks_[i];
    for (std::size_t bi = 0; bi < graded_ranks_.size(); ++bi)
      for (std::size_t bj = 0; bj < graded_ranks_.size(); ++bj) {
        if (bi == bj + 1) continue;
        if (graded_ranks_[bi] == 0 || graded_ranks_[bj] == 0) continue;
        if (v_.block(offsets[bi], offsets[bj], graded_ranks_[bi], graded_ranks_[bj]).norm() >
            tol)
          throw std::invalid_argument("FlatComplexBundle: v is not degree +1");
      }
    number_op_ = Eigen::MatrixXcd::Zero(r, r);
    tau_ = Eigen::MatrixXcd::Zero(r, r);
    for (std::size_t i = 0; i < graded_ranks_.size(); ++i)
      for (int k = offsets[i]; k < offsets[i + 1]; ++k) {
        number_op_(k, k) = static_cast<double>(i);
        tau_(k, k) = (i % 2 == 0) ? 1.0 : -1.0;
      }
  }

  const FlatBundle& bundle() const { return bundle_; }
  const std::vector<int>& graded_ranks() const { return graded_ranks_; }
  const Eigen::MatrixXcd& v() const { return v_; }
  const Eigen::MatrixXcd& number_operator() const { return number_op_; }
  const Eigen::MatrixXcd& grading() const { return tau_; }

  int d_weight() const {
    int s = 0;
    for (std::size_t i = 0; i < graded_ranks_.size(); ++i)
      s += (i % 2 == 0 ? 1 : -1) * static_cast<int>(i) * graded_ranks_[i];
    return s;
  }

  // Metric adjoint of v at a node: h^{-1} v^dagger h.
  Eigen::MatrixXcd v_star_at(int node) const {
    const Eigen::MatrixXcd h = bundle_.metric().at(node).coeff(0);
    return h.inverse() * v_.adjoint() * h;
  }

  // D_t = (1/2)(sqrt(t)(v^* - v) + omega), the odd part of the rescaled
  // superconnection.
  GridField d_t(double t) const {
    GridField om = bundle_.omega();
    const double st = std::sqrt(t);
    GridField out(bundle_.grid(), bundle_.rank());
    for (int a = 0; a < bundle_.grid().dim; ++a)
      out.set_twist(a, om.twist(a));
    for (int node = 0; node < om.num_nodes(); ++node) {
      FormMatrix m = om.at(node);
      m.add_term(0, Eigen::MatrixXcd(st * (v_star_at(node) - v_)));
      m.scale(0.5);
      out.at(node) = m;
    }
    return out;
  }

  // f^(C'_t, h) = phi Tr_s[(N/2) f'(D_t)], a scalar even form.
  GridField f_hat(double t) const {
    GridField dt = d_t(t);
    Grading g{tau_};
    GridField out(bundle_.grid(), 1);
    for (int node = 0; node < dt.num_nodes(); ++node) {
      FormMatrix fp = f_prime_of(dt.at(node));
      FormMatrix weighted(fp.num_generators(), fp.fiber_dim());
      for (const auto& [mask, c] : fp.terms())
        weighted.add_term(mask, Eigen::MatrixXcd(0.5 * (number_op_ * c)));
      out.at(node) = phi(supertrace(weighted, g));
    }
    return out;
  }

  // f(C'_t, h) = (2 i pi)^{1/2} phi Tr_s[f(D_t)].
  GridField f_t(double t) const {
    GridField dt = d_t(t);
    Grading g{tau_};
    GridField out(bundle_.grid(), 1);
    for (int node = 0; node < dt.num_nodes(); ++node)
      out.at(node) = phi(supertrace(f_of(dt.at(node)), g)).scale(sqrt_two_i_pi());
    return out;
  }

  // Fiberwise Hodge cohomology at a node: kernel of v^* v + v v^*.
  Eigen::MatrixXcd harmonic_kernel_at(int node, double cutoff = 1e-8) const {
    const Eigen::MatrixXcd h = bundle_.metric().at(node).coeff(0);
    const Eigen::MatrixXcd vs = v_star_at(node);
    const Eigen::MatrixXcd lap = vs * v_ + v_ * vs;
    // The Laplacian is self-adjoint for h; diagonalize h^{1/2} lap h^{-1/2}.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hs(h);
    const Eigen::MatrixXcd hroot = hs.operatorSqrt();
    const Eigen::MatrixXcd hroot_inv = hs.operatorInverseSqrt();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hroot * lap * hroot_inv);
    const auto& ev = es.eigenvalues();
    const double cut = cutoff * std::max(1.0, ev.size() > 0 ? ev(ev.size() - 1) : 0.0);
    int k = 0;
    while (k < ev.size() && ev(k) <= cut) ++k;
    return hroot_inv * es.eigenvectors().leftCols(k);
  }

  // The cohomology bundle with its induced flat structure, Hodge metric and
  // grading, plus the change-of-class matrices are internal.
  struct CohomologyBundle {
    FlatBundle bundle;
    std::vector<int> graded_ranks;
    Eigen::MatrixXcd tau;
  };

  CohomologyBundle cohomology_bundle() const {
    // Class representatives: harmonics at the origin, organized by degree so
    // the induced grading is manifest.
    std::vector<int> offsets(graded_ranks_.size() + 1, 0);
    for (std::size_t i = 0; i < graded_ranks_.size(); ++i)
      offsets[i + 1] = offsets[i] + graded_ranks_[i];
    const Eigen::MatrixXcd k0 = harmonic_kernel_at(0);
    const int htot = static_cast<int>(k0.cols());
    const int r = bundle_.rank();
    // Sort kernel columns by degree: project to each block and re-orthogonalize.
    Eigen::MatrixXcd classes(r, htot);
    std::vector<int> hranks(graded_ranks_.size(), 0);
    {
      int col = 0;
      for (std::size_t i = 0; htot > 0 && i < graded_ranks_.size(); ++i) {
        if (graded_ranks_[i] == 0) continue;
        Eigen::MatrixXcd blockpart = Eigen::MatrixXcd::Zero(r, htot);
        blockpart.middleRows(offsets[i], graded_ranks_[i]) =
            k0.middleRows(offsets[i], graded_ranks_[i]);
        // The Laplacian preserves degree, so harmonics split by degree; a
        // rank factorization of the block part gives the degree-i classes.
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(blockpart,
                                               Eigen::ComputeThinU | Eigen::ComputeThinV);
        int rk = 0;
        for (int s = 0; s < svd.singularValues().size(); ++s)
          if (svd.singularValues()(s) > 1e-10 * svd.singularValues()(0)) ++rk;
        classes.middleCols(col, rk) = svd.matrixU().leftCols(rk);
        hranks[i] = rk;
        col += rk;
      }
      if (col != htot)
        throw std::runtime_error("cohomology_bundle: harmonic degree split failed");
    }

    const Eigen::MatrixXcd h0 = bundle_.metric().at(0).coeff(0);
    auto class_coords = [&](const Eigen::MatrixXcd& k, const Eigen::MatrixXcd& h,
                            const Eigen::MatrixXcd& z) {
      return Eigen::MatrixXcd(
          (k.adjoint() * h * k).inverse() * (k.adjoint() * h * z));
    };
    // Induced holonomies as class maps at the origin.
    std::vector<Eigen::MatrixXcd> hols;
    for (const auto& u : bundle_.holonomies()) hols.push_back(class_coords(k0, h0, u * classes));
    // Change to the degree-sorted class basis.
    const Eigen::MatrixXcd base_change = class_coords(k0, h0, classes);
    for (auto& m : hols) m = base_change.inverse() * m;

    // Hodge metric: at each node, the metric of the harmonic representatives.
    GridField hmetric(bundle_.grid(), htot);
    for (int node = 0; node < bundle_.metric().num_nodes(); ++node) {
      const Eigen::MatrixXcd h = bundle_.metric().at(node).coeff(0);
      const Eigen::MatrixXcd kx = harmonic_kernel_at(node);
      const Eigen::MatrixXcd proj = kx * class_coords(kx, h, classes);
      Eigen::MatrixXcd hh = proj.adjoint() * h * proj;
      hh = 0.5 * (hh + hh.adjoint());
      hmetric.at(node) = FormMatrix::from_term(bundle_.grid().dim, 0, hh);
    }
    for (int a = 0; a < bundle_.grid().dim; ++a)
      hmetric.set_twist(a, AxisTwist::metric(hols[a]));

    Eigen::MatrixXcd tau = Eigen::MatrixXcd::Zero(htot, htot);
    int col = 0;
    std::vector<int> hr;
    for (std::size_t i = 0; i < hranks.size(); ++i) {
      for (int s = 0; s < hranks[i]; ++s, ++col) tau(col, col) = (i % 2 == 0) ? 1.0 : -1.0;
      hr.push_back(hranks[i]);
    }
    return {FlatBundle(bundle_.grid(), hols, std::move(hmetric)), hr, tau};
  }

  int d_weight_cohomology() const {
    CohomologyBundle hb = cohomology_bundle();
    int s = 0;
    for (std::size_t i = 0; i < hb.graded_ranks.size(); ++i)
      s += (i % 2 == 0 ? 1 : -1) * static_cast<int>(i) * hb.graded_ranks[i];
    return s;
  }

  // The torsion form: minus the integral over (0, infinity) of
  // f^(C'_t) - d(H) f'(0)/2 - [d(E) - d(H)] f'(i sqrt(t)/2) / 2 in dt/t,
  // evaluated by adaptive quadrature in u = ln t.
  GridField torsion_form(double t_min = 1e-6, double t_max = 1e6, double tol = 1e-9) const {
    const double de = static_cast<double>(d_weight());
    const double dh = static_cast<double>(d_weight_cohomology());
    auto integrand = [&](double u) {
      const double t = std::exp(u);
      GridField g = f_hat(t);
      // f'(i sqrt(t)/2) = exp(-t/4)(1 - t/2); f'(0) = 1.
      const double fpi = std::exp(-0.25 * t) * (1.0 - 0.5 * t);
      const double sub = 0.5 * dh + 0.5 * (de - dh) * fpi;
      FormMatrix c = FormMatrix::from_term(g.grid().dim, 0,
                                           Eigen::MatrixXcd::Constant(1, 1, sub));
      for (int node = 0; node < g.num_nodes(); ++node) g.at(node) -= c;
      return g;
    };
    auto norm = [](const GridField& g) { return g.max_norm(); };
    GridField out = adaptive_simpson<GridField>(integrand, std::log(t_min), std::log(t_max),
                                                tol, norm);
    out.scale(-1.0);
    return out;
  }

 private:
  FlatBundle bundle_;
  std::vector<int> graded_ranks_;
  Eigen::MatrixXcd v_;
  Eigen::MatrixXcd number_op_;
  Eigen::MatrixXcd tau_;
};

}  // namespace flatinv

#endif  // FLATINV_SUPERCONNECTION_HPP
