// Flat duality bundles and duality superconnections: the automorphism J, the
// form omega(nabla, J), p-forms and their transgression p-tilde, the
// number-operator rescaling C_t/D_t, the finite-dimensional eta-form, the
// induced duality on cohomology, and the L-group arithmetic (signature and
// the symplectic elliptic/hyperbolic normal form).

#ifndef FLATINV_DUALITY_HPP
#define FLATINV_DUALITY_HPP

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "flat_bundle.hpp"
#include "quadrature.hpp"

namespace flatinv {

// Fixed branch: sqrt(1) = 1, sqrt(-1) = +i.
inline Complex sqrt_eps(int eps) {
  if (eps == 1) return Complex(1.0, 0.0);
  if (eps == -1) return Complex(0.0, 1.0);
  throw std::invalid_argument("sqrt_eps: epsilon must be +1 or -1");
}

// Left-multiply every coefficient of a form by a constant matrix.
inline FormMatrix mat_times_form(const Eigen::MatrixXcd& m, const FormMatrix& a) {
  FormMatrix out(a.num_generators(), a.fiber_dim());
  for (const auto& [mask, c] : a.terms()) out.add_term(mask, Eigen::MatrixXcd(m * c));
  return out;
}

inline FormMatrix form_times_mat(const FormMatrix& a, const Eigen::MatrixXcd& m) {
  FormMatrix out(a.num_generators(), a.fiber_dim());
  for (const auto& [mask, c] : a.terms()) out.add_term(mask, Eigen::MatrixXcd(c * m));
  return out;
}

namespace detail {

inline void require_real(const Eigen::MatrixXcd& m, const char* what, double tol = 1e-12) {
  if (m.size() > 0 && m.imag().cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument(std::string(what) + ": matrix must be real");
}

// Positive-definiteness of a real symmetric matrix.
inline bool is_spd(const Eigen::MatrixXcd& m, double tol = 1e-12) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()));
  return es.eigenvalues().minCoeff() > tol * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
}

}  // namespace detail

// A flat duality bundle over a grid: commuting pairing-preserving holonomies
// and a field of admissible automorphisms J with J^2 = eps, pairing-invariance
// and positivity of <v, w> = (v, J w).
class DualityBundle {
 public:
  DualityBundle(BaseGrid base, int eps, Eigen::MatrixXcd pairing,
                std::vector<Eigen::MatrixXcd> holonomies, GridField j_field,
                double tol = 1e-10)
      : base_(std::move(base)),
        eps_(eps),
        pairing_(std::move(pairing)),
        holonomies_(std::move(holonomies)),
        j_(std::move(j_field)) {
    base_.validate();
    rank_ = static_cast<int>(pairing_.rows());
    if (pairing_.cols() != rank_) throw std::invalid_argument("DualityBundle: pairing not square");
    if (rank_ == 0) {
      // Zero bundle (e.g. the cohomology of an acyclic complex): nothing to
      // validate beyond the layout.
      if (static_cast<int>(holonomies_.size()) != base_.dim)
        throw std::invalid_argument("DualityBundle: one holonomy per axis required");
      if (j_.num_nodes() != base_.num_nodes())
        throw std::invalid_argument("DualityBundle: J field layout mismatch");
      return;
    }
    detail::require_real(pairing_, "DualityBundle pairing");
    if ((pairing_ - static_cast<double>(eps_) * pairing_.transpose()).norm() >
        tol * std::max(1.0, pairing_.norm()))
      throw std::invalid_argument("DualityBundle: pairing not eps-symmetric");
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(pairing_);
    if (!lu.isInvertible()) throw std::invalid_argument("DualityBundle: degenerate pairing");
    if (static_cast<int>(holonomies_.size()) != base_.dim)
      throw std::invalid_argument("DualityBundle: one holonomy per axis required");
    for (const auto& u : holonomies_) {
      detail::require_real(u, "DualityBundle holonomy");
      if ((u.transpose() * pairing_ * u - pairing_).norm() > tol * std::max(1.0, pairing_.norm()))
        throw std::invalid_argument("DualityBundle: holonomy does not preserve pairing");
    }
    for (std::size_t i = 0; i < holonomies_.size(); ++i)
      for (std::size_t j = i + 1; j < holonomies_.size(); ++j)
        if (commutator_norm(holonomies_[i], holonomies_[j]) > tol)
          throw std::invalid_argument("DualityBundle: holonomies do not commute");
    if (j_.num_nodes() != base_.num_nodes() || j_.fiber_dim() != rank_)
      throw std::invalid_argument("DualityBundle: J field layout mismatch");
    for (int a = 0; a < base_.dim; ++a) j_.set_twist(a, AxisTwist::conjugation(holonomies_[a]));
    for (int n = 0; n < base_.num_nodes(); ++n) {
      const Eigen::MatrixXcd jm = j_.at(n).coeff(0);
      detail::require_real(jm, "DualityBundle J");
      const double scale = std::max(1.0, jm.norm());
      if ((jm * jm - static_cast<double>(eps_) * Eigen::MatrixXcd::Identity(rank_, rank_)).norm() >
          tol * scale)
        throw std::invalid_argument("DualityBundle: J^2 != eps");
      if ((jm.transpose() * pairing_ * jm - pairing_).norm() > tol * scale)
        throw std::invalid_argument("DualityBundle: J does not preserve pairing");
      if (!detail::is_spd(pairing_ * jm))
        throw std::invalid_argument("DualityBundle: <.,.> = (. , J .) not positive-definite");
    }
  }

  const BaseGrid& base() const { return base_; }
  int rank() const { return rank_; }
  int eps() const { return eps_; }
  const Eigen::MatrixXcd& pairing() const { return pairing_; }
  const std::vector<Eigen::MatrixXcd>& holonomies() const { return holonomies_; }
  const GridField& j_field() const { return j_; }

  // Metric of the inner product <v, w> = (v, J w): h = P J nodewise.
  GridField metric() const {
    GridField h(base_, rank_);
    for (int n = 0; n < base_.num_nodes(); ++n)
      h.at(n) = FormMatrix::from_term(base_.dim, 0,
                                      Eigen::MatrixXcd(pairing_ * j_.at(n).coeff(0)));
    for (int a = 0; a < base_.dim; ++a) h.set_twist(a, AxisTwist::metric(holonomies_[a]));
    return h;
  }

  // omega(nabla, J) = J^{-1} (nabla J): in the flat trivialization the
  // covariant derivative of J is the (twisted) exterior derivative.
  GridField omega_j() const {
    GridField out(base_, rank_);
    for (int a = 0; a < base_.dim; ++a) out.set_twist(a, AxisTwist::conjugation(holonomies_[a]));
    if (base_.dim == 0 || rank_ == 0) return out;
    GridField dj = exterior_d(j_);
    for (int n = 0; n < base_.num_nodes(); ++n) {
      const Eigen::MatrixXcd jinv =
          static_cast<double>(eps_) * j_.at(n).coeff(0);  // J^{-1} = eps J
      out.at(n) = mat_times_form(jinv, dj.at(n));
    }
    return out;
  }

  // p(nabla, J): tr[J cos(omega^2/8pi)] for eps = 1, -tr[J sin(omega^2/8pi)]
  // for eps = -1.  A real closed scalar form.
  GridField p_form() const {
    GridField out(base_, 1);
    if (rank_ == 0) return out;
    GridField om = omega_j();
    for (int n = 0; n < base_.num_nodes(); ++n) {
      FormMatrix w = wedge(om.at(n), om.at(n));
      w.scale(1.0 / (8.0 * M_PI));
      const FormMatrix trig = (eps_ == 1) ? cos_form(w) : sin_form(w);
      FormMatrix tr = supertrace(trig, Grading{Eigen::MatrixXcd(j_.at(n).coeff(0))});
      if (eps_ == -1) tr.scale(-1.0);
      out.at(n) = tr;
    }
    return out;
  }

  // Chern characters of the projected connections: ch = tr[P_pm e^{omega^2/8 i pi}].
  // Their difference equals p_form.
  std::pair<GridField, GridField> chern_plus_minus() const {
    GridField chp(base_, 1);
    GridField chm(base_, 1);
    if (rank_ == 0) return {chp, chm};
    GridField om = omega_j();
    const Complex i(0.0, 1.0);
    for (int n = 0; n < base_.num_nodes(); ++n) {
      const Eigen::MatrixXcd jm = j_.at(n).coeff(0);
      const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(rank_, rank_);
      // eps = 1: P_pm = (I pm J)/2; eps = -1: P_pm = (I mp i J)/2 on the
      // complexification.
      const Eigen::MatrixXcd pp =
          (eps_ == 1) ? Eigen::MatrixXcd(0.5 * (id + jm)) : Eigen::MatrixXcd(0.5 * (id - i * jm));
      const Eigen::MatrixXcd pm =
          (eps_ == 1) ? Eigen::MatrixXcd(0.5 * (id - jm)) : Eigen::MatrixXcd(0.5 * (id + i * jm));
      FormMatrix w = wedge(om.at(n), om.at(n));
      // curvature of the projected connection is -P omega^2 P / 4; the Chern
      // form is tr[e^{-R/(2 i pi)}] restricted, i.e. tr[P e^{P omega^2 P/(8 i pi)}].
      w.scale(1.0 / (8.0 * i * M_PI));
      auto project = [&](const Eigen::MatrixXcd& p) {
        FormMatrix pw = mat_times_form(p, form_times_mat(w, p));
        FormMatrix e = exp_neg(-1.0 * pw);
        return form_trace(mat_times_form(p, form_times_mat(e, p)));
      };
      chp.at(n) = project(pp);
      chm.at(n) = project(pm);
    }
    return {chp, chm};
  }

 private:
  BaseGrid base_;
  int rank_ = 0;
  int eps_ = 1;
  Eigen::MatrixXcd pairing_;
  std::vector<Eigen::MatrixXcd> holonomies_;
  GridField j_;
};

// p(A', J) = (1/sqrt(eps)) phi tr[J e^{-A^2}] for the ungraded case
// A = nabla^u = nabla + omega/2, with the curvature computed by the discrete
// exterior derivative: A^2 = d(omega/2) + (omega/2)^2.
inline GridField p_super(const DualityBundle& b) {
  if (b.rank() == 0) return GridField(b.base(), 1);
  GridField om = b.omega_j();
  GridField half = om;
  half.scale(0.5);
  GridField out(b.base(), 1);
  const Complex pref = 1.0 / sqrt_eps(b.eps());
  GridField dhalf = (b.base().dim > 0) ? exterior_d(half) : GridField(b.base(), b.rank());
  for (int n = 0; n < b.base().num_nodes(); ++n) {
    FormMatrix asq = dhalf.at(n) + wedge(half.at(n), half.at(n));
    FormMatrix tr = phi(supertrace(exp_neg(asq), Grading{Eigen::MatrixXcd(b.j_field().at(n).coeff(0))}));
    tr.scale(pref);
    out.at(n) = tr;
  }
  return out;
}

// Transgression p-tilde between two J's along a path j_path(s), s in [0, 1],
// with j_path(0) = J_2 and j_path(1) = J_1:
//   integralds (2 i pi)^{-1/2} (1/2 sqrt(eps)) phi tr[J [J^{-1} dJ/ds, X] e^{-A^2}],
// with X = omega(s)/2 and the ordinary matrix commutator.
inline GridField p_tilde(const BaseGrid& base, int eps, const Eigen::MatrixXcd& pairing,
                         const std::vector<Eigen::MatrixXcd>& holonomies,
                         const std::function<GridField(double)>& j_path, double tol = 1e-8) {
  const Complex pref = 1.0 / (2.0 * sqrt_eps(eps) * sqrt_two_i_pi());
  auto integrand = [&](double s) {
    DualityBundle bs(base, eps, pairing, holonomies, j_path(s));
    GridField om = bs.omega_j();
    // Path derivative by central finite difference.
    const double ds = 1e-5;
    GridField jp = j_path(std::min(1.0, s + ds));
    GridField jm = j_path(std::max(0.0, s - ds));
    const double width = std::min(1.0, s + ds) - std::max(0.0, s - ds);
    GridField out(base, 1);
    GridField half_field = om;
    half_field.scale(0.5);
    GridField dhalf = (base.dim > 0) ? exterior_d(half_field) : GridField(base, bs.rank());
    for (int n = 0; n < base.num_nodes(); ++n) {
      const Eigen::MatrixXcd jmat = bs.j_field().at(n).coeff(0);
      const Eigen::MatrixXcd djds = (jp.at(n).coeff(0) - jm.at(n).coeff(0)) / width;
      const Eigen::MatrixXcd r = static_cast<double>(eps) * jmat * djds;
      FormMatrix x = half_field.at(n);
      FormMatrix comm = mat_times_form(r, x) - form_times_mat(x, r);
      FormMatrix asq = dhalf.at(n) + wedge(half_field.at(n), half_field.at(n));
      FormMatrix inner = wedge(comm, exp_neg(asq));
      FormMatrix tr = phi(supertrace(inner, Grading{jmat}));
      tr.scale(pref);
      out.at(n) = tr;
    }
    return out;
  };
  auto norm = [](const GridField& g) { return g.max_norm(); };
  return adaptive_simpson<GridField>(integrand, 0.0, 1.0, tol, norm);
}

// A Z-graded duality complex: graded ranks, eps-symmetric pairing vanishing
// unless degrees sum to the top degree n, a covariantly-constant degree-1
// differential v with (v e, e') + (e, v e') = 0, and an admissible J field
// with J E^i = E^{n-i}.
class DualityComplex {
 public:
  DualityComplex(BaseGrid base, std::vector<int> graded_ranks, int eps,
                 Eigen::MatrixXcd pairing, Eigen::MatrixXcd v,
                 std::vector<Eigen::MatrixXcd> holonomies, GridField j_field,
                 double tol = 1e-10)
      : bundle_(std::move(base), eps, std::move(pairing), std::move(holonomies),
                std::move(j_field), tol),
        graded_ranks_(std::move(graded_ranks)),
        v_(std::move(v)) {
    const int r = bundle_.rank();
    n_ = static_cast<int>(graded_ranks_.size()) - 1;
    if (n_ < 0) throw std::invalid_argument("DualityComplex: empty grading");
    int total = 0;
    for (int k : graded_ranks_) {
      if (k < 0) throw std::invalid_argument("DualityComplex: negative rank");
      total += k;
    }
    if (total != r) throw std::invalid_argument("DualityComplex: grading ranks must sum to rank");
    offsets_.assign(graded_ranks_.size() + 1, 0);
    for (std::size_t i = 0; i < graded_ranks_.size(); ++i)
      offsets_[i + 1] = offsets_[i] + graded_ranks_[i];
    number_op_ = Eigen::MatrixXcd::Zero(r, r);
    for (std::size_t i = 0; i < graded_ranks_.size(); ++i)
      for (int k = offsets_[i]; k < offsets_[i + 1]; ++k)
        number_op_(k, k) = static_cast<double>(i);

    detail::require_real(v_, "DualityComplex v");
    if (v_.rows() != r || v_.cols() != r)
      throw std::invalid_argument("DualityComplex: v shape mismatch");
    if ((v_ * v_).norm() > tol * std::max(1.0, v_.norm() * v_.norm()))
      throw std::invalid_argument("DualityComplex: v^2 != 0");
    check_block_degree(v_, 1, tol, "DualityComplex: v is not degree +1");
    const Eigen::MatrixXcd& p = bundle_.pairing();
    if ((v_.transpose() * p + p * v_).norm() > tol * std::max(1.0, v_.norm() * p.norm()))
      throw std::invalid_argument("DualityComplex: (ve, e') + (e, ve') != 0");
    for (const auto& u : bundle_.holonomies())
      if ((u * v_ - v_ * u).norm() > tol * std::max(1.0, u.norm() * v_.norm()))
        throw std::invalid_argument("DualityComplex: v not covariantly constant");
    // Pairing vanishes unless degrees sum to n.
    for (int bi = 0; bi <= n_; ++bi)
      for (int bj = 0; bj <= n_; ++bj) {
        if (bi + bj == n_ || graded_ranks_[bi] == 0 || graded_ranks_[bj] == 0) continue;
        if (p.block(offsets_[bi], offsets_[bj], graded_ranks_[bi], graded_ranks_[bj]).norm() >
            tol)
          throw std::invalid_argument("DualityComplex: pairing not degree-complementary");
      }
    // Holonomies preserve the grading; J exchanges degrees i and n - i.
    for (const auto& u : bundle_.holonomies())
      check_block_degree(u, 0, tol, "DualityComplex: holonomy does not preserve grading");
    for (int node = 0; node < bundle_.base().num_nodes(); ++node) {
      const Eigen::MatrixXcd jm = bundle_.j_field().at(node).coeff(0);
      for (int bi = 0; bi <= n_; ++bi)
        for (int bj = 0; bj <= n_; ++bj) {
          if (bi + bj == n_ || graded_ranks_[bi] == 0 || graded_ranks_[bj] == 0) continue;
          if (jm.block(offsets_[bi], offsets_[bj], graded_ranks_[bi], graded_ranks_[bj])
                  .norm() > tol * std::max(1.0, jm.norm()))
            throw std::invalid_argument("DualityComplex: J E^i != E^{n-i}");
        }
    }
  }

  const DualityBundle& bundle() const { return bundle_; }
  const BaseGrid& base() const { return bundle_.base(); }
  int rank() const { return bundle_.rank(); }
  int eps() const { return bundle_.eps(); }
  int top_degree() const { return n_; }
  const std::vector<int>& graded_ranks() const { return graded_ranks_; }
  const Eigen::MatrixXcd& v() const { return v_; }
  const Eigen::MatrixXcd& number_operator() const { return number_op_; }

  // Adjoint of v for <.,.> = (., J .): v* = -J^{-1} v J (from the pairing
  // antisymmetry of v), evaluated nodewise.
  Eigen::MatrixXcd v_star_at(int node) const {
    const Eigen::MatrixXcd jm = bundle_.j_field().at(node).coeff(0);
    return Eigen::MatrixXcd(-static_cast<double>(eps()) * jm * v_ * jm);
  }

  // Endomorphism-valued form part of C_t = nabla^u + (sqrt(t)/2)(v + v*):
  // degree-0 term (sqrt(t)/2)(v + v*), degree-1 term omega/2.
  GridField c_field(double t) const {
    return assemble(t, +1.0);
  }

  // D_t = (sqrt(t)/2)(v* - v) + omega/2.
  GridField d_field(double t) const {
    return assemble(t, -1.0);
  }

  // Grading involution tau = (-1)^N.
  Eigen::MatrixXcd tau_mat() const {
    Eigen::MatrixXcd tau = Eigen::MatrixXcd::Zero(rank(), rank());
    for (int i = 0; i < rank(); ++i) {
      const int deg = static_cast<int>(std::lround(number_op_(i, i).real()));
      tau(i, i) = (deg % 2 == 0) ? 1.0 : -1.0;
    }
    return tau;
  }

  // Matrix-valued forms on a graded fibre multiply with the Koszul sign rule:
  // an odd endomorphism (v, v*) anticommutes with odd-degree forms.  The map
  // sending a k-form coefficient c to c tau^k is a self-inverse algebra
  // isomorphism from that convention onto the plain coefficient-wise wedge, so
  // products and exponentials are evaluated through it.
  FormMatrix koszul_twist(const FormMatrix& a) const {
    const Eigen::MatrixXcd tau = tau_mat();
    FormMatrix out(a.num_generators(), a.fiber_dim());
    for (const auto& [mask, c] : a.terms()) {
      if (std::popcount(mask) % 2 == 0)
        out.add_term(mask, c);
      else
        out.add_term(mask, Eigen::MatrixXcd(c * tau));
    }
    return out;
  }

  // Ordinary fibre trace of a graded-convention form given its twisted
  // (plain-convention) representative.
  FormMatrix trace_graded(const FormMatrix& ahat) const {
    const Eigen::MatrixXcd tau = tau_mat();
    FormMatrix out(ahat.num_generators(), 1);
    for (const auto& [mask, c] : ahat.terms()) {
      Eigen::MatrixXcd m(1, 1);
      m(0, 0) = (std::popcount(mask) % 2 == 0) ? c.trace() : Eigen::MatrixXcd(c * tau).trace();
      out.add_term(mask, m);
    }
    return out;
  }

  // Curvature C_t^2 = d M + M^2 for M = c_field(t), in the twisted (plain
  // wedge) picture; koszul_twist of the result recovers the graded curvature.
  GridField c_squared(double t) const {
    GridField m = c_field(t);
    GridField dm = (base().dim > 0) ? exterior_d(m) : GridField(base(), rank());
    GridField out(base(), rank());
    for (int a = 0; a < base().dim; ++a) out.set_twist(a, m.twist(a));
    for (int n = 0; n < base().num_nodes(); ++n) {
      const FormMatrix mh = koszul_twist(m.at(n));
      out.at(n) = koszul_twist(dm.at(n)) + wedge(mh, mh);
    }
    return out;
  }

  // p(A', J(t)) = (1/sqrt(eps)) phi tr[J(1) e^{-C_t^2}].
  GridField p_of_t(double t) const {
    GridField csq = c_squared(t);
    GridField out(base(), 1);
    const Complex pref = 1.0 / sqrt_eps(eps());
    for (int n = 0; n < base().num_nodes(); ++n) {
      const Eigen::MatrixXcd jm = bundle_.j_field().at(n).coeff(0);
      FormMatrix tr = phi(trace_graded(mat_times_form(jm, exp_neg(csq.at(n)))));
      tr.scale(pref);
      out.at(n) = tr;
    }
    return out;
  }

  // Degree-0 heat trace tr[J(1) e^{-C_t^2}] at a node (McKean-Singer check).
  Complex heat_trace(double t, int node = 0) const {
    GridField csq = c_squared(t);
    const Eigen::MatrixXcd jm = bundle_.j_field().at(node).coeff(0);
    return trace_graded(mat_times_form(jm, exp_neg(csq.at(node)))).coeff(0)(0, 0);
  }

  // eta integrand: (2 i pi)^{-1/2} (1/(2 t sqrt(eps))) phi tr[J(1) [N, D_t] e^{-C_t^2}],
  // oriented so that d/dt p(A', J(t)) = d eta_t(t) (checked by finite
  // differences; fixes the sign branch left open by the v* convention).
  GridField eta_t(double t) const {
    GridField csq = c_squared(t);
    GridField dt = d_field(t);
    GridField out(base(), 1);
    const Complex pref = -1.0 / (2.0 * t * sqrt_eps(eps()) * sqrt_two_i_pi());
    for (int n = 0; n < base().num_nodes(); ++n) {
      const Eigen::MatrixXcd jm = bundle_.j_field().at(n).coeff(0);
      const FormMatrix dh = koszul_twist(dt.at(n));
      FormMatrix nd = mat_times_form(number_op_, dh) - form_times_mat(dh, number_op_);
      FormMatrix inner = mat_times_form(jm, wedge(nd, exp_neg(csq.at(n))));
      FormMatrix tr = phi(trace_graded(inner));
      tr.scale(pref);
      out.at(n) = tr;
    }
    return out;
  }

  // eta-form: minus the integral of eta_t over (0, infinity), evaluated in
  // u = ln t with a fitted O(t^{-3/2}) tail beyond t_max.
  GridField eta_form(double t_min = 1e-6, double t_max = 1e6, double tol = 1e-9) const {
    auto integrand = [&](double u) {
      const double t = std::exp(u);
      GridField g = eta_t(t);
      g.scale(t);  // dt = t du
      return g;
    };
    auto norm = [](const GridField& g) { return g.max_norm(); };
    GridField out = adaptive_simpson<GridField>(integrand, std::log(t_min), std::log(t_max),
                                                tol, norm);
    // Tail estimate from eta(t) ~ K t^{-3/2}: integral beyond t_max is
    // 2 t_max eta(t_max).
    GridField tail = eta_t(t_max);
    tail.scale(2.0 * t_max);
    out += tail;
    out.scale(-1.0);
    return out;
  }

  // p(nabla^E, J^E) of the underlying duality bundle.
  GridField p_form() const { return bundle_.p_form(); }

  // The induced duality complex on fiberwise cohomology (v = 0, restricted
  // pairing and J, induced flat holonomies, harmonic-projected J field).
  DualityComplex induced_duality(double cutoff = 1e-8) const {
    const int r = rank();
    // Harmonic kernel at a node: kernel of (v + v*)^2, self-adjoint for the
    // metric h = P J.
    auto kernel_at = [&](int node) {
      const Eigen::MatrixXcd h = bundle_.metric().at(node).coeff(0);
      const Eigen::MatrixXcd w = v_ + v_star_at(node);
      const Eigen::MatrixXcd lap = w * w;  // = v v* + v* v
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hs(h);
      const Eigen::MatrixXcd hroot = hs.operatorSqrt();
      const Eigen::MatrixXcd hroot_inv = hs.operatorInverseSqrt();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hroot * lap * hroot_inv);
      const auto& ev = es.eigenvalues();
      const double cut = cutoff * std::max(1.0, ev.size() > 0 ? ev(ev.size() - 1) : 0.0);
      int k = 0;
      while (k < ev.size() && ev(k) <= cut) ++k;
      return Eigen::MatrixXcd(hroot_inv * es.eigenvectors().leftCols(k));
    };
    const Eigen::MatrixXcd k0 = kernel_at(0);
    const int htot = static_cast<int>(k0.cols());
    // Degree-sorted class representatives at the origin.
    Eigen::MatrixXcd classes(r, htot);
    std::vector<int> hranks(graded_ranks_.size(), 0);
    int col = 0;
    for (std::size_t i = 0; htot > 0 && i < graded_ranks_.size(); ++i) {
      if (graded_ranks_[i] == 0) continue;
      Eigen::MatrixXcd blockpart = Eigen::MatrixXcd::Zero(r, htot);
      blockpart.middleRows(offsets_[i], graded_ranks_[i]) =
          k0.middleRows(offsets_[i], graded_ranks_[i]);
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(blockpart,
                                             Eigen::ComputeThinU | Eigen::ComputeThinV);
      int rk = 0;
      for (int s = 0; s < svd.singularValues().size(); ++s)
        if (svd.singularValues()(s) > 1e-10 * svd.singularValues()(0)) ++rk;
      classes.middleCols(col, rk) = svd.matrixU().leftCols(rk);
      hranks[i] = rk;
      col += rk;
    }
    if (col != htot) throw std::runtime_error("induced_duality: harmonic degree split failed");
    // Real representatives: the harmonic spaces are real, so take real parts
    // of the (possibly phase-rotated) singular vectors.
    for (int c = 0; c < htot; ++c) {
      Eigen::VectorXcd z = classes.col(c);
      int imax = 0;
      z.cwiseAbs().maxCoeff(&imax);
      z *= std::abs(z(imax)) / z(imax);
      classes.col(c) = z.real().cast<Complex>();
    }

    const Eigen::MatrixXcd h0 = bundle_.metric().at(0).coeff(0);
    auto class_coords = [&](const Eigen::MatrixXcd& k, const Eigen::MatrixXcd& h,
                            const Eigen::MatrixXcd& z) {
      return Eigen::MatrixXcd((k.adjoint() * h * k).inverse() * (k.adjoint() * h * z));
    };
    // Induced pairing and J on the class basis.
    Eigen::MatrixXcd ph = classes.transpose() * bundle_.pairing() * classes;
    const Eigen::MatrixXcd j0 = bundle_.j_field().at(0).coeff(0);
    Eigen::MatrixXcd jh = class_coords(classes, h0, j0 * classes);
    // Induced holonomies.
    std::vector<Eigen::MatrixXcd> hols;
    for (const auto& u : bundle_.holonomies())
      hols.push_back(class_coords(classes, h0, u * classes));
    // Harmonic-projected J field over the base.
    GridField jfield(base(), htot);
    for (int node = 0; node < base().num_nodes(); ++node) {
      const Eigen::MatrixXcd h = bundle_.metric().at(node).coeff(0);
      const Eigen::MatrixXcd kx = kernel_at(node);
      const Eigen::MatrixXcd rep = kx * class_coords(kx, h, classes);
      const Eigen::MatrixXcd jm = bundle_.j_field().at(node).coeff(0);
      Eigen::MatrixXcd jhx = class_coords(rep, h, jm * rep);
      jfield.at(node) = FormMatrix::from_term(base().dim, 0,
                                              Eigen::MatrixXcd(jhx.real().cast<Complex>()));
    }
    std::vector<int> hr(hranks.begin(), hranks.end());
    ph = ph.real().cast<Complex>();
    for (auto& u : hols) u = u.real().cast<Complex>();
    return DualityComplex(base(), hr, eps(), ph,
                          Eigen::MatrixXcd::Zero(htot, htot), hols, jfield, 1e-6);
  }

 private:
  GridField assemble(double t, double vsign) const {
    GridField om = bundle_.omega_j();
    const double st = std::sqrt(t);
    GridField out(base(), rank());
    for (int a = 0; a < base().dim; ++a) out.set_twist(a, om.twist(a));
    for (int n = 0; n < base().num_nodes(); ++n) {
      FormMatrix m = om.at(n);
      m.scale(0.5);
      m.add_term(0, Eigen::MatrixXcd(0.5 * st * (v_star_at(n) + vsign * v_)));
      out.at(n) = m;
    }
    return out;
  }

  void check_block_degree(const Eigen::MatrixXcd& m, int deg, double tol,
                          const char* msg) const {
    for (int bi = 0; bi <= n_; ++bi)
      for (int bj = 0; bj <= n_; ++bj) {
        if (bi == bj + deg || graded_ranks_[bi] == 0 || graded_ranks_[bj] == 0) continue;
        if (m.block(offsets_[bi], offsets_[bj], graded_ranks_[bi], graded_ranks_[bj]).norm() >
            tol * std::max(1.0, m.norm()))
          throw std::invalid_argument(msg);
      }
  }

  DualityBundle bundle_;
  std::vector<int> graded_ranks_;
  Eigen::MatrixXcd v_;
  Eigen::MatrixXcd number_op_;
  std::vector<int> offsets_;
  int n_ = 0;
};

// Signature of a nondegenerate real symmetric matrix.
inline int signature(const Eigen::MatrixXcd& pairing, double tol = 1e-10) {
  detail::require_real(pairing, "signature");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (pairing + pairing.adjoint()));
  int sig = 0;
  const double scale = es.eigenvalues().cwiseAbs().maxCoeff();
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double l = es.eigenvalues()(i);
    if (std::abs(l) < tol * scale) throw std::invalid_argument("signature: degenerate pairing");
    sig += (l > 0) ? 1 : -1;
  }
  return sig;
}

struct SymplecticNormalForm {
  std::vector<double> angles;  // Krein-oriented elliptic angles in (-pi, pi]
  int hyperbolic_rank = 0;     // number of eigenvalues off the unit circle
};

// Normal form of a real symplectic matrix: elliptic rotation angles with
// Krein-sign orientation (R(theta) maps to {theta}) plus the hyperbolic rank.
inline SymplecticNormalForm symplectic_normal_form(const Eigen::MatrixXd& m,
                                                   double tol = 1e-8) {
  const int dim = static_cast<int>(m.rows());
  if (m.cols() != dim || dim % 2 != 0)
    throw std::invalid_argument("symplectic_normal_form: need even square matrix");
  const int half = dim / 2;
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(dim, dim);
  omega.topRightCorner(half, half) = Eigen::MatrixXd::Identity(half, half);
  omega.bottomLeftCorner(half, half) = -Eigen::MatrixXd::Identity(half, half);
  if ((m.transpose() * omega * m - omega).norm() > 1e-10 * std::max(1.0, m.norm() * m.norm()))
    throw std::invalid_argument("symplectic_normal_form: matrix is not symplectic");

  Eigen::ComplexEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("symplectic_normal_form: eigendecomposition failed");
  const auto& vals = es.eigenvalues();
  const auto& vecs = es.eigenvectors();
  // Defectiveness check for unit-circle eigenvalues: the eigenvector matrix
  // must be well-conditioned for the normal form to exist.
  {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(vecs);
    if (svd.singularValues()(svd.singularValues().size() - 1) <
        tol * svd.singularValues()(0)) {
      bool on_circle = false;
      for (int i = 0; i < vals.size(); ++i)
        if (std::abs(std::abs(vals(i)) - 1.0) <= tol) on_circle = true;
      if (on_circle)
        throw std::invalid_argument("symplectic_normal_form: non-generic holonomy");
    }
  }

  SymplecticNormalForm out;
  const Eigen::MatrixXcd omc = omega.cast<Complex>();
  for (int i = 0; i < vals.size(); ++i) {
    const Complex l = vals(i);
    if (std::abs(std::abs(l) - 1.0) > tol) {
      ++out.hyperbolic_rank;
      continue;
    }
    if (l.imag() > tol) {
      // One representative per conjugate pair; Krein sign from the symplectic
      // form on the eigenvector.
      const Eigen::VectorXcd x = vecs.col(i);
      const Complex s = Complex(0.0, 1.0) * (x.conjugate().transpose() * omc * x)(0, 0);
      const double theta = std::arg(l);
      out.angles.push_back(s.real() >= 0.0 ? theta : -theta);
    } else if (std::abs(l.imag()) <= tol) {
      // Real unit eigenvalue: +1 contributes angle 0, -1 contributes pi.
      const double theta = (l.real() > 0.0) ? 0.0 : M_PI;
      out.angles.push_back(theta);
    }
  }
  // Real unit eigenvalues were counted once per eigenvalue; each plane holds
  // two of them, so collapse duplicates pairwise.
  std::vector<double> reals, rest;
  for (double a : out.angles)
    (a == 0.0 || a == M_PI ? reals : rest).push_back(a);
  std::sort(reals.begin(), reals.end());
  for (std::size_t i = 0; i + 1 < reals.size(); i += 2) rest.push_back(reals[i]);
  if (reals.size() % 2 != 0)
    throw std::invalid_argument("symplectic_normal_form: non-generic holonomy");
  out.angles = rest;
  std::sort(out.angles.begin(), out.angles.end());
  return out;
}

}  // namespace flatinv

#endif  // FLATINV_DUALITY_HPP
