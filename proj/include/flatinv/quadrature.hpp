// Adaptive Simpson quadrature for vector-space-valued integrands.

#ifndef FLATINV_QUADRATURE_HPP
#define FLATINV_QUADRATURE_HPP

#include <cmath>
#include <functional>
#include <stdexcept>

namespace flatinv {

// Value must support v + v and v.scale(double) (in place); Norm maps a value
// to a nonnegative double.  The error control is the usual |S2 - S1| / 15
// Richardson estimate, subdivided recursively.
template <class Value, class Fn, class Norm>
Value adaptive_simpson(const Fn& f, double a, double b, double tol, const Norm& norm,
                       int max_depth = 18) {
  auto simpson = [](const Value& fa, const Value& fm, const Value& fb, double h) {
    Value s = fm;
    s.scale(4.0);
    s = s + fa + fb;
    s.scale(h / 6.0);
    return s;
  };
  struct Rec {
    const Fn& f;
    const Norm& norm;
    decltype(simpson)& simp;

    Value run(double a, double b, const Value& fa, const Value& fm, const Value& fb,
              const Value& whole, double tol, int depth) {
      const double m = 0.5 * (a + b);
      Value fml = f(0.5 * (a + m));
      Value fmr = f(0.5 * (m + b));
      Value left = simp(fa, fml, fm, m - a);
      Value right = simp(fm, fmr, fb, b - m);
      Value sum = left + right;
      Value diff = sum;
      Value neg = whole;
      neg.scale(-1.0);
      diff = diff + neg;
      if (depth <= 0 || norm(diff) < 15.0 * tol) {
        diff.scale(1.0 / 15.0);
        return sum + diff;
      }
      return run(a, m, fa, fml, fm, left, 0.5 * tol, depth - 1) +
             run(m, b, fm, fmr, fb, right, 0.5 * tol, depth - 1);
    }
  };
  if (!(b > a)) throw std::invalid_argument("adaptive_simpson: empty interval");
  Value fa = f(a), fm = f(0.5 * (a + b)), fb = f(b);
  Value whole = simpson(fa, fm, fb, b - a);
  Rec rec{f, norm, simpson};
  return rec.run(a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace flatinv

#endif  // FLATINV_QUADRATURE_HPP
