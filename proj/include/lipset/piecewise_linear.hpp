#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "lipset/interval_set.hpp"

namespace lipset {

/// Continuous piecewise-linear function given by its breakpoints and values.
/// Outside [first, last] breakpoint it is constant (clamped).
class PiecewiseLinear {
 public:
  PiecewiseLinear() : xs_{Rational(0)}, ys_{Rational(0)} {}
  /// Throws std::invalid_argument unless xs is nonempty, strictly increasing
  /// and matches ys in length.
  PiecewiseLinear(std::vector<Rational> xs, std::vector<Rational> ys);

  static PiecewiseLinear constant(const Interval& domain, const Rational& c);
  /// y = value_at_lo + slope * (x - lo) on the domain.
  static PiecewiseLinear affine(const Interval& domain, const Rational& value_at_lo, const Rational& slope);

  const std::vector<Rational>& breakpoints() const { return xs_; }
  const std::vector<Rational>& values() const { return ys_; }
  Interval domain() const { return Interval(xs_.front(), xs_.back()); }
  std::size_t size() const { return xs_.size(); }

  Rational operator()(const Rational& x) const;
  /// Slope of each of the size()-1 segments.
  std::vector<Rational> slopes() const;
  /// One-sided derivatives; zero outside the domain.
  Rational slope_left(const Rational& x) const;
  Rational slope_right(const Rational& x) const;

  friend bool operator==(const PiecewiseLinear&, const PiecewiseLinear&) = default;

 private:
  std::size_t segment_index(const Rational& x) const;  // k with xs_[k] <= x < xs_[k+1]

  std::vector<Rational> xs_;
  std::vector<Rational> ys_;
};

/// φ(x) = |E ∩ [base, x]| (negative to the left of base), on the hull of E and base.
PiecewiseLinear build_phi(const IntervalSet& E, const Rational& basepoint);
/// Same but on an explicit domain (must contain the basepoint).
PiecewiseLinear build_phi(const IntervalSet& E, const Rational& basepoint, const Interval& domain);

struct MRatio {
  Rational value;     ///< sup{|f(x) - f(y)| : |x - y| <= r} / r
  Rational argmax;    ///< a y attaining the sup
  bool clamped = false;  ///< [x-r, x+r] left the domain
};

MRatio m_ratio(const PiecewiseLinear& f, const Rational& x, const Rational& r);

struct LocalLip {
  Rational big;    ///< Lip f(x)
  Rational little; ///< lip f(x)
};

/// Exact Lip f(x) and lip f(x); x must lie strictly inside the domain.
LocalLip local_lip_exact(const PiecewiseLinear& f, const Rational& x);

struct Sweep {
  std::vector<std::pair<Rational, Rational>> ratios;  ///< (r, M_f(x,r))
  Rational lower;  ///< min over the grid
  Rational upper;  ///< max over the grid
};

Sweep lip_sweep(const PiecewiseLinear& f, const Rational& x, const std::vector<Rational>& r_grid);

struct IncrementViolation {
  Rational a;
  Rational b;
  Rational excess;  ///< |f(a)-f(b)| - factor*|E∩[a,b]| > 0
};

struct IncrementReport {
  bool ok = true;
  std::size_t checked = 0;
  std::optional<Rational> min_margin;  ///< min of factor*|E∩[a,b]| - |f(a)-f(b)|
  std::vector<IncrementViolation> violations;
};

/// |f(a) - f(b)| <= factor * |E ∩ [a,b]| for every listed pair.
IncrementReport check_increment_bound(const PiecewiseLinear& f, const IntervalSet& E,
                                      const std::vector<std::pair<Rational, Rational>>& pairs,
                                      const Rational& factor = 1);

struct AuditReport {
  bool ok = true;
  Rational max_slope_on_E;      ///< largest |slope| over pieces lying in E
  Rational max_slope_off_E;     ///< largest |slope| over pieces meeting E in measure zero
  std::optional<Interval> witness;  ///< first offending piece
};

/// Universal form of the increment bound: holds for all pairs iff |f'| <= factor
/// on E and f' = 0 off E, which is decided on the common refinement.
AuditReport audit_increment_bound(const PiecewiseLinear& f, const IntervalSet& E, const Rational& factor = 1);

PiecewiseLinear add(const PiecewiseLinear& f, const PiecewiseLinear& g);
PiecewiseLinear subtract(const PiecewiseLinear& f, const PiecewiseLinear& g);
PiecewiseLinear scale(const PiecewiseLinear& f, const Rational& c);
PiecewiseLinear negate(const PiecewiseLinear& f);
PiecewiseLinear pointwise_min(const PiecewiseLinear& f, const PiecewiseLinear& g);
PiecewiseLinear pointwise_max(const PiecewiseLinear& f, const PiecewiseLinear& g);
/// max |f| over the domain (exact: attained at a breakpoint).
Rational sup_norm(const PiecewiseLinear& f);
/// max |f - g| over the union of both domains with clamping.
Rational sup_distance(const PiecewiseLinear& f, const PiecewiseLinear& g);
PiecewiseLinear restrict(const PiecewiseLinear& f, const Interval& sub);
/// Joins f then g; requires f's right end to meet g's left end with equal value.
PiecewiseLinear concat(const PiecewiseLinear& f, const PiecewiseLinear& g);
/// Same function on a larger domain (constant continuation).
PiecewiseLinear extend_to(const PiecewiseLinear& f, const Interval& domain);
/// Replaces f on g's domain by g; g must agree with f at its end points.
PiecewiseLinear splice(const PiecewiseLinear& f, const PiecewiseLinear& g);
/// Drops breakpoints where the slope does not change.
PiecewiseLinear simplify(const PiecewiseLinear& f);
/// Adds breakpoints (values unchanged) at the given points inside the domain.
PiecewiseLinear refine(const PiecewiseLinear& f, const std::vector<Rational>& extra);

}  // namespace lipset
