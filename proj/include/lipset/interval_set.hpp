#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lipset/rational.hpp"

namespace lipset {

/// Closed interval [lo, hi] with rational endpoints.
struct Interval {
  Rational lo;
  Rational hi;

  Interval() = default;
  /// Throws std::invalid_argument when lo > hi.
  Interval(Rational lo_, Rational hi_);

  Rational length() const { return hi - lo; }
  bool degenerate() const { return lo == hi; }
  bool contains(const Rational& x) const { return lo <= x && x <= hi; }
  bool interior_contains(const Rational& x) const { return lo < x && x < hi; }
  Rational midpoint() const { return (lo + hi) / 2; }

  friend bool operator==(const Interval&, const Interval&) = default;
};

enum class Degenerate {
  drop,  ///< zero-length pieces are removed (they carry no measure)
  keep,  ///< singletons survive canonicalization, e.g. the closure point {0}
};

/// Finite union of closed rational intervals in canonical form: sorted,
/// pairwise disjoint, and separated by gaps of positive length.
///
/// Values are immutable after construction. A prefix table of measures makes
/// `measure_in` logarithmic, which the density and construction code relies on.
class IntervalSet {
 public:
  IntervalSet() = default;

  static IntervalSet canonicalize(std::vector<Interval> raw, Degenerate policy = Degenerate::drop);
  static IntervalSet of(const Rational& lo, const Rational& hi);
  static IntervalSet point(const Rational& x);

  const std::vector<Interval>& intervals() const { return intervals_; }
  bool empty() const { return intervals_.empty(); }
  std::size_t size() const { return intervals_.size(); }
  bool has_degenerate() const;

  Rational measure() const { return prefix_.empty() ? Rational(0) : prefix_.back(); }
  /// |S ∩ (-inf, t]|
  Rational cumulative(const Rational& t) const;
  /// |S ∩ [a, b]|; zero when b <= a.
  Rational measure_in(const Rational& a, const Rational& b) const;

  bool contains(const Rational& x) const;
  /// True when x lies in the interior of some component.
  bool interior_contains(const Rational& x) const;
  std::optional<Interval> component_containing(const Rational& x) const;

  /// Smallest interval containing the set. Throws on the empty set.
  Interval hull() const;
  /// d(x, S); nullopt stands for +infinity (empty set).
  std::optional<Rational> distance_to(const Rational& x) const;
  /// All endpoints in increasing order (a singleton contributes one value).
  std::vector<Rational> endpoints() const;

  friend bool operator==(const IntervalSet& a, const IntervalSet& b) { return a.intervals_ == b.intervals_; }

 private:
  explicit IntervalSet(std::vector<Interval> canonical);

  std::vector<Interval> intervals_;
  std::vector<Rational> prefix_;  // prefix_[i] = measure of intervals_[0..i]
};

IntervalSet unite(const IntervalSet& a, const IntervalSet& b);
IntervalSet unite(std::span<const IntervalSet> sets);
/// Intersection; zero-length overlaps are dropped.
IntervalSet intersect(const IntervalSet& a, const IntervalSet& b);
IntervalSet clip(const IntervalSet& s, const Interval& window);
/// Closure of window \ S. Throws std::invalid_argument for a degenerate window.
IntervalSet complement_within(const IntervalSet& s, const Interval& window);
/// Closure of A \ B.
IntervalSet difference(const IntervalSet& a, const IntervalSet& b);

/// Lower distance inf{|x - y| : x in S, y in T}; nullopt when either is empty.
std::optional<Rational> distance(const IntervalSet& s, const IntervalSet& t);
/// Whether the closed sets share a point (touching endpoints count).
bool intersects(const IntervalSet& s, const IntervalSet& t);

}  // namespace lipset
