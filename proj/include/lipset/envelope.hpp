#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lipset/piecewise_linear.hpp"

namespace lipset {

/// Lower and upper bounds for a function on a common domain [a,b].
struct Envelope {
  PiecewiseLinear lower;
  PiecewiseLinear upper;
};

/// Functions g with |g - center| <= radius everywhere.
struct Vicinity {
  PiecewiseLinear center;
  PiecewiseLinear radius;

  /// Exact: both sides are piecewise linear, so the test runs on merged breakpoints.
  bool contains(const PiecewiseLinear& g) const;
};

/// Violated hypothesis of a construction, with the offending location.
class PreconditionError : public std::invalid_argument {
 public:
  PreconditionError(const std::string& what, std::optional<Interval> where)
      : std::invalid_argument(what), where_(std::move(where)) {}
  const std::optional<Interval>& where() const { return where_; }

 private:
  std::optional<Interval> where_;
};

struct EnvelopeCheck {
  bool ok = true;
  std::optional<Rational> witness;  ///< a point where strictness or endpoint equality fails
  std::string reason;
};

/// lower < f < upper on the open domain and equality at both ends. Exact: at
/// least one interior merged breakpoint is required and strictness is tested there.
EnvelopeCheck check_envelope(const PiecewiseLinear& f, const Envelope& env);

/// lower < f < upper on the closed interval `on`.
EnvelopeCheck check_strict_on(const PiecewiseLinear& f, const Envelope& env, const Interval& on);

/// Piecewise-linear minorant of d(x, {a,b})^2 on [a,b]: tangent lines at a+2η and
/// b-2η, clipped at 0 and capped. A free edge contributes no term. η is half the
/// distance from E to the nearest pinned edge, or (b-a)/8 when E reaches it.
PiecewiseLinear square_distance_minorant(const Interval& ab, const IntervalSet& E, bool free_lo, bool free_hi,
                                         const Rational& cap = 1);

enum class PartitionRule { adaptive, uniform };

struct RefineOptions {
  std::optional<Interval> active;  ///< compact inside (a,b); default hull of E∩[a,b]
  PartitionRule rule = PartitionRule::adaptive;
  int max_depth = 64;              ///< bisection depth (adaptive)
  long max_blocks = 1 << 20;       ///< block count limit (uniform)
};

struct RefineBlock {
  Rational u;    ///< c_{2i-2}
  Rational t;    ///< c_{2i-1}; the midpoint when the block carries no mass
  Rational v;    ///< c_{2i}
  Rational mass;
  Rational lhs;  ///< (1-δ)(|E∩[u,t]| - |E∩[t,v]|)
  Rational rhs;  ///< f(v) - f(u)
};

struct RefineResult {
  PiecewiseLinear g;
  Interval active;
  std::vector<RefineBlock> blocks;
};

/// Replaces f on the active compact by zigzags g = K ± (1-δ)φ with turning
/// points from balance_point. Needs 0 < δ < ε <= 1, the (1-ε) increment bound for
/// f on the domain, and the envelope strict on the active compact.
RefineResult envelope_refine(const PiecewiseLinear& f, const Envelope& env, const IntervalSet& E,
                             const Rational& epsilon, const Rational& delta, const RefineOptions& options = {});

struct FlattenBlock {
  Rational c;
  Rational d;
  Rational mass;      ///< |E∩[c,d]|
  Rational selected;  ///< E mass inside the chosen H-gaps
  Rational gamma;     ///< slope factor: g = f(c) + γ(φ - φ(c))
  bool kept = false;  ///< no mass: g = f
};

struct FlattenResult {
  PiecewiseLinear g;
  Interval active;
  std::vector<FlattenBlock> blocks;
};

/// Rebuilds f with slope 0 on H. Needs H∩E null, 0 < δ < ε <= 1 and the (1-ε)
/// increment bound for f; the result obeys the (1-δ) bound.
FlattenResult envelope_flatten(const PiecewiseLinear& f, const Envelope& env, const IntervalSet& E,
                               const IntervalSet& H, const Rational& epsilon, const Rational& delta,
                               const RefineOptions& options = {});

}  // namespace lipset
