#pragma once

#include <string>
#include <vector>

#include "lipset/density.hpp"
#include "lipset/piecewise_linear.hpp"

namespace lipset {

/// φ on the window with base point window.lo.
PiecewiseLinear build_monotone_lip1(const IntervalSet& E, const Interval& window);

enum class MonotoneMode { Lip1, lip1 };

struct PointCheck {
  Rational x;
  std::string condition;  ///< which density property was tested at x
  Verdict verdict = Verdict::inconclusive;
  Rational r;             ///< certificate radius
  Rational ratio;         ///< exact ratio at r for the tested set
  bool boundary = false;  ///< x lies in E and in the closure of its complement
};

struct MonotoneReport {
  Verdict verdict = Verdict::holds;
  std::vector<PointCheck> points;
};

/// Lip1: E weakly dense on E, complement strongly dense on its closure.
/// lip1: E strongly one-sided dense on E, complement weakly center dense on its closure.
/// Sampled at endpoints, midpoints of components and gaps, and a uniform grid;
/// every check runs at scale `resolution`.
MonotoneReport check_monotone_conditions(const IntervalSet& E, MonotoneMode mode, const Interval& window,
                                         const Rational& resolution, int grid_points = 32);

struct TernaryDecomposition {
  IntervalSet E1;
  IntervalSet E0;
  IntervalSet Em1;
  Interval window;
};

/// Throws std::invalid_argument on positive-measure overlap or a gap in the cover.
void validate_ternary(const TernaryDecomposition& t);

/// ∫_base^x 1_{E1} - 1_{Em1} on the window.
PiecewiseLinear build_ternary_integral(const TernaryDecomposition& t, const Rational& basepoint);

struct ScaleRatio {
  Rational scale;
  Rational ratio;  ///< sup over intervals containing x of length <= scale
};

struct TernaryPoint {
  Rational x;
  int condition = 1;
  Verdict verdict = Verdict::inconclusive;
  Rational r;       ///< condition 1: radius of the density certificate
  Rational ratio;   ///< condition 1: density ratio; condition 2: value at the finest scale
  std::vector<ScaleRatio> scales;  ///< condition 2 only
};

struct TernaryReport {
  Verdict verdict = Verdict::holds;
  std::vector<TernaryPoint> points;
};

/// Condition 1 at sampled x in E (either E1 or Em1 weakly dense at scale
/// `resolution`); condition 2 at sampled x outside E from the exact supremum of
/// |f(x±v) - f(x)|/v over dyadic scales. Extra probe points may be supplied.
TernaryReport check_ternary(const TernaryDecomposition& t, const IntervalSet& E, const Rational& resolution,
                            const std::vector<Rational>& extra_points = {}, int scales = 12);

/// F1 = E \ Em1, Fm1 = Em1 ∩ E, F0 = closure of the complement of E.
TernaryDecomposition normalize_ternary(const TernaryDecomposition& t, const IntervalSet& E);

/// The (0,∞) example truncated after N blocks inside [-1, top]; E is [1/(2N+1), top].
TernaryDecomposition alternating_ternary_example(int N, const Rational& top = 2);

/// Leftmost t in (r,s) with (1-δ)(|E∩[r,t]| - |E∩[t,s]|) = target.
/// With no mass and target 0 the midpoint is returned.
Rational balance_point(const IntervalSet& E, const Rational& r, const Rational& s, const Rational& target,
                       const Rational& delta);

struct SmallLipBlock {
  Rational lo;
  Rational split;  ///< balance point x_i (midpoint of the block when it carries no mass)
  Rational hi;
  Rational left_mass;
  Rational right_mass;
};

struct SmallLip {
  PiecewiseLinear f;
  Rational epsilon;
  std::vector<SmallLipBlock> blocks;
};

/// Blocks [(i-1)ε, iε] meeting the window; f rises on E to the balance point of
/// each block and falls back on E after it, so 0 <= f <= ε/2.
SmallLip build_small_lip(const IntervalSet& E, const Rational& epsilon, const Interval& window);

struct SumPart {
  std::size_t index = 0;     ///< position in the input list
  bool skipped = false;      ///< touches an earlier part, so no positive ε exists
  Rational epsilon;          ///< ε_n (1 for the first part)
  Rational bound;            ///< 2^-n min{1, d(E_n, earlier parts)}
  Rational sup;              ///< sup_norm(f_n)
  bool constant_off_part = false;  ///< f_n flat on every interval contiguous to E_n
  std::string warning;
};

struct Lip1Sum {
  PiecewiseLinear f;
  std::vector<PiecewiseLinear> terms;  ///< f_n on the common domain (empty for skipped parts)
  std::vector<SumPart> parts;
  std::vector<IntervalSet> used;       ///< E_n actually summed, in order
};

/// f = Σ f_n with f_n the small-lip function of E_n at ε_n. Parts must not
/// overlap in positive measure; only the first may touch the window edge.
Lip1Sum build_lip1_sum(const std::vector<IntervalSet>& parts, const Interval& window);

/// Moves the single part that reaches a window edge (a truncated unbounded
/// part) to the front. Throws if more than one part does.
std::vector<IntervalSet> order_parts_for_sum(const std::vector<IntervalSet>& parts, const Interval& window);

/// Splits a set into shards of hull width about `width`, cutting only inside gaps,
/// so the shards keep positive distance from each other.
std::vector<IntervalSet> split_into_shards(const IntervalSet& part, const Rational& width);

struct OffSetCheck {
  Rational x;
  long n1 = 0;
  Rational r;      ///< d(x, E_1 ∪ ... ∪ E_n1)
  Rational ratio;  ///< M_f(x, r)
  Rational bound;  ///< 2 * 2^-n1
  bool ok = false;
};

/// The off-E estimate of the sum at x for tolerance eps: n1 = max{1, -floor(log2 eps) + 1}.
OffSetCheck lip1_sum_off_check(const Lip1Sum& s, const Rational& x, const Rational& eps);

}  // namespace lipset
