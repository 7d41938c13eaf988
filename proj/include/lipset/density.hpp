#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lipset/interval_set.hpp"

namespace lipset {

enum class Side { left, right, both };
enum class Verdict { holds, fails, inconclusive };

std::string to_string(Side s);
std::string to_string(Verdict v);

struct DensityQuery {
  Rational x;
  Side side = Side::both;
  Rational r;
};

/// |E ∩ [x-r, x]| / r, |E ∩ [x, x+r]| / r, or the larger of the two.
Rational density_ratio(const IntervalSet& E, const DensityQuery& q);
Rational left_ratio(const IntervalSet& E, const Rational& x, const Rational& r);
Rational right_ratio(const IntervalSet& E, const Rational& x, const Rational& r);
Rational max_ratio(const IntervalSet& E, const Rational& x, const Rational& r);

struct RatioMin {
  Rational value;  ///< inf over r in (0, delta] (attained)
  Rational r;      ///< a radius attaining it
};

/// inf over r in (0, delta] of max(|E∩[a-r,a]|, |E∩[b,b+r]|) / r.
/// With a == b this is the quantity behind membership in E^{γ,δ}.
RatioMin min_max_ratio(const IntervalSet& E, const Rational& a, const Rational& b, const Rational& delta);

struct Membership {
  bool member = false;
  Rational worst_r;
  Rational ratio;  ///< the minimal max-of-sides ratio over (0, delta]
  Rational left;
  Rational right;
};

Membership level_set_membership(const IntervalSet& E, const Rational& x, const Rational& gamma,
                                const Rational& delta);

struct LevelSet {
  IntervalSet inner;  ///< certified subset of E^{γ,δ} ∩ window
  IntervalSet outer;  ///< certified superset
  Rational margin;    ///< longest undecided piece; 0 means inner == outer
  bool exact() const { return margin == 0; }
};

LevelSet level_set(const IntervalSet& E, const Rational& gamma, const Rational& delta, const Interval& window,
                   const Rational& resolution);

struct DensityReport {
  Rational point;
  Verdict verdict = Verdict::inconclusive;
  Rational worst_r;
  Rational ratio;
  Side side = Side::both;
  Rational left;
  Rational right;
};

/// Some r in (0, eps) with max one-sided ratio > 1 - eps.
DensityReport check_weakly_dense_at(const IntervalSet& E, const Rational& x, const Rational& eps);

struct GridRatio {
  Rational r;
  Rational left;
  Rational right;
};

struct ScaleReport {
  DensityReport summary;
  std::vector<GridRatio> ratios;
};

/// Max one-sided ratio at every grid radius; holds when all are >= 1 - tolerance.
ScaleReport check_strongly_one_sided_dense_at(const IntervalSet& E, const Rational& x,
                                              const std::vector<Rational>& r_grid, const Rational& tolerance);

/// sup over r in (0, eps] of max one-sided ratio, with an attaining radius.
RatioMin sup_max_ratio(const IntervalSet& E, const Rational& x, const Rational& eps);
/// inf over r in (0, eps] of the centred ratio |E∩[x-r,x+r]| / (2r).
RatioMin min_centered_ratio(const IntervalSet& E, const Rational& x, const Rational& eps);

/// geometric grid start, start*factor, ... (count terms)
std::vector<Rational> geometric_grid(const Rational& start, const Rational& factor, int count);

struct UDTWitness {
  std::vector<Rational> gammas;
  std::vector<Rational> deltas;
  std::size_t depth() const { return gammas.size(); }
  /// Throws std::invalid_argument unless gammas rise strictly in (0,1) and
  /// deltas fall strictly and stay positive.
  void validate() const;

  friend bool operator==(const UDTWitness&, const UDTWitness&) = default;
};

UDTWitness merge_udt_witnesses(const std::vector<UDTWitness>& ws);

/// For each gamma pick the largest delta on the ladder start, start/2, ...
/// (strictly below the previous one) at which every probe is a member.
UDTWitness fit_udt_witness(const IntervalSet& E, const std::vector<Rational>& gammas,
                           const std::vector<Rational>& probes, const Rational& start, int max_halvings = 60);

/// Blocks [2^n - 2^(n-2), 2^n] for n = top, top-1, ..., top-depth+1.
IntervalSet prop5_example(int depth, int top = 1);
/// The same set with the closure point 0 added (degenerate component).
IntervalSet prop5_closure(int depth, int top = 1);
/// |E ∩ [0,t]| for the untruncated two-sided union, t >= 0, exact.
Rational prop5_cumulative(const Rational& t);

}  // namespace lipset
