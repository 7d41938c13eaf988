#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lipset/density.hpp"
#include "lipset/envelope.hpp"

namespace lipset {

/// Closed sets F_1 ⊆ F_2 ⊆ ... inside a window, with target E inside every
/// G_n = window \ F_n. Window ends not in F_n are free edges.
struct NestedClosedSystem {
  Interval window;
  std::vector<IntervalSet> F;
  IntervalSet E;

  std::size_t depth() const { return F.size(); }
  /// Closed components [a,b] of the closure of window \ F_n (n is 1-based).
  std::vector<Interval> components(std::size_t n) const;
  bool free_lo(std::size_t n) const;
  bool free_hi(std::size_t n) const;
  /// Nesting, E ⊆ G_n up to measure zero, and every component of G_n meets E.
  void validate() const;
};

/// Smith-Volterra-Cantor truncation: [0,1] with the middle 4^-k removed from
/// each of the 2^(k-1) pieces at steps k = 1..depth.
IntervalSet smith_volterra_cantor(int depth);

/// E = SVC(depth); G_n is the 4^-n/8 neighbourhood of SVC(n); window [-1,2].
NestedClosedSystem fat_cantor_system(int stages, int depth);

/// γ_n = 1 - 2^-(n+1) with δ_n fitted on component end and mid points.
UDTWitness fat_cantor_witness(const NestedClosedSystem& sys, int stages);

/// K_n = max{100, least integer above 2(2^{3n}-1)/(γ(2^n-1))}. With K_n in place
/// of 100 the short-side case of the witness search survives the smaller
/// margin between 1-2^{-3n} and 1-2^{-2n}.
long witness_multiplier(int n, const Rational& gamma);

struct WitnessPair {
  Rational x;
  Rational y;
  Rational ratio;  ///< |f_n(x) - f_n(y)| / |x - y|
  Rational bound;  ///< (1 - 2^-2n) γ_n
  bool fallback = false;  ///< found by exhaustive search rather than the case split
  bool ok = false;
};

/// y_n(x) inside the component [a,b] of G_n holding x.
WitnessPair find_witness(const PiecewiseLinear& f, const IntervalSet& E, const Interval& component,
                         const Rational& x, int n, const Rational& gamma, const Rational& delta);

struct StageDiagnostics {
  int stage = 0;
  Rational gamma;
  Rational delta;
  long multiplier = 0;

  bool flat_on_F = true;                 ///< slope 0 on F_n
  std::optional<Rational> flat_witness;
  Rational factor;                       ///< 1 - 2^-3n
  bool increment_ok = true;              ///< increment bound at factor
  Rational max_slope_on_E;
  std::vector<WitnessPair> witnesses;    ///< witness pairs
  bool witnesses_ok = true;
  Rational radius_sup;                   ///< sup of r_n
  bool radius_ok = true;
  Rational step;                         ///< ||f_n - f_{n-1}||
  bool step_ok = true;                   ///< step <= 2^-(n-1)
  bool agrees_later = true;              ///< f_m = f_n on F_n, m > n
  bool inside_later = true;              ///< f_m in U_n, m > n
  bool persists = true;                  ///< ratio > (1 - 2^-n)γ_n for f_m, m >= n
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
};

struct UDTOptions {
  int min_samples = 50;
  Rational resolution = pow2(-12);  ///< level-set certification scale
};

struct UDTBuild {
  std::vector<PiecewiseLinear> stages;  ///< f_1 ... f_N on the window
  std::vector<PiecewiseLinear> radii;   ///< r_1 ... r_N
  std::vector<PiecewiseLinear> margins; ///< PL minorants of d(x,F_n)^2
  std::vector<StageDiagnostics> diagnostics;

  bool ok() const;
};

/// Finite-stage run of the UDT => Lip 1 construction with per-stage checks.
UDTBuild build_udt_lip1(const NestedClosedSystem& sys, const UDTWitness& witness, int stages,
                        const UDTOptions& options = {});

}  // namespace lipset
