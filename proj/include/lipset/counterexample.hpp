#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lipset/piecewise_linear.hpp"

namespace lipset {

/// (i_0, ..., i_n) with i_0 = 1 and 1 <= i_k <= 4^k.
struct SymbolPath {
  std::vector<long> indices{1};

  std::size_t level() const { return indices.size() - 1; }
  /// Throws std::invalid_argument on a range violation or level > 30.
  void validate() const;
  SymbolPath child(long i) const;
  SymbolPath prefix(std::size_t level) const;

  friend bool operator==(const SymbolPath&, const SymbolPath&) = default;
};

std::string to_string(const SymbolPath& p);

Interval f_interval(const SymbolPath& path);
/// Left half of f_interval(path).
Interval u_interval(const SymbolPath& path);

/// Number of paths (i_0..i_n) at level n: 4^(n(n+1)/2).
Integer paths_at_level(int level);

/// U-part ⊆ E ⊆ U-part ∪ F-cover.
struct Sandwich {
  int depth = 0;
  IntervalSet u_part;   ///< all U-intervals of paths of level <= depth
  IntervalSet f_cover;  ///< all F-intervals of paths of level exactly depth
  IntervalSet outer;    ///< u_part ∪ f_cover
};

/// Interval count allowed by approximate_E; LIPSET_BUDGET overrides the default 2^22.
std::size_t default_budget();

/// Throws BudgetExceeded when the interval count would pass the budget.
Sandwich approximate_E(int depth, std::size_t budget = default_budget());

/// |U_p| / (max F_{p,1} - min F_p).
Rational wd_ratio(const SymbolPath& path);

/// (d+1)/(2d+1) for d = |j' - j| >= 1.
Rational two_thirds_bound(long dj);

struct TwoThirdsReport {
  Rational bound;          ///< (|Δj|+1)/(2|Δj|+1)
  Rational measure_ratio;  ///< |outer ∩ [z,z']| / |z - z'|
  Rational window_ratio;   ///< same with the window widened to both blocks
  Rational f_ratio;        ///< |f(z) - f(z')| / |z - z'|
  bool bound_ok = false;      ///< measure_ratio <= window_ratio <= bound <= 2/3
  bool increment_ok = false;  ///< |f(z) - f(z')| <= |outer ∩ [z,z']|
};

/// z in F_{parent,j}, z' in F_{parent,j'}, j < j'. Uses the outer side of the sandwich.
TwoThirdsReport two_thirds_bound_check(const SymbolPath& parent, long j, long jp, const Rational& z,
                                       const Rational& zp, const PiecewiseLinear& f, const Sandwich& E);

struct NearCandidate {
  Rational y;
  Rational ratio;
};

struct NearWitness {
  bool found = false;
  Rational y;
  Rational ratio;      ///< ratio at y when found
  Rational threshold;  ///< 1 - ε
  Rational sup;        ///< sup of the ratio over E ∩ (x-ε, x+ε) \ {x}
  std::vector<NearCandidate> witnesses;  ///< one per piece that qualifies
};

/// y in E ∩ (x-ε, x+ε), y != x, with |f(x) - f(y)| > (1-ε)|x - y|.
NearWitness lemma_eben_search(const PiecewiseLinear& f, const IntervalSet& E, const Rational& x,
                             const Rational& epsilon);

enum class TraceVerdict { forced_failure, inconclusive_at_depth };
enum class DefeatKind { none, no_near_witness, sandwich, increment_violation };

std::string to_string(TraceVerdict v);
std::string to_string(DefeatKind k);

struct AdversarialRound {
  int n = 0;
  SymbolPath start;  ///< i_0..i_{a_{n-1}}
  Rational y;
  Rational epsilon;
  NearWitness near;
  std::optional<Rational> x;
  long a = 0;
  bool x_in_u = false;
  long index = 0;                ///< i_{a_n}
  Rational cap_ratio;          ///< max ratio U × F_{..,i_{a_n}}, <= cap
  std::optional<Rational> v;
  std::optional<Rational> w;
  Rational vw_ratio;             ///< > cap
  Rational block;                ///< |F_{..,i_{a_n}}|
  std::vector<Rational> chain;   ///< actual min ratio, block bound, 4(w-v) form, floor
  bool chain_ok = false;
};

struct DefeatCertificate {
  DefeatKind kind = DefeatKind::none;
  int round = 0;
  std::optional<SymbolPath> region;
  Rational a;
  Rational b;
  Rational ratio;
  Rational bound;
  std::string note;
};

struct AdversarialTrace {
  int depth = 0;
  Rational cap = Rational(9) / 10;
  Rational floor = Rational(7) / 40;
  std::vector<AdversarialRound> rounds;
  TraceVerdict verdict = TraceVerdict::inconclusive_at_depth;
  DefeatCertificate certificate;
};

struct AdversarialOptions {
  Rational epsilon = Rational(1) / 16;
  int max_rounds = 8;
  std::size_t budget = default_budget();
};

AdversarialTrace adversarial_verify(const PiecewiseLinear& f, int depth, const AdversarialOptions& options = {});

/// Recomputes every recorded ratio and chain step from f alone.
bool recheck_trace(const AdversarialTrace& trace, const PiecewiseLinear& f);

}  // namespace lipset
