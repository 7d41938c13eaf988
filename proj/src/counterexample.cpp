#include "lipset/counterexample.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>

namespace lipset {

void SymbolPath::validate() const {
  if (indices.empty() || indices[0] != 1) throw std::invalid_argument("path must start with i_0 = 1");
  if (indices.size() > 31) throw std::invalid_argument("path deeper than level 30");
  for (std::size_t k = 1; k < indices.size(); ++k) {
    long cap = 1L << (2 * k);
    if (indices[k] < 1 || indices[k] > cap) {
      throw std::invalid_argument("index " + std::to_string(indices[k]) + " out of range at level " + std::to_string(k));
    }
  }
}

SymbolPath SymbolPath::child(long i) const {
  SymbolPath p = *this;
  p.indices.push_back(i);
  p.validate();
  return p;
}

SymbolPath SymbolPath::prefix(std::size_t lvl) const {
  if (lvl > level()) throw std::invalid_argument("prefix longer than path");
  SymbolPath p;
  p.indices.assign(indices.begin(), indices.begin() + static_cast<long>(lvl) + 1);
  return p;
}

std::string to_string(const SymbolPath& p) {
  std::string s = "(";
  for (std::size_t k = 0; k < p.indices.size(); ++k) {
    if (k) s += ",";
    s += std::to_string(p.indices[k]);
  }
  return s + ")";
}

namespace {

// child i at level k (so 4^k children) of [lo,hi]
Interval child_of(const Interval& F, long k, long i) {
  Rational mu = F.midpoint();
  Rational two_n = Rational(ipow(4, static_cast<unsigned long>(k))) * 2;
  Rational lo = ((two_n - 2 * i + 1) * mu + (2 * i - 1) * F.hi) / two_n;
  Rational hi = ((two_n - 2 * i) * mu + 2 * i * F.hi) / two_n;
  return Interval(lo, hi);
}

Rational ratio_at(const PiecewiseLinear& f, const Rational& x, const Rational& y) {
  return abs(f(x) - f(y)) / abs(x - y);
}

// endpoints of iv plus breakpoints of f strictly inside
std::vector<Rational> candidates(const PiecewiseLinear& f, const Interval& iv) {
  std::vector<Rational> out{iv.lo};
  const auto& xs = f.breakpoints();
  auto it = std::upper_bound(xs.begin(), xs.end(), iv.lo);
  for (; it != xs.end() && *it < iv.hi; ++it) out.push_back(*it);
  if (iv.hi != iv.lo) out.push_back(iv.hi);
  return out;
}

struct PairMax {
  Rational ratio = -1;
  Rational x;
  Rational y;
};

// max |f(y)-f(x)|/(y-x) over x in U, y in B, U left of B
PairMax pair_max(const PiecewiseLinear& f, const Interval& U, const Interval& B) {
  PairMax best;
  std::vector<Rational> xs = candidates(f, U), ys = candidates(f, B);
  for (const auto& x : xs) {
    for (const auto& y : ys) {
      if (y <= x) continue;
      Rational r = ratio_at(f, x, y);
      if (r > best.ratio) best = {r, x, y};
    }
  }
  return best;
}

// min over y in B of |f(y)-f(v)|/(y-v), v < B
Rational min_ratio_from(const PiecewiseLinear& f, const Rational& v, const Interval& B) {
  std::vector<Rational> ys = candidates(f, B);
  Rational fv = f(v);
  Rational best = ratio_at(f, v, ys.front());
  for (std::size_t k = 0; k < ys.size(); ++k) {
    best = min(best, ratio_at(f, v, ys[k]));
    if (k > 0 && sgn(f(ys[k - 1]) - fv) * sgn(f(ys[k]) - fv) < 0) return 0;
  }
  return best;
}

std::optional<long> child_holding(const SymbolPath& p, const Rational& x) {
  Interval F = f_interval(p);
  long k = static_cast<long>(p.level()) + 1;
  long count = 1L << (2 * k);
  for (long i = 1; i <= count; ++i) {
    if (child_of(F, k, i).contains(x)) return i;
  }
  return std::nullopt;
}

}  // namespace

Interval f_interval(const SymbolPath& path) {
  path.validate();
  Interval F(0, 1);
  for (std::size_t k = 1; k < path.indices.size(); ++k) F = child_of(F, static_cast<long>(k), path.indices[k]);
  return F;
}

Interval u_interval(const SymbolPath& path) {
  Interval F = f_interval(path);
  return Interval(F.lo, F.midpoint());
}

Integer paths_at_level(int level) {
  if (level < 0) throw std::invalid_argument("negative level");
  return ipow(4, static_cast<unsigned long>(level) * static_cast<unsigned long>(level + 1) / 2);
}

std::size_t default_budget() {
  if (const char* env = std::getenv("LIPSET_BUDGET")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::size_t{1} << 22;
}

Sandwich approximate_E(int depth, std::size_t budget) {
  if (depth < 1) throw std::invalid_argument("depth must be at least 1");
  Integer total = paths_at_level(depth);
  for (int k = 0; k <= depth; ++k) total += paths_at_level(k);
  if (total > Integer(std::to_string(budget))) {
    throw BudgetExceeded("depth " + std::to_string(depth) + " needs " + total.get_str() + " intervals, budget " +
                         std::to_string(budget));
  }
  std::vector<Interval> us, fs;
  std::function<void(const Interval&, long)> walk = [&](const Interval& F, long level) {
    us.emplace_back(F.lo, F.midpoint());
    if (level == depth) {
      fs.push_back(F);
      return;
    }
    long k = level + 1;
    long count = 1L << (2 * k);
    for (long i = 1; i <= count; ++i) walk(child_of(F, k, i), k);
  };
  walk(Interval(0, 1), 0);
  Sandwich s;
  s.depth = depth;
  s.u_part = IntervalSet::canonicalize(std::move(us));
  s.f_cover = IntervalSet::canonicalize(std::move(fs));
  s.outer = unite(s.u_part, s.f_cover);
  return s;
}

Rational wd_ratio(const SymbolPath& path) {
  Interval F = f_interval(path);
  Interval F1 = f_interval(path.child(1));
  return (F.length() / 2) / (F1.hi - F.lo);
}

Rational two_thirds_bound(long dj) {
  if (dj < 1) throw std::invalid_argument("index gap must be positive");
  return Rational(dj + 1) / (2 * dj + 1);
}

TwoThirdsReport two_thirds_bound_check(const SymbolPath& parent, long j, long jp, const Rational& z,
                                       const Rational& zp, const PiecewiseLinear& f, const Sandwich& E) {
  if (!(j < jp)) throw std::invalid_argument("need j < j'");
  Interval Fj = f_interval(parent.child(j));
  Interval Fjp = f_interval(parent.child(jp));
  if (!Fj.contains(z) || !Fjp.contains(zp)) throw std::invalid_argument("points outside their blocks");
  TwoThirdsReport r;
  Rational span = zp - z;
  Rational m = E.outer.measure_in(z, zp);
  Rational df = abs(f(zp) - f(z));
  r.bound = two_thirds_bound(jp - j);
  r.measure_ratio = m / span;
  r.window_ratio = (z - Fj.lo + m + Fjp.hi - zp) / (Fjp.hi - Fj.lo);
  r.f_ratio = df / span;
  r.bound_ok = r.measure_ratio <= r.window_ratio && r.window_ratio <= r.bound && r.bound <= Rational(2) / 3;
  r.increment_ok = df <= m;
  return r;
}

NearWitness lemma_eben_search(const PiecewiseLinear& f, const IntervalSet& E, const Rational& x,
                             const Rational& epsilon) {
  if (!(epsilon > 0 && epsilon < 1)) throw std::invalid_argument("epsilon must lie in (0,1)");
  NearWitness out;
  out.threshold = 1 - epsilon;
  out.sup = 0;
  const Rational a = x - epsilon, b = x + epsilon;
  Rational fx = f(x);
  auto excluded = [&](const Rational& e) { return e == x || e == a || e == b; };
  const auto& bps = f.breakpoints();

  for (const auto& c : E.intervals()) {
    if (c.hi < a || c.lo > b) continue;
    Rational lo = max(c.lo, a), hi = min(c.hi, b);
    std::vector<Rational> cuts{lo};
    for (auto it = std::upper_bound(bps.begin(), bps.end(), lo); it != bps.end() && *it < hi; ++it) cuts.push_back(*it);
    if (lo < x && x < hi) cuts.push_back(x);
    if (hi != lo) cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    auto visit = [&](const Rational& e, const Rational& other) {
      Rational val;
      if (e == x) {
        if (other == x) return;
        val = abs((f(other) - fx) / (other - x));  // f is linear between, so this is the slope
      } else {
        val = abs(f(e) - fx) / abs(e - x);
      }
      out.sup = max(out.sup, val);
      if (!(val > out.threshold)) return;
      if (!excluded(e)) {
        out.witnesses.push_back({e, val});
        return;
      }
      if (other == e) return;
      Rational z = (e + other) / 2;
      for (int it = 0; it < 256; ++it) {
        if (!excluded(z)) {
          Rational rz = abs(f(z) - fx) / abs(z - x);
          if (rz > out.threshold) {
            out.witnesses.push_back({z, rz});
            return;
          }
        }
        z = (e + z) / 2;
      }
    };
    if (cuts.size() == 1) {
      if (!excluded(cuts[0])) visit(cuts[0], cuts[0]);
      continue;
    }
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      visit(cuts[k], cuts[k + 1]);
      visit(cuts[k + 1], cuts[k]);
    }
  }
  std::sort(out.witnesses.begin(), out.witnesses.end(), [](const NearCandidate& p, const NearCandidate& q) { return p.y < q.y; });
  out.witnesses.erase(std::unique(out.witnesses.begin(), out.witnesses.end(),
                                  [](const NearCandidate& p, const NearCandidate& q) { return p.y == q.y; }),
                      out.witnesses.end());
  for (const auto& c : out.witnesses) {
    if (!out.found || c.ratio > out.ratio || (c.ratio == out.ratio && abs(c.y - x) < abs(out.y - x))) {
      out.found = true;
      out.y = c.y;
      out.ratio = c.ratio;
    }
  }
  return out;
}

std::string to_string(TraceVerdict v) {
  return v == TraceVerdict::forced_failure ? "forced-failure" : "inconclusive-at-depth";
}

std::string to_string(DefeatKind k) {
  switch (k) {
    case DefeatKind::none: return "none";
    case DefeatKind::no_near_witness: return "no-near-witness";
    case DefeatKind::sandwich: return "ratio-sandwich";
    case DefeatKind::increment_violation: return "increment-violation";
  }
  return "none";
}

namespace {

void fail_with(AdversarialTrace& t, DefeatCertificate c) {
  t.verdict = TraceVerdict::forced_failure;
  t.certificate = std::move(c);
}

}  // namespace

AdversarialTrace adversarial_verify(const PiecewiseLinear& f, int depth, const AdversarialOptions& options) {
  Interval dom = f.domain();
  if (dom.lo > 0 || dom.hi < 1) throw std::invalid_argument("candidate must be defined on [0,1]");
  if (!(options.epsilon > 0 && options.epsilon < Rational(1) / 10)) throw std::invalid_argument("epsilon must lie in (0, 1/10)");
  Sandwich S = approximate_E(depth, options.budget);
  AdversarialTrace t;
  t.depth = depth;
  SymbolPath P;

  for (int n = 1; n <= options.max_rounds; ++n) {
    if (P.level() >= static_cast<std::size_t>(depth)) {
      t.certificate.note = "working depth reached at " + to_string(P);
      return t;
    }
    AdversarialRound rd;
    rd.n = n;
    rd.start = P;
    Interval FP = f_interval(P);
    SymbolPath Q = P;
    while (Q.level() < static_cast<std::size_t>(depth)) Q = Q.child(1);
    rd.y = f_interval(Q).lo;
    rd.epsilon = min(options.epsilon, Rational(FP.length() / 2));
    rd.near = lemma_eben_search(f, clip(S.outer, FP), rd.y, rd.epsilon);

    if (!rd.near.found) {
      t.rounds.push_back(rd);
      fail_with(t, {DefeatKind::no_near_witness, n, P, rd.y, rd.y, rd.near.sup, rd.near.threshold,
                    "no point of E near y beats the ratio 1 - epsilon"});
      return t;
    }

    // a_n: first level where x leaves the first child holding y
    long best_a = -1;
    Rational best_x, best_r;
    for (const auto& c : rd.near.witnesses) {
      SymbolPath W = P;
      long a = -1;
      while (W.level() < static_cast<std::size_t>(depth)) {
        if (!f_interval(W.child(1)).contains(c.y)) {
          a = static_cast<long>(W.level()) + 1;
          break;
        }
        W = W.child(1);
      }
      if (a < 0) continue;
      if (best_a < 0 || a < best_a || (a == best_a && (c.ratio > best_r || (c.ratio == best_r && abs(c.y - rd.y) < abs(best_x - rd.y))))) {
        best_a = a;
        best_x = c.y;
        best_r = c.ratio;
      }
    }
    if (best_a < 0) {
      t.rounds.push_back(rd);
      t.certificate.note = "every witness stays in the first child down to the working depth";
      return t;
    }
    rd.x = best_x;
    rd.a = best_a;
    SymbolPath Pp = P;
    while (Pp.level() + 1 < static_cast<std::size_t>(best_a)) Pp = Pp.child(1);
    Interval U = u_interval(Pp);
    rd.x_in_u = U.contains(best_x);

    if (!rd.x_in_u) {
      std::optional<long> jp = child_holding(Pp, best_x);
      t.rounds.push_back(rd);
      if (jp && *jp > 1) {
        TwoThirdsReport tt = two_thirds_bound_check(Pp, 1, *jp, rd.y, best_x, f, S);
        fail_with(t, {DefeatKind::increment_violation, n, Pp, rd.y, best_x, tt.f_ratio, tt.measure_ratio,
                      "near witness lies right of the first child; the index-gap bound caps the E share"});
      } else {
        t.certificate.note = "near witness outside U and the children";
      }
      return t;
    }

    long k = best_a;
    long count = 1L << (2 * k);
    std::optional<PairMax> prev;
    for (long i = 1; i <= count; ++i) {
      PairMax pm = pair_max(f, U, f_interval(Pp.child(i)));
      if (pm.ratio <= t.cap) {
        rd.index = i;
        rd.cap_ratio = pm.ratio;
        break;
      }
      prev = pm;
    }
    if (rd.index == 0) {
      t.rounds.push_back(rd);
      Rational m = S.outer.measure_in(prev->x, prev->y);
      if (abs(f(prev->y) - f(prev->x)) > m) {
        fail_with(t, {DefeatKind::increment_violation, n, Pp, prev->x, prev->y, prev->ratio, m / (prev->y - prev->x),
                      "no child keeps the ratio from U below the cap"});
      } else {
        t.certificate.note = "no child keeps the ratio from U below the cap";
      }
      return t;
    }
    if (rd.index == 1 || !prev) {
      t.rounds.push_back(rd);
      t.certificate.note = "first child already under the cap";
      return t;
    }

    SymbolPath R = Pp.child(rd.index);
    Interval B = f_interval(R);
    rd.block = B.length();
    rd.v = prev->x;
    rd.w = prev->y;
    rd.vw_ratio = prev->ratio;
    Rational span = *rd.w - *rd.v;
    Rational actual = min_ratio_from(f, *rd.v, B);
    Rational bound = (abs(f(*rd.w) - f(*rd.v)) - 2 * rd.block) / (3 * rd.block + span);
    Rational form = (t.cap * span - 2 * rd.block) / (4 * span);
    rd.chain = {actual, bound, form, t.floor};
    rd.chain_ok = actual >= bound && bound >= form && form >= t.floor && t.floor > Rational(1) / 10;
    t.rounds.push_back(rd);

    if (rd.chain_ok) {
      fail_with(t, {DefeatKind::sandwich, n, R, *rd.v, *rd.w, rd.cap_ratio, actual,
                    "ratios from U into the region stay between the floor and the cap"});
      return t;
    }
    Rational m = S.outer.measure_in(*rd.v, *rd.w);
    if (abs(f(*rd.w) - f(*rd.v)) > m) {
      fail_with(t, {DefeatKind::increment_violation, n, Pp, *rd.v, *rd.w, rd.vw_ratio, m / span,
                    "pair beating the cap carries more rise than E measure"});
      return t;
    }
    P = R;
  }
  t.certificate.note = "round limit reached";
  return t;
}

bool recheck_trace(const AdversarialTrace& t, const PiecewiseLinear& f) {
  if (t.cap != Rational(9) / 10 || t.floor != Rational(7) / 40) return false;
  Sandwich S = approximate_E(t.depth);
  for (const auto& rd : t.rounds) {
    Interval FP = f_interval(rd.start);
    NearWitness e = lemma_eben_search(f, clip(S.outer, FP), rd.y, rd.epsilon);
    if (e.found != rd.near.found || e.sup != rd.near.sup || e.threshold != rd.near.threshold) return false;
    if (e.found && (e.y != rd.near.y || e.ratio != rd.near.ratio)) return false;
    if (rd.x) {
      if (ratio_at(f, *rd.x, rd.y) <= rd.near.threshold) return false;
      if (!S.outer.contains(*rd.x)) return false;
    }
    if (rd.index > 0) {
      SymbolPath Pp = rd.start;
      while (Pp.level() + 1 < static_cast<std::size_t>(rd.a)) Pp = Pp.child(1);
      Interval U = u_interval(Pp);
      if (pair_max(f, U, f_interval(Pp.child(rd.index))).ratio != rd.cap_ratio || rd.cap_ratio > t.cap) return false;
      if (rd.v && rd.w) {
        if (ratio_at(f, *rd.v, *rd.w) != rd.vw_ratio || !(rd.vw_ratio > t.cap)) return false;
        if (!U.contains(*rd.v) || !f_interval(Pp.child(rd.index - 1)).contains(*rd.w)) return false;
        Interval B = f_interval(Pp.child(rd.index));
        if (B.length() != rd.block) return false;
        Rational span = *rd.w - *rd.v;
        std::vector<Rational> chain{min_ratio_from(f, *rd.v, B),
                                    (abs(f(*rd.w) - f(*rd.v)) - 2 * rd.block) / (3 * rd.block + span),
                                    (t.cap * span - 2 * rd.block) / (4 * span), t.floor};
        if (chain != rd.chain) return false;
        bool ok = chain[0] >= chain[1] && chain[1] >= chain[2] && chain[2] >= chain[3] && chain[3] > Rational(1) / 10;
        if (ok != rd.chain_ok) return false;
      }
    }
  }
  const DefeatCertificate& c = t.certificate;
  switch (c.kind) {
    case DefeatKind::none:
      return t.verdict == TraceVerdict::inconclusive_at_depth;
    case DefeatKind::no_near_witness:
      return !t.rounds.empty() && !t.rounds.back().near.found && c.ratio == t.rounds.back().near.sup &&
             c.ratio <= c.bound;
    case DefeatKind::sandwich:
      return !t.rounds.empty() && t.rounds.back().chain_ok && c.ratio == t.rounds.back().cap_ratio &&
             c.ratio <= t.cap && c.bound == t.rounds.back().chain[0] && c.bound >= t.floor;
    case DefeatKind::increment_violation: {
      Rational lo = min(c.a, c.b), hi = max(c.a, c.b);
      Rational span = hi - lo;
      return c.ratio == ratio_at(f, c.a, c.b) && c.bound == S.outer.measure_in(lo, hi) / span && c.ratio > c.bound;
    }
  }
  return false;
}

}  // namespace lipset
