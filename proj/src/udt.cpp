#include "lipset/udt.hpp"

#include <algorithm>

namespace lipset {

std::vector<Interval> NestedClosedSystem::components(std::size_t n) const {
  if (n < 1 || n > F.size()) throw std::out_of_range("stage index " + std::to_string(n));
  const IntervalSet& f = F[n - 1];
  if (f.empty()) return {window};
  std::vector<Interval> out;
  IntervalSet g = complement_within(f, window);
  for (const auto& c : g.intervals()) {
    if (!c.degenerate()) out.push_back(c);
  }
  return out;
}

bool NestedClosedSystem::free_lo(std::size_t n) const { return !F.at(n - 1).contains(window.lo); }
bool NestedClosedSystem::free_hi(std::size_t n) const { return !F.at(n - 1).contains(window.hi); }

void NestedClosedSystem::validate() const {
  if (window.degenerate()) throw std::invalid_argument("degenerate window");
  for (std::size_t n = 1; n <= F.size(); ++n) {
    const IntervalSet& f = F[n - 1];
    if (!f.empty() && (f.hull().lo < window.lo || f.hull().hi > window.hi)) {
      throw std::invalid_argument("F_" + std::to_string(n) + " leaves the window");
    }
    if (n > 1 && unite(F[n - 2], f) != f) {
      throw std::invalid_argument("F_" + std::to_string(n - 1) + " is not contained in F_" + std::to_string(n));
    }
    if (intersect(f, E).measure() > 0) throw std::invalid_argument("E meets F_" + std::to_string(n));
    for (const auto& c : components(n)) {
      if (E.measure_in(c.lo, c.hi) == 0) {
        throw std::invalid_argument("a component of G_" + std::to_string(n) + " misses E: [" + to_string(c.lo) +
                                    ", " + to_string(c.hi) + "]");
      }
    }
  }
}

IntervalSet smith_volterra_cantor(int depth) {
  if (depth < 0) throw std::invalid_argument("negative depth");
  std::vector<Interval> cur{Interval(0, 1)};
  for (int k = 1; k <= depth; ++k) {
    Rational half = pow2(-2 * k) / 2;
    std::vector<Interval> next;
    for (const auto& c : cur) {
      Rational m = c.midpoint();
      next.emplace_back(c.lo, m - half);
      next.emplace_back(m + half, c.hi);
    }
    cur = std::move(next);
  }
  return IntervalSet::canonicalize(std::move(cur));
}

NestedClosedSystem fat_cantor_system(int stages, int depth) {
  if (stages < 1) throw std::invalid_argument("need at least one stage");
  if (depth < stages) throw std::invalid_argument("depth must be at least the number of stages");
  NestedClosedSystem sys;
  sys.window = Interval(-1, 2);
  sys.E = smith_volterra_cantor(depth);
  for (int n = 1; n <= stages; ++n) {
    Rational rho = pow2(-2 * n) / 8;
    std::vector<Interval> grown;
    IntervalSet cn = smith_volterra_cantor(n);
    for (const auto& c : cn.intervals()) grown.emplace_back(c.lo - rho, c.hi + rho);
    sys.F.push_back(complement_within(IntervalSet::canonicalize(std::move(grown)), sys.window));
  }
  sys.validate();
  return sys;
}

UDTWitness fat_cantor_witness(const NestedClosedSystem& sys, int stages) {
  std::vector<Rational> gammas, probes;
  for (int n = 1; n <= stages; ++n) gammas.push_back(1 - pow2(-(n + 1)));
  for (const auto& c : sys.E.intervals()) {
    probes.push_back(c.lo);
    probes.push_back(c.midpoint());
    probes.push_back(c.hi);
  }
  return fit_udt_witness(sys.E, gammas, probes, Rational(1) / 8);
}

long witness_multiplier(int n, const Rational& gamma) {
  Rational need = 2 * (pow2(3 * n) - 1) / (gamma * (pow2(n) - 1));
  Integer k = floor(need) + 1;
  return std::max(100L, k.get_si());
}

namespace {

struct Run {
  Rational lo;
  Rational hi;
};

// Maximal monotone runs; flat pieces join the run in progress.
std::vector<Run> monotone_runs(const PiecewiseLinear& f) {
  const auto& xs = f.breakpoints();
  const auto slopes = f.slopes();
  std::vector<Run> runs;
  Rational start = xs.front();
  int sign = 0;
  for (std::size_t i = 0; i < slopes.size(); ++i) {
    int s = sgn(slopes[i]);
    if (s != 0 && sign != 0 && s != sign) {
      runs.push_back({start, xs[i]});
      start = xs[i];
    }
    if (s != 0) sign = s;
  }
  runs.push_back({start, xs.back()});
  return runs;
}

Rational pair_ratio(const PiecewiseLinear& f, const Rational& x, const Rational& y) {
  return abs(f(x) - f(y)) / abs(x - y);
}

PiecewiseLinear assemble(const std::vector<PiecewiseLinear>& pieces, const Interval& window) {
  std::vector<Rational> xs, ys;
  auto add = [&](const Rational& x, const Rational& y) {
    if (!xs.empty() && x <= xs.back()) {
      if (x == xs.back() && y != ys.back()) throw std::logic_error("pieces disagree at " + to_string(x));
      return;
    }
    xs.push_back(x);
    ys.push_back(y);
  };
  if (pieces.empty() || pieces.front().domain().lo > window.lo) add(window.lo, 0);
  for (const auto& p : pieces) {
    for (std::size_t i = 0; i < p.size(); ++i) add(p.breakpoints()[i], p.values()[i]);
  }
  if (pieces.empty() || pieces.back().domain().hi < window.hi) add(window.hi, 0);
  return PiecewiseLinear(std::move(xs), std::move(ys));
}

PiecewiseLinear margin_function(const NestedClosedSystem& sys, std::size_t n) {
  std::vector<PiecewiseLinear> pieces;
  for (const auto& c : sys.components(n)) {
    bool lo_free = c.lo == sys.window.lo && sys.free_lo(n);
    bool hi_free = c.hi == sys.window.hi && sys.free_hi(n);
    pieces.push_back(square_distance_minorant(c, sys.E, lo_free, hi_free));
  }
  return simplify(assemble(pieces, sys.window));
}

PiecewiseLinear tent(const Interval& window, const Rational& p, const Rational& v) {
  std::vector<Rational> xs{window.lo}, ys{v + (p - window.lo)};
  if (p > window.lo && p < window.hi) {
    xs.push_back(p);
    ys.push_back(v);
  }
  xs.push_back(window.hi);
  ys.push_back(v + (window.hi - p));
  return PiecewiseLinear(std::move(xs), std::move(ys));
}

std::vector<Rational> sample_points(const IntervalSet& inner, int min_samples) {
  std::vector<Rational> pts;
  Rational total = inner.measure();
  for (const auto& c : inner.intervals()) {
    pts.push_back(c.lo);
    if (c.degenerate()) continue;
    pts.push_back(c.hi);
    Integer m = total > 0 ? ceil(min_samples * c.length() / total) : Integer(1);
    long count = std::max(1L, m.get_si());
    for (long k = 0; k < count; ++k) pts.push_back(c.lo + c.length() * (2 * k + 1) / (2 * count));
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

std::optional<Interval> component_of(const std::vector<Interval>& comps, const Rational& x) {
  auto it = std::upper_bound(comps.begin(), comps.end(), x, [](const Rational& v, const Interval& c) { return v < c.lo; });
  if (it == comps.begin()) return std::nullopt;
  --it;
  if (it->interior_contains(x)) return *it;
  return std::nullopt;
}

}  // namespace

WitnessPair find_witness(const PiecewiseLinear& f, const IntervalSet& E, const Interval& component,
                         const Rational& x, int n, const Rational& gamma, const Rational& delta) {
  if (!component.interior_contains(x)) throw std::invalid_argument("x must lie inside the component");
  WitnessPair out;
  out.x = x;
  out.bound = (1 - pow2(-2 * n)) * gamma;
  PiecewiseLinear g = restrict(f, component);
  const Rational& a = component.lo;
  const Rational& b = component.hi;
  long K = witness_multiplier(n, gamma);

  std::vector<Run> runs = monotone_runs(g);
  std::size_t idx = 0;
  while (idx + 1 < runs.size() && runs[idx].hi <= x) ++idx;
  const Run& run = runs[idx];
  // orient so that x lies in the half of the run next to its near end
  int sigma = (x - run.lo <= run.hi - x) ? 1 : -1;
  Rational near = sigma > 0 ? run.lo : run.hi;
  Rational far = sigma > 0 ? run.hi : run.lo;
  Rational edge = sigma > 0 ? a : b;
  Rational c, e;
  if (near == edge) {
    c = near + (x - near) / 2;
    e = edge;
  } else {
    c = near;
    e = sigma > 0 ? runs[idx - 1].lo : runs[idx + 1].hi;
  }
  Rational d = min(min(abs(c - e), abs(far - c)), delta) / (K + 1);
  std::optional<Rational> y;
  if (d > 0) {
    if (abs(x - c) >= d) {
      Rational y1 = x - d, y2 = x + d;
      y = pair_ratio(g, x, y1) >= pair_ratio(g, x, y2) ? y1 : y2;
    } else {
      Rational reach = x + sigma * K * d;
      Rational lo = min(x, reach), hi = max(x, reach);
      y = E.measure_in(lo, hi) >= K * gamma * d ? reach : x - sigma * K * d;
    }
  }
  if (y && component.contains(*y) && abs(*y - x) <= delta) {
    out.y = *y;
    out.ratio = pair_ratio(g, x, *y);
    out.ok = out.ratio > out.bound;
  }
  if (!out.ok) {
    // exhaustive search over breakpoints within δ inside the component
    out.fallback = true;
    std::vector<Rational> cand{max(a, Rational(x - delta)), min(b, Rational(x + delta))};
    for (const auto& p : g.breakpoints()) {
      if (abs(p - x) <= delta) cand.push_back(p);
    }
    std::optional<Rational> best;
    Rational best_ratio = -1;
    for (const auto& p : cand) {
      if (p == x) continue;
      Rational r = pair_ratio(g, x, p);
      if (r > best_ratio || (r == best_ratio && abs(p - x) < abs(*best - x))) {
        best_ratio = r;
        best = p;
      }
    }
    if (best) {
      out.y = *best;
      out.ratio = best_ratio;
      out.ok = out.ratio > out.bound;
    }
  }
  return out;
}

bool UDTBuild::ok() const {
  return std::all_of(diagnostics.begin(), diagnostics.end(), [](const StageDiagnostics& d) { return d.ok(); });
}

UDTBuild build_udt_lip1(const NestedClosedSystem& sys, const UDTWitness& witness, int stages,
                        const UDTOptions& options) {
  if (stages < 1) throw std::invalid_argument("need at least one stage");
  if (sys.depth() < static_cast<std::size_t>(stages)) throw std::invalid_argument("system has too few closed sets");
  if (witness.depth() < static_cast<std::size_t>(stages)) throw std::invalid_argument("witness exhausted");
  sys.validate();
  witness.validate();
  const Interval& W = sys.window;
  UDTBuild out;
  PiecewiseLinear f = PiecewiseLinear::constant(W, 0);
  PiecewiseLinear r_prev = PiecewiseLinear::constant(W, 1);

  for (int n = 1; n <= stages; ++n) {
    const Rational& gamma = witness.gammas[n - 1];
    const Rational& delta_n = witness.deltas[n - 1];
    PiecewiseLinear margin = margin_function(sys, n);
    PiecewiseLinear eps_n = margin;
    Rational refine_eps = 1;
    Rational refine_delta = pow2(-3 * n);
    PiecewiseLinear base = f;

    if (n > 1) {
      Rational flat_eps = pow2(-3 * (n - 1));
      Rational mid = (pow2(-3 * n) + flat_eps) / 2;
      PiecewiseLinear third = scale(r_prev, Rational(1) / 3);
      for (const auto& comp : sys.components(n - 1)) {
        PiecewiseLinear fc = restrict(base, comp);
        PiecewiseLinear rc = restrict(third, comp);
        Envelope env{subtract(fc, rc), add(fc, rc)};
        IntervalSet H = clip(sys.F[n - 1], comp);
        FlattenResult fl = envelope_flatten(fc, env, sys.E, H, flat_eps, mid);
        base = splice(base, fl.g);
      }
      eps_n = simplify(pointwise_min(margin, third));
      refine_eps = mid;
    }

    PiecewiseLinear fn = base;
    for (const auto& comp : sys.components(n)) {
      PiecewiseLinear fc = restrict(base, comp);
      PiecewiseLinear ec = restrict(eps_n, comp);
      Envelope env{subtract(fc, ec), add(fc, ec)};
      RefineResult rr = envelope_refine(fc, env, sys.E, refine_eps, refine_delta);
      fn = splice(fn, rr.g);
    }
    fn = simplify(fn);

    StageDiagnostics diag;
    diag.stage = n;
    diag.gamma = gamma;
    diag.delta = delta_n;
    diag.multiplier = witness_multiplier(n, gamma);
    diag.factor = 1 - pow2(-3 * n);

    // flat on F_n, including one-sided slopes at its ends
    for (const auto& fc : sys.F[n - 1].intervals()) {
      for (const auto& p : {fc.lo, fc.hi}) {
        if ((p > W.lo && fn.slope_left(p) != 0) || (p < W.hi && fn.slope_right(p) != 0)) {
          diag.flat_on_F = false;
          diag.flat_witness = p;
        }
      }
      for (const auto& p : fn.breakpoints()) {
        if (fc.contains(p) && fn(p) != fn(fc.lo)) {
          diag.flat_on_F = false;
          diag.flat_witness = p;
        }
      }
    }
    if (!diag.flat_on_F) diag.failures.push_back("slope on F_n at " + to_string(*diag.flat_witness));

    // increment factor
    AuditReport audit = audit_increment_bound(fn, sys.E, diag.factor);
    diag.increment_ok = audit.ok;
    diag.max_slope_on_E = audit.max_slope_on_E;
    if (!audit.ok) diag.failures.push_back("increment bound fails");

    // witnesses
    std::vector<Interval> comps = sys.components(n);
    LevelSet ls = level_set(sys.E, gamma, delta_n, W, options.resolution);
    for (const auto& x : sample_points(ls.inner, options.min_samples)) {
      std::optional<Interval> comp = component_of(comps, x);
      if (!comp) continue;
      WitnessPair wp = find_witness(fn, sys.E, *comp, x, n, gamma, delta_n);
      if (!wp.ok) {
        diag.witnesses_ok = false;
        diag.failures.push_back("no witness at " + to_string(x) + ", best ratio " + to_string(wp.ratio));
      }
      diag.witnesses.push_back(std::move(wp));
    }
    if (diag.witnesses.size() < static_cast<std::size_t>(options.min_samples)) {
      diag.failures.push_back("only " + std::to_string(diag.witnesses.size()) + " sample points");
    }

    // r_n = min{2^-n, ε_n, notches at witness pairs}
    PiecewiseLinear rn = pointwise_min(eps_n, PiecewiseLinear::constant(W, pow2(-n)));
    Rational keep = (1 - pow2(-n)) * gamma;
    for (const auto& wp : diag.witnesses) {
      if (!wp.ok) continue;
      Rational span = abs(wp.x - wp.y);
      Rational achieved = abs(fn(wp.x) - fn(wp.y));
      Rational v = min(Rational(pow2(-2 * n) * gamma * span), Rational((achieved - keep * span) / 2)) / 2;
      rn = pointwise_min(rn, tent(W, wp.x, v));
      rn = pointwise_min(rn, tent(W, wp.y, v));
    }
    rn = simplify(rn);

    // radius and step
    diag.radius_sup = sup_norm(rn);
    if (diag.radius_sup > pow2(-n)) diag.radius_ok = false;
    PiecewiseLinear merged = refine(rn, margin.breakpoints());
    for (const auto& p : merged.breakpoints()) {
      if (rn(p) > margin(p) || rn(p) < 0) diag.radius_ok = false;
    }
    for (const auto& wp : diag.witnesses) {
      if (!wp.ok) continue;
      Rational cap = pow2(-2 * n) * gamma * abs(wp.x - wp.y);
      if (!(rn(wp.x) < cap && rn(wp.y) < cap)) diag.radius_ok = false;
    }
    if (!diag.radius_ok) diag.failures.push_back("radius bounds fail");
    diag.step = sup_distance(fn, f);
    diag.step_ok = diag.step <= pow2(-(n - 1));
    if (!diag.step_ok) diag.failures.push_back("step " + to_string(diag.step) + " exceeds 2^-(n-1)");

    out.stages.push_back(fn);
    out.radii.push_back(rn);
    out.margins.push_back(margin);
    out.diagnostics.push_back(std::move(diag));
    f = fn;
    r_prev = rn;
  }

  // later stages: agreement on F_n, nesting of vicinities, persistence of witnesses
  for (int n = 1; n <= stages; ++n) {
    StageDiagnostics& diag = out.diagnostics[n - 1];
    const PiecewiseLinear& fn = out.stages[n - 1];
    Vicinity U{fn, out.radii[n - 1]};
    Rational keep = (1 - pow2(-n)) * diag.gamma;
    for (int m = n; m <= stages; ++m) {
      const PiecewiseLinear& fm = out.stages[m - 1];
      if (m > n) {
        for (const auto& fc : sys.F[n - 1].intervals()) {
          std::vector<Rational> pts{fc.lo, fc.hi};
          for (const auto& p : fm.breakpoints()) {
            if (fc.contains(p)) pts.push_back(p);
          }
          for (const auto& p : pts) {
            if (fm(p) != fn(p)) diag.agrees_later = false;
          }
        }
        if (!U.contains(fm)) diag.inside_later = false;
      }
      for (const auto& wp : diag.witnesses) {
        if (wp.ok && !(abs(fm(wp.x) - fm(wp.y)) > keep * abs(wp.x - wp.y))) diag.persists = false;
      }
    }
    if (!diag.agrees_later) diag.failures.push_back("later stage moves on F_n");
    if (!diag.inside_later) diag.failures.push_back("later stage leaves U_n");
    if (!diag.persists) diag.failures.push_back("witness ratio lost at a later stage");
  }
  return out;
}

}  // namespace lipset
