#include "lipset/envelope.hpp"

#include <algorithm>

#include "lipset/constructions.hpp"

namespace lipset {

namespace {

std::vector<Rational> merged_points(std::initializer_list<const PiecewiseLinear*> fs, const Interval& on) {
  std::vector<Rational> pts{on.lo, on.hi};
  for (const auto* f : fs) {
    const auto& bp = f->breakpoints();
    auto it = std::upper_bound(bp.begin(), bp.end(), on.lo);
    for (; it != bp.end() && *it < on.hi; ++it) pts.push_back(*it);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

std::string show(const Interval& iv) { return "[" + to_string(iv.lo) + ", " + to_string(iv.hi) + "]"; }

void require_domain(const PiecewiseLinear& f, const Envelope& env) {
  if (env.lower.domain() != f.domain() || env.upper.domain() != f.domain()) {
    throw std::invalid_argument("envelope and function live on different domains");
  }
}

void require_parameters(const Rational& epsilon, const Rational& delta) {
  if (!(0 < delta && delta < epsilon && epsilon <= 1)) {
    throw std::invalid_argument("need 0 < delta < epsilon <= 1, got delta=" + to_string(delta) +
                                " epsilon=" + to_string(epsilon));
  }
}

void require_increment_bound(const PiecewiseLinear& f, const IntervalSet& e, const Rational& factor) {
  AuditReport a = audit_increment_bound(f, e, factor);
  if (!a.ok) {
    throw PreconditionError("increment bound with factor " + to_string(factor) + " fails on " + show(*a.witness),
                            a.witness);
  }
}

Rational min_gap(const PiecewiseLinear& f, const Envelope& env, const Interval& on) {
  std::optional<Rational> best;
  for (const auto& x : merged_points({&f, &env.lower, &env.upper}, on)) {
    Rational fx = f(x);
    Rational g = min(Rational(env.upper(x) - fx), Rational(fx - env.lower(x)));
    if (!best || g < *best) best = g;
  }
  return *best;
}

Rational max_on(const PiecewiseLinear& h, const Interval& on) {
  Rational best = h(on.lo);
  for (const auto& x : merged_points({&h}, on)) best = max(best, h(x));
  return best;
}

Rational min_on(const PiecewiseLinear& h, const Interval& on) {
  Rational best = h(on.lo);
  for (const auto& x : merged_points({&h}, on)) best = min(best, h(x));
  return best;
}

Interval resolve_active(const RefineOptions& options, const IntervalSet& e, const Interval& dom) {
  Interval active = options.active ? *options.active : e.hull();
  if (active.lo < dom.lo || active.hi > dom.hi) throw std::invalid_argument("active compact leaves the domain");
  return active;
}

// Bisects the active compact until every block passes `accept`.
template <class Accept>
std::vector<Interval> adaptive_blocks(const Interval& active, int max_depth, Accept accept) {
  std::vector<Interval> out;
  std::vector<std::pair<Interval, int>> stack{{active, 0}};
  while (!stack.empty()) {
    auto [blk, depth] = stack.back();
    stack.pop_back();
    if (accept(blk)) {
      out.push_back(blk);
      continue;
    }
    if (depth >= max_depth) throw BudgetExceeded("block partition exceeded depth " + std::to_string(max_depth));
    Rational mid = blk.midpoint();
    stack.push_back({Interval(mid, blk.hi), depth + 1});
    stack.push_back({Interval(blk.lo, mid), depth + 1});
  }
  return out;
}

class PointList {
 public:
  void add(const Rational& x, const Rational& y) {
    if (!xs_.empty() && x <= xs_.back()) {
      if (x == xs_.back() && y != ys_.back()) throw std::logic_error("discontinuous assembly at " + to_string(x));
      return;
    }
    xs_.push_back(x);
    ys_.push_back(y);
  }
  void add_f(const PiecewiseLinear& f, const Rational& lo, const Rational& hi) {
    add(lo, f(lo));
    for (const auto& b : f.breakpoints()) {
      if (b > lo && b < hi) add(b, f(b));
    }
    add(hi, f(hi));
  }
  PiecewiseLinear build() { return simplify(PiecewiseLinear(std::move(xs_), std::move(ys_))); }

 private:
  std::vector<Rational> xs_, ys_;
};

// E endpoints strictly between lo and hi
template <class Fn>
void for_endpoints(const std::vector<Rational>& ends, const Rational& lo, const Rational& hi, Fn fn) {
  for (auto it = std::upper_bound(ends.begin(), ends.end(), lo); it != ends.end() && *it < hi; ++it) fn(*it);
}

}  // namespace

bool Vicinity::contains(const PiecewiseLinear& g) const {
  for (const auto& x : merged_points({&center, &radius, &g}, center.domain())) {
    if (abs(g(x) - center(x)) > radius(x)) return false;
  }
  return true;
}

EnvelopeCheck check_envelope(const PiecewiseLinear& f, const Envelope& env) {
  require_domain(f, env);
  Interval dom = f.domain();
  EnvelopeCheck out;
  for (const auto& end : {dom.lo, dom.hi}) {
    if (env.lower(end) != f(end) || env.upper(end) != f(end)) {
      out.ok = false;
      out.witness = end;
      out.reason = "bounds differ from f at an end";
      return out;
    }
  }
  std::vector<Rational> pts = merged_points({&f, &env.lower, &env.upper}, dom);
  if (pts.size() < 3) {
    out.ok = false;
    out.reason = "no interior breakpoint; the bounds coincide with f";
    return out;
  }
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    const Rational& x = pts[i];
    if (!(env.lower(x) < f(x) && f(x) < env.upper(x))) {
      out.ok = false;
      out.witness = x;
      out.reason = "not strictly inside";
      return out;
    }
  }
  return out;
}

EnvelopeCheck check_strict_on(const PiecewiseLinear& f, const Envelope& env, const Interval& on) {
  EnvelopeCheck out;
  for (const auto& x : merged_points({&f, &env.lower, &env.upper}, on)) {
    if (!(env.lower(x) < f(x) && f(x) < env.upper(x))) {
      out.ok = false;
      out.witness = x;
      out.reason = "not strictly inside";
      return out;
    }
  }
  return out;
}

PiecewiseLinear square_distance_minorant(const Interval& ab, const IntervalSet& E, bool free_lo, bool free_hi,
                                         const Rational& cap) {
  if (ab.degenerate()) throw std::invalid_argument("degenerate interval");
  if (cap <= 0) throw std::invalid_argument("cap must be positive");
  const Rational& a = ab.lo;
  const Rational& b = ab.hi;
  Rational len = ab.length();
  PiecewiseLinear out = PiecewiseLinear::constant(ab, cap);
  if (free_lo && free_hi) return out;
  IntervalSet e = clip(E, ab);
  Rational eta = len / 4;
  auto shrink = [&](const Rational& gap) {
    Rational want = gap > 0 ? gap / 2 : len / 8;
    if (want < eta) eta = want;
  };
  if (!e.empty()) {
    if (!free_lo) shrink(e.hull().lo - a);
    if (!free_hi) shrink(b - e.hull().hi);
  }
  // 4η(t - η) touches t^2 at t = 2η and lies below it elsewhere
  if (!free_lo) {
    PiecewiseLinear lo({a, a + eta, b}, {0, 0, 4 * eta * (len - eta)});
    out = pointwise_min(out, lo);
  }
  if (!free_hi) {
    PiecewiseLinear hi({a, b - eta, b}, {4 * eta * (len - eta), 0, 0});
    out = pointwise_min(out, hi);
  }
  return simplify(out);
}

RefineResult envelope_refine(const PiecewiseLinear& f, const Envelope& env, const IntervalSet& E,
                             const Rational& epsilon, const Rational& delta, const RefineOptions& options) {
  require_parameters(epsilon, delta);
  require_domain(f, env);
  Interval dom = f.domain();
  IntervalSet e = clip(E, dom);
  require_increment_bound(f, e, 1 - epsilon);
  if (e.measure() == 0 && !options.active) return {f, Interval(dom.lo, dom.lo), {}};
  Interval active = resolve_active(options, e, dom);
  EnvelopeCheck strict = check_strict_on(f, env, active);
  if (!strict.ok) {
    throw PreconditionError("envelope not strict at " + to_string(*strict.witness),
                            Interval(*strict.witness, *strict.witness));
  }
  const std::vector<Rational> ends = e.endpoints();

  // zigzag on [u,v]: up on E to the balance point, down on E after it
  auto zigzag = [&](const Interval& blk, RefineBlock* rec) {
    const Rational& u = blk.lo;
    const Rational& v = blk.hi;
    Rational fu = f(u);
    Rational fv = f(v);
    Rational t = balance_point(e, u, v, fv - fu, delta);
    PointList pts;
    pts.add(u, fu);
    for_endpoints(ends, u, t, [&](const Rational& x) { pts.add(x, fu + (1 - delta) * e.measure_in(u, x)); });
    Rational peak = fu + (1 - delta) * e.measure_in(u, t);
    if (peak != fv + (1 - delta) * e.measure_in(t, v)) throw std::logic_error("turning point mismatch");
    pts.add(t, peak);
    for_endpoints(ends, t, v, [&](const Rational& x) { pts.add(x, fv + (1 - delta) * e.measure_in(x, v)); });
    pts.add(v, fv);
    if (rec) {
      rec->t = t;
      rec->lhs = (1 - delta) * (e.measure_in(u, t) - e.measure_in(t, v));
    }
    return pts.build();
  };

  std::vector<Interval> blocks;
  if (options.rule == PartitionRule::adaptive) {
    blocks = adaptive_blocks(active, options.max_depth, [&](const Interval& blk) {
      Rational m = e.measure_in(blk.lo, blk.hi);
      if (m == 0 || 2 * m < min_gap(f, env, blk)) return true;
      return check_strict_on(zigzag(blk, nullptr), env, blk).ok;
    });
  } else if (!active.degenerate()) {
    Rational gamma = min_gap(f, env, active);
    Rational lip = 1;
    for (const auto* h : {&env.lower, &env.upper}) {
      for (const auto& s : h->slopes()) lip = max(lip, abs(s));
    }
    // (d-c)/n < γ/3 and lip*(d-c)/n < γ/3
    Integer n = floor(3 * lip * active.length() / gamma) + 1;
    if (n > options.max_blocks) throw BudgetExceeded("uniform partition needs " + n.get_str() + " blocks");
    long count = n.get_si();
    Rational step = active.length() / count;
    for (long i = 0; i < count; ++i) blocks.emplace_back(active.lo + step * i, active.lo + step * (i + 1));
  }

  RefineResult out;
  out.active = active;
  PointList pts;
  if (active.lo > dom.lo) pts.add_f(f, dom.lo, active.lo);
  for (const auto& blk : blocks) {
    Rational m = e.measure_in(blk.lo, blk.hi);
    RefineBlock rec{blk.lo, blk.midpoint(), blk.hi, m, 0, f(blk.hi) - f(blk.lo)};
    if (m == 0) {
      pts.add_f(f, blk.lo, blk.hi);
    } else {
      pts.add_f(zigzag(blk, &rec), blk.lo, blk.hi);
    }
    out.blocks.push_back(rec);
  }
  if (active.hi < dom.hi) pts.add_f(f, active.hi, dom.hi);
  if (active.degenerate() && blocks.empty()) pts.add_f(f, dom.lo, dom.hi);
  out.g = pts.build();
  return out;
}

FlattenResult envelope_flatten(const PiecewiseLinear& f, const Envelope& env, const IntervalSet& E,
                               const IntervalSet& H, const Rational& epsilon, const Rational& delta,
                               const RefineOptions& options) {
  require_parameters(epsilon, delta);
  require_domain(f, env);
  Interval dom = f.domain();
  IntervalSet e = clip(E, dom);
  IntervalSet meet = intersect(H, e);
  if (meet.measure() > 0) {
    throw PreconditionError("H meets E in positive measure", meet.intervals().front());
  }
  require_increment_bound(f, e, 1 - epsilon);
  FlattenResult out;
  if (e.measure() == 0 && !options.active) {
    out.g = f;
    out.active = Interval(dom.lo, dom.lo);
    return out;
  }
  Interval active = resolve_active(options, e, dom);
  EnvelopeCheck strict = check_strict_on(f, env, active);
  if (!strict.ok) {
    throw PreconditionError("envelope not strict at " + to_string(*strict.witness),
                            Interval(*strict.witness, *strict.witness));
  }
  const std::vector<Rational> ends = e.endpoints();
  // g = f(c) + γ(φ - φ(c)) on the block
  auto ramp = [&](const Interval& blk, const Rational& gamma) {
    Rational fc = f(blk.lo);
    PointList pts;
    pts.add(blk.lo, fc);
    for_endpoints(ends, blk.lo, blk.hi, [&](const Rational& x) { pts.add(x, fc + gamma * e.measure_in(blk.lo, x)); });
    pts.add(blk.hi, f(blk.hi));
    return pts.build();
  };
  std::vector<Interval> blocks = adaptive_blocks(active, options.max_depth, [&](const Interval& blk) {
    Rational m = e.measure_in(blk.lo, blk.hi);
    if (m == 0) return true;
    Rational fc = f(blk.lo);
    Rational fd = f(blk.hi);
    if (max_on(env.lower, blk) < min(fc, fd) && min_on(env.upper, blk) > max(fc, fd)) return true;
    return check_strict_on(ramp(blk, (fd - fc) / m), env, blk).ok;
  });

  out.active = active;
  PointList pts;
  if (active.lo > dom.lo) pts.add_f(f, dom.lo, active.lo);
  for (const auto& blk : blocks) {
    FlattenBlock rec;
    rec.c = blk.lo;
    rec.d = blk.hi;
    rec.mass = e.measure_in(blk.lo, blk.hi);
    if (rec.mass == 0) {
      rec.kept = true;
      pts.add_f(f, blk.lo, blk.hi);
      out.blocks.push_back(rec);
      continue;
    }
    // H∩E is null, so every H-gap is selected and carries all of the mass
    rec.selected = rec.mass;
    Rational fc = f(blk.lo);
    rec.gamma = (f(blk.hi) - fc) / rec.selected;
    pts.add_f(ramp(blk, rec.gamma), blk.lo, blk.hi);
    out.blocks.push_back(rec);
  }
  if (active.hi < dom.hi) pts.add_f(f, active.hi, dom.hi);
  if (active.degenerate() && blocks.empty()) pts.add_f(f, dom.lo, dom.hi);
  out.g = pts.build();
  IntervalSet h_in = clip(H, dom);
  for (const auto& h : h_in.intervals()) {
    for (const auto& x : merged_points({&out.g}, h)) {
      if (out.g(x) != out.g(h.lo)) throw std::logic_error("flattened function moves on H at " + to_string(x));
    }
  }
  return out;
}

}  // namespace lipset
