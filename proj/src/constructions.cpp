#include "lipset/constructions.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace lipset {

PiecewiseLinear build_monotone_lip1(const IntervalSet& E, const Interval& window) {
  return build_phi(E, window.lo, window);
}

namespace {

void push_unique_sorted(std::vector<Rational>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

std::vector<Rational> sample_points(const IntervalSet& E, const Interval& window, int grid_points) {
  std::vector<Rational> pts;
  const auto& ivs = E.intervals();
  for (std::size_t i = 0; i < ivs.size(); ++i) {
    pts.push_back(ivs[i].lo);
    pts.push_back(ivs[i].hi);
    pts.push_back(ivs[i].midpoint());
    if (i + 1 < ivs.size()) pts.push_back((ivs[i].hi + ivs[i + 1].lo) / 2);
  }
  for (int k = 0; k <= grid_points; ++k) pts.push_back(window.lo + window.length() * k / grid_points);
  std::erase_if(pts, [&](const Rational& x) { return !window.contains(x); });
  push_unique_sorted(pts);
  return pts;
}

}  // namespace

MonotoneReport check_monotone_conditions(const IntervalSet& E, MonotoneMode mode, const Interval& window,
                                         const Rational& resolution, int grid_points) {
  if (resolution <= 0 || resolution >= 1) throw std::invalid_argument("resolution must lie in (0,1)");
  MonotoneReport rep;
  for (const auto& x : sample_points(E, window, grid_points)) {
    bool in_e = E.contains(x);
    bool in_closure_c = !E.interior_contains(x);
    if (in_e) {
      PointCheck pc;
      pc.x = x;
      pc.boundary = in_closure_c;
      if (mode == MonotoneMode::Lip1) {
        DensityReport d = check_weakly_dense_at(E, x, resolution);
        pc.condition = "E weakly dense";
        pc.verdict = d.verdict;
        pc.r = d.worst_r;
        pc.ratio = d.ratio;
      } else {
        RatioMin m = min_max_ratio(E, x, x, resolution);
        pc.condition = "E strongly one-sided dense";
        pc.verdict = m.value >= 1 - resolution ? Verdict::holds : Verdict::fails;
        pc.r = m.r;
        pc.ratio = m.value;
      }
      rep.points.push_back(pc);
    }
    if (in_closure_c) {
      PointCheck pc;
      pc.x = x;
      pc.boundary = in_e;
      if (mode == MonotoneMode::Lip1) {
        RatioMin m = sup_max_ratio(E, x, resolution);
        pc.condition = "complement strongly dense";
        pc.ratio = 1 - m.value;
        pc.r = m.r;
        pc.verdict = m.value <= resolution ? Verdict::holds : Verdict::fails;
      } else {
        RatioMin m = min_centered_ratio(E, x, resolution);
        pc.condition = "complement weakly center dense";
        pc.ratio = 1 - m.value;
        pc.r = m.r;
        pc.verdict = m.value < resolution ? Verdict::holds : Verdict::fails;
      }
      rep.points.push_back(pc);
    }
  }
  for (const auto& p : rep.points) {
    if (p.verdict == Verdict::fails) rep.verdict = Verdict::fails;
  }
  return rep;
}

void validate_ternary(const TernaryDecomposition& t) {
  if (t.window.degenerate()) throw std::invalid_argument("ternary decomposition over a degenerate window");
  const IntervalSet* sets[3] = {&t.E1, &t.E0, &t.Em1};
  const char* names[3] = {"E1", "E0", "E-1"};
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      Rational overlap = intersect(*sets[i], *sets[j]).measure();
      if (overlap > 0) {
        throw std::invalid_argument(std::string("ternary parts ") + names[i] + " and " + names[j] + " overlap in measure " +
                                    to_string(overlap));
      }
    }
  }
  IntervalSet all = unite(unite(t.E1, t.E0), t.Em1);
  IntervalSet missing = complement_within(all, t.window);
  if (!missing.empty()) {
    throw std::invalid_argument("ternary parts leave [" + to_string(missing.intervals().front().lo) + ", " +
                                to_string(missing.intervals().front().hi) + "] uncovered");
  }
}

PiecewiseLinear build_ternary_integral(const TernaryDecomposition& t, const Rational& basepoint) {
  validate_ternary(t);
  PiecewiseLinear up = build_phi(clip(t.E1, t.window), basepoint, t.window);
  PiecewiseLinear down = build_phi(clip(t.Em1, t.window), basepoint, t.window);
  return simplify(subtract(up, down));
}

namespace {

// sup over v in (0, s] of |f(x±v) - f(x)| / v; attained at a breakpoint distance or at s
Rational one_sided_sup(const PiecewiseLinear& f, const Rational& x, const Rational& s) {
  std::vector<Rational> cand{s};
  for (const auto& b : f.breakpoints()) {
    Rational d = abs(b - x);
    if (d > 0 && d < s) cand.push_back(d);
  }
  Rational fx = f(x);
  Rational best = 0;
  for (const auto& v : cand) {
    Rational a = abs(f(x + v) - fx) / v;
    Rational b = abs(f(x - v) - fx) / v;
    if (a > best) best = a;
    if (b > best) best = b;
  }
  return best;
}

}  // namespace

TernaryReport check_ternary(const TernaryDecomposition& t, const IntervalSet& E, const Rational& resolution,
                            const std::vector<Rational>& extra_points, int scales) {
  validate_ternary(t);
  if (resolution <= 0 || resolution >= 1) throw std::invalid_argument("resolution must lie in (0,1)");
  PiecewiseLinear f = build_ternary_integral(t, t.window.lo);
  std::vector<Rational> pts = sample_points(clip(E, t.window), t.window, 32);
  for (const auto& x : extra_points) {
    if (t.window.contains(x)) pts.push_back(x);
  }
  push_unique_sorted(pts);

  TernaryReport rep;
  for (const auto& x : pts) {
    TernaryPoint tp;
    tp.x = x;
    if (E.contains(x)) {
      tp.condition = 1;
      DensityReport up = check_weakly_dense_at(t.E1, x, resolution);
      DensityReport down = check_weakly_dense_at(t.Em1, x, resolution);
      const DensityReport& best = up.ratio >= down.ratio ? up : down;
      tp.verdict = (up.verdict == Verdict::holds || down.verdict == Verdict::holds) ? Verdict::holds : Verdict::fails;
      tp.r = best.worst_r;
      tp.ratio = best.ratio;
    } else {
      tp.condition = 2;
      Rational s = t.window.length();
      for (int k = 1; k <= scales; ++k) {
        s /= 2;
        tp.scales.push_back({s, one_sided_sup(f, x, s)});
      }
      Rational local = max(abs(f.slope_left(x)), abs(f.slope_right(x)));
      tp.ratio = tp.scales.back().ratio;
      tp.r = tp.scales.back().scale;
      if (local > 0) {
        tp.verdict = Verdict::fails;  // the ratio tends to |f'(x±)| > 0
        tp.ratio = local;
      } else if (tp.ratio <= resolution) {
        tp.verdict = Verdict::holds;
      } else {
        tp.verdict = Verdict::inconclusive;
      }
    }
    rep.points.push_back(std::move(tp));
  }
  for (const auto& p : rep.points) {
    if (p.verdict == Verdict::fails) {
      rep.verdict = Verdict::fails;
      break;
    }
    if (p.verdict == Verdict::inconclusive) rep.verdict = Verdict::inconclusive;
  }
  return rep;
}

TernaryDecomposition normalize_ternary(const TernaryDecomposition& t, const IntervalSet& E) {
  validate_ternary(t);
  IntervalSet e = clip(E, t.window);
  TernaryDecomposition out;
  out.window = t.window;
  out.Em1 = intersect(t.Em1, e);
  out.E1 = difference(e, out.Em1);
  out.E0 = complement_within(e, t.window);
  return out;
}

TernaryDecomposition alternating_ternary_example(int N, const Rational& top) {
  if (N < 1) throw std::invalid_argument("need at least one block pair");
  if (top <= 1) throw std::invalid_argument("top must exceed 1");
  std::vector<Interval> up, down;
  for (int n = 1; n <= N; ++n) {
    down.emplace_back(Rational(1) / (2 * n + 1), Rational(1) / (2 * n));
    up.emplace_back(Rational(1) / (2 * n), Rational(1) / (2 * n - 1));
  }
  up.emplace_back(1, top);
  TernaryDecomposition t;
  t.window = Interval(-1, top);
  t.E1 = IntervalSet::canonicalize(up);
  t.Em1 = IntervalSet::canonicalize(down);
  t.E0 = IntervalSet::of(-1, Rational(1) / (2 * N + 1));
  return t;
}

Rational balance_point(const IntervalSet& E, const Rational& r, const Rational& s, const Rational& target,
                       const Rational& delta) {
  if (r >= s) throw std::invalid_argument("balance point needs r < s");
  if (delta < 0 || delta >= 1) throw std::invalid_argument("delta must lie in [0,1)");
  Rational m = E.measure_in(r, s);
  if (m == 0) {
    if (target == 0) return (r + s) / 2;
    throw std::invalid_argument("no mass in [" + to_string(r) + ", " + to_string(s) + "] to reach target " +
                                to_string(target));
  }
  // |E∩[r,t]| must equal u
  Rational u = (target / (1 - delta) + m) / 2;
  if (u <= 0 || u >= m) {
    throw std::invalid_argument("target " + to_string(target) + " unreachable inside (" + to_string(r) + ", " +
                                to_string(s) + ")");
  }
  Rational goal = E.cumulative(r) + u;
  for (const auto& c : E.intervals()) {
    if (c.hi <= r) continue;
    Rational lo = max(c.lo, r);
    Rational at_lo = E.cumulative(lo);
    Rational hi = min(c.hi, s);
    Rational at_hi = at_lo + (hi - lo);
    if (at_hi >= goal) return lo + (goal - at_lo);
  }
  throw std::logic_error("balance point walk ran past s");
}

SmallLip build_small_lip(const IntervalSet& E, const Rational& epsilon, const Interval& window) {
  if (epsilon <= 0) throw std::invalid_argument("epsilon must be positive");
  IntervalSet e = clip(E, window);
  SmallLip out;
  out.epsilon = epsilon;
  // blocks [(i-1)ε, iε] meeting the window
  Integer first = floor(window.lo / epsilon) + 1;
  Integer last = ceil(window.hi / epsilon);
  if (last < first) last = first;
  Rational dom_lo = Rational(first - 1) * epsilon;
  Rational dom_hi = Rational(last) * epsilon;

  std::vector<Integer> idx;
  for (const auto& c : e.intervals()) {
    if (c.degenerate()) continue;
    Integer a = floor(c.lo / epsilon) + 1;
    Integer b = ceil(c.hi / epsilon);
    for (Integer i = a; i <= b; ++i) {
      if (idx.empty() || idx.back() < i) idx.push_back(i);
    }
  }
  std::vector<Rational> xs{dom_lo}, ys{Rational(0)};
  auto push = [&](const Rational& x, const Rational& y) {
    if (x > xs.back()) {
      xs.push_back(x);
      ys.push_back(y);
    }
  };
  for (const auto& i : idx) {
    Rational lo = Rational(i - 1) * epsilon;
    Rational hi = Rational(i) * epsilon;
    Rational m = e.measure_in(lo, hi);
    if (m == 0) continue;
    Rational split = balance_point(e, lo, hi, 0, 0);
    SmallLipBlock blk{lo, split, hi, e.measure_in(lo, split), e.measure_in(split, hi)};
    push(lo, 0);
    for (const auto& p : e.endpoints()) {
      if (p <= lo) continue;
      if (p >= split) break;
      push(p, e.measure_in(lo, p));
    }
    push(split, blk.left_mass);
    for (const auto& p : e.endpoints()) {
      if (p <= split) continue;
      if (p >= hi) break;
      push(p, blk.left_mass - e.measure_in(split, p));
    }
    push(hi, 0);
    out.blocks.push_back(std::move(blk));
  }
  push(dom_hi, 0);
  out.f = simplify(PiecewiseLinear(std::move(xs), std::move(ys)));
  return out;
}

Lip1Sum build_lip1_sum(const std::vector<IntervalSet>& parts, const Interval& window) {
  if (window.degenerate()) throw std::invalid_argument("lip-sum over a degenerate window");
  for (std::size_t i = 0; i < parts.size(); ++i) {
    for (std::size_t j = i + 1; j < parts.size(); ++j) {
      if (intersect(parts[i], parts[j]).measure() > 0) {
        throw std::invalid_argument("parts " + std::to_string(i + 1) + " and " + std::to_string(j + 1) + " overlap");
      }
    }
    if (i > 0) {
      IntervalSet p = clip(parts[i], window);
      if (!p.empty() && (p.hull().lo <= window.lo || p.hull().hi >= window.hi) && !parts[i].empty()) {
        Interval h = parts[i].hull();
        if (h.lo < window.lo || h.hi > window.hi) {
          throw std::invalid_argument("part " + std::to_string(i + 1) + " leaves the window; only the first may");
        }
      }
    }
  }
  Lip1Sum out;
  std::vector<SmallLip> built;
  IntervalSet earlier;
  Interval domain = window;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    SumPart info;
    info.index = i;
    long n = static_cast<long>(i) + 1;
    IntervalSet part = clip(parts[i], window);
    std::optional<Rational> d = distance(part, earlier);
    Rational near = d ? min(Rational(1), *d) : Rational(1);
    info.bound = pow2(-n) * near;
    if (i > 0 && d && *d == 0) {
      info.skipped = true;
      info.warning = "part " + std::to_string(n) + " touches an earlier part; skipped";
      out.parts.push_back(info);
      built.emplace_back();
      continue;
    }
    info.epsilon = i == 0 ? Rational(1) : info.bound;
    SmallLip s = build_small_lip(part, info.epsilon, window);
    Interval sd = s.f.domain();
    domain = Interval(min(domain.lo, sd.lo), max(domain.hi, sd.hi));
    info.sup = sup_norm(s.f);
    info.constant_off_part = audit_increment_bound(s.f, part, 1).ok;
    out.parts.push_back(info);
    built.push_back(std::move(s));
    earlier = unite(earlier, part);
    out.used.push_back(part);
  }
  PiecewiseLinear total = PiecewiseLinear::constant(domain, 0);
  for (std::size_t i = 0; i < built.size(); ++i) {
    if (out.parts[i].skipped) {
      out.terms.push_back(PiecewiseLinear::constant(domain, 0));
      continue;
    }
    PiecewiseLinear term = extend_to(built[i].f, domain);
    total = add(total, term);
    out.terms.push_back(std::move(term));
  }
  out.f = simplify(total);
  return out;
}

std::vector<IntervalSet> order_parts_for_sum(const std::vector<IntervalSet>& parts, const Interval& window) {
  std::vector<IntervalSet> edge, inner;
  for (const auto& p : parts) {
    bool touches = !p.empty() && (p.hull().lo <= window.lo || p.hull().hi >= window.hi);
    (touches ? edge : inner).push_back(p);
  }
  if (edge.size() > 1) throw std::invalid_argument("more than one part reaches the window edge");
  edge.insert(edge.end(), inner.begin(), inner.end());
  return edge;
}

std::vector<IntervalSet> split_into_shards(const IntervalSet& part, const Rational& width) {
  if (width <= 0) throw std::invalid_argument("shard width must be positive");
  std::vector<IntervalSet> out;
  std::vector<Interval> cur;
  for (const auto& c : part.intervals()) {
    if (!cur.empty() && c.hi - cur.front().lo > width) {
      out.push_back(IntervalSet::canonicalize(cur, Degenerate::keep));
      cur.clear();
    }
    cur.push_back(c);
  }
  if (!cur.empty()) out.push_back(IntervalSet::canonicalize(cur, Degenerate::keep));
  return out;
}

OffSetCheck lip1_sum_off_check(const Lip1Sum& s, const Rational& x, const Rational& eps) {
  if (eps <= 0) throw std::invalid_argument("epsilon must be positive");
  OffSetCheck out;
  out.x = x;
  out.n1 = std::max(1L, -floor_log2(eps) + 1);
  out.bound = 2 * pow2(-out.n1);
  IntervalSet near;
  std::size_t used = 0;
  for (std::size_t i = 0; i < s.parts.size(); ++i) {
    if (s.parts[i].skipped) continue;
    long n = static_cast<long>(i) + 1;
    if (n <= out.n1) near = unite(near, s.used[used]);
    ++used;
  }
  std::optional<Rational> r = near.distance_to(x);
  out.r = r ? *r : s.f.domain().length();
  if (out.r == 0) {
    out.ok = false;  // x lies in the set; the estimate does not apply
    return out;
  }
  out.ratio = m_ratio(s.f, x, out.r).value;
  out.ok = out.ratio <= out.bound;
  return out;
}

}  // namespace lipset
