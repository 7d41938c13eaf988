#include "lipset/density.hpp"

#include <algorithm>
#include <stdexcept>

namespace lipset {

std::string to_string(Side s) {
  switch (s) {
    case Side::left: return "left";
    case Side::right: return "right";
    case Side::both: return "both";
  }
  return "both";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

namespace {

void require_positive(const Rational& r, const char* what) {
  if (r <= 0) throw std::invalid_argument(std::string(what) + " must be positive, got " + to_string(r));
}

// Radii in (0, limit) at which r -> |E∩[a-r,a]| or r -> |E∩[b,b+r]| changes
// slope, followed by limit itself.
std::vector<Rational> radius_breaks(const IntervalSet& E, const Rational& a, const Rational& b,
                                    const Rational& limit) {
  std::vector<Rational> out;
  for (const auto& e : E.endpoints()) {
    if (e < a) {
      Rational d = a - e;
      if (d < limit) out.push_back(d);
    }
    if (e > b) {
      Rational d = e - b;
      if (d < limit) out.push_back(d);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  out.push_back(limit);
  return out;
}

struct Piece {
  Rational a;  // value = a + s*r on the piece
  Rational s;
};

Piece linear_through(const Rational& r0, const Rational& v0, const Rational& r1, const Rational& v1) {
  Piece p;
  p.s = (v1 - v0) / (r1 - r0);
  p.a = v0 - p.s * r0;
  return p;
}

}  // namespace

Rational left_ratio(const IntervalSet& E, const Rational& x, const Rational& r) {
  require_positive(r, "radius");
  return E.measure_in(x - r, x) / r;
}

Rational right_ratio(const IntervalSet& E, const Rational& x, const Rational& r) {
  require_positive(r, "radius");
  return E.measure_in(x, x + r) / r;
}

Rational max_ratio(const IntervalSet& E, const Rational& x, const Rational& r) {
  return max(left_ratio(E, x, r), right_ratio(E, x, r));
}

Rational density_ratio(const IntervalSet& E, const DensityQuery& q) {
  switch (q.side) {
    case Side::left: return left_ratio(E, q.x, q.r);
    case Side::right: return right_ratio(E, q.x, q.r);
    case Side::both: return max_ratio(E, q.x, q.r);
  }
  return 0;
}

RatioMin min_max_ratio(const IntervalSet& E, const Rational& a, const Rational& b, const Rational& delta) {
  require_positive(delta, "delta");
  std::vector<Rational> breaks = radius_breaks(E, a, b, delta);
  RatioMin best;
  bool have = false;
  auto consider = [&](const Rational& r, const Rational& v) {
    if (!have || v < best.value) {
      best.value = v;
      best.r = r;
      have = true;
    }
  };
  Rational prev = 0, prevA = 0, prevB = 0;
  for (const auto& p : breaks) {
    Rational A = E.measure_in(a - p, a);
    Rational B = E.measure_in(b, b + p);
    consider(p, max(A, B) / p);
    if (prev > 0) {
      Piece la = linear_through(prev, prevA, p, A);
      Piece lb = linear_through(prev, prevB, p, B);
      if (la.s != lb.s) {
        Rational rc = (la.a - lb.a) / (lb.s - la.s);
        if (prev < rc && rc < p) {
          Rational v = la.a / rc + la.s;
          consider(rc, v);
        }
      }
    }
    prev = p;
    prevA = A;
    prevB = B;
  }
  return best;
}

Membership level_set_membership(const IntervalSet& E, const Rational& x, const Rational& gamma,
                                const Rational& delta) {
  require_positive(gamma, "gamma");
  require_positive(delta, "delta");
  RatioMin m = min_max_ratio(E, x, x, delta);
  Membership out;
  out.member = m.value >= gamma;
  out.worst_r = m.r;
  out.ratio = m.value;
  out.left = left_ratio(E, x, m.r);
  out.right = right_ratio(E, x, m.r);
  return out;
}

LevelSet level_set(const IntervalSet& E, const Rational& gamma, const Rational& delta, const Interval& window,
                   const Rational& resolution) {
  require_positive(gamma, "gamma");
  require_positive(delta, "delta");
  require_positive(resolution, "resolution");
  if (window.degenerate()) throw std::invalid_argument("level set over a degenerate window");

  std::vector<Interval> inner, undecided;
  std::vector<Interval> stack;
  for (const auto& c : E.intervals()) {
    if (c.degenerate()) continue;  // a lone point has ratio 0 at small radii
    Rational lo = max(c.lo, window.lo);
    Rational hi = min(c.hi, window.hi);
    if (lo >= hi) continue;
    stack.emplace_back(lo, hi);
  }
  Rational margin = 0;
  while (!stack.empty()) {
    Interval piece = stack.back();
    stack.pop_back();
    // Inside one component, the left mass is nondecreasing and the right mass
    // nonincreasing in the centre, so the end points bound every point between.
    if (min_max_ratio(E, piece.lo, piece.hi, delta).value >= gamma) {
      inner.push_back(piece);
      continue;
    }
    if (min_max_ratio(E, piece.hi, piece.lo, delta).value < gamma) continue;
    if (piece.length() <= resolution) {
      undecided.push_back(piece);
      if (piece.length() > margin) margin = piece.length();
      continue;
    }
    Rational mid = piece.midpoint();
    stack.emplace_back(mid, piece.hi);
    stack.emplace_back(piece.lo, mid);
  }
  LevelSet out;
  out.inner = IntervalSet::canonicalize(inner);
  std::vector<Interval> all = inner;
  all.insert(all.end(), undecided.begin(), undecided.end());
  out.outer = IntervalSet::canonicalize(all);
  out.margin = margin;
  return out;
}

RatioMin sup_max_ratio(const IntervalSet& E, const Rational& x, const Rational& eps) {
  require_positive(eps, "epsilon");
  RatioMin best;
  bool have = false;
  for (const auto& p : radius_breaks(E, x, x, eps)) {
    Rational v = max_ratio(E, x, p);
    if (!have || v > best.value) {
      best.value = v;
      best.r = p;
      have = true;
    }
  }
  return best;
}

RatioMin min_centered_ratio(const IntervalSet& E, const Rational& x, const Rational& eps) {
  require_positive(eps, "epsilon");
  RatioMin best;
  bool have = false;
  for (const auto& p : radius_breaks(E, x, x, eps)) {
    Rational v = E.measure_in(x - p, x + p) / (2 * p);
    if (!have || v < best.value) {
      best.value = v;
      best.r = p;
      have = true;
    }
  }
  return best;
}

DensityReport check_weakly_dense_at(const IntervalSet& E, const Rational& x, const Rational& eps) {
  require_positive(eps, "epsilon");
  Rational threshold = 1 - eps;
  std::vector<Rational> breaks = radius_breaks(E, x, x, eps);
  RatioMin best = sup_max_ratio(E, x, eps);
  DensityReport rep;
  rep.point = x;
  if (best.value > threshold && best.r == eps) {
    // r must stay below eps; the ratio is continuous, so back off along the last piece
    Rational prev = breaks.size() > 1 ? breaks[breaks.size() - 2] : Rational(0);
    Rational step = (eps - prev) / 2;
    Rational r = eps - step;
    while (max_ratio(E, x, r) <= threshold) {
      step /= 2;
      r = eps - step;
    }
    best.r = r;
    best.value = max_ratio(E, x, r);
  }
  rep.worst_r = best.r;
  rep.ratio = best.value;
  rep.left = left_ratio(E, x, best.r);
  rep.right = right_ratio(E, x, best.r);
  rep.side = rep.left == rep.right ? Side::both : (rep.left > rep.right ? Side::left : Side::right);
  rep.verdict = best.value > threshold ? Verdict::holds : Verdict::fails;
  return rep;
}

ScaleReport check_strongly_one_sided_dense_at(const IntervalSet& E, const Rational& x,
                                              const std::vector<Rational>& r_grid, const Rational& tolerance) {
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    require_positive(r_grid[i], "grid radius");
    if (i > 0 && r_grid[i] >= r_grid[i - 1]) throw std::invalid_argument("radius grid must be strictly descending");
  }
  ScaleReport out;
  out.summary.point = x;
  bool have = false;
  for (const auto& r : r_grid) {
    GridRatio g{r, left_ratio(E, x, r), right_ratio(E, x, r)};
    Rational m = max(g.left, g.right);
    if (!have || m < out.summary.ratio) {
      out.summary.ratio = m;
      out.summary.worst_r = r;
      out.summary.left = g.left;
      out.summary.right = g.right;
      have = true;
    }
    out.ratios.push_back(std::move(g));
  }
  if (!have) {
    out.summary.verdict = Verdict::inconclusive;
    return out;
  }
  const auto& s = out.summary;
  out.summary.side = s.left == s.right ? Side::both : (s.left > s.right ? Side::left : Side::right);
  out.summary.verdict = s.ratio >= 1 - tolerance ? Verdict::holds : Verdict::fails;
  return out;
}

std::vector<Rational> geometric_grid(const Rational& start, const Rational& factor, int count) {
  require_positive(start, "grid start");
  if (factor <= 0 || factor >= 1) throw std::invalid_argument("grid factor must lie in (0,1)");
  if (count < 0) throw std::invalid_argument("grid count must be nonnegative");
  std::vector<Rational> out;
  Rational r = start;
  for (int i = 0; i < count; ++i) {
    out.push_back(r);
    r *= factor;
  }
  return out;
}

void UDTWitness::validate() const {
  if (gammas.size() != deltas.size()) throw std::invalid_argument("witness gammas and deltas differ in length");
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    if (gammas[i] <= 0 || gammas[i] >= 1) throw std::invalid_argument("witness gamma outside (0,1)");
    if (deltas[i] <= 0) throw std::invalid_argument("witness delta not positive");
    if (i > 0 && gammas[i] <= gammas[i - 1]) throw std::invalid_argument("witness gammas not increasing");
    if (i > 0 && deltas[i] >= deltas[i - 1]) throw std::invalid_argument("witness deltas not decreasing");
  }
}

UDTWitness merge_udt_witnesses(const std::vector<UDTWitness>& ws) {
  if (ws.empty()) throw std::invalid_argument("no witnesses to merge");
  std::size_t n = ws.front().depth();
  for (const auto& w : ws) {
    w.validate();
    n = std::min(n, w.depth());
  }
  if (ws.size() == 1) return ws.front();
  std::vector<Rational> g(n), d(n);
  for (std::size_t k = 0; k < n; ++k) {
    g[k] = ws.front().gammas[k];
    d[k] = ws.front().deltas[k];
    for (const auto& w : ws) {
      if (w.gammas[k] < g[k]) g[k] = w.gammas[k];
      if (w.deltas[k] < d[k]) d[k] = w.deltas[k];
    }
  }
  UDTWitness out;
  for (std::size_t k = 0; k < n; ++k) {
    Rational below = k == 0 ? Rational(0) : g[k - 1];
    out.gammas.push_back((below + g[k]) / 2);
    out.deltas.push_back(k + 1 < n ? Rational((d[k] + d[k + 1]) / 2) : Rational(d[k] / 2));
  }
  return out;
}

UDTWitness fit_udt_witness(const IntervalSet& E, const std::vector<Rational>& gammas,
                           const std::vector<Rational>& probes, const Rational& start, int max_halvings) {
  require_positive(start, "ladder start");
  UDTWitness w;
  Rational cap;
  bool have_cap = false;
  for (const auto& g : gammas) {
    Rational d = start;
    while (have_cap && d >= cap) d /= 2;
    bool found = false;
    for (int k = 0; k <= max_halvings; ++k, d /= 2) {
      bool all = std::all_of(probes.begin(), probes.end(),
                             [&](const Rational& x) { return level_set_membership(E, x, g, d).member; });
      if (all) {
        found = true;
        break;
      }
    }
    if (!found) throw std::invalid_argument("no delta on the ladder admits every probe at gamma " + to_string(g));
    w.gammas.push_back(g);
    w.deltas.push_back(d);
    cap = d;
    have_cap = true;
  }
  w.validate();
  return w;
}

IntervalSet prop5_example(int depth, int top) {
  if (depth < 1) throw std::invalid_argument("depth must be at least 1");
  std::vector<Interval> blocks;
  for (int n = top; n > top - depth; --n) {
    Rational hi = pow2(n);
    blocks.emplace_back(hi - pow2(n - 2), hi);
  }
  return IntervalSet::canonicalize(std::move(blocks));
}

IntervalSet prop5_closure(int depth, int top) {
  std::vector<Interval> raw = prop5_example(depth, top).intervals();
  raw.emplace_back(0, 0);
  return IntervalSet::canonicalize(std::move(raw), Degenerate::keep);
}

Rational prop5_cumulative(const Rational& t) {
  if (t < 0) throw std::invalid_argument("prop5_cumulative needs t >= 0");
  if (t == 0) return 0;
  long m = floor_log2(t);  // 2^m <= t < 2^(m+1)
  // blocks with right end <= 2^m contribute sum_{k<=m} 2^(k-2) = 2^(m-1)
  Rational full = pow2(m - 1);
  Rational start = 3 * pow2(m - 1);  // the next block is [3*2^(m-1), 2^(m+1)]
  if (t > start) full += t - start;
  return full;
}

}  // namespace lipset
