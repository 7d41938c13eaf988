#include "lipset/piecewise_linear.hpp"

#include <algorithm>
#include <stdexcept>

namespace lipset {

PiecewiseLinear::PiecewiseLinear(std::vector<Rational> xs, std::vector<Rational> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
  if (xs_.empty()) throw std::invalid_argument("piecewise-linear function needs at least one breakpoint");
  if (xs_.size() != ys_.size()) throw std::invalid_argument("breakpoints and values differ in length");
  for (std::size_t i = 1; i < xs_.size(); ++i) {
    if (xs_[i] <= xs_[i - 1]) {
      throw std::invalid_argument("breakpoints not strictly increasing at " + to_string(xs_[i]));
    }
  }
}

PiecewiseLinear PiecewiseLinear::constant(const Interval& domain, const Rational& c) {
  if (domain.degenerate()) return PiecewiseLinear({domain.lo}, {c});
  return PiecewiseLinear({domain.lo, domain.hi}, {c, c});
}

PiecewiseLinear PiecewiseLinear::affine(const Interval& domain, const Rational& value_at_lo, const Rational& slope) {
  if (domain.degenerate()) return PiecewiseLinear({domain.lo}, {value_at_lo});
  Rational end = value_at_lo + slope * domain.length();
  return PiecewiseLinear({domain.lo, domain.hi}, {value_at_lo, end});
}

std::size_t PiecewiseLinear::segment_index(const Rational& x) const {
  auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  return static_cast<std::size_t>(it - xs_.begin()) - 1;
}

Rational PiecewiseLinear::operator()(const Rational& x) const {
  if (x <= xs_.front()) return ys_.front();
  if (x >= xs_.back()) return ys_.back();
  std::size_t k = segment_index(x);
  if (xs_[k] == x) return ys_[k];
  Rational t = (x - xs_[k]) / (xs_[k + 1] - xs_[k]);
  return ys_[k] + t * (ys_[k + 1] - ys_[k]);
}

std::vector<Rational> PiecewiseLinear::slopes() const {
  std::vector<Rational> out;
  for (std::size_t i = 0; i + 1 < xs_.size(); ++i) out.push_back((ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i]));
  return out;
}

Rational PiecewiseLinear::slope_left(const Rational& x) const {
  if (x <= xs_.front() || x > xs_.back()) return 0;
  auto it = std::lower_bound(xs_.begin(), xs_.end(), x);  // first >= x
  std::size_t k = static_cast<std::size_t>(it - xs_.begin());
  return (ys_[k] - ys_[k - 1]) / (xs_[k] - xs_[k - 1]);
}

Rational PiecewiseLinear::slope_right(const Rational& x) const {
  if (x < xs_.front() || x >= xs_.back()) return 0;
  std::size_t k = segment_index(x);
  return (ys_[k + 1] - ys_[k]) / (xs_[k + 1] - xs_[k]);
}

PiecewiseLinear build_phi(const IntervalSet& E, const Rational& basepoint) {
  Rational lo = basepoint, hi = basepoint;
  if (!E.empty()) {
    Interval h = E.hull();
    lo = min(lo, h.lo);
    hi = max(hi, h.hi);
  }
  return build_phi(E, basepoint, Interval(lo, hi));
}

PiecewiseLinear build_phi(const IntervalSet& E, const Rational& basepoint, const Interval& domain) {
  if (!domain.contains(basepoint)) throw std::invalid_argument("basepoint outside the domain");
  std::vector<Rational> xs{domain.lo};
  for (const auto& e : E.endpoints()) {
    if (e > domain.lo && e < domain.hi) xs.push_back(e);
  }
  if (domain.hi > domain.lo) xs.push_back(domain.hi);
  Rational base = E.cumulative(basepoint);
  std::vector<Rational> ys;
  ys.reserve(xs.size());
  for (const auto& x : xs) ys.push_back(E.cumulative(x) - base);
  return PiecewiseLinear(std::move(xs), std::move(ys));
}

MRatio m_ratio(const PiecewiseLinear& f, const Rational& x, const Rational& r) {
  if (r <= 0) throw std::invalid_argument("radius must be positive");
  Rational lo = x - r, hi = x + r;
  Interval dom = f.domain();
  MRatio out;
  out.clamped = lo < dom.lo || hi > dom.hi;
  Rational fx = f(x);
  Rational best = abs(f(lo) - fx);
  out.argmax = lo;
  Rational right = abs(f(hi) - fx);
  if (right > best) {
    best = right;
    out.argmax = hi;
  }
  const auto& xs = f.breakpoints();
  const auto& ys = f.values();
  auto first = std::lower_bound(xs.begin(), xs.end(), lo);
  for (auto it = first; it != xs.end() && *it <= hi; ++it) {
    Rational d = abs(ys[static_cast<std::size_t>(it - xs.begin())] - fx);
    if (d > best) {
      best = d;
      out.argmax = *it;
    }
  }
  out.value = best / r;
  return out;
}

LocalLip local_lip_exact(const PiecewiseLinear& f, const Rational& x) {
  Interval dom = f.domain();
  if (!dom.interior_contains(x)) throw std::invalid_argument("point " + to_string(x) + " not inside the domain");
  Rational v = max(abs(f.slope_left(x)), abs(f.slope_right(x)));
  return {v, v};
}

Sweep lip_sweep(const PiecewiseLinear& f, const Rational& x, const std::vector<Rational>& r_grid) {
  Sweep out;
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    if (r_grid[i] <= 0) throw std::invalid_argument("grid radius must be positive");
    if (i > 0 && r_grid[i] >= r_grid[i - 1]) throw std::invalid_argument("radius grid must be strictly descending");
    Rational v = m_ratio(f, x, r_grid[i]).value;
    if (i == 0 || v < out.lower) out.lower = v;
    if (i == 0 || v > out.upper) out.upper = v;
    out.ratios.emplace_back(r_grid[i], v);
  }
  return out;
}

IncrementReport check_increment_bound(const PiecewiseLinear& f, const IntervalSet& E,
                                      const std::vector<std::pair<Rational, Rational>>& pairs,
                                      const Rational& factor) {
  IncrementReport rep;
  for (const auto& [p, q] : pairs) {
    const Rational& a = min(p, q);
    const Rational& b = max(p, q);
    Rational margin = factor * E.measure_in(a, b) - abs(f(a) - f(b));
    ++rep.checked;
    if (!rep.min_margin || margin < *rep.min_margin) rep.min_margin = margin;
    if (margin < 0) {
      rep.ok = false;
      rep.violations.push_back({a, b, -margin});
    }
  }
  return rep;
}

AuditReport audit_increment_bound(const PiecewiseLinear& f, const IntervalSet& E, const Rational& factor) {
  std::vector<Rational> cuts = f.breakpoints();
  Interval dom = f.domain();
  for (const auto& e : E.endpoints()) {
    if (e > dom.lo && e < dom.hi) cuts.push_back(e);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  AuditReport rep;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const Rational& a = cuts[i];
    const Rational& b = cuts[i + 1];
    Rational slope = abs((f(b) - f(a)) / (b - a));
    Rational mass = E.measure_in(a, b);
    bool inside = mass == b - a;  // otherwise mass is 0 on a refined piece
    if (inside) {
      if (slope > rep.max_slope_on_E) rep.max_slope_on_E = slope;
      if (slope > factor && rep.ok) {
        rep.ok = false;
        rep.witness = Interval(a, b);
      }
    } else {
      if (slope > rep.max_slope_off_E) rep.max_slope_off_E = slope;
      if (slope > 0 && rep.ok) {
        rep.ok = false;
        rep.witness = Interval(a, b);
      }
    }
  }
  return rep;
}

namespace {

void require_same_domain(const PiecewiseLinear& f, const PiecewiseLinear& g) {
  if (f.domain() != g.domain()) {
    throw std::invalid_argument("domain mismatch: [" + to_string(f.domain().lo) + ", " + to_string(f.domain().hi) +
                                "] vs [" + to_string(g.domain().lo) + ", " + to_string(g.domain().hi) + "]");
  }
}

std::vector<Rational> merged_breakpoints(const PiecewiseLinear& f, const PiecewiseLinear& g) {
  std::vector<Rational> xs;
  std::merge(f.breakpoints().begin(), f.breakpoints().end(), g.breakpoints().begin(), g.breakpoints().end(),
             std::back_inserter(xs));
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

template <class Op>
PiecewiseLinear combine(const PiecewiseLinear& f, const PiecewiseLinear& g, Op op) {
  require_same_domain(f, g);
  std::vector<Rational> xs = merged_breakpoints(f, g);
  std::vector<Rational> ys;
  ys.reserve(xs.size());
  for (const auto& x : xs) ys.push_back(op(f(x), g(x)));
  return PiecewiseLinear(std::move(xs), std::move(ys));
}

PiecewiseLinear envelope_of(const PiecewiseLinear& f, const PiecewiseLinear& g, bool take_min) {
  require_same_domain(f, g);
  std::vector<Rational> base = merged_breakpoints(f, g);
  std::vector<Rational> xs;
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (i > 0) {
      Rational d0 = f(base[i - 1]) - g(base[i - 1]);
      Rational d1 = f(base[i]) - g(base[i]);
      if ((d0 < 0 && d1 > 0) || (d0 > 0 && d1 < 0)) {
        xs.push_back(base[i - 1] + (base[i] - base[i - 1]) * d0 / (d0 - d1));
      }
    }
    xs.push_back(base[i]);
  }
  std::vector<Rational> ys;
  ys.reserve(xs.size());
  for (const auto& x : xs) {
    Rational a = f(x), b = g(x);
    ys.push_back(take_min ? min(a, b) : max(a, b));
  }
  return PiecewiseLinear(std::move(xs), std::move(ys));
}

}  // namespace

PiecewiseLinear add(const PiecewiseLinear& f, const PiecewiseLinear& g) {
  return combine(f, g, [](const Rational& a, const Rational& b) { return Rational(a + b); });
}

PiecewiseLinear subtract(const PiecewiseLinear& f, const PiecewiseLinear& g) {
  return combine(f, g, [](const Rational& a, const Rational& b) { return Rational(a - b); });
}

PiecewiseLinear scale(const PiecewiseLinear& f, const Rational& c) {
  std::vector<Rational> ys = f.values();
  for (auto& y : ys) y *= c;
  return PiecewiseLinear(f.breakpoints(), std::move(ys));
}

PiecewiseLinear negate(const PiecewiseLinear& f) { return scale(f, -1); }

PiecewiseLinear pointwise_min(const PiecewiseLinear& f, const PiecewiseLinear& g) { return envelope_of(f, g, true); }
PiecewiseLinear pointwise_max(const PiecewiseLinear& f, const PiecewiseLinear& g) { return envelope_of(f, g, false); }

Rational sup_norm(const PiecewiseLinear& f) {
  Rational best = 0;
  for (const auto& y : f.values()) {
    Rational a = abs(y);
    if (a > best) best = a;
  }
  return best;
}

Rational sup_distance(const PiecewiseLinear& f, const PiecewiseLinear& g) {
  Rational best = 0;
  for (const auto& x : merged_breakpoints(f, g)) {
    Rational d = abs(f(x) - g(x));
    if (d > best) best = d;
  }
  return best;
}

PiecewiseLinear restrict(const PiecewiseLinear& f, const Interval& sub) {
  std::vector<Rational> xs{sub.lo};
  for (const auto& x : f.breakpoints()) {
    if (x > sub.lo && x < sub.hi) xs.push_back(x);
  }
  if (sub.hi > sub.lo) xs.push_back(sub.hi);
  std::vector<Rational> ys;
  ys.reserve(xs.size());
  for (const auto& x : xs) ys.push_back(f(x));
  return PiecewiseLinear(std::move(xs), std::move(ys));
}

PiecewiseLinear concat(const PiecewiseLinear& f, const PiecewiseLinear& g) {
  if (f.domain().hi != g.domain().lo) throw std::invalid_argument("concat: domains do not meet");
  if (f.values().back() != g.values().front()) throw std::invalid_argument("concat: values disagree at the junction");
  std::vector<Rational> xs = f.breakpoints();
  std::vector<Rational> ys = f.values();
  xs.insert(xs.end(), g.breakpoints().begin() + 1, g.breakpoints().end());
  ys.insert(ys.end(), g.values().begin() + 1, g.values().end());
  return PiecewiseLinear(std::move(xs), std::move(ys));
}

PiecewiseLinear extend_to(const PiecewiseLinear& f, const Interval& domain) {
  Interval d = f.domain();
  if (domain.lo > d.lo || domain.hi < d.hi) throw std::invalid_argument("extend_to: target domain is smaller");
  std::vector<Rational> xs, ys;
  if (domain.lo < d.lo) {
    xs.push_back(domain.lo);
    ys.push_back(f.values().front());
  }
  xs.insert(xs.end(), f.breakpoints().begin(), f.breakpoints().end());
  ys.insert(ys.end(), f.values().begin(), f.values().end());
  if (domain.hi > d.hi) {
    xs.push_back(domain.hi);
    ys.push_back(f.values().back());
  }
  return PiecewiseLinear(std::move(xs), std::move(ys));
}

PiecewiseLinear splice(const PiecewiseLinear& f, const PiecewiseLinear& g) {
  Interval d = g.domain();
  Interval fd = f.domain();
  if (d.lo < fd.lo || d.hi > fd.hi) throw std::invalid_argument("splice: piece leaves the domain");
  if (f(d.lo) != g(d.lo) || f(d.hi) != g(d.hi)) throw std::invalid_argument("splice: end values disagree");
  std::vector<Rational> xs, ys;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.breakpoints()[i] < d.lo) {
      xs.push_back(f.breakpoints()[i]);
      ys.push_back(f.values()[i]);
    }
  }
  xs.insert(xs.end(), g.breakpoints().begin(), g.breakpoints().end());
  ys.insert(ys.end(), g.values().begin(), g.values().end());
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.breakpoints()[i] > d.hi) {
      xs.push_back(f.breakpoints()[i]);
      ys.push_back(f.values()[i]);
    }
  }
  return PiecewiseLinear(std::move(xs), std::move(ys));
}

PiecewiseLinear simplify(const PiecewiseLinear& f) {
  const auto& xs = f.breakpoints();
  const auto& ys = f.values();
  if (xs.size() <= 2) return f;
  std::vector<Rational> ox{xs.front()}, oy{ys.front()};
  for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
    Rational s0 = (ys[i] - oy.back()) / (xs[i] - ox.back());
    Rational s1 = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
    if (s0 != s1) {
      ox.push_back(xs[i]);
      oy.push_back(ys[i]);
    }
  }
  ox.push_back(xs.back());
  oy.push_back(ys.back());
  return PiecewiseLinear(std::move(ox), std::move(oy));
}

PiecewiseLinear refine(const PiecewiseLinear& f, const std::vector<Rational>& extra) {
  std::vector<Rational> xs = f.breakpoints();
  Interval d = f.domain();
  for (const auto& x : extra) {
    if (x > d.lo && x < d.hi) xs.push_back(x);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<Rational> ys;
  ys.reserve(xs.size());
  for (const auto& x : xs) ys.push_back(f(x));
  return PiecewiseLinear(std::move(xs), std::move(ys));
}

}  // namespace lipset
