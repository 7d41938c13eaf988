#include "lipset/interval_set.hpp"

#include <algorithm>
#include <stdexcept>

namespace lipset {

Interval::Interval(Rational lo_, Rational hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (lo > hi) {
    throw std::invalid_argument("interval with lo > hi: [" + to_string(lo) + ", " + to_string(hi) + "]");
  }
}

IntervalSet::IntervalSet(std::vector<Interval> canonical) : intervals_(std::move(canonical)) {
  prefix_.reserve(intervals_.size());
  Rational acc = 0;
  for (const auto& iv : intervals_) {
    acc += iv.length();
    prefix_.push_back(acc);
  }
}

IntervalSet IntervalSet::canonicalize(std::vector<Interval> raw, Degenerate policy) {
  for (const auto& iv : raw) {
    if (iv.lo > iv.hi) {
      throw std::invalid_argument("interval with lo > hi: [" + to_string(iv.lo) + ", " + to_string(iv.hi) + "]");
    }
  }
  if (policy == Degenerate::drop) {
    std::erase_if(raw, [](const Interval& iv) { return iv.degenerate(); });
  }
  std::sort(raw.begin(), raw.end(), [](const Interval& a, const Interval& b) {
    return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
  });
  std::vector<Interval> out;
  out.reserve(raw.size());
  for (auto& iv : raw) {
    if (!out.empty() && iv.lo <= out.back().hi) {
      if (iv.hi > out.back().hi) out.back().hi = iv.hi;
    } else {
      out.push_back(std::move(iv));
    }
  }
  return IntervalSet(std::move(out));
}

IntervalSet IntervalSet::of(const Rational& lo, const Rational& hi) {
  return canonicalize({Interval(lo, hi)});
}

IntervalSet IntervalSet::point(const Rational& x) {
  return canonicalize({Interval(x, x)}, Degenerate::keep);
}

bool IntervalSet::has_degenerate() const {
  return std::any_of(intervals_.begin(), intervals_.end(), [](const Interval& iv) { return iv.degenerate(); });
}

Rational IntervalSet::cumulative(const Rational& t) const {
  // first component whose lo exceeds t
  auto it = std::upper_bound(intervals_.begin(), intervals_.end(), t,
                             [](const Rational& v, const Interval& iv) { return v < iv.lo; });
  if (it == intervals_.begin()) return 0;
  std::size_t k = static_cast<std::size_t>(it - intervals_.begin()) - 1;
  const Interval& last = intervals_[k];
  if (last.hi <= t) return prefix_[k];
  Rational before = k == 0 ? Rational(0) : prefix_[k - 1];
  return before + (t - last.lo);
}

Rational IntervalSet::measure_in(const Rational& a, const Rational& b) const {
  if (b <= a) return 0;
  return cumulative(b) - cumulative(a);
}

std::optional<Interval> IntervalSet::component_containing(const Rational& x) const {
  auto it = std::upper_bound(intervals_.begin(), intervals_.end(), x,
                             [](const Rational& v, const Interval& iv) { return v < iv.lo; });
  if (it == intervals_.begin()) return std::nullopt;
  --it;
  if (it->hi >= x) return *it;
  return std::nullopt;
}

bool IntervalSet::contains(const Rational& x) const { return component_containing(x).has_value(); }

bool IntervalSet::interior_contains(const Rational& x) const {
  auto c = component_containing(x);
  return c && c->interior_contains(x);
}

Interval IntervalSet::hull() const {
  if (intervals_.empty()) throw std::invalid_argument("hull of the empty set");
  return Interval(intervals_.front().lo, intervals_.back().hi);
}

std::optional<Rational> IntervalSet::distance_to(const Rational& x) const {
  if (intervals_.empty()) return std::nullopt;
  auto it = std::upper_bound(intervals_.begin(), intervals_.end(), x,
                             [](const Rational& v, const Interval& iv) { return v < iv.lo; });
  Rational best;
  bool have = false;
  if (it != intervals_.end()) {
    best = it->lo - x;
    have = true;
  }
  if (it != intervals_.begin()) {
    const Interval& prev = *(it - 1);
    Rational d = prev.hi >= x ? Rational(0) : Rational(x - prev.hi);
    if (!have || d < best) best = d;
  }
  return best;
}

std::vector<Rational> IntervalSet::endpoints() const {
  std::vector<Rational> out;
  out.reserve(2 * intervals_.size());
  for (const auto& iv : intervals_) {
    out.push_back(iv.lo);
    if (!iv.degenerate()) out.push_back(iv.hi);
  }
  return out;
}

IntervalSet unite(const IntervalSet& a, const IntervalSet& b) {
  std::vector<Interval> raw = a.intervals();
  raw.insert(raw.end(), b.intervals().begin(), b.intervals().end());
  return IntervalSet::canonicalize(std::move(raw), Degenerate::keep);
}

IntervalSet unite(std::span<const IntervalSet> sets) {
  std::vector<Interval> raw;
  for (const auto& s : sets) raw.insert(raw.end(), s.intervals().begin(), s.intervals().end());
  return IntervalSet::canonicalize(std::move(raw), Degenerate::keep);
}

IntervalSet intersect(const IntervalSet& a, const IntervalSet& b) {
  std::vector<Interval> out;
  const auto& x = a.intervals();
  const auto& y = b.intervals();
  std::size_t i = 0, j = 0;
  while (i < x.size() && j < y.size()) {
    const Rational& lo = max(x[i].lo, y[j].lo);
    const Rational& hi = min(x[i].hi, y[j].hi);
    if (lo < hi) out.emplace_back(lo, hi);
    if (x[i].hi < y[j].hi) {
      ++i;
    } else {
      ++j;
    }
  }
  return IntervalSet::canonicalize(std::move(out));
}

IntervalSet clip(const IntervalSet& s, const Interval& window) {
  return intersect(s, IntervalSet::canonicalize({window}, Degenerate::keep));
}

IntervalSet complement_within(const IntervalSet& s, const Interval& window) {
  if (window.degenerate()) throw std::invalid_argument("complement within a degenerate window");
  std::vector<Interval> out;
  Rational cursor = window.lo;
  for (const auto& iv : s.intervals()) {
    if (iv.degenerate()) continue;
    if (iv.hi <= window.lo) continue;
    if (iv.lo >= window.hi) break;
    if (iv.lo > cursor) out.emplace_back(cursor, iv.lo);
    if (iv.hi > cursor) cursor = iv.hi;
  }
  if (cursor < window.hi) out.emplace_back(cursor, window.hi);
  return IntervalSet::canonicalize(std::move(out));
}

IntervalSet difference(const IntervalSet& a, const IntervalSet& b) {
  if (a.empty() || b.empty()) return a;
  Interval h = a.hull();
  if (h.degenerate()) return b.contains(h.lo) ? IntervalSet() : a;
  return intersect(a, complement_within(b, h));
}

std::optional<Rational> distance(const IntervalSet& s, const IntervalSet& t) {
  if (s.empty() || t.empty()) return std::nullopt;
  const auto& x = s.intervals();
  const auto& y = t.intervals();
  std::size_t i = 0, j = 0;
  Rational best = -1;
  while (i < x.size() && j < y.size()) {
    Rational gap;
    if (x[i].hi < y[j].lo) {
      gap = y[j].lo - x[i].hi;
    } else if (y[j].hi < x[i].lo) {
      gap = x[i].lo - y[j].hi;
    } else {
      return Rational(0);
    }
    if (best < 0 || gap < best) best = gap;
    if (x[i].hi < y[j].hi) {
      ++i;
    } else {
      ++j;
    }
  }
  return best;
}

bool intersects(const IntervalSet& s, const IntervalSet& t) {
  auto d = distance(s, t);
  return d && *d == 0;
}

}  // namespace lipset
