#include <gtest/gtest.h>

#include <random>

#include "lipset/constructions.hpp"
#include "oracles.hpp"

using namespace lipset;

namespace {

Rational q(const char* s) { return parse_rational(s); }

IntervalSet S(std::initializer_list<std::pair<const char*, const char*>> ivs) {
  std::vector<Interval> raw;
  for (const auto& [a, b] : ivs) raw.emplace_back(q(a), q(b));
  return IntervalSet::canonicalize(raw);
}

IntervalSet random_set(std::mt19937_64& rng, int bits, int span) {
  return IntervalSet::canonicalize(oracle::random_raw(rng, 6, bits, span));
}

const PointCheck* find_check(const MonotoneReport& r, const Rational& x, const std::string& cond) {
  for (const auto& p : r.points) {
    if (p.x == x && p.condition == cond) return &p;
  }
  return nullptr;
}

}  // namespace

TEST(Monotone, PhiExamples) {
  Interval w(0, 1);
  EXPECT_EQ(build_monotone_lip1(S({{"0", "1"}}), w).slopes(), std::vector<Rational>({1}));
  EXPECT_EQ(sup_norm(build_monotone_lip1(IntervalSet(), w)), 0);
  EXPECT_EQ(build_monotone_lip1(S({{"0", "1/4"}, {"1/2", "1"}}), w)(1), q("3/4"));
}

TEST(Monotone, UnitIntervalFailsAtItsEnds) {
  IntervalSet E = S({{"0", "1"}});
  MonotoneReport r = check_monotone_conditions(E, MonotoneMode::Lip1, Interval(-1, 2), q("1/64"));
  EXPECT_EQ(r.verdict, Verdict::fails);
  for (Rational x : {Rational(0), Rational(1)}) {
    const PointCheck* dense = find_check(r, x, "E weakly dense");
    const PointCheck* comp = find_check(r, x, "complement strongly dense");
    ASSERT_TRUE(dense && comp);
    EXPECT_EQ(dense->verdict, Verdict::holds);
    EXPECT_EQ(comp->verdict, Verdict::fails);
    EXPECT_TRUE(comp->boundary);
  }
  for (const auto& p : r.points) {
    if (p.x != 0 && p.x != 1) EXPECT_EQ(p.verdict, Verdict::holds) << to_string(p.x) << " " << p.condition;
  }
}

TEST(Monotone, EmptySetHoldsVacuously) {
  MonotoneReport r = check_monotone_conditions(IntervalSet(), MonotoneMode::Lip1, Interval(0, 1), q("1/16"));
  EXPECT_EQ(r.verdict, Verdict::holds);
  r = check_monotone_conditions(IntervalSet(), MonotoneMode::lip1, Interval(0, 1), q("1/16"));
  EXPECT_EQ(r.verdict, Verdict::holds);
}

TEST(Monotone, LittleLipModeAtEdge) {
  IntervalSet E = S({{"0", "1"}});
  MonotoneReport r = check_monotone_conditions(E, MonotoneMode::lip1, Interval(-1, 2), q("1/64"));
  const PointCheck* one_sided = find_check(r, 0, "E strongly one-sided dense");
  const PointCheck* centered = find_check(r, 0, "complement weakly center dense");
  ASSERT_TRUE(one_sided && centered);
  EXPECT_EQ(one_sided->verdict, Verdict::holds);
  EXPECT_EQ(centered->verdict, Verdict::fails);
  EXPECT_EQ(centered->ratio, q("1/2"));
}

TEST(Monotone, FatCantorTruncationReport) {
  // two steps of the middle-4^-k construction
  IntervalSet E = S({{"0", "3/8"}, {"5/8", "1"}});
  E = difference(E, S({{"11/64", "13/64"}, {"51/64", "53/64"}}));
  MonotoneReport r = check_monotone_conditions(E, MonotoneMode::Lip1, Interval(0, 1), q("1/128"));
  EXPECT_FALSE(r.points.empty());
  for (const auto& p : r.points) {
    EXPECT_GE(p.ratio, 0);
    EXPECT_LE(p.ratio, 1);
    if (!p.boundary) EXPECT_EQ(p.verdict, Verdict::holds) << to_string(p.x);
  }
}

TEST(Ternary, IntegralExamples) {
  TernaryDecomposition t{S({{"0", "1"}}), IntervalSet(), IntervalSet(), Interval(0, 1)};
  EXPECT_EQ(build_ternary_integral(t, 0), build_phi(S({{"0", "1"}}), 0, Interval(0, 1)));

  TernaryDecomposition peak{S({{"0", "1/2"}}), IntervalSet(), S({{"1/2", "1"}}), Interval(0, 1)};
  PiecewiseLinear f = build_ternary_integral(peak, 0);
  EXPECT_EQ(f(1), 0);
  EXPECT_EQ(f(q("1/2")), q("1/2"));
  EXPECT_EQ(sup_norm(f), q("1/2"));
}

TEST(Ternary, ValidationErrors) {
  TernaryDecomposition overlap{S({{"0", "1"}}), S({{"1/2", "1"}}), IntervalSet(), Interval(0, 1)};
  EXPECT_THROW(validate_ternary(overlap), std::invalid_argument);
  TernaryDecomposition hole{S({{"0", "1/3"}}), S({{"1/2", "1"}}), IntervalSet(), Interval(0, 1)};
  EXPECT_THROW(validate_ternary(hole), std::invalid_argument);
  EXPECT_THROW(build_ternary_integral(hole, 0), std::invalid_argument);
}

TEST(Ternary, RemarkSlopesAlternate) {
  const int N = 6;
  TernaryDecomposition t = alternating_ternary_example(N);
  validate_ternary(t);
  PiecewiseLinear f = build_ternary_integral(t, 0);
  for (int n = 1; n <= N; ++n) {
    Rational down = (Rational(1) / (2 * n + 1) + Rational(1) / (2 * n)) / 2;
    Rational up = (Rational(1) / (2 * n) + Rational(1) / (2 * n - 1)) / 2;
    EXPECT_EQ(f.slope_right(down), -1) << n;
    EXPECT_EQ(f.slope_right(up), 1) << n;
  }
  EXPECT_EQ(f.slope_right(q("-1/2")), 0);
  EXPECT_EQ(f.slope_right(q("3/2")), 1);
}

TEST(Ternary, RemarkBlockSumsAtZero) {
  const int N = 8;
  TernaryDecomposition t = alternating_ternary_example(N);
  PiecewiseLinear f = build_ternary_integral(t, 0);
  // independent block sums: f(1/(2k)) and f(1/(2k-1))
  for (int k = 1; k <= N; ++k) {
    Rational at_even = 0;
    for (int n = k; n <= N; ++n) at_even -= Rational(1) / (2 * n) - Rational(1) / (2 * n + 1);
    for (int n = k + 1; n <= N; ++n) at_even += Rational(1) / (2 * n - 1) - Rational(1) / (2 * n);
    EXPECT_EQ(f(Rational(1) / (2 * k)), at_even) << k;
    Rational at_odd = at_even + Rational(1) / (2 * k - 1) - Rational(1) / (2 * k);
    EXPECT_EQ(f(Rational(1) / (2 * k - 1)), at_odd) << k;
    // the ratio at 1/(2k) is one block length over the distance
    EXPECT_LT(abs(at_even) * 2 * k, Rational(1) / (2 * k)) << k;
  }
  TernaryReport rep = check_ternary(t, S({{"1/17", "2"}}), q("1/64"), {Rational(0)}, 14);
  const TernaryPoint* zero = nullptr;
  for (const auto& p : rep.points) {
    if (p.x == 0) zero = &p;
  }
  ASSERT_TRUE(zero);
  EXPECT_EQ(zero->condition, 2);
  EXPECT_EQ(zero->verdict, Verdict::holds);
  // oracle: sup over block endpoints within the scale
  for (const auto& sr : zero->scales) {
    Rational best = abs(f(sr.scale)) / sr.scale;
    for (int k = 1; k <= 2 * N + 1; ++k) {
      Rational v = Rational(1) / k;
      if (v <= sr.scale) best = max(best, abs(f(v)) / v);
    }
    EXPECT_EQ(sr.ratio, best) << to_string(sr.scale);
  }
  for (std::size_t i = 1; i < zero->scales.size(); ++i) EXPECT_LE(zero->scales[i].ratio, zero->scales[i - 1].ratio);
}

TEST(Ternary, TrivialBuildPathHolds) {
  IntervalSet E = S({{"0", "1"}});
  Interval w(-1, 2);
  TernaryDecomposition t{E, complement_within(E, w), IntervalSet(), w};
  TernaryReport rep = check_ternary(t, E, q("1/32"));
  EXPECT_EQ(rep.verdict, Verdict::holds);
}

TEST(Ternary, UnbalancedFailsWithWitness) {
  Interval w(-1, 2);
  TernaryDecomposition t{S({{"0", "1"}}), S({{"-1", "0"}, {"1", "2"}}), IntervalSet(), w};
  IntervalSet E = S({{"0", "1/2"}});
  TernaryReport rep = check_ternary(t, E, q("1/32"), {q("3/4")});
  EXPECT_EQ(rep.verdict, Verdict::fails);
  bool seen = false;
  for (const auto& p : rep.points) {
    if (p.x == q("3/4")) {
      seen = true;
      EXPECT_EQ(p.verdict, Verdict::fails);
      EXPECT_EQ(p.ratio, 1);
    }
  }
  EXPECT_TRUE(seen);
}

TEST(Ternary, Normalize) {
  Interval w(0, 2);
  IntervalSet E = S({{"0", "1"}});
  TernaryDecomposition fixed{E, S({{"1", "2"}}), IntervalSet(), w};
  TernaryDecomposition n = normalize_ternary(fixed, E);
  EXPECT_EQ(n.E1, fixed.E1);
  EXPECT_EQ(n.E0, fixed.E0);
  EXPECT_EQ(n.Em1, fixed.Em1);

  IntervalSet half = S({{"0", "1/2"}});
  TernaryDecomposition spill = normalize_ternary(fixed, half);
  EXPECT_EQ(spill.E1, half);
  EXPECT_EQ(spill.E0, S({{"1/2", "2"}}));

  TernaryDecomposition t = alternating_ternary_example(5);
  IntervalSet Er = S({{"1/11", "2"}});
  TernaryDecomposition r = normalize_ternary(t, Er);
  validate_ternary(r);
  EXPECT_EQ(unite(r.E1, r.Em1), Er);
  EXPECT_EQ(intersect(r.E1, r.Em1).measure(), 0);
  EXPECT_EQ(r.E0, complement_within(Er, t.window));
}

TEST(BalancePoint, Examples) {
  IntervalSet full = S({{"0", "1"}});
  EXPECT_EQ(balance_point(full, 0, 1, 0, q("1/8")), q("1/2"));
  Rational delta = q("1/8");
  for (Rational d : {q("1/4"), q("-1/3"), q("1/10")}) {
    EXPECT_EQ(balance_point(full, 0, 1, d, delta), q("1/2") + d / (2 * (1 - delta)));
  }
  EXPECT_EQ(balance_point(S({{"0", "1/2"}}), 0, 1, 0, q("1/8")), q("1/4"));
  EXPECT_EQ(balance_point(IntervalSet(), 0, 1, 0, 0), q("1/2"));
  EXPECT_THROW(balance_point(full, 0, 1, 1, q("1/8")), std::invalid_argument);
  EXPECT_THROW(balance_point(full, 1, 0, 0, 0), std::invalid_argument);
}

TEST(BalancePoint, LeftmostOnFlatTies) {
  // the mass split at 1/2 is reached on the gap [1,2]; leftmost is 1
  IntervalSet E = S({{"0", "1"}, {"2", "3"}});
  EXPECT_EQ(balance_point(E, 0, 3, 0, 0), 1);
}

TEST(BalancePoint, RandomSolvesTheEquationExactly) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    IntervalSet E = random_set(rng, 5, 2);
    Rational r = oracle::dyadic(static_cast<std::int64_t>(rng() % 32), 5);
    Rational s = r + oracle::dyadic(static_cast<std::int64_t>(rng() % 32) + 1, 5);
    Rational m = E.measure_in(r, s);
    if (m == 0) continue;
    Rational delta = Rational(static_cast<long>(rng() % 8)) / 16;
    Rational target = (1 - delta) * m * (Rational(static_cast<long>(rng() % 15)) - 7) / 8;
    Rational t = balance_point(E, r, s, target, delta);
    ASSERT_GT(t, r);
    ASSERT_LT(t, s);
    EXPECT_EQ((1 - delta) * (E.measure_in(r, t) - E.measure_in(t, s)), target);
    // leftmost: any earlier point undershoots
    Rational earlier = t - oracle::dyadic(1, 12);
    if (earlier > r) EXPECT_LT((1 - delta) * (E.measure_in(r, earlier) - E.measure_in(earlier, s)), target);
  }
}

TEST(SmallLip, SawtoothOnFullWindow) {
  const int N = 5;
  IntervalSet E = IntervalSet::of(0, N);
  SmallLip s = build_small_lip(E, 1, Interval(0, N));
  ASSERT_EQ(s.blocks.size(), static_cast<std::size_t>(N));
  for (int i = 0; i <= N; ++i) EXPECT_EQ(s.f(i), 0);
  for (int i = 1; i <= N; ++i) {
    EXPECT_EQ(s.blocks[i - 1].split, Rational(2 * i - 1) / 2);
    EXPECT_EQ(s.f(Rational(2 * i - 1) / 2), q("1/2"));
  }
  EXPECT_EQ(sup_norm(s.f), q("1/2"));
}

TEST(SmallLip, EmptyAndErrors) {
  SmallLip s = build_small_lip(IntervalSet(), q("1/4"), Interval(0, 1));
  EXPECT_EQ(sup_norm(s.f), 0);
  EXPECT_TRUE(s.blocks.empty());
  EXPECT_THROW(build_small_lip(IntervalSet(), 0, Interval(0, 1)), std::invalid_argument);
}

TEST(SmallLip, RandomBoundsAndBalance) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 150; ++trial) {
    IntervalSet E = random_set(rng, 4, 4);
    Rational eps = pow2(-static_cast<long>(rng() % 5)) * (rng() % 2 ? Rational(1) : Rational(Rational(3) / 4));
    Interval w(0, 4);
    SmallLip s = build_small_lip(E, eps, w);
    for (const auto& y : s.f.values()) {
      EXPECT_GE(y, 0);
      EXPECT_LE(y, eps / 2);
    }
    for (const auto& b : s.blocks) {
      EXPECT_EQ(b.left_mass, b.right_mass);
      EXPECT_EQ(s.f(b.lo), 0);
      EXPECT_EQ(s.f(b.hi), 0);
      EXPECT_EQ(s.f(b.split), b.left_mass);
    }
    IntervalSet e = clip(E, w);
    EXPECT_TRUE(audit_increment_bound(s.f, e, 1).ok);
    // slope ±1 on E interiors
    for (const auto& c : e.intervals()) {
      Rational mid = c.midpoint();
      if (c.degenerate()) continue;
      EXPECT_EQ(abs(s.f.slope_right(mid)), 1);
    }
  }
}

TEST(Lip1Sum, SinglePartIsSmallLip) {
  IntervalSet E = S({{"0", "1"}});
  Interval w(-1, 2);
  Lip1Sum s = build_lip1_sum({E}, w);
  ASSERT_EQ(s.parts.size(), 1u);
  EXPECT_EQ(s.parts[0].epsilon, 1);
  EXPECT_EQ(s.f(q("1/2")), q("1/2"));
  EXPECT_EQ(simplify(s.f), simplify(extend_to(build_small_lip(E, 1, w).f, s.f.domain())));
}

TEST(Lip1Sum, SecondEpsilon) {
  Lip1Sum s = build_lip1_sum({S({{"0", "1"}}), S({{"2", "3"}})}, Interval(-1, 4));
  ASSERT_EQ(s.parts.size(), 2u);
  EXPECT_EQ(s.parts[1].epsilon, q("1/4"));
  EXPECT_EQ(s.parts[1].bound, q("1/4"));
  EXPECT_TRUE(s.parts[0].constant_off_part);
  EXPECT_TRUE(s.parts[1].constant_off_part);
  EXPECT_LE(s.parts[1].sup, s.parts[1].bound);
  EXPECT_TRUE(audit_increment_bound(s.f, S({{"0", "1"}, {"2", "3"}}), 1).ok);
}

TEST(Lip1Sum, TouchingPartSkippedAndOverlapRejected) {
  Lip1Sum s = build_lip1_sum({S({{"0", "1"}}), S({{"1", "2"}}), S({{"3", "4"}})}, Interval(-1, 5));
  EXPECT_TRUE(s.parts[1].skipped);
  EXPECT_FALSE(s.parts[1].warning.empty());
  EXPECT_EQ(s.used.size(), 2u);
  EXPECT_EQ(s.parts[2].epsilon, pow2(-3));
  EXPECT_THROW(build_lip1_sum({S({{"0", "1"}}), S({{"1/2", "2"}})}, Interval(-1, 5)), std::invalid_argument);
}

TEST(Lip1Sum, OrderingAndShards) {
  Interval w(0, 10);
  auto ordered = order_parts_for_sum({S({{"3", "4"}}), S({{"8", "10"}})}, w);
  EXPECT_EQ(ordered.front(), S({{"8", "10"}}));
  EXPECT_THROW(order_parts_for_sum({S({{"0", "1"}}), S({{"8", "10"}})}, w), std::invalid_argument);

  IntervalSet big = S({{"0", "1"}, {"2", "3"}, {"4", "5"}, {"6", "7"}});
  auto shards = split_into_shards(big, 3);
  ASSERT_EQ(shards.size(), 2u);
  EXPECT_EQ(shards[0], S({{"0", "1"}, {"2", "3"}}));
  EXPECT_EQ(unite(shards), big);
  EXPECT_GT(*distance(shards[0], shards[1]), 0);
}

TEST(Lip1Sum, OffSetEstimateRandom) {
  std::mt19937_64 rng(23);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    IntervalSet E = random_set(rng, 4, 5);
    if (E.empty()) continue;
    std::vector<IntervalSet> parts = split_into_shards(E, oracle::dyadic(static_cast<std::int64_t>(rng() % 16) + 2, 4));
    std::shuffle(parts.begin(), parts.end(), rng);
    Interval w(-1, 6);
    Lip1Sum s = build_lip1_sum(parts, w);
    IntervalSet all;
    for (const auto& p : s.used) all = unite(all, p);
    EXPECT_TRUE(audit_increment_bound(s.f, all, 1).ok);
    for (std::size_t i = 0; i < s.parts.size(); ++i) {
      if (s.parts[i].skipped) continue;
      EXPECT_TRUE(s.parts[i].constant_off_part);
      EXPECT_LE(s.parts[i].sup, s.parts[i].bound);
    }
    for (int k = 0; k < 10; ++k) {
      Rational x = oracle::dyadic(static_cast<std::int64_t>(rng() % 160), 5);
      if (all.contains(x)) continue;
      Rational eps = pow2(-static_cast<long>(rng() % 6));
      OffSetCheck c = lip1_sum_off_check(s, x, eps);
      EXPECT_TRUE(c.ok) << to_string(x) << " eps " << to_string(eps) << " ratio " << to_string(c.ratio);
      EXPECT_LE(c.bound, 2 * eps);
      ++checked;
    }
  }
  EXPECT_GT(checked, 100);
}
