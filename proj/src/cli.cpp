#include "lipset/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

namespace lipset {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot write " + path);
  f << text;
}

// report to --output when set, otherwise to out
void emit(const RunConfig& c, const Json& j, std::ostream& out) {
  if (c.output_path.empty()) {
    out << dump(j);
  } else {
    write_text(c.output_path, dump(j));
  }
}

IntervalSet load_set(const std::string& path) {
  if (path.empty()) throw ParseError("--set is required");
  return set_from_json(read_json_file(path));
}

PiecewiseLinear load_function(const std::string& path) {
  if (path.empty()) throw ParseError("--function is required");
  Json j = read_json_file(path);
  if (j.is_object() && j.contains("function")) return function_from_json(j.at("function"));
  return function_from_json(j);
}

const Rational& need(const std::optional<Rational>& v, const char* flag) {
  if (!v) throw ParseError(std::string(flag) + " is required");
  return *v;
}

Interval window_or_hull(const RunConfig& c, const IntervalSet& E) {
  if (c.window) return *c.window;
  if (E.empty()) throw ParseError("--window is required for an empty set");
  return E.hull();
}

std::string csv_num(const Rational& q, int precision) { return to_string(q) + "," + to_decimal(q, precision); }

void write_function_csv(const RunConfig& c, const PiecewiseLinear& f) {
  if (c.csv_path.empty()) return;
  std::string s = "x,f(x),x_decimal,f_decimal\n";
  for (std::size_t i = 0; i < f.size(); ++i) {
    s += to_string(f.breakpoints()[i]) + "," + to_string(f.values()[i]) + "," +
         to_decimal(f.breakpoints()[i], c.precision) + "," + to_decimal(f.values()[i], c.precision) + "\n";
  }
  write_text(c.csv_path, s);
}

Json audit_json(const AuditReport& a, const Rational& factor) {
  Json j;
  j["factor"] = to_json(factor);
  j["ok"] = a.ok;
  j["max_slope_on_E"] = to_json(a.max_slope_on_E);
  j["max_slope_off_E"] = to_json(a.max_slope_off_E);
  if (a.witness) j["witness"] = to_json(*a.witness);
  return j;
}

std::vector<std::pair<Rational, Rational>> random_pairs(const Interval& dom, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const long grid = 1L << 20;
  std::vector<std::pair<Rational, Rational>> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    Rational a = dom.lo + dom.length() * Rational(static_cast<long>(rng() % (grid + 1))) / grid;
    Rational b = dom.lo + dom.length() * Rational(static_cast<long>(rng() % (grid + 1))) / grid;
    out.emplace_back(min(a, b), max(a, b));
  }
  return out;
}

Json increment_json(const IncrementReport& r) {
  Json j;
  j["ok"] = r.ok;
  j["checked"] = r.checked;
  if (r.min_margin) j["min_margin"] = to_json(*r.min_margin);
  j["violations"] = r.violations.size();
  return j;
}

// ---- set ----

int run_set(const RunConfig& c, std::ostream& out) {
  IntervalSet A = load_set(c.set_path);
  auto other = [&] {
    if (c.other_path.empty()) throw ParseError("--other is required for " + c.action);
    return load_set(c.other_path);
  };
  auto window = [&] {
    if (!c.window) throw ParseError("--window is required for " + c.action);
    return *c.window;
  };
  Json j;
  if (c.action == "canonical") {
    j = to_json(A);
  } else if (c.action == "union") {
    j = to_json(unite(A, other()));
  } else if (c.action == "intersect") {
    j = to_json(intersect(A, other()));
  } else if (c.action == "difference") {
    j = to_json(difference(A, other()));
  } else if (c.action == "complement") {
    j = to_json(complement_within(A, window()));
  } else if (c.action == "clip") {
    j = to_json(clip(A, window()));
  } else if (c.action == "measure") {
    j["measure"] = to_json(c.window ? clip(A, *c.window).measure() : A.measure());
    j["components"] = A.size();
    if (!A.empty()) j["hull"] = to_json(A.hull());
  } else {
    throw ParseError("unknown set operation '" + c.action + "'");
  }
  emit(c, j, out);
  return exit_ok;
}

// ---- density / levelset / estimate ----

int run_density(const RunConfig& c, std::ostream& out) {
  IntervalSet E = load_set(c.set_path);
  Rational x = need(c.point, "--point");
  Rational eps = c.resolution.value_or(Rational(1) / 64);
  DensityReport d = check_weakly_dense_at(E, x, eps);
  Json j;
  j["point"] = to_json(d.point);
  j["resolution"] = to_json(eps);
  j["verdict"] = to_string(d.verdict);
  j["worst_r"] = to_json(d.worst_r);
  j["ratio"] = to_json(d.ratio);
  j["side"] = to_string(d.side);
  j["left"] = to_json(d.left);
  j["right"] = to_json(d.right);
  if (c.r_grid) {
    std::vector<Rational> grid = geometric_grid(c.r_grid->start, c.r_grid->factor, c.r_grid->count);
    Json rows = Json::array();
    std::string csv = "x,r,left_ratio,right_ratio\n";
    for (const auto& r : grid) {
      Rational l = left_ratio(E, x, r), rr = right_ratio(E, x, r);
      Json row;
      row["r"] = to_json(r);
      row["left_ratio"] = to_json(l);
      row["right_ratio"] = to_json(rr);
      rows.push_back(std::move(row));
      csv += to_string(x) + "," + to_string(r) + "," + to_string(l) + "," + to_string(rr) + "\n";
    }
    j["sweep"] = std::move(rows);
    if (!c.csv_path.empty()) write_text(c.csv_path, csv);
  }
  emit(c, j, out);
  return exit_ok;
}

int run_levelset(const RunConfig& c, std::ostream& out) {
  IntervalSet E = load_set(c.set_path);
  Rational gamma = need(c.gamma, "--gamma"), delta = need(c.delta, "--delta");
  Json j;
  j["gamma"] = to_json(gamma);
  j["delta"] = to_json(delta);
  if (c.point) {
    Membership m = level_set_membership(E, *c.point, gamma, delta);
    j["point"] = to_json(*c.point);
    j["member"] = m.member;
    j["worst_r"] = to_json(m.worst_r);
    j["ratio"] = to_json(m.ratio);
    j["left"] = to_json(m.left);
    j["right"] = to_json(m.right);
  } else {
    Interval W = window_or_hull(c, E);
    Rational res = c.resolution.value_or(pow2(-10));
    LevelSet ls = level_set(E, gamma, delta, W, res);
    j["window"] = to_json(W);
    j["resolution"] = to_json(res);
    j["inner"] = to_json(ls.inner);
    j["outer"] = to_json(ls.outer);
    j["margin"] = to_json(ls.margin);
    j["exact"] = ls.exact();
  }
  emit(c, j, out);
  return exit_ok;
}

int run_estimate(const RunConfig& c, std::ostream& out) {
  PiecewiseLinear f = load_function(c.function_path);
  Rational x = need(c.point, "--point");
  Json j;
  j["point"] = to_json(x);
  if (f.domain().interior_contains(x)) {
    LocalLip ll = local_lip_exact(f, x);
    j["Lip"] = to_json(ll.big);
    j["lip"] = to_json(ll.little);
  }
  if (c.r_grid) {
    std::vector<Rational> grid = geometric_grid(c.r_grid->start, c.r_grid->factor, c.r_grid->count);
    Sweep s = lip_sweep(f, x, grid);
    Json rows = Json::array();
    std::string csv = "r,ratio,r_decimal,ratio_decimal\n";
    for (const auto& [r, ratio] : s.ratios) {
      Json row;
      row["r"] = to_json(r);
      row["ratio"] = to_json(ratio);
      rows.push_back(std::move(row));
      csv += to_string(r) + "," + to_string(ratio) + "," + to_decimal(r, c.precision) + "," +
             to_decimal(ratio, c.precision) + "\n";
    }
    j["sweep"] = std::move(rows);
    j["lower"] = to_json(s.lower);
    j["upper"] = to_json(s.upper);
    if (!c.csv_path.empty()) write_text(c.csv_path, csv);
  }
  emit(c, j, out);
  return exit_ok;
}

int run_audit(const RunConfig& c, std::ostream& out) {
  PiecewiseLinear f = load_function(c.function_path);
  IntervalSet E = load_set(c.set_path);
  Rational factor = c.factor.value_or(Rational(1));
  AuditReport a = audit_increment_bound(f, E, factor);
  IncrementReport p = check_increment_bound(f, E, random_pairs(f.domain(), c.pairs, c.seed), factor);
  Json j;
  j["audit"] = audit_json(a, factor);
  j["pairs"] = increment_json(p);
  j["seed"] = c.seed;
  bool ok = a.ok && p.ok;
  j["ok"] = ok;
  emit(c, j, out);
  return ok ? exit_ok : exit_verification;
}

// ---- construct ----

struct Built {
  PiecewiseLinear f;
  Json diagnostics;
  bool ok = true;
};

Built construct_monotone(const RunConfig& c) {
  IntervalSet E = load_set(c.set_path);
  Interval W = window_or_hull(c, E);
  Built b{build_monotone_lip1(E, W), Json::object(), true};
  AuditReport a = audit_increment_bound(b.f, E, 1);
  b.diagnostics["audit"] = audit_json(a, 1);
  b.ok = a.ok;
  if (!c.mode.empty()) {
    MonotoneMode mode;
    if (c.mode == "Lip1") {
      mode = MonotoneMode::Lip1;
    } else if (c.mode == "lip1") {
      mode = MonotoneMode::lip1;
    } else {
      throw ParseError("--mode must be Lip1 or lip1");
    }
    Rational res = c.resolution.value_or(Rational(1) / 64);
    MonotoneReport r = check_monotone_conditions(E, mode, W, res);
    Json pts = Json::array();
    for (const auto& p : r.points) {
      if (p.verdict == Verdict::holds) continue;
      Json x;
      x["x"] = to_json(p.x);
      x["condition"] = p.condition;
      x["verdict"] = to_string(p.verdict);
      x["r"] = to_json(p.r);
      x["ratio"] = to_json(p.ratio);
      x["boundary"] = p.boundary;
      pts.push_back(std::move(x));
    }
    b.diagnostics["conditions"] = {{"mode", c.mode}, {"resolution", to_json(res)}, {"verdict", to_string(r.verdict)},
                                   {"checked", r.points.size()}, {"not_holding", std::move(pts)}};
    b.ok = b.ok && r.verdict != Verdict::fails;
  }
  return b;
}

Built construct_ternary(const RunConfig& c) {
  TernaryDecomposition t;
  if (!c.ternary_path.empty()) {
    t = ternary_from_json(read_json_file(c.ternary_path));
  } else if (c.example > 0) {
    t = alternating_ternary_example(c.example);
  } else {
    throw ParseError("--ternary or --example is required");
  }
  validate_ternary(t);
  IntervalSet E = unite(t.E1, t.Em1);
  Built b{build_ternary_integral(t, t.window.lo), Json::object(), true};
  AuditReport a = audit_increment_bound(b.f, E, 1);
  b.diagnostics["audit"] = audit_json(a, 1);
  b.ok = a.ok;
  if (c.resolution) {
    TernaryReport r = check_ternary(t, E, *c.resolution);
    Json pts = Json::array();
    for (const auto& p : r.points) {
      if (p.verdict == Verdict::holds) continue;
      pts.push_back({{"x", to_json(p.x)}, {"condition", p.condition}, {"verdict", to_string(p.verdict)},
                     {"ratio", to_json(p.ratio)}});
    }
    b.diagnostics["conditions"] = {{"resolution", to_json(*c.resolution)}, {"verdict", to_string(r.verdict)},
                                   {"checked", r.points.size()}, {"not_holding", std::move(pts)}};
    b.ok = b.ok && r.verdict != Verdict::fails;
  }
  return b;
}

Built construct_small_lip(const RunConfig& c) {
  IntervalSet E = load_set(c.set_path);
  Interval W = window_or_hull(c, E);
  Rational eps = need(c.epsilon, "--epsilon");
  SmallLip s = build_small_lip(E, eps, W);
  Built b{s.f, Json::object(), true};
  bool bounded = true;
  for (const auto& y : s.f.values()) bounded = bounded && y >= 0 && y <= eps;
  bool balanced = true;
  Json blocks = Json::array();
  for (const auto& blk : s.blocks) {
    balanced = balanced && blk.left_mass == blk.right_mass;
    blocks.push_back({{"lo", to_json(blk.lo)}, {"split", to_json(blk.split)}, {"hi", to_json(blk.hi)},
                      {"left_mass", to_json(blk.left_mass)}, {"right_mass", to_json(blk.right_mass)}});
  }
  AuditReport a = audit_increment_bound(s.f, E, 1);
  b.diagnostics["epsilon"] = to_json(eps);
  b.diagnostics["bounded"] = bounded;
  b.diagnostics["balanced"] = balanced;
  b.diagnostics["sup"] = to_json(sup_norm(s.f));
  b.diagnostics["blocks"] = std::move(blocks);
  b.diagnostics["audit"] = audit_json(a, 1);
  b.ok = bounded && balanced && a.ok;
  return b;
}

Built construct_lip_sum(const RunConfig& c) {
  std::vector<IntervalSet> parts;
  if (!c.parts_path.empty()) {
    Json j = read_json_file(c.parts_path);
    if (!j.is_object() || !j.contains("parts") || !j.at("parts").is_array()) throw ParseError("parts file needs a 'parts' array");
    for (const auto& p : j.at("parts")) parts.push_back(set_from_json(p));
  } else if (c.shard) {
    parts = split_into_shards(load_set(c.set_path), *c.shard);
  } else {
    throw ParseError("--parts or --set with --shard is required");
  }
  IntervalSet all = unite(std::span<const IntervalSet>(parts));
  Interval W = window_or_hull(c, all);
  parts = order_parts_for_sum(parts, W);
  Lip1Sum s = build_lip1_sum(parts, W);
  Built b{s.f, Json::object(), true};
  Json ps = Json::array();
  bool bounds = true;
  for (const auto& p : s.parts) {
    Json x{{"index", p.index}, {"skipped", p.skipped}};
    if (!p.skipped) {
      x["epsilon"] = to_json(p.epsilon);
      x["bound"] = to_json(p.bound);
      x["sup"] = to_json(p.sup);
      x["constant_off_part"] = p.constant_off_part;
      bounds = bounds && p.sup <= p.bound;
    }
    if (!p.warning.empty()) x["warning"] = p.warning;
    ps.push_back(std::move(x));
  }
  Rational tol = c.epsilon.value_or(Rational(1) / 16);
  IntervalSet used = unite(std::span<const IntervalSet>(s.used));
  IntervalSet off = complement_within(used, W);
  std::mt19937_64 rng(c.seed);
  int want = c.samples > 0 ? c.samples : 100;
  Json checks = Json::array();
  bool off_ok = true;
  if (!off.empty() && off.measure() > 0) {
    const long grid = 1L << 16;
    for (int k = 0; k < want; ++k) {
      const Interval& g = off.intervals()[rng() % off.size()];
      Rational x = g.lo + g.length() * Rational(static_cast<long>(rng() % (grid - 1)) + 1) / grid;
      if (used.contains(x)) continue;
      OffSetCheck oc = lip1_sum_off_check(s, x, tol);
      off_ok = off_ok && oc.ok;
      checks.push_back({{"x", to_json(oc.x)}, {"n1", oc.n1}, {"r", to_json(oc.r)}, {"ratio", to_json(oc.ratio)},
                        {"bound", to_json(oc.bound)}, {"ok", oc.ok}});
    }
  }
  AuditReport a = audit_increment_bound(s.f, all, 1);
  b.diagnostics["parts"] = std::move(ps);
  b.diagnostics["part_bounds_ok"] = bounds;
  b.diagnostics["off_set_tolerance"] = to_json(tol);
  b.diagnostics["off_set_checks"] = std::move(checks);
  b.diagnostics["off_set_ok"] = off_ok;
  b.diagnostics["audit"] = audit_json(a, 1);
  b.ok = bounds && off_ok && a.ok;
  return b;
}

Built construct_udt(const RunConfig& c) {
  NestedClosedSystem sys;
  if (c.fat_cantor) {
    sys = fat_cantor_system(c.stages, std::max(c.depth, c.stages));
  } else if (!c.system_path.empty()) {
    sys = system_from_json(read_json_file(c.system_path));
  } else {
    throw ParseError("--system or --fat-cantor is required");
  }
  UDTWitness w;
  if (!c.witness_path.empty()) {
    w = witness_from_json(read_json_file(c.witness_path));
  } else if (c.fat_cantor) {
    w = fat_cantor_witness(sys, c.stages);
  } else {
    std::vector<Rational> gammas, probes;
    for (int n = 1; n <= c.stages; ++n) gammas.push_back(1 - pow2(-(n + 1)));
    for (const auto& iv : sys.E.intervals()) {
      probes.push_back(iv.lo);
      probes.push_back(iv.midpoint());
      probes.push_back(iv.hi);
    }
    w = fit_udt_witness(sys.E, gammas, probes, Rational(1) / 8);
  }
  UDTOptions opt;
  if (c.samples > 0) opt.min_samples = c.samples;
  if (c.resolution) opt.resolution = *c.resolution;
  UDTBuild u = build_udt_lip1(sys, w, c.stages, opt);
  Built b{u.stages.back(), Json::object(), u.ok()};
  b.diagnostics["witness"] = to_json(w);
  Json stages = Json::array();
  for (const auto& d : u.diagnostics) stages.push_back(to_json(d));
  b.diagnostics["stages"] = std::move(stages);
  b.diagnostics["ok"] = u.ok();
  return b;
}

int run_construct(const RunConfig& c, std::ostream& out) {
  Built b;
  if (c.action == "monotone") {
    b = construct_monotone(c);
  } else if (c.action == "ternary") {
    b = construct_ternary(c);
  } else if (c.action == "small-lip") {
    b = construct_small_lip(c);
  } else if (c.action == "lip-sum") {
    b = construct_lip_sum(c);
  } else if (c.action == "udt") {
    b = construct_udt(c);
  } else {
    throw ParseError("unknown builder '" + c.action + "'");
  }
  b.diagnostics["ok"] = b.ok;
  write_function_csv(c, b.f);
  if (!c.output_path.empty()) {
    write_text(c.output_path, dump(to_json(b.f)));
    if (c.diagnostics_path.empty()) out << dump(b.diagnostics);
  } else if (c.diagnostics_path.empty()) {
    Json j;
    j["function"] = to_json(b.f);
    j["diagnostics"] = b.diagnostics;
    out << dump(j);
  } else {
    out << dump(to_json(b.f));
  }
  if (!c.diagnostics_path.empty()) write_text(c.diagnostics_path, dump(b.diagnostics));
  return b.ok ? exit_ok : exit_verification;
}

// ---- counterexample ----

int run_counterexample(const RunConfig& c, std::ostream& out) {
  if (c.action == "gen") {
    Sandwich s = approximate_E(c.depth);
    Json j;
    j["depth"] = c.depth;
    j["u_part"] = to_json(s.u_part);
    j["f_cover"] = to_json(s.f_cover);
    j["u_measure"] = to_json(s.u_part.measure());
    j["f_cover_measure"] = to_json(s.f_cover.measure());
    Json wd = Json::array();
    std::string csv = "kind,path,lo,hi,lo_decimal,hi_decimal\n";
    std::vector<std::optional<Rational>> per_level(c.depth);
    std::vector<bool> equal(c.depth, true);
    std::vector<long> counts(c.depth, 0);
    std::function<void(const SymbolPath&)> walk = [&](const SymbolPath& p) {
      Interval F = f_interval(p), U = u_interval(p);
      csv += "F," + to_string(p) + "," + csv_num(F.lo, c.precision) + "," + csv_num(F.hi, c.precision) + "\n";
      csv += "U," + to_string(p) + "," + csv_num(U.lo, c.precision) + "," + csv_num(U.hi, c.precision) + "\n";
      std::size_t lvl = p.level();
      if (lvl >= static_cast<std::size_t>(c.depth)) return;
      Rational r = wd_ratio(p);
      if (per_level[lvl] && *per_level[lvl] != r) equal[lvl] = false;
      per_level[lvl] = r;
      ++counts[lvl];
      long n = 1L << (2 * (lvl + 1));
      for (long i = 1; i <= n; ++i) walk(p.child(i));
    };
    walk(SymbolPath{});
    bool ok = true;
    for (int l = 0; l < c.depth; ++l) {
      Rational N = Rational(ipow(4, static_cast<unsigned long>(l + 1)));
      bool match = equal[l] && *per_level[l] == N / (N + 1);
      ok = ok && match;
      wd.push_back({{"level", l}, {"paths", counts[l]}, {"ratio", to_json(*per_level[l])}, {"all_equal", equal[l]},
                    {"closed_form", to_json(N / (N + 1))}, {"matches", match}});
    }
    j["wd_ratios"] = std::move(wd);
    j["ok"] = ok;
    if (!c.csv_path.empty()) write_text(c.csv_path, csv);
    emit(c, j, out);
    return ok ? exit_ok : exit_verification;
  }
  if (c.action == "verify") {
    PiecewiseLinear f = load_function(c.function_path);
    AdversarialOptions opt;
    if (c.epsilon) opt.epsilon = *c.epsilon;
    AdversarialTrace t = adversarial_verify(f, c.depth, opt);
    bool rechecked = recheck_trace(t, f);
    Json j = to_json(t);
    j["rechecked"] = rechecked;
    emit(c, j, out);
    return rechecked ? exit_ok : exit_verification;
  }
  throw ParseError("counterexample needs gen or verify");
}

}  // namespace

RGrid parse_r_grid(const std::string& text) {
  std::vector<std::string> parts = split(text, ',');
  if (parts.size() != 3) throw ParseError("r-grid must be start,factor,count");
  RGrid g{parse_rational(parts[0]), parse_rational(parts[1]), 0};
  try {
    g.count = std::stoi(parts[2]);
  } catch (const std::exception&) {
    throw ParseError("bad r-grid count '" + parts[2] + "'");
  }
  if (!(g.start > 0)) throw ParseError("r-grid start must be positive");
  if (!(g.factor > 0 && g.factor < 1)) throw ParseError("r-grid factor must lie in (0,1)");
  if (g.count < 1) throw ParseError("r-grid count must be positive");
  return g;
}

Interval parse_window(const std::string& text) {
  std::vector<std::string> parts = split(text, ',');
  if (parts.size() != 2) throw ParseError("window must be a,b");
  Rational a = parse_rational(parts[0]), b = parse_rational(parts[1]);
  if (a > b) throw ParseError("window ends out of order");
  return Interval(a, b);
}

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    if (c.command == "set") return run_set(c, out);
    if (c.command == "density") return run_density(c, out);
    if (c.command == "levelset") return run_levelset(c, out);
    if (c.command == "construct") return run_construct(c, out);
    if (c.command == "estimate") return run_estimate(c, out);
    if (c.command == "counterexample") return run_counterexample(c, out);
    if (c.command == "audit") return run_audit(c, out);
    err << "error: unknown command '" << c.command << "'\n";
    return exit_parse;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return exit_parse;
  } catch (const BudgetExceeded& e) {
    err << "budget exceeded: " << e.what() << "\n";
    return exit_budget;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return exit_parse;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return exit_verification;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact toolkit for Lip/lip level sets of real sets"};
  app.require_subcommand(1);
  RunConfig c;
  std::string window, epsilon, delta, gamma, resolution, point, factor, shard, r_grid;

  auto common = [&](CLI::App* s) {
    s->add_option("--output,-o", c.output_path, "report or function JSON path");
    s->add_option("--csv", c.csv_path, "optional CSV path");
    s->add_option("--precision", c.precision, "decimal digits in CSV");
    s->add_option("--window", window, "a,b");
    s->add_option("--seed", c.seed);
  };

  CLI::App* set = app.add_subcommand("set", "algebra on JSON sets");
  set->add_option("op", c.action, "canonical|union|intersect|difference|complement|clip|measure")->required();
  set->add_option("--set", c.set_path)->required();
  set->add_option("--other", c.other_path);
  common(set);

  CLI::App* density = app.add_subcommand("density", "density report and sweep at a point");
  density->add_option("--set", c.set_path)->required();
  density->add_option("--point", point)->required();
  density->add_option("--resolution", resolution);
  density->add_option("--r-grid", r_grid, "start,factor,count");
  common(density);

  CLI::App* levelset = app.add_subcommand("levelset", "E^{gamma,delta} membership or reconstruction");
  levelset->add_option("--set", c.set_path)->required();
  levelset->add_option("--gamma", gamma)->required();
  levelset->add_option("--delta", delta)->required();
  levelset->add_option("--point", point);
  levelset->add_option("--resolution", resolution);
  common(levelset);

  CLI::App* construct = app.add_subcommand("construct", "build a function with diagnostics");
  construct->add_option("builder", c.action, "monotone|ternary|small-lip|lip-sum|udt")->required();
  construct->add_option("--set", c.set_path);
  construct->add_option("--ternary", c.ternary_path);
  construct->add_option("--example", c.example, "truncated ternary example with N blocks");
  construct->add_option("--parts", c.parts_path, "JSON {\"parts\": [set, ...]}");
  construct->add_option("--shard", shard, "split --set into shards of this width");
  construct->add_option("--system", c.system_path);
  construct->add_option("--witness", c.witness_path);
  construct->add_flag("--fat-cantor", c.fat_cantor);
  construct->add_option("--stages", c.stages);
  construct->add_option("--depth", c.depth);
  construct->add_option("--epsilon", epsilon);
  construct->add_option("--delta", delta);
  construct->add_option("--resolution", resolution);
  construct->add_option("--mode", c.mode, "Lip1|lip1 density conditions");
  construct->add_option("--samples", c.samples);
  construct->add_option("--diagnostics", c.diagnostics_path);
  common(construct);

  CLI::App* estimate = app.add_subcommand("estimate", "m-ratio sweep and exact local Lip/lip");
  estimate->add_option("--function", c.function_path)->required();
  estimate->add_option("--point", point)->required();
  estimate->add_option("--r-grid", r_grid, "start,factor,count");
  common(estimate);

  CLI::App* cx = app.add_subcommand("counterexample", "weakly dense set that is not Lip 1");
  cx->add_option("action", c.action, "gen|verify")->required();
  cx->add_option("--depth", c.depth);
  cx->add_option("--function", c.function_path);
  cx->add_option("--epsilon", epsilon);
  common(cx);

  CLI::App* audit = app.add_subcommand("audit", "increment bound of a function against a set");
  audit->add_option("--function", c.function_path)->required();
  audit->add_option("--set", c.set_path)->required();
  audit->add_option("--factor", factor);
  audit->add_option("--pairs", c.pairs);
  common(audit);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_parse;
  }
  for (CLI::App* s : app.get_subcommands()) c.command = s->get_name();

  try {
    auto opt = [](const std::string& s) -> std::optional<Rational> {
      if (s.empty()) return std::nullopt;
      return parse_rational(s);
    };
    if (!window.empty()) c.window = parse_window(window);
    if (!r_grid.empty()) c.r_grid = parse_r_grid(r_grid);
    c.epsilon = opt(epsilon);
    c.delta = opt(delta);
    c.gamma = opt(gamma);
    c.resolution = opt(resolution);
    c.point = opt(point);
    c.factor = opt(factor);
    c.shard = opt(shard);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return exit_parse;
  }
  return run(c, out, err);
}

}  // namespace lipset
