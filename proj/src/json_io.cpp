#include "lipset/json_io.hpp"

#include <fstream>
#include <sstream>

namespace lipset {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  return j.at(key);
}

const Json& array_field(const Json& j, const char* key) {
  const Json& a = field(j, key);
  if (!a.is_array()) throw ParseError(std::string("field '") + key + "' must be an array");
  return a;
}

std::vector<Rational> rationals_from(const Json& a) {
  if (!a.is_array()) throw ParseError("expected an array of rationals");
  std::vector<Rational> out;
  out.reserve(a.size());
  for (const auto& v : a) out.push_back(rational_from_json(v));
  return out;
}

Json rationals_to(const std::vector<Rational>& xs) {
  Json a = Json::array();
  for (const auto& x : xs) a.push_back(to_json(x));
  return a;
}

template <class F>
auto rethrow_as_parse(F&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

}  // namespace

Json to_json(const Rational& q) { return to_string(q); }

Rational rational_from_json(const Json& j) {
  if (j.is_string()) return parse_rational(j.get<std::string>());
  if (j.is_number_integer()) return parse_rational(j.dump());
  throw ParseError("rational must be a string or an integer, got " + j.dump());
}

Json to_json(const Interval& iv) { return Json::array({to_json(iv.lo), to_json(iv.hi)}); }

Interval interval_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) throw ParseError("interval must be a pair");
  Rational lo = rational_from_json(j[0]), hi = rational_from_json(j[1]);
  return rethrow_as_parse([&] { return Interval(lo, hi); });
}

Json to_json(const IntervalSet& s) {
  Json ivs = Json::array();
  for (const auto& iv : s.intervals()) ivs.push_back(to_json(iv));
  Json j;
  j["intervals"] = std::move(ivs);
  return j;
}

IntervalSet set_from_json(const Json& j) {
  std::vector<Interval> raw;
  for (const auto& iv : array_field(j, "intervals")) raw.push_back(interval_from_json(iv));
  return IntervalSet::canonicalize(std::move(raw), Degenerate::keep);
}

Json to_json(const PiecewiseLinear& f) {
  Json j;
  j["breakpoints"] = rationals_to(f.breakpoints());
  j["values"] = rationals_to(f.values());
  return j;
}

PiecewiseLinear function_from_json(const Json& j) {
  std::vector<Rational> xs = rationals_from(array_field(j, "breakpoints"));
  std::vector<Rational> ys = rationals_from(array_field(j, "values"));
  return rethrow_as_parse([&] { return PiecewiseLinear(std::move(xs), std::move(ys)); });
}

Json to_json(const NestedClosedSystem& s) {
  Json j;
  j["window"] = to_json(s.window);
  j["E"] = to_json(s.E);
  Json fs = Json::array();
  for (const auto& f : s.F) fs.push_back(to_json(f));
  j["F"] = std::move(fs);
  return j;
}

NestedClosedSystem system_from_json(const Json& j) {
  NestedClosedSystem s;
  s.window = interval_from_json(field(j, "window"));
  s.E = set_from_json(field(j, "E"));
  for (const auto& f : array_field(j, "F")) s.F.push_back(set_from_json(f));
  return s;
}

Json to_json(const UDTWitness& w) {
  Json j;
  j["gammas"] = rationals_to(w.gammas);
  j["deltas"] = rationals_to(w.deltas);
  return j;
}

UDTWitness witness_from_json(const Json& j) {
  UDTWitness w{rationals_from(array_field(j, "gammas")), rationals_from(array_field(j, "deltas"))};
  if (w.gammas.size() != w.deltas.size()) throw ParseError("gammas and deltas differ in length");
  return w;
}

Json to_json(const TernaryDecomposition& t) {
  Json j;
  j["window"] = to_json(t.window);
  j["E1"] = to_json(t.E1);
  j["E0"] = to_json(t.E0);
  j["Em1"] = to_json(t.Em1);
  return j;
}

TernaryDecomposition ternary_from_json(const Json& j) {
  TernaryDecomposition t;
  t.window = interval_from_json(field(j, "window"));
  t.E1 = set_from_json(field(j, "E1"));
  t.E0 = set_from_json(field(j, "E0"));
  t.Em1 = set_from_json(field(j, "Em1"));
  return t;
}

Json to_json(const StageDiagnostics& d) {
  Json j;
  j["stage"] = d.stage;
  j["gamma"] = to_json(d.gamma);
  j["delta"] = to_json(d.delta);
  j["multiplier"] = d.multiplier;
  j["flat_on_F"] = d.flat_on_F;
  j["increment_factor"] = to_json(d.factor);
  j["increment_ok"] = d.increment_ok;
  j["max_slope_on_E"] = to_json(d.max_slope_on_E);
  Json ws = Json::array();
  for (const auto& w : d.witnesses) {
    Json x;
    x["x"] = to_json(w.x);
    x["y"] = to_json(w.y);
    x["ratio"] = to_json(w.ratio);
    x["bound"] = to_json(w.bound);
    x["fallback"] = w.fallback;
    x["ok"] = w.ok;
    ws.push_back(std::move(x));
  }
  j["witnesses"] = std::move(ws);
  j["witnesses_ok"] = d.witnesses_ok;
  j["radius_sup"] = to_json(d.radius_sup);
  j["radius_ok"] = d.radius_ok;
  j["step"] = to_json(d.step);
  j["step_ok"] = d.step_ok;
  j["agrees_later"] = d.agrees_later;
  j["inside_later"] = d.inside_later;
  j["persists"] = d.persists;
  j["failures"] = d.failures;
  j["ok"] = d.ok();
  return j;
}

Json to_json(const SymbolPath& p) { return p.indices; }

Json to_json(const AdversarialTrace& t) {
  Json j;
  j["depth"] = t.depth;
  j["cap"] = to_json(t.cap);
  j["floor"] = to_json(t.floor);
  Json rounds = Json::array();
  for (const auto& r : t.rounds) {
    Json x;
    x["n"] = r.n;
    x["start"] = to_json(r.start);
    x["y"] = to_json(r.y);
    x["epsilon"] = to_json(r.epsilon);
    x["near_witness_found"] = r.near.found;
    x["near_sup"] = to_json(r.near.sup);
    x["near_threshold"] = to_json(r.near.threshold);
    if (r.x) {
      x["x"] = to_json(*r.x);
      x["near_ratio"] = to_json(r.near.ratio);
      x["a"] = r.a;
      x["x_in_U"] = r.x_in_u;
    }
    if (r.index > 0) {
      x["index"] = r.index;
      x["cap_ratio"] = to_json(r.cap_ratio);
    }
    if (r.v && r.w) {
      x["v"] = to_json(*r.v);
      x["w"] = to_json(*r.w);
      x["vw_ratio"] = to_json(r.vw_ratio);
      x["block"] = to_json(r.block);
      x["chain"] = rationals_to(r.chain);
      x["chain_ok"] = r.chain_ok;
    }
    rounds.push_back(std::move(x));
  }
  j["rounds"] = std::move(rounds);
  j["verdict"] = to_string(t.verdict);
  Json c;
  c["kind"] = to_string(t.certificate.kind);
  c["round"] = t.certificate.round;
  if (t.certificate.region) c["region"] = to_json(*t.certificate.region);
  if (t.certificate.kind != DefeatKind::none) {
    c["a"] = to_json(t.certificate.a);
    c["b"] = to_json(t.certificate.b);
    c["ratio"] = to_json(t.certificate.ratio);
    c["bound"] = to_json(t.certificate.bound);
  }
  c["note"] = t.certificate.note;
  j["certificate"] = std::move(c);
  return j;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return Json::parse(ss.str());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace lipset
