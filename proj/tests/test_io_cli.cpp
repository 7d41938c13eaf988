#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "lipset/cli.hpp"
#include "oracles.hpp"

using namespace lipset;
namespace fs = std::filesystem;

namespace {

Rational q(const char* s) { return parse_rational(s); }

class Scratch : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("lipset_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string put(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }

  std::string slurp(const std::string& name) const {
    std::ifstream in(path(name));
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  struct Result {
    int code;
    std::string out, err;
    Json json() const { return Json::parse(out); }
  };

  Result cli(std::vector<std::string> args) const {
    std::ostringstream out, err;
    int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
  }

  fs::path dir_;
};

}  // namespace

TEST(JsonRoundTrip, RandomSets) {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 300; ++t) {
    IntervalSet s = IntervalSet::canonicalize(oracle::random_raw(rng, 8, 7, 3), Degenerate::keep);
    Json j = Json::parse(dump(to_json(s)));
    EXPECT_EQ(set_from_json(j), s);
  }
}

TEST(JsonRoundTrip, RandomFunctions) {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> num(-50, 50), den(1, 13), step(1, 9), len(1, 12);
  for (int t = 0; t < 300; ++t) {
    std::vector<Rational> xs{Rational(num(rng)) / den(rng)}, ys;
    int n = len(rng);
    for (int i = 0; i < n; ++i) xs.push_back(xs.back() + Rational(step(rng)) / den(rng));
    for (int i = 0; i <= n; ++i) ys.push_back(Rational(num(rng)) / den(rng));
    PiecewiseLinear f(xs, ys);
    PiecewiseLinear g = function_from_json(Json::parse(dump(to_json(f))));
    EXPECT_EQ(g.breakpoints(), f.breakpoints());
    EXPECT_EQ(g.values(), f.values());
  }
}

TEST(JsonRoundTrip, SystemsWitnessesTernary) {
  NestedClosedSystem sys = fat_cantor_system(2, 2);
  NestedClosedSystem back = system_from_json(Json::parse(dump(to_json(sys))));
  EXPECT_EQ(back.window, sys.window);
  EXPECT_EQ(back.E, sys.E);
  EXPECT_EQ(back.F, sys.F);

  UDTWitness w{{q("3/4"), q("7/8")}, {q("1/8"), q("1/16")}};
  UDTWitness wb = witness_from_json(Json::parse(dump(to_json(w))));
  EXPECT_EQ(wb.gammas, w.gammas);
  EXPECT_EQ(wb.deltas, w.deltas);

  TernaryDecomposition t = alternating_ternary_example(3);
  TernaryDecomposition tb = ternary_from_json(Json::parse(dump(to_json(t))));
  EXPECT_EQ(tb.window, t.window);
  EXPECT_EQ(tb.E1, t.E1);
  EXPECT_EQ(tb.E0, t.E0);
  EXPECT_EQ(tb.Em1, t.Em1);
}

TEST(JsonRead, AcceptsIntegersAndDecimals) {
  IntervalSet s = set_from_json(Json::parse(R"({"intervals": [[0, "0.5"], ["3/4", 1]]})"));
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.measure(), q("3/4"));
}

TEST(JsonRead, RejectsMalformed) {
  EXPECT_THROW(set_from_json(Json::parse(R"({"intervals": [[1, 0]]})")), ParseError);
  EXPECT_THROW(set_from_json(Json::parse(R"({"intervals": [[0]]})")), ParseError);
  EXPECT_THROW(set_from_json(Json::parse(R"({"ivs": []})")), ParseError);
  EXPECT_THROW(set_from_json(Json::parse(R"({"intervals": [[0.5, 1]]})")), ParseError);
  EXPECT_THROW(set_from_json(Json::parse(R"({"intervals": [["x", "1"]]})")), ParseError);
  EXPECT_THROW(function_from_json(Json::parse(R"({"breakpoints": ["0", "1"], "values": ["0"]})")), ParseError);
  EXPECT_THROW(function_from_json(Json::parse(R"({"breakpoints": ["1", "0"], "values": ["0", "0"]})")), ParseError);
  EXPECT_THROW(witness_from_json(Json::parse(R"({"gammas": ["1/2"], "deltas": []})")), ParseError);
}

TEST(CliArgs, GridAndWindow) {
  RGrid g = parse_r_grid("1/8,1/2,5");
  EXPECT_EQ(g.start, q("1/8"));
  EXPECT_EQ(g.factor, q("1/2"));
  EXPECT_EQ(g.count, 5);
  EXPECT_THROW(parse_r_grid("1/8,2,5"), ParseError);
  EXPECT_THROW(parse_r_grid("0,1/2,5"), ParseError);
  EXPECT_THROW(parse_r_grid("1/8,1/2"), ParseError);
  EXPECT_THROW(parse_r_grid("1/8,1/2,x"), ParseError);
  EXPECT_EQ(parse_window("-1,2"), Interval(-1, 2));
  EXPECT_THROW(parse_window("2,1"), ParseError);
}

TEST_F(Scratch, SetAlgebra) {
  std::string a = put("a.json", R"({"intervals": [["0","1"], ["1","2"], ["3","4"]]})");
  std::string b = put("b.json", R"({"intervals": [["1/2","7/2"]]})");
  auto r = cli({"set", "canonical", "--set", a});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(set_from_json(r.json()).size(), 2u);
  r = cli({"set", "intersect", "--set", a, "--other", b});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(set_from_json(r.json()).measure(), q("2"));
  r = cli({"set", "complement", "--set", a, "--window", "-1,5"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(set_from_json(r.json()).measure(), q("3"));
  r = cli({"set", "measure", "--set", a});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.json()["measure"], "3");
  EXPECT_EQ(cli({"set", "union", "--set", a}).code, exit_parse);
  EXPECT_EQ(cli({"set", "rotate", "--set", a}).code, exit_parse);
}

TEST_F(Scratch, MonotoneThenEstimateGivesRatioOne) {
  std::string e = put("e.json", R"({"intervals": [["0","1/2"], ["3/4","1"]]})");
  auto r = cli({"construct", "monotone", "--set", e, "--output", path("f.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.json()["ok"].get<bool>());
  for (const char* x : {"1/4", "7/8", "1/3"}) {
    r = cli({"estimate", "--function", path("f.json"), "--point", x, "--r-grid", "1/16,1/2,6"});
    ASSERT_EQ(r.code, 0) << r.err;
    Json j = r.json();
    EXPECT_EQ(j["Lip"], "1");
    EXPECT_EQ(j["lip"], "1");
    ASSERT_EQ(j["sweep"].size(), 6u);
    for (const auto& row : j["sweep"]) EXPECT_EQ(row["ratio"], "1");
  }
  r = cli({"estimate", "--function", path("f.json"), "--point", "5/8"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.json()["Lip"], "0");
}

TEST_F(Scratch, ConstructWritesCsvAndDiagnostics) {
  std::string e = put("e.json", R"({"intervals": [["0","1/2"]]})");
  auto r = cli({"construct", "monotone", "--set", e, "--window", "0,1", "--output", path("f.json"), "--diagnostics",
                path("d.json"), "--csv", path("f.csv"), "--mode", "Lip1", "--resolution", "1/8"});
  // the boundary point 1/2 has full density of E from the left
  ASSERT_EQ(r.code, exit_verification) << r.err;
  EXPECT_TRUE(r.out.empty());
  Json d = Json::parse(slurp("d.json"));
  EXPECT_TRUE(d["audit"]["ok"].get<bool>());
  EXPECT_EQ(d["conditions"]["mode"], "Lip1");
  EXPECT_EQ(d["conditions"]["verdict"], "fails");
  bool half = false;
  for (const auto& p : d["conditions"]["not_holding"]) half = half || (p["x"] == "1/2" && p["boundary"].get<bool>());
  EXPECT_TRUE(half);
  PiecewiseLinear f = function_from_json(Json::parse(slurp("f.json")));
  EXPECT_EQ(f(1), q("1/2"));
  std::string csv = slurp("f.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "x,f(x),x_decimal,f_decimal");
  EXPECT_NE(csv.find("1,1/2,1.000000000000,0.500000000000"), std::string::npos);
  EXPECT_EQ(cli({"construct", "monotone", "--set", e, "--mode", "huge"}).code, exit_parse);
}

TEST_F(Scratch, CounterexampleGenDepthTwo) {
  auto r = cli({"counterexample", "gen", "--depth", "2", "--csv", path("c.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  Json j = r.json();
  ASSERT_EQ(j["wd_ratios"].size(), 2u);
  EXPECT_EQ(j["wd_ratios"][0]["ratio"], "4/5");
  EXPECT_EQ(j["wd_ratios"][1]["ratio"], "16/17");
  EXPECT_EQ(j["wd_ratios"][1]["paths"], 4);
  EXPECT_TRUE(j["wd_ratios"][1]["all_equal"].get<bool>());
  EXPECT_EQ(j["f_cover_measure"], "1/16");
  EXPECT_EQ(j["u_measure"], "21/32");
  std::string csv = slurp("c.csv");
  EXPECT_NE(csv.find("F,(1),0,0.000000000000,1,1.000000000000"), std::string::npos);
}

TEST_F(Scratch, CounterexampleVerifyRechecks) {
  std::string z = put("z.json", R"({"breakpoints": ["0","1"], "values": ["0","0"]})");
  auto r = cli({"counterexample", "verify", "--function", z, "--depth", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  Json j = r.json();
  EXPECT_TRUE(j["rechecked"].get<bool>());
  EXPECT_EQ(j["verdict"], "forced-failure");
  EXPECT_EQ(j["certificate"]["kind"], "no-near-witness");
}

TEST_F(Scratch, UdtFatCantorFactors) {
  auto r = cli({"construct", "udt", "--fat-cantor", "--stages", "2", "--depth", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  Json j = r.json();
  ASSERT_EQ(j["diagnostics"]["stages"].size(), 2u);
  EXPECT_EQ(j["diagnostics"]["stages"][0]["increment_factor"], "7/8");
  EXPECT_EQ(j["diagnostics"]["stages"][1]["increment_factor"], "63/64");
  EXPECT_TRUE(j["diagnostics"]["ok"].get<bool>());
  PiecewiseLinear f = function_from_json(j["function"]);
  IntervalSet E = fat_cantor_system(2, 2).E;
  EXPECT_TRUE(audit_increment_bound(f, E, q("63/64")).ok);
}

TEST_F(Scratch, AuditExitCodes) {
  std::string f = put("f.json", R"({"breakpoints": ["0","1","2"], "values": ["0","1","1"]})");
  std::string e = put("e.json", R"({"intervals": [["0","1"]]})");
  std::string small = put("s.json", R"({"intervals": [["0","1/2"]]})");
  auto r = cli({"audit", "--function", f, "--set", e, "--pairs", "200", "--seed", "3"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.json()["ok"].get<bool>());
  r = cli({"audit", "--function", f, "--set", small, "--pairs", "200"});
  EXPECT_EQ(r.code, exit_verification);
  EXPECT_FALSE(r.json()["audit"]["ok"].get<bool>());
}

TEST_F(Scratch, DensityAndLevelset) {
  std::string e = put("e.json", R"({"intervals": [["0","1"]]})");
  auto r = cli({"density", "--set", e, "--point", "1", "--r-grid", "1/2,1/2,3", "--csv", path("d.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  Json j = r.json();
  EXPECT_EQ(j["sweep"][0]["left_ratio"], "1");
  EXPECT_EQ(j["sweep"][0]["right_ratio"], "0");
  EXPECT_EQ(slurp("d.csv").substr(0, 24), "x,r,left_ratio,right_rat");

  r = cli({"levelset", "--set", e, "--gamma", "1/2", "--delta", "1/4", "--point", "1/2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.json()["member"].get<bool>());
  r = cli({"levelset", "--set", e, "--gamma", "1/2", "--delta", "1/4", "--window", "-1,2", "--resolution", "1/64"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.json().contains("inner"));
}

TEST_F(Scratch, DeterministicOutput) {
  std::string e = put("e.json", R"({"intervals": [["0","1/3"], ["1/2","5/7"], ["4/5","1"]]})");
  std::vector<std::string> args{"construct", "small-lip", "--set", e, "--epsilon", "1/10", "--window", "0,1"};
  auto a = cli(args), b = cli(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  std::vector<std::string> au{"audit", "--function", put("f.json", a.json()["function"].dump()), "--set", e,
                              "--pairs", "300", "--seed", "99"};
  EXPECT_EQ(cli(au).out, cli(au).out);
}

TEST_F(Scratch, ParseAndBudgetExitCodes) {
  std::string bad = put("bad.json", "{ not json");
  std::string neg = put("neg.json", R"({"intervals": [["1","0"]]})");
  EXPECT_EQ(cli({"set", "canonical", "--set", bad}).code, exit_parse);
  EXPECT_EQ(cli({"set", "canonical", "--set", neg}).code, exit_parse);
  EXPECT_EQ(cli({"set", "canonical", "--set", path("missing.json")}).code, exit_parse);
  EXPECT_EQ(cli({"density", "--set", neg, "--point", "x"}).code, exit_parse);
  EXPECT_EQ(cli({"estimate", "--point", "0"}).code, exit_parse);
  EXPECT_EQ(cli({"nonsense"}).code, exit_parse);
  EXPECT_EQ(cli({"counterexample", "gen", "--depth", "6"}).code, exit_budget);
  EXPECT_EQ(cli({"--help"}).code, exit_ok);
}
