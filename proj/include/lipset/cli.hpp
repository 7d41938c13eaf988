#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lipset/json_io.hpp"

namespace lipset {

struct RGrid {
  Rational start;
  Rational factor;  ///< in (0,1)
  int count = 0;
};

struct RunConfig {
  std::string command;  ///< set, density, levelset, construct, estimate, counterexample, audit
  std::string action;   ///< set op, builder name, or gen/verify

  std::string set_path;
  std::string other_path;
  std::string function_path;
  std::string system_path;
  std::string witness_path;
  std::string ternary_path;
  std::string parts_path;
  std::string output_path;
  std::string diagnostics_path;
  std::string csv_path;

  std::optional<Interval> window;
  int depth = 3;
  int stages = 1;
  std::optional<Rational> epsilon;
  std::optional<Rational> delta;
  std::optional<Rational> gamma;
  std::optional<Rational> resolution;
  std::optional<Rational> point;
  std::optional<Rational> factor;
  std::optional<Rational> shard;
  std::optional<RGrid> r_grid;
  std::string mode;
  int example = 0;
  bool fat_cantor = false;
  int samples = 0;
  int pairs = 1000;
  int precision = 12;
  std::uint64_t seed = 0;
};

/// Exit codes.
inline constexpr int exit_ok = 0;
inline constexpr int exit_verification = 1;
inline constexpr int exit_parse = 2;
inline constexpr int exit_budget = 3;

/// "start,factor,count"; throws ParseError.
RGrid parse_r_grid(const std::string& text);
/// "a,b"; throws ParseError.
Interval parse_window(const std::string& text);

/// Runs one configured command. Reports go to `out` unless an output path is set.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv-style arguments (without the program name) and runs them.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lipset
