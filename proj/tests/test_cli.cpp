#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "aksz/cli.hpp"
#include "aksz/errors.hpp"

using namespace aksz;
using namespace aksz::cli;

namespace {

const char* kAbelian = R"({
  "schema_version": 1,
  "name": "abelian",
  "target": {"basis": [{"label": "a", "degree": 1}]},
  "base": {"model": "torus", "n": 1},
  "truncation_ladder": [{"K": 1, "Lmax": 3, "base": 1}, {"K": 2, "Lmax": 3, "base": 2}],
  "random_samples": 20
})";

const char* kAffine = R"({
  "schema_version": 1,
  "name": "affine",
  "target": {"basis": [{"label": "e1", "degree": 1}, {"label": "e2", "degree": 1}], "max_arity": 2,
             "lie_structure": [{"output": "e2", "left": "e1", "right": "e2", "value": "1"}]},
  "base": {"model": "torus", "n": 1},
  "truncation_ladder": [{"K": 1, "Lmax": 2, "base": 1}, {"K": 2, "Lmax": 2, "base": 2}]
})";

std::string with(const std::string& text, const std::string& from, const std::string& to) {
  std::string s = text;
  auto at = s.find(from);
  REQUIRE(at != std::string::npos);
  return s.replace(at, from.size(), to);
}

std::string rejection_path(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<accepted>";
}

const CheckReport& check(const RunReport& r, const std::string& name) {
  for (const auto& c : r.checks)
    if (c.name == name) return c;
  FAIL("no check " << name);
  return r.checks.front();
}

}  // namespace

TEST_CASE("config parsing") {
  auto c = parse_config(kAbelian);
  CHECK(c.name == "abelian");
  CHECK(c.target.basis.size() == 1);
  CHECK(c.target.brackets.empty());
  CHECK(c.ladder.size() == 2);
  CHECK(c.random_samples == 20);

  auto a = parse_config(kAffine);
  REQUIRE(a.target.lie_structure.size() == 1);
  CHECK(a.target.lie_structure[0].value == 1);
  CHECK(parse_config(to_json(a).dump()) == a);
  CHECK(parse_config(to_json(c).dump()) == c);
}

TEST_CASE("config rejections carry a path") {
  CHECK(rejection_path(with(kAffine, "\"value\": \"1\"", "\"value\": 0.5")) == "/target/lie_structure/0/value");
  CHECK(rejection_path(with(kAbelian, "\"Lmax\": 3, \"base\": 1", "\"Lmax\": 3.0, \"base\": 1")) == "/truncation_ladder/0/Lmax");
  CHECK(rejection_path(with(kAbelian, "\"name\"", "\"colour\": 1, \"name\"")) == "/colour");
  CHECK(rejection_path(with(kAbelian, "\"degree\": 1", "\"degree\": 1, \"weight\": 2")) == "/target/basis/0/weight");
  CHECK(rejection_path(with(kAffine, "\"value\": \"1\"", "\"value\": \"1/0\"")) == "/target/lie_structure/0/value");
  CHECK(rejection_path(with(kAbelian, "\"torus\"", "\"sphere\"")) == "/base/model");
  // l_1 must raise the degree by one: a degree-1 to degree-1 entry is rejected
  const std::string bad_degree = with(kAbelian, "\"basis\": [{\"label\": \"a\", \"degree\": 1}]",
                                      R"("basis": [{"label": "a", "degree": 1}, {"label": "b", "degree": 1}],
                                         "brackets": [{"arity": 1, "output": "a", "inputs": ["b"], "value": 1}])");
  CHECK(rejection_path(bad_degree) == "/target/brackets/0");
  CHECK(rejection_path("{") == "");
}

TEST_CASE("truncation ladder flag") {
  auto l = parse_ladder("1:3:1,2:3:2");
  REQUIRE(l.size() == 2);
  CHECK(l[1] == Rung{2, 3, 2});
  CHECK_THROWS_AS(parse_ladder("1:3"), ConfigError);
  CHECK_THROWS_AS(parse_ladder("1:0:1"), ConfigError);
  CHECK_THROWS_AS(parse_ladder(""), ConfigError);
}

TEST_CASE("end-to-end runs") {
  SUBCASE("abelian target on the circle") {
    auto r = run(parse_config(kAbelian), Command::RunAll);
    CHECK(r.exit_code() == 0);
    const auto& th = check(r, "theorem");
    CHECK(th.status == Status::Pass);
    REQUIRE(th.tables.size() == 1);
    CHECK(th.tables[0].rows.size() == 2);
    CHECK(check(r, "jets").data["samples"] == 20);
  }
  SUBCASE("single subcommand") {
    auto r = run(parse_config(kAffine), Command::VerifyProp);
    REQUIRE(r.checks.size() == 1);
    CHECK(r.checks[0].name == "prop");
    CHECK(r.checks[0].status == Status::Pass);
  }
  SUBCASE("a single rung leaves everything unstable") {
    RunOptions opt;
    opt.ladder = parse_ladder("2:3:2");
    auto r = run(parse_config(kAbelian), Command::VerifyTheorem, opt);
    CHECK(check(r, "theorem").status == Status::Inconclusive);
    CHECK(r.exit_code() == 2);
  }
  SUBCASE("broken Jacobi stops at nilpotency") {
    // [e1, e2] = e3, [e1, e3] = e1 violates Jacobi on (e1, e2, e3)
    const std::string text = R"({"schema_version": 1, "name": "broken",
      "target": {"basis": [{"label": "e1", "degree": 1}, {"label": "e2", "degree": 1}, {"label": "e3", "degree": 1}],
                 "max_arity": 2,
                 "lie_structure": [{"output": "e3", "left": "e1", "right": "e2", "value": 1},
                                   {"output": "e1", "left": "e1", "right": "e3", "value": 1}]},
      "base": {"model": "torus", "n": 1},
      "truncation_ladder": [{"K": 1, "Lmax": 2, "base": 1}]})";
    auto r = run(parse_config(text), Command::RunAll);
    const auto& t = check(r, "target");
    CHECK(t.status == Status::Fail);
    CHECK(!t.data["nilpotency_violations"].empty());
    CHECK(check(r, "theorem").status == Status::Skipped);
    CHECK(r.exit_code() == 1);
  }
  SUBCASE("empty target passes vacuously") {
    auto text = with(kAbelian, R"("basis": [{"label": "a", "degree": 1}])", R"("basis": [])");
    auto r = run(parse_config(text), Command::RunAll);
    CHECK(r.exit_code() == 0);
    for (const auto& c : r.checks)
      if (c.name == "theorem" || c.name == "prop")
        for (const auto& t : c.tables) CHECK(t.rows.empty());
  }
}

TEST_CASE("report emission") {
  auto r = run(parse_config(kAbelian), Command::VerifyTheorem);
  const std::string j1 = emit(r, Format::Json);
  SUBCASE("json round trip") { CHECK(report_from_json(nlohmann::json::parse(j1)) == r); }
  SUBCASE("byte-identical reruns") {
    auto again = run(parse_config(kAbelian), Command::VerifyTheorem);
    CHECK(emit(again, Format::Json) == j1);
  }
  SUBCASE("csv columns") {
    const std::string csv = emit(r, Format::Csv);
    CHECK(csv.rfind("check,table,degree,lhs_dim,rhs_dim,stable,match\n", 0) == 0);
    CHECK(csv.find("theorem,") != std::string::npos);
  }
  SUBCASE("human tables are labelled") {
    const std::string h = emit(r, Format::Human);
    CHECK(h.find("[pass] theorem") != std::string::npos);
    CHECK(h.find("exit 0") != std::string::npos);
  }
}
