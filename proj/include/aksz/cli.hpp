#pragma once

// Case configs, orchestration and report emission.
//
// Config literals are exact: integers or rational strings ("3", "-1/2").
// JSON floats and unknown keys are rejected with the path of the offending node.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "aksz/brst.hpp"

namespace aksz::cli {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kEngineVersion = "1.0.0";
/// Sign and degree conventions the engine resolves to; echoed in every report.
inline constexpr const char* kConventions =
    "ghost=deg(a)-|I|;s=(-1)^|I|*xi-coefficient;brackets=graded-symmetric;CE=reduced-Sym+";

struct BracketConfig {
  int arity = 1;
  std::string output;
  std::vector<std::string> inputs;
  Rational value;
  bool operator==(const BracketConfig&) const = default;
};

/// f^a_{bc} for a Lie algebra shifted to degree 1.
struct LieConfig {
  std::string output, left, right;
  Rational value;
  bool operator==(const LieConfig&) const = default;
};

struct TargetConfig {
  std::vector<TargetBasis> basis;
  int max_arity = 1;
  std::vector<BracketConfig> brackets;
  std::vector<LieConfig> lie_structure;
  bool operator==(const TargetConfig& o) const;
};

/// External base: dims per degree and dense differentials d^k.
struct ExternalConfig {
  std::map<int, int> dims;
  std::map<int, std::vector<std::vector<Rational>>> differentials;
  bool operator==(const ExternalConfig&) const = default;
};

struct BaseConfig {
  BaseKind model = BaseKind::TorusFourier;
  int n = 1;
  std::optional<ExternalConfig> external;
  bool operator==(const BaseConfig&) const = default;
};

struct RowLemmaConfig {
  std::vector<int> n{1, 2};
  std::vector<int> rank{1, 2};
  std::vector<int> weights{1, 2};
  std::vector<BaseKind> bases{BaseKind::TorusFourier, BaseKind::FlatPoly};
  std::vector<Rung> ladder{{2, 1, 1}, {3, 1, 2}};  // Lmax is replaced by l
  bool operator==(const RowLemmaConfig&) const = default;
};

struct ChecksConfig {
  bool target = true, base = true, jets = true, column = true, prop = true, theorem = true;
  std::optional<RowLemmaConfig> row_lemma;
  bool operator==(const ChecksConfig&) const = default;
};

struct OutputConfig {
  std::optional<std::string> json, csv;
  bool operator==(const OutputConfig&) const = default;
};

struct CaseConfig {
  int schema_version = kSchemaVersion;
  std::string name;
  TargetConfig target;
  BaseConfig base;
  std::optional<std::vector<std::vector<std::vector<Rational>>>> twist;  // A_i as dense matrices
  std::vector<Rung> ladder;
  ChecksConfig checks;
  OutputConfig output;
  int random_samples = 100;
  std::uint64_t seed = 1;
  bool operator==(const CaseConfig&) const = default;
};

/// Throws ConfigError (with a JSON path) on schema errors, floats, unknown keys
/// and malformed rationals; StructuralError from the target/base constructors
/// is rethrown as ConfigError at the relevant section.
CaseConfig parse_config(const std::string& text);
nlohmann::json to_json(const CaseConfig& c);

/// Builds the engine objects; throws ConfigError on inconsistent input.
LInfinityStructure build_target(const TargetConfig& t);
VerificationCase build_case(const CaseConfig& c);

/// "K:Lmax:base,K:Lmax:base,..."; throws ConfigError.
std::vector<Rung> parse_ladder(const std::string& text);

// ------------------------------------------------------------------ report

enum class Status { Pass, Fail, Inconclusive, Error, Skipped };
std::string to_string(Status s);
Status status_from_string(const std::string& s);

struct Table {
  std::string title;
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;
  bool operator==(const Table&) const = default;
};

struct CheckReport {
  std::string name;
  Status status = Status::Skipped;
  std::string message;
  nlohmann::json data = nlohmann::json::object();
  std::vector<Table> tables;
  double seconds = 0;  // human format only; never serialized
  bool operator==(const CheckReport& o) const {
    return name == o.name && status == o.status && message == o.message && data == o.data && tables == o.tables;
  }
};

struct RunReport {
  std::string engine_version = kEngineVersion;
  std::string conventions = kConventions;
  std::string case_name;
  std::vector<CheckReport> checks;
  bool operator==(const RunReport&) const = default;

  /// 0 all pass, 1 any failure, 2 only inconclusive beyond passes, 3 error.
  int exit_code() const;
};

enum class Command { CheckTarget, CheckBase, CheckJets, VerifyLemma, VerifyProp, VerifyTheorem, RunAll };
std::optional<Command> command_from_string(const std::string& s);

struct RunOptions {
  int jobs = 0;
  std::optional<std::vector<Rung>> ladder;  // overrides the config
};

/// Runs the checks requested by `cmd` (and enabled in the config) in
/// dependency order. Never throws for engine errors: they become Error
/// entries and later checks are skipped.
RunReport run(const CaseConfig& config, Command cmd, const RunOptions& opt = {});

enum class Format { Human, Json, Csv };
std::optional<Format> format_from_string(const std::string& s);

nlohmann::json to_json(const RunReport& r);
RunReport report_from_json(const nlohmann::json& j);
std::string emit(const RunReport& r, Format f);

}  // namespace aksz::cli
