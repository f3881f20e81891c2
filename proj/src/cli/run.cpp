#include <chrono>
#include <functional>
#include <sstream>

#include "aksz/cli.hpp"
#include "aksz/errors.hpp"

namespace aksz::cli {

using nlohmann::json;

std::string to_string(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Inconclusive: return "inconclusive";
    case Status::Error: return "error";
    case Status::Skipped: return "skipped";
  }
  return "error";
}

Status status_from_string(const std::string& s) {
  for (Status t : {Status::Pass, Status::Fail, Status::Inconclusive, Status::Error, Status::Skipped})
    if (to_string(t) == s) return t;
  throw ConfigError("status", "unknown status \"" + s + "\"");
}

int RunReport::exit_code() const {
  bool fail = false, open = false;
  for (const auto& c : checks) {
    if (c.status == Status::Error) return 3;
    fail = fail || c.status == Status::Fail;
    open = open || c.status == Status::Inconclusive;
  }
  return fail ? 1 : open ? 2 : 0;
}

std::optional<Command> command_from_string(const std::string& s) {
  if (s == "check-target") return Command::CheckTarget;
  if (s == "check-base") return Command::CheckBase;
  if (s == "check-jets") return Command::CheckJets;
  if (s == "verify-lemma") return Command::VerifyLemma;
  if (s == "verify-prop") return Command::VerifyProp;
  if (s == "verify-theorem") return Command::VerifyTheorem;
  if (s == "run-all") return Command::RunAll;
  return std::nullopt;
}

namespace {

Status from_verdict(Verdict v) {
  switch (v) {
    case Verdict::Pass: return Status::Pass;
    case Verdict::Fail: return Status::Fail;
    case Verdict::Inconclusive: return Status::Inconclusive;
  }
  return Status::Inconclusive;
}

json dims_json(const gla::GradedDims& d) {
  json j = json::object();
  for (auto [k, v] : d) j[std::to_string(k)] = v;
  return j;
}

std::string base_label(BaseKind k) {
  return k == BaseKind::FlatPoly ? "flat" : k == BaseKind::TorusFourier ? "torus" : "external";
}

std::string rung_label(const Rung& r) {
  return "K=" + std::to_string(r.K) + " Lmax=" + std::to_string(r.Lmax) + " base=" + std::to_string(r.base);
}

// One table row per degree of the last rung, stable when the last two rungs
// agree and the degree is not edge-affected.
Table ladder_table(const std::string& title, const std::vector<gla::CohomologyReport>& per) {
  Table t{title, {"degree", "dim", "stable"}, {}};
  if (per.empty()) return t;
  const auto& last = per.back();
  for (const auto& [k, e] : last.degrees) {
    if (e.dim == 0) continue;
    bool stable = e.stability == gla::Stability::Stable;
    if (per.size() >= 2) stable = stable && per[per.size() - 2].dim(k) == e.dim;
    t.rows.push_back({k, e.dim, stable});
  }
  return t;
}

Table comparison_table(const std::string& title, const Comparison& c) {
  Table t{title, {"degree", "lhs_dim", "rhs_dim", "stable", "match"}, {}};
  for (const auto& r : c.rows) t.rows.push_back({r.degree, r.lhs, r.rhs, r.lhs_stable && r.rhs_stable, r.match});
  return t;
}

BaseModel external_model(const ExternalConfig& e) {
  gla::GradedSpace space;
  for (auto [k, d] : e.dims) space.set_dim(k, d);
  std::map<int, gla::SparseMatrix> ds;
  for (const auto& [k, m] : e.differentials) {
    const int rows = space.dim(k + 1), cols = space.dim(k);
    if (static_cast<int>(m.size()) != rows || (rows > 0 && static_cast<int>(m[0].size()) != cols))
      throw ConfigError("/base/external/differentials/" + std::to_string(k),
                        "expected a " + std::to_string(rows) + " x " + std::to_string(cols) + " matrix");
    gla::SparseMatrix M(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j)
        if (!is_zero(m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]))
          M.add(i, j, m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    ds.emplace(k, std::move(M));
  }
  return BaseModel::from_complex(gla::TruncatedComplex(space, ds));
}

struct Runner {
  const CaseConfig& config;
  RunOptions opt;
  VerificationCase vc;
  RunReport report;
  std::optional<std::string> blocker;  // set once a prerequisite failed
  std::optional<std::vector<BicomplexDims>> bicomplex;

  bool coordinates() const { return vc.base_kind != BaseKind::External; }

  void step(const std::string& name, const std::function<void(CheckReport&)>& body) {
    CheckReport c;
    c.name = name;
    if (blocker) {
      c.status = Status::Skipped;
      c.message = *blocker;
      report.checks.push_back(std::move(c));
      return;
    }
    const auto t0 = std::chrono::steady_clock::now();
    try {
      body(c);
    } catch (const std::exception& e) {
      c.status = Status::Error;
      c.message = e.what();
      c.tables.clear();
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.checks.push_back(std::move(c));
  }

  // Q^2 = 0 gates everything that builds s.
  std::optional<std::string> nilpotency(CheckReport* c) {
    const int A = std::max(1, vc.target.max_arity());
    auto violations = check_nilpotency(vc.target, 2 * A - 1);
    if (c) {
      json vs = json::array();
      for (const auto& v : violations)
        vs.push_back({{"arity", v.arity}, {"output", v.output}, {"monomial", v.monomial}, {"coefficient", aksz::to_string(v.coefficient)}});
      c->data["nilpotency_violations"] = vs;
    }
    if (violations.empty()) return std::nullopt;
    const auto& v = violations.front();
    return "Q^2 != 0: coefficient " + aksz::to_string(v.coefficient) + " of " + v.monomial + " in Q^2 " + v.output +
           " (polynomial degree " + std::to_string(v.arity) + ")";
  }

  void target() {
    step("target", [&](CheckReport& c) {
      if (auto bad = nilpotency(&c)) {
        c.status = Status::Fail;
        c.message = *bad;
        blocker = "skipped: " + *bad;
        return;
      }
      std::vector<gla::CohomologyReport> per;
      for (const auto& r : vc.ladder) per.push_back(target_cohomology(vc.target, {r.Lmax}).total);
      c.tables.push_back(ladder_table("H_Q(L), weight <= " + std::to_string(vc.ladder.back().Lmax), per));
      c.data["dims"] = dims_json(gla::trim(per.back().dims()));
      c.data["weight_graded"] = vc.target.weight_graded();
      c.status = Status::Pass;
    });
  }

  void gate() {
    if (blocker) return;
    if (auto bad = nilpotency(nullptr)) blocker = "skipped: " + *bad;
  }

  void base() {
    step("base", [&](CheckReport& c) {
      std::vector<gla::CohomologyReport> per;
      if (coordinates())
        for (const auto& r : vc.ladder) per.push_back(base_cohomology(vc.base_at(r)));
      else
        per.push_back(base_cohomology(external_model(*config.base.external)));
      c.tables.push_back(ladder_table("H_DR(X)", per));
      c.data["dims"] = dims_json(gla::trim(per.back().dims()));
      if (coordinates() && vc.twist) {
        auto tw = gla::cohomology(de_rham_complex(vc.base_at(vc.ladder.back()), vc.twist), false);
        c.data["twisted_dims"] = dims_json(gla::trim(tw.dims()));
      }
      c.status = Status::Pass;
    });
  }

  void jets() {
    step("jets", [&](CheckReport& c) {
      if (!coordinates()) {
        c.status = Status::Skipped;
        c.message = "an external base has no jet coordinates";
        return;
      }
      auto rep = check_identities(vc.bundle_at(vc.ladder.back()), config.random_samples, config.seed);
      c.data = {{"samples", rep.samples},
                {"dh_squared_failures", rep.dh_squared},
                {"dv_squared_failures", rep.dv_squared},
                {"dh_dv_failures", rep.dh_dv},
                {"s_squared_failures", rep.s_squared},
                {"s_dh_failures", rep.s_dh},
                {"prolong_samples", rep.prolong_samples},
                {"prolong_failures", rep.prolong_failures},
                {"pullback_samples", rep.pullback_samples},
                {"pullback_failures", rep.pullback_failures}};
      c.status = rep.ok() ? Status::Pass : Status::Fail;
      if (!rep.ok()) c.message = "an exact identity failed on a random sample";
    });
  }

  void column() {
    step("column", [&](CheckReport& c) {
      if (!coordinates()) {
        c.status = Status::Skipped;
        c.message = "an external base has no jet coordinates";
        return;
      }
      auto v = verify_column_resolution(vc, opt.jobs);
      Table t{"column cohomology", {"p", "weight", "ghost", "dim", "oracle", "stable", "match"}, {}};
      for (const auto& e : v.entries) t.rows.push_back({e.p, e.weight, e.ghost, e.dim, e.oracle, e.stable, e.match});
      c.tables.push_back(t);
      c.data = {{"twisted", v.twisted}, {"concentrated", v.concentrated}};
      c.status = from_verdict(v.verdict);
    });
  }

  void row_lemma() {
    if (!config.checks.row_lemma) return;
    const auto& rc = *config.checks.row_lemma;
    step("row_lemma", [&](CheckReport& c) {
      Table t{"row complexes", {"n", "rank", "l", "base", "top_dim", "top_oracle", "verdict"}, {}};
      Table bad{"row entries off the oracle", {"n", "rank", "l", "base", "delta", "p", "dim", "oracle", "stable"}, {}};
      json unsupported = json::array();
      bool fail = false, open = false;
      for (int n : rc.n)
        for (int r : rc.rank)
          for (int l : rc.weights)
            for (BaseKind b : rc.bases) {
              if (b == BaseKind::FlatPoly && l != 1) {
                unsupported.push_back({{"n", n}, {"rank", r}, {"l", l}, {"base", base_label(b)}});
                continue;
              }
              std::vector<Rung> ladder = rc.ladder;
              for (auto& x : ladder) x.Lmax = l;
              auto v = verify_row_lemma(n, r, l, b, ladder, opt.jobs);
              t.rows.push_back({n, r, l, base_label(b), v.top_dim, v.top_oracle, aksz::to_string(v.verdict)});
              for (const auto& e : v.entries)
                if (e.stable && !e.match) {
                  std::string d;
                  for (int j = 0; j < n; ++j) d += (j ? "," : "") + std::to_string(e.delta[static_cast<std::size_t>(j)]);
                  bad.rows.push_back({n, r, l, base_label(b), d, e.p, e.dim, e.oracle, e.stable});
                }
              fail = fail || v.verdict == Verdict::Fail;
              open = open || v.verdict == Verdict::Inconclusive;
            }
      c.tables.push_back(t);
      if (!bad.rows.empty()) c.tables.push_back(bad);
      c.data["unsupported"] = unsupported;
      c.status = fail ? Status::Fail : open ? Status::Inconclusive : Status::Pass;
    });
  }

  const std::vector<BicomplexDims>& dims() {
    if (!bicomplex) {
      std::vector<BicomplexDims> per;
      for (const auto& r : vc.ladder) per.push_back(bicomplex_dims(vc, r, opt.jobs));
      bicomplex = std::move(per);
    }
    return *bicomplex;
  }

  std::optional<std::string> bicomplex_unavailable() const {
    if (!coordinates()) return "an external base has no jet coordinates; only the Kunneth side is computed";
    if (vc.twist) return "the bicomplex is assembled for untwisted targets";
    return std::nullopt;
  }

  json rung_json(const std::vector<BicomplexDims>& per) {
    json a = json::array();
    for (std::size_t i = 0; i < per.size(); ++i)
      a.push_back({{"rung", rung_label(vc.ladder[i])},
                   {"iterated", dims_json(per[i].iterated)},
                   {"total", dims_json(per[i].total)},
                   {"blocks", per[i].blocks},
                   {"largest_block", per[i].largest_block}});
    return a;
  }

  void prop() {
    step("prop", [&](CheckReport& c) {
      if (auto why = bicomplex_unavailable()) {
        c.status = Status::Skipped;
        c.message = *why;
        return;
      }
      auto v = verify_prop(dims());
      c.tables.push_back(comparison_table("iterated (lhs) vs total (rhs)", v.table));
      Table rows{"rows cohomology below the top degree", {"p", "ghost", "dim"}, {}};
      for (const auto& [k, d] : dims().back().rows_below_top) rows.rows.push_back({k.first, k.second, d});
      c.tables.push_back(rows);
      c.data = {{"e1_concentrated", v.e1_concentrated}, {"spectral_consistent", v.spectral_consistent}, {"rungs", rung_json(dims())}};
      c.status = from_verdict(v.verdict);
    });
  }

  void theorem() {
    step("theorem", [&](CheckReport& c) {
      if (!coordinates()) {
        auto base = base_cohomology(external_model(*config.base.external));
        auto target = target_cohomology(vc.target, {vc.ladder.back().Lmax}).total;
        auto rhs = gla::trim(gla::kunneth(base.dims(), target.dims()));
        Table t{"Kunneth table (rhs only)", {"degree", "rhs_dim"}, {}};
        for (auto [k, d] : rhs) t.rows.push_back({k, d});
        c.tables.push_back(t);
        c.data = {{"base", dims_json(gla::trim(base.dims()))}, {"target", dims_json(gla::trim(target.dims()))}};
        c.status = Status::Inconclusive;
        c.message = *bicomplex_unavailable();
        return;
      }
      if (auto why = bicomplex_unavailable()) {
        c.status = Status::Skipped;
        c.message = *why;
        return;
      }
      auto v = verify_theorem(vc, dims());
      c.tables.push_back(comparison_table("H^{g,n}(s|d_h) (lhs) vs Kunneth (rhs)", v.table));
      c.data = {{"base", dims_json(v.base)}, {"target", dims_json(v.target)}, {"rungs", rung_json(dims())}};
      c.status = from_verdict(v.verdict);
    });
  }
};

}  // namespace

RunReport run(const CaseConfig& config, Command cmd, const RunOptions& opt) {
  CaseConfig effective = config;
  if (opt.ladder) effective.ladder = *opt.ladder;
  Runner r{config, opt, {}, {}, {}, {}};
  r.report.case_name = config.name;
  try {
    r.vc = build_case(effective);
  } catch (const std::exception& e) {
    CheckReport c{"config", Status::Error, e.what(), json::object(), {}, 0};
    r.report.checks.push_back(std::move(c));
    return r.report;
  }
  const auto& k = config.checks;
  const bool all = cmd == Command::RunAll;
  if ((all && k.target) || cmd == Command::CheckTarget) r.target();
  if ((all && k.base) || cmd == Command::CheckBase) r.base();
  if (cmd != Command::CheckBase && cmd != Command::CheckTarget) r.gate();
  if ((all && k.jets) || cmd == Command::CheckJets) r.jets();
  if ((all && k.column) || cmd == Command::VerifyLemma) r.column();
  if (all || cmd == Command::VerifyLemma) r.row_lemma();
  if ((all && k.prop) || cmd == Command::VerifyProp) r.prop();
  if ((all && k.theorem) || cmd == Command::VerifyTheorem) r.theorem();
  return r.report;
}

// ------------------------------------------------------------------ emit

std::optional<Format> format_from_string(const std::string& s) {
  if (s == "human") return Format::Human;
  if (s == "json") return Format::Json;
  if (s == "csv") return Format::Csv;
  return std::nullopt;
}

json to_json(const RunReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) {
    json tables = json::array();
    for (const auto& t : c.tables) tables.push_back({{"title", t.title}, {"columns", t.columns}, {"rows", t.rows}});
    checks.push_back({{"name", c.name}, {"status", to_string(c.status)}, {"message", c.message}, {"data", c.data}, {"tables", tables}});
  }
  return {{"engine_version", r.engine_version},
          {"conventions", r.conventions},
          {"case", r.case_name},
          {"checks", checks},
          {"exit_code", r.exit_code()}};
}

RunReport report_from_json(const json& j) {
  RunReport r;
  r.engine_version = j.at("engine_version").get<std::string>();
  r.conventions = j.at("conventions").get<std::string>();
  r.case_name = j.at("case").get<std::string>();
  for (const auto& c : j.at("checks")) {
    CheckReport cr;
    cr.name = c.at("name").get<std::string>();
    cr.status = status_from_string(c.at("status").get<std::string>());
    cr.message = c.at("message").get<std::string>();
    cr.data = c.at("data");
    for (const auto& t : c.at("tables")) {
      Table tb;
      tb.title = t.at("title").get<std::string>();
      tb.columns = t.at("columns").get<std::vector<std::string>>();
      for (const auto& row : t.at("rows")) tb.rows.push_back(row.get<std::vector<json>>());
      cr.tables.push_back(std::move(tb));
    }
    r.checks.push_back(std::move(cr));
  }
  return r;
}

namespace {

std::string cell(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::string emit(const RunReport& r, Format f) {
  std::ostringstream out;
  if (f == Format::Json) {
    out << to_json(r).dump(2) << "\n";
    return out.str();
  }
  if (f == Format::Csv) {
    bool first = true;
    for (const auto& c : r.checks)
      for (const auto& t : c.tables) {
        if (!first) out << "\n";
        first = false;
        out << "check,table";
        for (const auto& col : t.columns) out << "," << csv_field(col);
        out << "\n";
        for (const auto& row : t.rows) {
          out << csv_field(c.name) << "," << csv_field(t.title);
          for (const auto& v : row) out << "," << csv_field(cell(v));
          out << "\n";
        }
      }
    return out.str();
  }
  out << "case " << r.case_name << " (engine " << r.engine_version << ")\n";
  out << "conventions " << r.conventions << "\n";
  for (const auto& c : r.checks) {
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.2fs", c.seconds);
    out << "\n[" << to_string(c.status) << "] " << c.name << "  " << secs << "\n";
    if (!c.message.empty()) out << "  " << c.message << "\n";
    for (const auto& [key, v] : c.data.items())
      if (v.is_primitive()) out << "  " << key << " = " << cell(v) << "\n";
    for (const auto& t : c.tables) {
      out << "  " << t.title << "\n";
      std::vector<std::size_t> w;
      for (const auto& col : t.columns) w.push_back(col.size());
      for (const auto& row : t.rows)
        for (std::size_t i = 0; i < row.size() && i < w.size(); ++i) w[i] = std::max(w[i], cell(row[i]).size());
      auto line = [&](const std::vector<std::string>& cells) {
        out << "   ";
        for (std::size_t i = 0; i < cells.size(); ++i) {
          out << " " << std::string(w[i] - cells[i].size(), ' ') << cells[i];
        }
        out << "\n";
      };
      line(t.columns);
      for (const auto& row : t.rows) {
        std::vector<std::string> cells;
        for (const auto& v : row) cells.push_back(cell(v));
        line(cells);
      }
      if (t.rows.empty()) out << "    (no nonzero entries)\n";
    }
  }
  out << "\nexit " << r.exit_code() << "\n";
  return out.str();
}

}  // namespace aksz::cli
