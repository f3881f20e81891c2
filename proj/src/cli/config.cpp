#include <algorithm>
#include <set>
#include <sstream>

#include "aksz/cli.hpp"
#include "aksz/errors.hpp"

namespace aksz::cli {

using nlohmann::json;

namespace {

// ------------------------------------------------------------ strict reader

void require_object(const json& j, const std::string& path, std::initializer_list<const char*> allowed,
                    std::initializer_list<const char*> required = {}) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) throw ConfigError(path + "/" + k, "unknown key");
  for (const char* k : required)
    if (!j.contains(k)) throw ConfigError(path + "/" + k, "missing required key");
}

// Floats are rejected wherever they appear, before any typed access.
void reject_floats(const json& j, const std::string& path) {
  if (j.is_number_float()) throw ConfigError(path, "floating-point literal; use an integer or a \"p/q\" string");
  if (j.is_object())
    for (const auto& [k, v] : j.items()) reject_floats(v, path + "/" + k);
  if (j.is_array())
    for (std::size_t i = 0; i < j.size(); ++i) reject_floats(j[i], path + "/" + std::to_string(i));
}

int get_int(const json& j, const std::string& path, int lo = std::numeric_limits<int>::min(),
            int hi = std::numeric_limits<int>::max()) {
  if (!j.is_number_integer()) throw ConfigError(path, "expected an integer");
  const auto v = j.get<std::int64_t>();
  if (v < lo || v > hi) throw ConfigError(path, "out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(v);
}

std::string get_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

bool get_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path, "expected true or false");
  return j.get<bool>();
}

Rational get_rational(const json& j, const std::string& path) {
  if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
  if (j.is_string()) {
    auto q = parse_rational(j.get<std::string>());
    if (!q) throw ConfigError(path, "malformed rational \"" + j.get<std::string>() + "\"");
    return *q;
  }
  throw ConfigError(path, "expected an integer or a rational string");
}

const json& get_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path, "expected an array");
  return j;
}

std::vector<int> get_int_list(const json& j, const std::string& path, int lo, int hi) {
  std::vector<int> out;
  for (std::size_t i = 0; i < get_array(j, path).size(); ++i) out.push_back(get_int(j[i], path + "/" + std::to_string(i), lo, hi));
  return out;
}

std::vector<std::vector<Rational>> get_matrix(const json& j, const std::string& path) {
  std::vector<std::vector<Rational>> out;
  std::size_t width = 0;
  for (std::size_t i = 0; i < get_array(j, path).size(); ++i) {
    const std::string rp = path + "/" + std::to_string(i);
    std::vector<Rational> row;
    for (std::size_t k = 0; k < get_array(j[i], rp).size(); ++k) row.push_back(get_rational(j[i][k], rp + "/" + std::to_string(k)));
    if (i == 0) width = row.size();
    if (row.size() != width) throw ConfigError(rp, "ragged matrix row");
    out.push_back(std::move(row));
  }
  return out;
}

BaseKind base_kind(const std::string& s, const std::string& path) {
  if (s == "flat") return BaseKind::FlatPoly;
  if (s == "torus") return BaseKind::TorusFourier;
  if (s == "external") return BaseKind::External;
  throw ConfigError(path, "unknown base model \"" + s + "\" (flat, torus, external)");
}

std::string base_name(BaseKind k) {
  switch (k) {
    case BaseKind::FlatPoly: return "flat";
    case BaseKind::TorusFourier: return "torus";
    case BaseKind::External: return "external";
  }
  return "torus";
}

std::vector<Rung> get_ladder(const json& j, const std::string& path) {
  std::vector<Rung> out;
  for (std::size_t i = 0; i < get_array(j, path).size(); ++i) {
    const std::string rp = path + "/" + std::to_string(i);
    require_object(j[i], rp, {"K", "Lmax", "base"}, {"K", "Lmax", "base"});
    out.push_back({get_int(j[i]["K"], rp + "/K", 0, 16), get_int(j[i]["Lmax"], rp + "/Lmax", 1, 16),
                   get_int(j[i]["base"], rp + "/base", 0, 16)});
  }
  if (out.empty()) throw ConfigError(path, "the ladder needs at least one rung");
  return out;
}

json rational_json(const Rational& q) { return aksz::to_string(q); }

json ladder_json(const std::vector<Rung>& l) {
  json a = json::array();
  for (const auto& r : l) a.push_back({{"K", r.K}, {"Lmax", r.Lmax}, {"base", r.base}});
  return a;
}

json matrix_json(const std::vector<std::vector<Rational>>& m) {
  json a = json::array();
  for (const auto& row : m) {
    json r = json::array();
    for (const auto& q : row) r.push_back(rational_json(q));
    a.push_back(r);
  }
  return a;
}

gla::SparseMatrix to_sparse(const std::vector<std::vector<Rational>>& m, int rows, int cols) {
  gla::SparseMatrix out(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      const Rational& q = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (!is_zero(q)) out.add(i, j, q);
    }
  return out;
}

}  // namespace

bool TargetConfig::operator==(const TargetConfig& o) const {
  if (basis.size() != o.basis.size()) return false;
  for (std::size_t i = 0; i < basis.size(); ++i)
    if (basis[i].label != o.basis[i].label || basis[i].degree != o.basis[i].degree) return false;
  return max_arity == o.max_arity && brackets == o.brackets && lie_structure == o.lie_structure;
}

CaseConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("not valid JSON: ") + e.what());
  }
  reject_floats(j, "");
  require_object(j, "",
                 {"schema_version", "name", "target", "base", "twist", "truncation_ladder", "checks", "output",
                  "random_samples", "seed"},
                 {"schema_version", "name", "target", "base", "truncation_ladder"});
  CaseConfig c;
  c.schema_version = get_int(j["schema_version"], "/schema_version");
  if (c.schema_version != kSchemaVersion)
    throw ConfigError("/schema_version", "unsupported schema version " + std::to_string(c.schema_version));
  c.name = get_string(j["name"], "/name");

  // target
  const json& t = j["target"];
  require_object(t, "/target", {"basis", "max_arity", "brackets", "lie_structure"}, {"basis"});
  std::set<std::string> labels;
  for (std::size_t i = 0; i < get_array(t["basis"], "/target/basis").size(); ++i) {
    const std::string p = "/target/basis/" + std::to_string(i);
    require_object(t["basis"][i], p, {"label", "degree"}, {"label", "degree"});
    TargetBasis b{get_string(t["basis"][i]["label"], p + "/label"), get_int(t["basis"][i]["degree"], p + "/degree", -8, 8)};
    if (!labels.insert(b.label).second) throw ConfigError(p + "/label", "duplicate label \"" + b.label + "\"");
    c.target.basis.push_back(b);
  }
  if (t.contains("max_arity")) c.target.max_arity = get_int(t["max_arity"], "/target/max_arity", 1, 8);
  auto label = [&](const json& v, const std::string& p) {
    std::string s = get_string(v, p);
    if (!labels.count(s)) throw ConfigError(p, "unknown basis label \"" + s + "\"");
    return s;
  };
  if (t.contains("brackets"))
    for (std::size_t i = 0; i < get_array(t["brackets"], "/target/brackets").size(); ++i) {
      const std::string p = "/target/brackets/" + std::to_string(i);
      const json& b = t["brackets"][i];
      require_object(b, p, {"arity", "output", "inputs", "value"}, {"arity", "output", "inputs", "value"});
      BracketConfig e;
      e.arity = get_int(b["arity"], p + "/arity", 1, 8);
      e.output = label(b["output"], p + "/output");
      for (std::size_t k = 0; k < get_array(b["inputs"], p + "/inputs").size(); ++k)
        e.inputs.push_back(label(b["inputs"][k], p + "/inputs/" + std::to_string(k)));
      e.value = get_rational(b["value"], p + "/value");
      c.target.brackets.push_back(e);
    }
  if (t.contains("lie_structure"))
    for (std::size_t i = 0; i < get_array(t["lie_structure"], "/target/lie_structure").size(); ++i) {
      const std::string p = "/target/lie_structure/" + std::to_string(i);
      const json& b = t["lie_structure"][i];
      require_object(b, p, {"output", "left", "right", "value"}, {"output", "left", "right", "value"});
      c.target.lie_structure.push_back({label(b["output"], p + "/output"), label(b["left"], p + "/left"),
                                        label(b["right"], p + "/right"), get_rational(b["value"], p + "/value")});
    }

  // base
  const json& b = j["base"];
  require_object(b, "/base", {"model", "n", "external"}, {"model"});
  c.base.model = base_kind(get_string(b["model"], "/base/model"), "/base/model");
  if (c.base.model == BaseKind::External) {
    if (!b.contains("external")) throw ConfigError("/base/external", "an external base needs its complex");
    const json& e = b["external"];
    require_object(e, "/base/external", {"dims", "differentials"}, {"dims"});
    ExternalConfig ec;
    require_object(e["dims"], "/base/external/dims", {"0", "1", "2", "3", "4", "5", "6", "7", "8"});
    for (const auto& [k, v] : e["dims"].items()) ec.dims[std::stoi(k)] = get_int(v, "/base/external/dims/" + k, 0, 64);
    if (e.contains("differentials")) {
      require_object(e["differentials"], "/base/external/differentials", {"0", "1", "2", "3", "4", "5", "6", "7"});
      for (const auto& [k, v] : e["differentials"].items())
        ec.differentials[std::stoi(k)] = get_matrix(v, "/base/external/differentials/" + k);
    }
    c.base.external = ec;
    c.base.n = 1;
    if (b.contains("n")) c.base.n = get_int(b["n"], "/base/n", 1, kMaxBaseDim);
  } else {
    if (b.contains("external")) throw ConfigError("/base/external", "only allowed for the external model");
    if (!b.contains("n")) throw ConfigError("/base/n", "missing required key");
    c.base.n = get_int(b["n"], "/base/n", 1, kMaxBaseDim);
  }

  if (j.contains("twist")) {
    const json& tw = j["twist"];
    require_object(tw, "/twist", {"A"}, {"A"});
    std::vector<std::vector<std::vector<Rational>>> A;
    for (std::size_t i = 0; i < get_array(tw["A"], "/twist/A").size(); ++i)
      A.push_back(get_matrix(tw["A"][i], "/twist/A/" + std::to_string(i)));
    c.twist = A;
  }

  c.ladder = get_ladder(j["truncation_ladder"], "/truncation_ladder");

  if (j.contains("checks")) {
    const json& k = j["checks"];
    require_object(k, "/checks", {"target", "base", "jets", "column", "prop", "theorem", "row_lemma"});
    auto flag = [&](const char* key, bool& dst) {
      if (k.contains(key)) dst = get_bool(k[key], std::string("/checks/") + key);
    };
    flag("target", c.checks.target);
    flag("base", c.checks.base);
    flag("jets", c.checks.jets);
    flag("column", c.checks.column);
    flag("prop", c.checks.prop);
    flag("theorem", c.checks.theorem);
    if (k.contains("row_lemma")) {
      const json& r = k["row_lemma"];
      require_object(r, "/checks/row_lemma", {"n", "rank", "weights", "bases", "ladder"});
      RowLemmaConfig rc;
      if (r.contains("n")) rc.n = get_int_list(r["n"], "/checks/row_lemma/n", 1, kMaxBaseDim);
      if (r.contains("rank")) rc.rank = get_int_list(r["rank"], "/checks/row_lemma/rank", 1, 8);
      if (r.contains("weights")) rc.weights = get_int_list(r["weights"], "/checks/row_lemma/weights", 1, 2);
      if (r.contains("bases")) {
        rc.bases.clear();
        for (std::size_t i = 0; i < get_array(r["bases"], "/checks/row_lemma/bases").size(); ++i) {
          const std::string p = "/checks/row_lemma/bases/" + std::to_string(i);
          BaseKind bk = base_kind(get_string(r["bases"][i], p), p);
          if (bk == BaseKind::External) throw ConfigError(p, "the row complexes need a coordinate base");
          rc.bases.push_back(bk);
        }
      }
      if (r.contains("ladder")) rc.ladder = get_ladder(r["ladder"], "/checks/row_lemma/ladder");
      c.checks.row_lemma = rc;
    }
  }
  if (j.contains("output")) {
    require_object(j["output"], "/output", {"json", "csv"});
    if (j["output"].contains("json")) c.output.json = get_string(j["output"]["json"], "/output/json");
    if (j["output"].contains("csv")) c.output.csv = get_string(j["output"]["csv"], "/output/csv");
  }
  if (j.contains("random_samples")) c.random_samples = get_int(j["random_samples"], "/random_samples", 1, 100000);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ConfigError("/seed", "expected a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }

  // degree consistency is checked by the target constructor
  build_case(c);
  return c;
}

json to_json(const CaseConfig& c) {
  json j;
  j["schema_version"] = c.schema_version;
  j["name"] = c.name;
  json basis = json::array();
  for (const auto& b : c.target.basis) basis.push_back({{"label", b.label}, {"degree", b.degree}});
  json br = json::array();
  for (const auto& e : c.target.brackets)
    br.push_back({{"arity", e.arity}, {"output", e.output}, {"inputs", e.inputs}, {"value", rational_json(e.value)}});
  json lie = json::array();
  for (const auto& e : c.target.lie_structure)
    lie.push_back({{"output", e.output}, {"left", e.left}, {"right", e.right}, {"value", rational_json(e.value)}});
  j["target"] = {{"basis", basis}, {"max_arity", c.target.max_arity}, {"brackets", br}, {"lie_structure", lie}};
  j["base"] = {{"model", base_name(c.base.model)}, {"n", c.base.n}};
  if (c.base.external) {
    json dims = json::object(), ds = json::object();
    for (auto [k, v] : c.base.external->dims) dims[std::to_string(k)] = v;
    for (const auto& [k, m] : c.base.external->differentials) ds[std::to_string(k)] = matrix_json(m);
    j["base"]["external"] = {{"dims", dims}, {"differentials", ds}};
  }
  if (c.twist) {
    json A = json::array();
    for (const auto& m : *c.twist) A.push_back(matrix_json(m));
    j["twist"] = {{"A", A}};
  }
  j["truncation_ladder"] = ladder_json(c.ladder);
  json k{{"target", c.checks.target}, {"base", c.checks.base}, {"jets", c.checks.jets},
         {"column", c.checks.column}, {"prop", c.checks.prop}, {"theorem", c.checks.theorem}};
  if (c.checks.row_lemma) {
    const auto& r = *c.checks.row_lemma;
    json bases = json::array();
    for (auto b : r.bases) bases.push_back(base_name(b));
    k["row_lemma"] = {{"n", r.n}, {"rank", r.rank}, {"weights", r.weights}, {"bases", bases}, {"ladder", ladder_json(r.ladder)}};
  }
  j["checks"] = k;
  json out = json::object();
  if (c.output.json) out["json"] = *c.output.json;
  if (c.output.csv) out["csv"] = *c.output.csv;
  j["output"] = out;
  j["random_samples"] = c.random_samples;
  j["seed"] = c.seed;
  return j;
}

LInfinityStructure build_target(const TargetConfig& t) {
  LInfinityStructure L(t.basis, t.max_arity);
  for (std::size_t i = 0; i < t.brackets.size(); ++i) {
    const auto& e = t.brackets[i];
    BracketEntry b;
    b.arity = e.arity;
    b.output = L.index_of(e.output);
    for (const auto& s : e.inputs) b.inputs.push_back(L.index_of(s));
    b.value = e.value;
    try {
      L.add_bracket(b);
    } catch (const StructuralError& err) {
      throw ConfigError("/target/brackets/" + std::to_string(i), err.what());
    }
  }
  if (!t.lie_structure.empty()) {
    const auto d = static_cast<std::size_t>(L.dim());
    std::vector<std::vector<std::vector<Rational>>> f(d, std::vector<std::vector<Rational>>(d, std::vector<Rational>(d, Rational(0))));
    for (const auto& e : t.lie_structure) {
      const auto a = static_cast<std::size_t>(L.index_of(e.output)), b = static_cast<std::size_t>(L.index_of(e.left)),
                 c = static_cast<std::size_t>(L.index_of(e.right));
      f[a][b][c] += e.value;
      f[a][c][b] -= e.value;
    }
    try {
      L.set_lie_structure(f);
    } catch (const StructuralError& err) {
      throw ConfigError("/target/lie_structure", err.what());
    }
  }
  return L;
}

VerificationCase build_case(const CaseConfig& c) {
  VerificationCase v;
  v.name = c.name;
  v.base_kind = c.base.model;
  v.n = c.base.n;
  try {
    v.target = build_target(c.target);
  } catch (const StructuralError& err) {
    throw ConfigError("/target", err.what());
  }
  v.ladder = c.ladder;
  if (c.twist) {
    if (c.base.model == BaseKind::External) throw ConfigError("/twist", "a twist needs a coordinate base");
    FlatConnection tw;
    tw.dim = v.target.dim();
    if (static_cast<int>(c.twist->size()) != v.n) throw ConfigError("/twist/A", "expected one matrix per base direction");
    for (std::size_t i = 0; i < c.twist->size(); ++i) {
      const auto& m = (*c.twist)[i];
      if (static_cast<int>(m.size()) != tw.dim || (!m.empty() && static_cast<int>(m[0].size()) != tw.dim))
        throw ConfigError("/twist/A/" + std::to_string(i), "expected a dim L x dim L matrix");
      tw.A.push_back(to_sparse(m, tw.dim, tw.dim));
    }
    try {
      tw.validate(v.n);
      FieldBundleSpec probe(BaseModel::torus(v.n, 0), v.target, tw);
    } catch (const std::exception& err) {
      throw ConfigError("/twist", err.what());
    }
    v.twist = tw;
  }
  if (c.base.model != BaseKind::External)
    for (std::size_t i = 0; i < c.ladder.size(); ++i) {
      try {
        v.base_at(c.ladder[i]).validate();
      } catch (const std::exception& err) {
        throw ConfigError("/truncation_ladder/" + std::to_string(i), err.what());
      }
    }
  return v;
}

std::vector<Rung> parse_ladder(const std::string& text) {
  std::vector<Rung> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    Rung r;
    char c1 = 0, c2 = 0;
    std::stringstream is(item);
    if (!(is >> r.K >> c1 >> r.Lmax >> c2 >> r.base) || c1 != ':' || c2 != ':' || !is.eof() || r.K < 0 || r.Lmax < 1 ||
        r.base < 0)
      throw ConfigError("--truncation-ladder", "expected K:Lmax:base[,K:Lmax:base...], got \"" + item + "\"");
    out.push_back(r);
  }
  if (out.empty()) throw ConfigError("--truncation-ladder", "empty ladder");
  return out;
}

}  // namespace aksz::cli
