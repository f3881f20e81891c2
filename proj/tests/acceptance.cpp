// Acceptance run: one PASS/FAIL line per criterion. Every sample count and
// time budget is a named constant below.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "aksz/cli.hpp"
#include "aksz/errors.hpp"
#include "generators.hpp"

using namespace aksz;

namespace {

constexpr int kIdentitySamples = 100;         // criteria 1-3, per case / base model
constexpr double kIdentitySecondsPerCase = 60;
constexpr double kRowLemmaSeconds = 300;
constexpr double kTheoremSeconds = 900;
constexpr int kBicomplexSamples = 20;         // criterion 8
constexpr int kKunnethSamples = 20;           // criterion 9
constexpr std::uint64_t kSeed = 20261014;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Shipped {
  std::string file;
  cli::CaseConfig config;
  VerificationCase vc;
};

std::vector<Shipped> shipped_configs() {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(AKSZ_CONFIG_DIR))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<Shipped> out;
  for (const auto& f : files) {
    auto c = cli::parse_config(slurp(f));
    out.push_back({f.filename().string(), c, cli::build_case(c)});
  }
  return out;
}

bool nilpotent(const VerificationCase& c) {
  return check_nilpotency(c.target, 2 * std::max(1, c.target.max_arity()) - 1).empty();
}

// Cases whose jets and bicomplex can be built: coordinate base, Q^2 = 0.
std::vector<const Shipped*> coordinate_cases(const std::vector<Shipped>& all, bool untwisted_only) {
  std::vector<const Shipped*> out;
  for (const auto& s : all)
    if (s.vc.base_kind != BaseKind::External && nilpotent(s.vc) && !(untwisted_only && s.vc.twist)) out.push_back(&s);
  return out;
}

const std::vector<std::string> kTheoremCases{
    "theorem_flat_abelian.json", "theorem_flat_pair.json", "theorem_flat_affine.json",
    "theorem_t1_abelian.json",   "theorem_t1_pair.json",   "theorem_t1_affine.json",
    "theorem_t2_abelian.json",   "theorem_t2_pair.json",   "theorem_t2_affine.json"};

// ------------------------------------------------------------- criteria

Outcome differential_identities(const std::vector<Shipped>& all) {
  Outcome o{true, ""};
  int cases = 0;
  for (const Shipped* s : coordinate_cases(all, false)) {
    const auto t0 = std::chrono::steady_clock::now();
    auto rep = check_identities(s->vc.bundle_at(s->vc.ladder.back()), kIdentitySamples, kSeed);
    const double t = seconds_since(t0);
    const int bad = rep.dh_squared + rep.dv_squared + rep.dh_dv + rep.s_squared + rep.s_dh;
    if (bad != 0 || rep.samples < kIdentitySamples || t > kIdentitySecondsPerCase) {
      o.pass = false;
      o.detail += " " + s->file + ": " + std::to_string(bad) + " failures in " + std::to_string(t) + "s;";
    }
    ++cases;
  }
  if (o.pass) o.detail = std::to_string(cases) + " cases x " + std::to_string(kIdentitySamples) + " samples, five identities exact";
  return o;
}

Outcome evolutionary(const std::vector<Shipped>& all) {
  int samples = 0, failures = 0;
  for (const Shipped* s : coordinate_cases(all, false)) {
    auto rep = check_identities(s->vc.bundle_at(s->vc.ladder.back()), kIdentitySamples, kSeed + 1);
    samples += rep.prolong_samples;
    failures += rep.prolong_failures;
  }
  return {failures == 0 && samples >= kIdentitySamples,
          std::to_string(samples) + " random (field, jet polynomial) pairs, " + std::to_string(failures) + " failures"};
}

Outcome pullback_naturality(const std::vector<Shipped>& all) {
  // one representative case per base model
  std::map<std::pair<BaseKind, int>, const Shipped*> per_model;
  for (const Shipped* s : coordinate_cases(all, false)) per_model.emplace(std::make_pair(s->vc.base_kind, s->vc.n), s);
  Outcome o{true, ""};
  for (const auto& [model, s] : per_model) {
    auto rep = check_identities(s->vc.bundle_at(s->vc.ladder.back()), kIdentitySamples, kSeed + 2);
    const std::string name = std::string(model.first == BaseKind::FlatPoly ? "flat" : "torus") + " n=" + std::to_string(model.second);
    o.pass = o.pass && rep.pullback_failures == 0 && rep.pullback_samples >= kIdentitySamples;
    if (!o.detail.empty()) o.detail += "; ";
    o.detail += name + ": " + std::to_string(rep.pullback_samples) + " pairs, " + std::to_string(rep.pullback_failures) + " failures";
  }
  o.pass = o.pass && per_model.size() >= 3;
  return o;
}

Outcome row_lemma() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o{true, ""};
  int combos = 0;
  for (int n : {1, 2})
    for (int r : {1, 2})
      for (int l : {1, 2})
        for (BaseKind b : {BaseKind::TorusFourier, BaseKind::FlatPoly}) {
          if (b == BaseKind::FlatPoly && l == 2) continue;  // torus only at l = 2
          std::vector<Rung> ladder{{2, l, 1}, {3, l, 2}};
          auto v = verify_row_lemma(n, r, l, b, ladder);
          ++combos;
          if (v.verdict != Verdict::Pass || v.top_dim != v.top_oracle) {
            o.pass = false;
            o.detail += " n=" + std::to_string(n) + " rank=" + std::to_string(r) + " l=" + std::to_string(l) + ": " +
                        to_string(v.verdict) + ";";
          }
        }
  const double t = seconds_since(t0);
  if (t > kRowLemmaSeconds) {
    o.pass = false;
    o.detail += " over budget";
  }
  o.detail = std::to_string(combos) + " (n, rank, l, base) combinations in " + std::to_string(t).substr(0, 5) + "s" + o.detail;
  return o;
}

struct TheoremRun {
  std::map<std::string, std::vector<BicomplexDims>> dims;
  double seconds = 0;
};

TheoremRun bicomplexes(const std::vector<Shipped>& all) {
  TheoremRun r;
  const auto t0 = std::chrono::steady_clock::now();
  for (const Shipped* s : coordinate_cases(all, true)) {
    std::vector<BicomplexDims> per;
    for (const auto& rung : s->vc.ladder) per.push_back(bicomplex_dims(s->vc, rung));
    r.dims[s->file] = std::move(per);
  }
  r.seconds = seconds_since(t0);
  return r;
}

Outcome iterated_equals_total(const TheoremRun& run) {
  Outcome o{true, ""};
  int rows = 0;
  for (const auto& [file, per] : run.dims) {
    auto v = verify_prop(per);
    rows += static_cast<int>(v.table.rows.size());
    if (v.verdict != Verdict::Pass) {
      o.pass = false;
      o.detail += " " + file + ": " + to_string(v.verdict) + ";";
    }
  }
  o.detail = std::to_string(run.dims.size()) + " cases, " + std::to_string(rows) + " degrees compared" + o.detail;
  return o;
}

Outcome main_theorem(const std::vector<Shipped>& all, const TheoremRun& run) {
  Outcome o{true, ""};
  int done = 0;
  for (const auto& name : kTheoremCases) {
    auto it = run.dims.find(name);
    const Shipped* s = nullptr;
    for (const auto& x : all)
      if (x.file == name) s = &x;
    if (it == run.dims.end() || !s) {
      o.pass = false;
      o.detail += " missing " + name + ";";
      continue;
    }
    auto v = verify_theorem(s->vc, it->second);
    ++done;
    if (v.verdict != Verdict::Pass) {
      o.pass = false;
      o.detail += " " + name + ": " + to_string(v.verdict) + ";";
    }
    // the local model has H_DR = R in degree 0, so the table is H_Q(L) itself
    if (s->vc.base_kind == BaseKind::FlatPoly && it->second.back().iterated != v.target) {
      o.pass = false;
      o.detail += " " + name + ": local table differs from H_Q;";
    }
  }
  if (run.seconds > kTheoremSeconds) {
    o.pass = false;
    o.detail += " over budget";
  }
  o.detail = std::to_string(done) + "/9 cases, bicomplexes in " + std::to_string(run.seconds).substr(0, 5) + "s" + o.detail;
  return o;
}

Outcome column_resolution(const std::vector<Shipped>& all) {
  Outcome o{true, ""};
  int cases = 0, twisted = 0;
  for (const Shipped* s : coordinate_cases(all, false)) {
    auto v = verify_column_resolution(s->vc);
    ++cases;
    twisted += v.twisted ? 1 : 0;
    if (v.verdict != Verdict::Pass || (!v.twisted && !v.concentrated)) {
      o.pass = false;
      o.detail += " " + s->file + ": " + to_string(v.verdict) + ";";
    }
  }
  o.pass = o.pass && twisted >= 1;
  o.detail = std::to_string(cases) + " cases (" + std::to_string(twisted) + " twisted)" + o.detail;
  return o;
}

Outcome two_filtrations() {
  std::mt19937_64 rng(kSeed + 8);
  int agree = 0;
  for (int t = 0; t < kBicomplexSamples; ++t) {
    auto b = testgen::to_bicomplex(testgen::random_edge_exact(rng), rng);
    auto v = gla::two_filtration_check(b);
    auto total = gla::trim(gla::cohomology(gla::total_complex(b), false).dims());
    if (v.equal && gla::trim(v.q1) == total && gla::trim(v.q2) == total) ++agree;
  }
  return {agree == kBicomplexSamples, std::to_string(agree) + "/" + std::to_string(kBicomplexSamples) + " random bicomplexes"};
}

Outcome kunneth_engine() {
  std::mt19937_64 rng(kSeed + 9);
  int agree = 0;
  for (int t = 0; t < kKunnethSamples; ++t) {
    auto a = testgen::to_complex(testgen::random_global_complex(0, 2, rng, 4), rng);
    auto b = testgen::to_complex(testgen::random_global_complex(-1, 2, rng, 4), rng);
    auto lhs = gla::trim(gla::kunneth(gla::cohomology(a, false).dims(), gla::cohomology(b, false).dims()));
    auto brute = gla::trim(gla::cohomology(gla::tensor_complex(a, b), false).dims());
    if (lhs == brute) ++agree;
  }
  return {agree == kKunnethSamples, std::to_string(agree) + "/" + std::to_string(kKunnethSamples) + " random pairs"};
}

Outcome determinism(const std::vector<Shipped>& all) {
  Outcome o{true, ""};
  for (const auto& s : all) {
    const std::string a = cli::emit(cli::run(s.config, cli::Command::RunAll), cli::Format::Json);
    const std::string b = cli::emit(cli::run(s.config, cli::Command::RunAll), cli::Format::Json);
    if (a != b) {
      o.pass = false;
      o.detail += " " + s.file + " differs;";
    }
  }
  o.detail = std::to_string(all.size()) + " shipped configs, two runs each" + o.detail;
  return o;
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int k, const std::string& what, const std::function<Outcome()>& f) {
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << k << " (" << what << "): " << o.detail << std::endl;
    failed += o.pass ? 0 : 1;
  };

  std::vector<Shipped> all;
  try {
    all = shipped_configs();
  } catch (const std::exception& e) {
    std::cout << "FAIL configs: " << e.what() << "\n";
    return 1;
  }
  TheoremRun run;
  bool have_run = false;
  auto ensure_run = [&]() -> const TheoremRun& {
    if (!have_run) {
      run = bicomplexes(all);
      have_run = true;
    }
    return run;
  };

  report(1, "differential identities", [&] { return differential_identities(all); });
  report(2, "prolongations commute with total derivatives", [&] { return evolutionary(all); });
  report(3, "pullback naturality", [&] { return pullback_naturality(all); });
  report(4, "row lemma", [&] { return row_lemma(); });
  report(5, "iterated = total", [&] { return iterated_equals_total(ensure_run()); });
  report(6, "main theorem", [&] { return main_theorem(all, ensure_run()); });
  report(7, "column resolution", [&] { return column_resolution(all); });
  report(8, "two-filtration lemma", [&] { return two_filtrations(); });
  report(9, "Kunneth engine", [&] { return kunneth_engine(); });
  report(10, "deterministic json", [&] { return determinism(all); });
  return failed == 0 ? 0 : 1;
}
