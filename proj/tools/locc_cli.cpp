// locc: command-line front end for the deciders, generators and the
// randomized cross-validation harness. JSON on stdout, diagnostics on stderr.
// Exit codes: 0 convertible / certified / clean, 1 negative, 2 error.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "locc/audit.hpp"
#include "locc/io.hpp"
#include "locc/locc.hpp"
#include "locc/sampling.hpp"

using namespace locc;
using io::json;

namespace {

constexpr int kExitError = 2;
// verify prints every trial when the run is at most this long.
constexpr int kTranscriptLimit = 10;

struct Options {
  std::vector<std::string> files;
  std::string method = "closed-form";
  int mu_denominator = 50;
  bool dump_problem = false;

  std::string profiles;
  double p1 = 0.0, lambda = 0.0, eta = 0.0;
  int grid_size = 10000;

  int trials = 1000;
  std::uint64_t seed = 0;
  bool seed_given = false;
  double tolerance = 0.0;
  std::string output;
};

void emit(const json& j, const std::string& path = {}) {
  if (path.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError(path + ": cannot write output");
  out << j.dump(2) << "\n";
}

json raw_json(const audit::RawInstance& r) {
  return {{"p", r.p}, {"sources", r.sources}, {"q", r.q}, {"targets", r.targets}};
}

audit::RawInstance raw_from_json(const json& j) {
  return {j.at("p").get<std::vector<double>>(),
          j.at("sources").get<std::vector<std::vector<double>>>(),
          j.at("q").get<std::vector<double>>(),
          j.at("targets").get<std::vector<std::vector<double>>>()};
}

audit::RawInstance raw_of(const std::vector<double>& p, const std::vector<SchmidtVector>& src,
                          const std::vector<double>& q, const std::vector<SchmidtVector>& dst) {
  audit::RawInstance r{p, {}, q, {}};
  for (const auto& s : src) r.sources.push_back(s.values());
  for (const auto& s : dst) r.targets.push_back(s.values());
  return r;
}

audit::RawInstance raw_of(const Ensemble& d1, const Ensemble& d2) {
  std::vector<double> p, q;
  std::vector<SchmidtVector> src, dst;
  for (const auto& e : d1) {
    p.push_back(e.prob);
    src.push_back(schmidt_decompose(e.state));
  }
  for (const auto& e : d2) {
    q.push_back(e.prob);
    dst.push_back(schmidt_decompose(e.state));
  }
  return raw_of(p, src, q, dst);
}

int finish(const DecisionReport& rep, const audit::RawInstance& raw, json extra = {}) {
  json j = io::to_json(rep);
  j["instance"] = raw_json(raw);
  for (auto& [k, v] : extra.items()) j[k] = v;
  emit(j);
  return rep.verdict ? 0 : 1;
}

void require_files(const Options& o, std::size_t n, const std::string& usage) {
  if (o.files.size() != n) throw ValidationError("expected " + usage);
}

int cmd_schmidt(const Options& o) {
  require_files(o, 1, "one state file");
  const auto s = schmidt_decompose(io::parse_state(io::load_document(o.files[0])));
  emit(json{{"schmidt", io::to_json(s)}});
  return 0;
}

int decide_nielsen(const Options& o) {
  require_files(o, 2, "<psi> <phi>");
  const auto a = schmidt_decompose(io::parse_state(io::load_document(o.files[0])));
  const auto b = schmidt_decompose(io::parse_state(io::load_document(o.files[1])));
  return finish(nielsen_convertible(a, b), raw_of({1.0}, {a}, {1.0}, {b}));
}

int decide_pure_to_ensemble(const Options& o) {
  require_files(o, 2, "<psi> <ensemble>");
  const auto psi = io::parse_state(io::load_document(o.files[0]));
  const auto target = io::parse_ensemble_or_state(io::load_document(o.files[1]));
  const Ensemble source({{1.0, psi}});
  return finish(pure_to_ensemble_convertible(schmidt_decompose(psi), target),
                raw_of(source, target));
}

int decide_dist(const Options& o) {
  require_files(o, 2, "<D1> <D2>");
  const auto d1 = io::parse_ensemble_or_state(io::load_document(o.files[0]));
  const auto d2 = io::parse_ensemble_or_state(io::load_document(o.files[1]));
  const auto inst = TwoQubitDistInstance::from_ensembles(d1, d2);
  // Canonical order (x1 >= x2, y1 >= y2), which is the order channels use.
  const auto raw =
      raw_of(inst.source_probs(), inst.source_schmidt(), inst.target_probs(), inst.target_schmidt());
  const auto problem = build_problem(inst.source_probs(), inst.source_schmidt(),
                                     inst.target_probs(), inst.target_schmidt());
  json extra;
  if (o.dump_problem) extra["problem"] = io::to_json(problem);
  if (o.method == "closed-form") return finish(dist_convert_closed_form(inst), raw, extra);
  if (o.method == "mu-critical") {
    return finish(dist_convert_mu(inst, critical_mu_set(inst), kDefaultTolerances, "mu-critical"),
                  raw, extra);
  }
  if (o.method == "mu-grid") {
    return finish(dist_convert_mu(inst, rational_mu_grid(o.mu_denominator), kDefaultTolerances,
                                  "mu-grid"),
                  raw, extra);
  }
  if (o.method == "lp") return finish(lp_feasible(problem), raw, extra);
  throw ValidationError("unknown method '" + o.method + "'");
}

int decide_lp(const Options& o) {
  require_files(o, 2, "<D1> <D2>");
  const auto d1 = io::parse_ensemble_or_state(io::load_document(o.files[0]));
  const auto d2 = io::parse_ensemble_or_state(io::load_document(o.files[1]));
  const auto problem = build_problem(d1, d2);
  json extra;
  if (o.dump_problem) extra["problem"] = io::to_json(problem);
  return finish(lp_feasible(problem), raw_of(d1, d2), extra);
}

int cmd_prop1(const Options& o) {
  if (o.profiles.empty()) throw ValidationError("prop1 needs --profiles <file>");
  const auto set = io::parse_profile_set(io::load_document(o.profiles));
  const auto inst = gen_prop1_instance(set);
  const auto rep = verify_prop1(inst);
  json labels = json::array();
  for (const auto& f : inst.monotone_set) labels.push_back(f.label);
  json j = io::to_json(rep);
  j["instance"] = {{"p1", inst.p1}, {"x1", inst.x1}, {"p2", inst.p2()}, {"x2", inst.x2},
                   {"q1", 1.0},     {"y", inst.y},   {"profiles", labels}};
  const auto lp = lp_feasible(prop1_problem(inst));
  j["lp"] = io::to_json(lp);
  emit(j);
  return rep.certified && !lp.verdict ? 0 : 1;
}

int cmd_theorem1(const Options& o) {
  const Theorem1Instance inst(o.p1, o.lambda, o.eta);
  if (o.grid_size < 1) throw ValidationError("--grid-size must be >= 1");
  const auto rep = verify_theorem1(inst, tail_sum_family(), theorem1_default_grid(inst, o.grid_size));
  json j = io::to_json(rep);
  auto schmidt = [](const PureState& s) { return io::to_json(schmidt_decompose(s)); };
  j["instance"] = {{"p1", inst.p1()},
                   {"lambda", inst.lambda()},
                   {"eta", inst.eta()},
                   {"rho_blocks", {{{"p", inst.p1()}, {"schmidt", schmidt(inst.psi1())}},
                                   {{"p", inst.p2()}, {"schmidt", schmidt(inst.psi2())}}}},
                   {"sigma_schmidt", schmidt(inst.sigma())}};
  emit(j);
  return rep.certified ? 0 : 1;
}

// ---------------------------------------------------------------------------
// verify

json dist_json(const TwoQubitDistInstance& i) {
  return {{"p1", i.p1()}, {"x1", i.x1()}, {"p2", i.p2()}, {"x2", i.x2()},
          {"q1", i.q1()}, {"y1", i.y1()}, {"q2", i.q2()}, {"y2", i.y2()}};
}

struct Suite {
  long trials = 0, agreements = 0, disagreements = 0, ties = 0;

  json summary() const {
    return {{"trials", trials}, {"agreements", agreements}, {"disagreements", disagreements},
            {"boundary_ties", ties}};
  }
};

int cmd_verify(const Options& o) {
  if (o.trials < 1) throw ValidationError("--trials must be >= 1");
  std::uint64_t seed = o.seed;
  if (!o.seed_given) {
    if (const char* env = std::getenv("LOCC_SEED")) {
      try {
        seed = std::stoull(env);
      } catch (const std::exception&) {
        throw ValidationError(std::string("LOCC_SEED is not an unsigned integer: ") + env);
      }
    }
  }
  Tolerances tol = kDefaultTolerances;
  if (o.tolerance != 0.0) {
    if (!(o.tolerance > 0.0 && o.tolerance < 1e-3)) {
      throw ValidationError("--tolerance must lie in (0, 1e-3)");
    }
    tol.decision = o.tolerance;
  }

  Suite dist, nielsen, closure;
  json hard = json::array(), ties = json::array(), transcript = json::array();
  const bool keep_transcript = o.trials <= kTranscriptLimit;

  for (int t = 0; t < o.trials; ++t) {
    const auto stream = static_cast<std::uint64_t>(t);
    json trial = {{"trial", t}};

    // Closed form vs critical-mu vs LP.
    {
      std::mt19937_64 rng(derive_seed(seed, 3 * stream));
      const auto inst = random_two_qubit_instance(rng);
      const auto cf = dist_convert_closed_form(inst, tol);
      const auto mu = dist_convert_mu(inst, critical_mu_set(inst), tol, "mu-critical");
      const auto lp = lp_feasible(build_problem(inst.source_probs(), inst.source_schmidt(),
                                                inst.target_probs(), inst.target_schmidt()),
                                  tol);
      double gap = std::numeric_limits<double>::infinity();
      for (const auto& r : cf.margins) gap = std::min(gap, std::abs(r.margin()));
      const bool tie = gap < tol.tie;
      const bool agree = cf.verdict == mu.verdict && cf.verdict == lp.verdict;
      ++dist.trials;
      if (tie) ++dist.ties;
      json rec = {{"suite", "dist_agreement"},     {"trial", t},
                  {"instance", dist_json(inst)},   {"closed_form", cf.verdict},
                  {"mu_critical", mu.verdict},     {"lp", lp.verdict},
                  {"boundary_distance", gap}};
      if (agree) {
        ++dist.agreements;
      } else if (tie) {
        ties.push_back(rec);
      } else {
        ++dist.disagreements;
        hard.push_back(rec);
      }
      if (keep_transcript) trial["dist_agreement"] = rec;
    }

    // Nielsen vs a direct tail-sum comparison on random d = 4 pairs.
    {
      const auto base = derive_seed(seed, 3 * stream + 1);
      const auto psi = schmidt_decompose(sample_random_state(4, derive_seed(base, 0)));
      const auto phi = schmidt_decompose(sample_random_state(4, derive_seed(base, 1)));
      bool direct = true;
      double gap = std::numeric_limits<double>::infinity();
      double ta = 0.0, tb = 0.0;
      for (std::size_t k = 4; k-- > 1;) {
        ta += psi[k];
        tb += phi[k];
        gap = std::min(gap, std::abs(ta - tb));
        if (ta < tb - tol.decision) direct = false;
      }
      const auto rep = nielsen_convertible(psi, phi, tol);
      ++nielsen.trials;
      const bool tie = gap < tol.tie;
      if (tie) ++nielsen.ties;
      json rec = {{"suite", "nielsen_tail_sum"}, {"trial", t},
                  {"psi", io::to_json(psi)},     {"phi", io::to_json(phi)},
                  {"nielsen", rep.verdict},      {"tail_sum", direct}};
      if (rep.verdict == direct) {
        ++nielsen.agreements;
      } else if (tie) {
        ties.push_back(rec);
      } else {
        ++nielsen.disagreements;
        hard.push_back(rec);
      }
      if (keep_transcript) trial["nielsen_tail_sum"] = rec;
    }

    // Generator/verifier closure on random profile sets.
    {
      std::mt19937_64 rng(derive_seed(seed, 3 * stream + 2));
      const auto set = random_profile_set(rng);
      json labels = json::array();
      for (const auto& f : set) labels.push_back(f.label);
      json rec = {{"suite", "prop1_closure"}, {"trial", t}, {"profiles", labels}};
      bool ok = false;
      try {
        const auto inst = gen_prop1_instance(set, tol.decision);
        const auto cert = verify_prop1(inst, tol);
        const auto lp = lp_feasible(prop1_problem(inst), tol);
        ok = cert.certified && !lp.verdict;
        rec["instance"] = {{"p1", inst.p1}, {"x1", inst.x1}, {"x2", inst.x2}, {"y", inst.y}};
        rec["certified"] = cert.certified;
        rec["lp"] = lp.verdict;
        if (!cert.failure.empty()) rec["failure"] = cert.failure;
      } catch (const std::exception& e) {
        rec["failure"] = e.what();
      }
      ++closure.trials;
      if (ok) {
        ++closure.agreements;
      } else {
        ++closure.disagreements;
        hard.push_back(rec);
      }
      if (keep_transcript) trial["prop1_closure"] = rec;
    }

    if (keep_transcript) transcript.push_back(trial);
  }

  const bool clean = hard.empty();
  json j;
  j["seed"] = seed;
  j["trials"] = o.trials;
  j["tolerance"] = tol.decision;
  j["suites"] = {{"dist_agreement", dist.summary()},
                 {"nielsen_tail_sum", nielsen.summary()},
                 {"prop1_closure", closure.summary()}};
  j["clean"] = clean;
  j["disagreements"] = hard;
  j["boundary_tie_disagreements"] = ties;
  if (keep_transcript) j["transcript"] = transcript;
  emit(j, o.output);
  return clean ? 0 : 1;
}

int cmd_check(const Options& o) {
  require_files(o, 1, "one report file");
  const auto doc = io::load_document(o.files[0]);
  if (!doc.value.is_object() || !doc.value.contains("instance")) {
    doc.fail("", "report has no 'instance' section");
  }
  DecisionReport rep;
  audit::RawInstance raw;
  try {
    rep = io::report_from_json(doc.value);
    raw = raw_from_json(doc.value.at("instance"));
  } catch (const json::exception& e) {
    throw ValidationError(o.files[0] + ": malformed report: " + e.what());
  }
  const auto a = audit::audit_report(rep, raw);
  emit(json{{"ok", a.ok}, {"message", a.message}});
  return a.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LOCC convertibility deciders and counterexample certificates"};
  app.require_subcommand(1);
  Options o;

  auto* schmidt = app.add_subcommand("schmidt", "Schmidt coefficients of a pure state");
  schmidt->add_option("file", o.files, "state file")->required();

  auto* decide = app.add_subcommand("decide", "Decide LOCC convertibility");
  decide->require_subcommand(1);
  auto* nielsen = decide->add_subcommand("nielsen", "pure state to pure state");
  auto* pte = decide->add_subcommand("pure-to-ensemble", "pure state to ensemble");
  auto* dist = decide->add_subcommand("dist", "two-qubit distribution to distribution");
  auto* lp = decide->add_subcommand("lp", "distribution to distribution by linear programming");
  for (auto* sub : {nielsen, pte, dist, lp}) sub->add_option("files", o.files)->required();
  dist->add_option("--method", o.method, "closed-form | mu-critical | mu-grid | lp")
      ->check(CLI::IsMember({"closed-form", "mu-critical", "mu-grid", "lp"}));
  dist->add_option("--mu-denominator", o.mu_denominator, "denominator bound for mu-grid")
      ->check(CLI::Range(1, 2000));
  for (auto* sub : {dist, lp}) sub->add_flag("--dump-problem", o.dump_problem, "include the LP");

  auto* cex = app.add_subcommand("counterexample", "Generate and certify counterexamples");
  cex->require_subcommand(1);
  auto* prop1 = cex->add_subcommand("prop1", "distribution pair defeating a finite profile set");
  prop1->add_option("--profiles", o.profiles, "profile set file")->required();
  auto* thm1 = cex->add_subcommand("theorem1", "d = 4 mixed/pure pair defeating tail sums");
  thm1->add_option("--p1", o.p1)->required();
  thm1->add_option("--lambda", o.lambda)->required();
  thm1->add_option("--eta", o.eta)->required();
  thm1->add_option("--grid-size", o.grid_size, "uniform mu grid intervals");

  auto* verify = app.add_subcommand("verify", "Randomized cross-validation of the deciders");
  verify->add_option("--trials", o.trials);
  auto* seed_opt = verify->add_option("--seed", o.seed, "root seed (default: $LOCC_SEED or 0)");
  verify->add_option("--tolerance", o.tolerance, "decision tolerance override");
  verify->add_option("--output", o.output, "write the summary here instead of stdout");

  auto* check = app.add_subcommand("check", "Audit a saved decision report");
  check->add_option("file", o.files, "report file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitError;
  }
  o.seed_given = seed_opt->count() > 0;

  try {
    if (*schmidt) return cmd_schmidt(o);
    if (*nielsen) return decide_nielsen(o);
    if (*pte) return decide_pure_to_ensemble(o);
    if (*dist) return decide_dist(o);
    if (*lp) return decide_lp(o);
    if (*prop1) return cmd_prop1(o);
    if (*thm1) return cmd_theorem1(o);
    if (*verify) return cmd_verify(o);
    if (*check) return cmd_check(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
