// symconj: command-line front end.
//
//   symconj analyze A.json
//   symconj compare A.json B.json
//   symconj verify  A.json B.json h.json hinv.json
//   symconj psi     A.json B.json h.json f.json
//   symconj split   A.json [--seed N] [--write-prefix P]
//
// Exit codes: 0 definite result, 1 parse/validation/compile error,
// 2 undecided at the configured bounds, 3 inverse-pair verification failed.

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "symconj/json_io.hpp"
#include "symconj/symconj.hpp"

namespace {

using namespace symconj;
using io::json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitUndecided = 2;
constexpr int kExitNotInverse = 3;

struct RunConfig {
  int depth = 8;
  int max_pre = 3;
  int max_cyc = 4;
  int max_window = 4;
  int horizon = 2;
  std::string format = "json";
  std::uint32_t seed = 1;
  std::size_t search_budget = 200000;

  OrbitParams orbit() const { return OrbitParams{depth, max_pre, max_cyc, horizon}; }
  bool text() const { return format == "text"; }
};

struct Failure {
  int code;
  std::string message;
};

SpacePtr load_space(const std::string& path) {
  return build_shift_space(io::matrix_from_json(io::read_json_file(path)));
}

std::string group_string(const std::vector<BigInt>& factors) {
  if (factors.empty()) return "trivial";
  std::string s;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (i) s += " + ";
    s += factors[i] == 0 ? std::string("Z") : "Z/" + factors[i].str();
  }
  return s;
}

std::string sign_string(int s) { return s > 0 ? "+1" : (s < 0 ? "-1" : "0"); }

// "1,2 (2,1)^inf", or "(2,1)^inf" when purely periodic.
std::string point_string(const Point& p) {
  return (p.pre.empty() ? "" : format_word(p.pre) + " ") + "(" + format_word(p.cyc) + ")^inf";
}

void print_function_text(std::ostream& out, const CylinderFunction& f) {
  const auto& ws = f.space()->words(f.depth());
  for (std::size_t i = 0; i < ws.size(); ++i) out << "  " << format_word(ws[i]) << ": " << f.values()[i] << "\n";
}

// ---------------------------------------------------------------------------

int cmd_analyze(const std::string& path, const RunConfig& cfg) {
  const SpacePtr s = load_space(path);
  const auto& m = s->matrix();
  const InvariantReport r = invariants(m);
  json words = json::array();
  for (int d = 1; d <= 4; ++d) words.push_back(s->words(d).size());
  json periodic = json::array();
  for (int n = 1; n <= 6; ++n)
    periodic.push_back(json{{"n", n}, {"trace", static_cast<long long>(trace_power(m, n))}, {"points", count_periodic_points(*s, n)}});
  if (cfg.text()) {
    std::cout << "irreducible, non-permutation; BF " << group_string(r.bf) << "; detSign " << sign_string(r.det_sign) << "\n";
    std::cout << "states: " << m.size() << "\n";
    std::cout << "allowed words (depth 1..4):";
    for (const auto& w : words) std::cout << " " << w.get<std::size_t>();
    std::cout << "\nperiodic points, trace(A^n) for n = 1..6:";
    for (const auto& p : periodic) std::cout << " " << p["trace"].get<long long>();
    std::cout << "\nK0: " << group_string(r.k0) << "; K1 rank: " << r.k1_rank << "\n";
    return kExitOk;
  }
  json out;
  out["matrix"] = io::to_json(m);
  out["irreducible"] = true;
  out["permutation"] = false;
  out["words"] = words;
  out["periodic"] = periodic;
  out["invariants"] = io::to_json(r);
  std::cout << io::dump(out);
  return kExitOk;
}

int cmd_compare(const std::string& a_path, const std::string& b_path, const RunConfig& cfg) {
  const SpacePtr a = load_space(a_path);
  const SpacePtr b = load_space(b_path);
  const ObstructionReport rep = obstruction_report(a->matrix(), b->matrix());
  std::optional<bool> decided;
  if (a->alphabet() <= kMaxDecideStates && b->alphabet() <= kMaxDecideStates)
    decided = decide_one_sided_conjugacy(a->matrix(), b->matrix());
  ConjugacySearch search;
  const bool run_search = !rep.coe_ruled_out && decided.value_or(true);
  if (run_search) search = search_conjugacy(a, b, cfg.max_window, cfg.search_budget);

  const bool findings = rep.coe_ruled_out || decided.has_value() || search.h.has_value();
  if (cfg.text()) {
    if (rep.coe_ruled_out)
      std::cout << "ruled out: COE and below (" << rep.reason << ")\n";
    else
      std::cout << "no obstruction found (equal Bowen-Franks groups and det signs)\n";
    std::cout << "one-sided conjugate: " << (decided ? (*decided ? "true" : "false") : "undecided (too many states)") << "\n";
    if (search.h)
      std::cout << "block-code conjugacy found: window " << search.h->window() << ", inverse window " << search.h_inv->window() << "\n";
    else if (run_search)
      std::cout << "no block-code conjugacy with window <= " << cfg.max_window << (search.exhausted ? "" : " (search budget hit)") << "\n";
    return findings ? kExitOk : kExitUndecided;
  }
  json out = io::to_json(rep);
  out["oneSidedConjugate"] = decided ? json(*decided) : json(nullptr);
  json sj;
  sj["ran"] = run_search;
  sj["found"] = search.h.has_value();
  sj["exhausted"] = search.exhausted;
  sj["maxWindow"] = cfg.max_window;
  sj["h"] = search.h ? io::to_json(*search.h) : json(nullptr);
  sj["hInv"] = search.h_inv ? io::to_json(*search.h_inv) : json(nullptr);
  out["search"] = sj;
  std::cout << io::dump(out);
  return findings ? kExitOk : kExitUndecided;
}

int cmd_verify(const std::string& a_path, const std::string& b_path, const std::string& h_path, const std::string& inv_path,
               const RunConfig& cfg) {
  const SpacePtr a = load_space(a_path);
  const SpacePtr b = load_space(b_path);
  const ShiftMap h = io::map_from_json(a, b, io::read_json_file(h_path));
  const ShiftMap h_inv = io::map_from_json(b, a, io::read_json_file(inv_path));
  const InverseCheck inv = verify_inverse_pair(h, h_inv, cfg.max_pre, cfg.max_cyc);
  if (!inv.ok) {
    if (cfg.text()) {
      std::cout << "inverse pair check failed at " << (inv.witness_in_target ? "target" : "source") << " point "
                << point_string(*inv.witness) << "\n";
    } else {
      json out{{"inversePair", false}, {"witness", io::to_json(*inv.witness)}};
      out["witness"]["space"] = inv.witness_in_target ? "target" : "source";
      std::cout << io::dump(out);
    }
    return kExitNotInverse;
  }
  const Verdict v = classify(h, h_inv, cfg.orbit());  // InconsistentRoutes exits 1 below
  if (cfg.text()) {
    std::cout << "verdict: " << to_string(v.rung);
    if (v.lag) std::cout << " (K = " << *v.lag << ")";
    std::cout << "\n";
    if (v.forward) {
      std::cout << "forward cocycle k:\n";
      print_function_text(std::cout, v.forward->k);
      std::cout << "forward cocycle l:\n";
      print_function_text(std::cout, v.forward->l);
    }
    std::cout << "routes: direct " << (v.route_direct ? "holds" : "fails") << ", theorem " << (v.route_theorem ? "holds" : "fails")
              << "\n";
    if (v.psi_equals_pullback) std::cout << "Psi_h(f) = f o h: " << (*v.psi_equals_pullback ? "true" : "false") << "\n";
    if (v.witness_indicator)
      std::cout << "separating indicator: " << format_word(*v.witness_indicator) << " at "
                << point_string(*v.witness_indicator_point) << "\n";
    if (v.witness)
      std::cout << "witness (" << (v.witness_in_target ? "target" : "source") << "): " << point_string(*v.witness) << "\n";
    if (!v.strong.empty()) std::cout << "strong COE: " << v.strong << "\n";
    if (!v.note.empty()) std::cout << "note: " << v.note << "\n";
  } else {
    std::cout << io::dump(io::to_json(v));
  }
  return v.rung == Rung::Undecided ? kExitUndecided : kExitOk;
}

int cmd_psi(const std::string& a_path, const std::string& b_path, const std::string& h_path, const std::string& f_path,
            const RunConfig& cfg) {
  const SpacePtr a = load_space(a_path);
  const SpacePtr b = load_space(b_path);
  const ShiftMap h = io::map_from_json(a, b, io::read_json_file(h_path));
  const CylinderFunction f = io::function_from_json(b, io::read_json_file(f_path));
  const OrbitParams params = cfg.orbit();
  std::optional<CylinderFunction> value;
  std::optional<OrbitCocyclePair> kl;
  try {
    kl = find_orbit_cocycles(h, params);
    PsiEvaluator eval(h, *kl, params);
    value = eval(f);
  } catch (const WitnessError& e) {
    throw Failure{kExitError, std::string(e.what()) + "; Psi_h is undefined"};
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NotConstantOnCylinders) throw;
    if (cfg.text())
      std::cout << "undecided: " << e.what() << "\n";
    else
      std::cout << io::dump(json{{"error", "NotConstantOnCylinders"}, {"message", e.what()}, {"depth", cfg.depth}});
    return kExitUndecided;
  }
  std::optional<CylinderFunction> pb;
  try {
    pb = pullback(f, h, std::max(cfg.depth, f.depth()));
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::DepthOverflow) throw;
  }
  const char* equal = !pb ? nullptr : (*pb == *value ? "true" : "false");
  if (cfg.text()) {
    std::cout << "Psi_h(f) at depth " << value->depth() << ":\n";
    print_function_text(std::cout, *value);
    std::cout << "Psi_h(f) = f o h: " << (equal ? equal : "unknown (f o h deeper than --depth)") << "\n";
    return kExitOk;
  }
  json out;
  out["cocycles"] = io::to_json(*kl);
  out["psi"] = io::to_json(*value);
  out["pullback"] = pb ? io::to_json(*pb) : json(nullptr);
  out["psiEqualsPullback"] = equal ? json(std::string(equal) == "true") : json(nullptr);
  std::cout << io::dump(out);
  return kExitOk;
}

int cmd_split(const std::string& path, const std::string& prefix, const RunConfig& cfg) {
  const SpacePtr s = load_space(path);
  std::mt19937 rng(cfg.seed);
  const int cap = std::min(2 * s->alphabet(), kMaxDecideStates);
  const SplitPartition part = random_split_partition(*s, rng, cap);
  const OutSplit split = out_split(s, part);
  json partition = json::array();
  for (const auto& blocks : part) {
    json bs = json::array();
    for (const auto& blk : blocks) {
      json b = json::array();
      for (Symbol x : blk) b.push_back(x + 1);
      bs.push_back(b);
    }
    partition.push_back(bs);
  }
  const json matrix = io::to_json(split.split->matrix());
  const json h = io::to_json(split.h);
  const json h_inv = io::to_json(split.h_inv);
  if (!prefix.empty()) {
    for (const auto& [suffix, j] : {std::pair{".matrix.json", matrix}, std::pair{".map.json", h}, std::pair{".inv.json", h_inv}}) {
      std::ofstream f(prefix + suffix);
      if (!f) throw Failure{kExitError, "cannot write " + prefix + suffix};
      f << io::dump(j);
    }
  }
  if (cfg.text()) {
    std::cout << "split into " << split.split->alphabet() << " states (seed " << cfg.seed << "):\n";
    for (const auto& row : split.split->matrix().rows()) {
      std::cout << " ";
      for (int v : row) std::cout << " " << v;
      std::cout << "\n";
    }
    return kExitOk;
  }
  std::cout << io::dump(json{{"seed", cfg.seed}, {"partition", partition}, {"matrix", matrix}, {"h", h}, {"hInv", h_inv}});
  return kExitOk;
}

void add_common_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--depth", cfg.depth, "cylinder depth cap for cocycles, Psi and transfers")
      ->check(CLI::Range(1, kMaxDepth))
      ->capture_default_str();
  sub->add_option("--max-pre", cfg.max_pre, "preperiod bound of the test point family")
      ->check(CLI::Range(0, kMaxDepth))
      ->capture_default_str();
  sub->add_option("--max-cyc", cfg.max_cyc, "cycle-length bound of the test point family")
      ->check(CLI::Range(1, kMaxDepth))
      ->capture_default_str();
  sub->add_option("--max-window", cfg.max_window, "largest block-code window searched")
      ->check(CLI::Range(1, kMaxDepth))
      ->capture_default_str();
  sub->add_option("--horizon", cfg.horizon, "alignment horizon multiplier")->check(CLI::Range(0, 16))->capture_default_str();
  sub->add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();
  sub->add_option("--seed", cfg.seed, "seed for randomized generation")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conjugacy, eventual conjugacy and continuous orbit equivalence checks for one-sided shifts of finite type"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string a, b, h, inv, f, prefix;

  auto* analyze = app.add_subcommand("analyze", "validate a matrix and print its invariants");
  analyze->add_option("matrix", a, "matrix JSON")->required();
  auto* compare = app.add_subcommand("compare", "invariant obstructions, one-sided decision and block-code search");
  compare->add_option("a", a, "matrix JSON")->required();
  compare->add_option("b", b, "matrix JSON")->required();
  auto* verify = app.add_subcommand("verify", "classify a homeomorphism given with its inverse");
  verify->add_option("a", a, "source matrix JSON")->required();
  verify->add_option("b", b, "target matrix JSON")->required();
  verify->add_option("map", h, "map JSON")->required();
  verify->add_option("inverse", inv, "inverse map JSON")->required();
  auto* psi_cmd = app.add_subcommand("psi", "evaluate Psi_h on a potential");
  psi_cmd->add_option("a", a, "source matrix JSON")->required();
  psi_cmd->add_option("b", b, "target matrix JSON")->required();
  psi_cmd->add_option("map", h, "map JSON")->required();
  psi_cmd->add_option("function", f, "function JSON over the target")->required();
  auto* split = app.add_subcommand("split", "random out-splitting with its conjugacy pair");
  split->add_option("matrix", a, "matrix JSON")->required();
  split->add_option("--write-prefix", prefix, "also write PREFIX.matrix.json, PREFIX.map.json, PREFIX.inv.json");
  for (auto* sub : {analyze, compare, verify, psi_cmd, split}) add_common_options(sub, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(a, cfg);
    if (compare->parsed()) return cmd_compare(a, b, cfg);
    if (verify->parsed()) return cmd_verify(a, b, h, inv, cfg);
    if (psi_cmd->parsed()) return cmd_psi(a, b, h, f, cfg);
    if (split->parsed()) return cmd_split(a, prefix, cfg);
  } catch (const Failure& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
