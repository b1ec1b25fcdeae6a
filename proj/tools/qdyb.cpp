// qdyb: build R-matrices and tensors, run verification suites, replay derivations.
//
// Exit codes: 0 pass, 1 verification failure, 2 usage error or dynamical pole.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>

#include "qdyb/suites.hpp"

using namespace qdyb;
using nlohmann::json;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Everything a run depends on; the seed fixes all random draws.
struct RunConfig {
  std::string command;
  std::string params_file;
  int n = 2;
  std::string q, root, beta, alpha = "unit", preset;
  std::vector<std::string> p;
  std::uint64_t seed = 7;
  int draws = 3, points = 3, k = 6;
  std::string backend = "rational", format = "json", corrupt = "none";
  bool oracle = true, timing = true, extended = true;

  json to_json() const {
    return {{"command", command}, {"params_file", params_file}, {"n", n}, {"q", q}, {"root", root},
            {"beta", beta}, {"alpha", alpha}, {"preset", preset}, {"p", p}, {"seed", seed},
            {"draws", draws}, {"points", points}, {"k", k}, {"backend", backend}, {"format", format},
            {"corrupt", corrupt}, {"oracle", oracle}, {"timing", timing}, {"extended", extended}};
  }
  void merge(const json& j) {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) field = j[key].get<std::decay_t<decltype(field)>>();
    };
    get("params_file", params_file);
    get("n", n);
    get("q", q);
    get("root", root);
    get("beta", beta);
    get("alpha", alpha);
    get("preset", preset);
    get("p", p);
    get("seed", seed);
    get("draws", draws);
    get("points", points);
    get("k", k);
    get("backend", backend);
    get("format", format);
    get("corrupt", corrupt);
    get("oracle", oracle);
    get("timing", timing);
    get("extended", extended);
  }
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
}

// Explicit parameters from a file or flags; nullopt means "draw from the seed".
std::optional<SLnParams<Rational>> explicit_params(const RunConfig& c) {
  if (c.preset == "dj") {
    Rational q = Rational::parse(c.q.empty() ? "2" : c.q);
    std::optional<Rational> r;
    if (!c.root.empty()) r = Rational::parse(c.root);
    QContext<Rational> ctx(q, c.n, r);
    return detail::constant_preset(ctx);
  }
  if (!c.preset.empty()) throw UsageError("unknown preset " + c.preset);
  if (!c.params_file.empty()) return params_from_json(read_json_file(c.params_file));
  if (c.q.empty() && c.beta.empty()) return std::nullopt;
  json j{{"n", c.n}, {"q", c.q.empty() ? "2" : c.q}, {"alpha", c.alpha}};
  if (!c.root.empty()) j["root"] = c.root;
  if (c.beta.empty() || c.beta == "infinite") {
    j["beta"] = "infinite";
  } else {
    std::vector<std::string> parts;
    std::stringstream ss(c.beta);
    for (std::string item; std::getline(ss, item, ',');) parts.push_back(item);
    if (static_cast<int>(parts.size()) == 1 && c.n > 2) parts.assign(c.n - 1, parts[0]);
    j["beta"] = parts;
  }
  return params_from_json(j);
}

std::vector<WeightPoint> explicit_weights(const RunConfig& c, int n) {
  std::vector<WeightPoint> out;
  for (const auto& s : c.p) out.push_back(WeightPoint::parse(n, s));
  return out;
}

SuiteConfig suite_config(const RunConfig& c) {
  SuiteConfig s;
  s.params = explicit_params(c);
  s.n = s.params ? s.params->n() : c.n;
  s.seed = c.seed;
  s.draws = c.draws;
  s.points = c.points;
  s.kmax = c.k;
  s.oracle = c.oracle;
  s.extended = c.extended;
  s.corrupt = parse_corruption(c.corrupt);
  s.weights = explicit_weights(c, s.n);
  return s;
}

template <class F>
Report dispatch_suite(const std::string& suite, const SuiteConfig& s) {
  return run_suite<F>(suite, s);
}

Report run_backend(const RunConfig& c, const std::string& suite, const SuiteConfig& s) {
  if (c.backend == "rational") return dispatch_suite<Rational>(suite, s);
  if (c.backend == "prime") return dispatch_suite<Prime>(suite, s);
  throw UsageError("unknown backend " + c.backend);
}

int emit(const RunConfig& c, const Report& rep) {
  if (c.format == "text") std::cout << rep.to_text();
  else std::cout << rep.to_json(c.timing, c.seed).dump(2) << "\n";
  return rep.passed() ? 0 : 1;
}

// Parameters and one weight for build/dump: explicit or drawn from the seed.
std::pair<SLnParams<Rational>, WeightPoint> one_point(const RunConfig& c) {
  auto P0 = explicit_params(c);
  Sampler S(c.seed);
  auto P = P0 ? *P0 : S.generic(c.n);
  auto ws = explicit_weights(c, P.n());
  WeightPoint p = ws.empty() ? S.pole_free(P, 2) : ws.front();
  return {P, p};
}

json build_objects(const RunConfig& c, const std::string& only = "") {
  auto [P, p] = one_point(c);
  const auto& ctx = P.ctx();
  const int n = P.n();
  json out;
  auto want = [&](const char* key) { return only.empty() || only == key; };
  if (want("params")) out["params"] = params_to_json(P);
  if (want("R")) out["R"] = dump_json(build_dj(ctx));
  if (want("eps")) out["eps"] = {{"upper", eps_const(ctx, true).to_json()}, {"lower", eps_const(ctx, false).to_json()}};
  if (c.preset == "dj") return out;
  out["p"] = p.str();
  if (want("Rp")) out["Rp"] = dump_json(build_dyn(P, p));
  if (want("E"))
    out["E"] = {{"upper", eps_dyn(P, p, true).to_json()}, {"lower", eps_dyn(P, p, false).to_json()}};
  if (want("antisym")) out["antisym"] = dump_json(HeckeRep<Rational>::dynamic(P, p, n).antisym(n));
  return out;
}

int cmd_wznw(const RunConfig& c) {
  auto [P, p] = one_point(c);
  const int n = P.n();
  auto w = WeightVector::from(p);
  auto dv = dvec(p);
  json j{{"n", n}, {"p", p.str()}, {"casimir", rat_str(casimir(w))}};
  for (int i = 0; i < n; ++i) {
    j["d"].push_back(rat_str(dv.closed[i]));
    j["d_by_casimir"].push_back(rat_str(dv.by_casimir[i]));
  }
  bool ok = dv.agree();
  if (P.ctx().has_root()) {
    auto dn = det_normalization(P.ctx());
    j["normalization"] = {{"sym_rank", dn.sym_rank}, {"antisym_rank", dn.antisym_rank},
                          {"product", dn.product}, {"expected", dn.sign}, {"ok", dn.ok}};
    ok = ok && dn.ok;
  } else {
    j["normalization"] = "skipped: no root given";
  }
  auto rc = reconcile_d(P, p);
  j["d_mismatch_is_pi"] = rc.mismatch_is_pi;
  j["d_exact"] = rc.exact;
  ok = ok && rc.mismatch_is_pi;
  if (c.format == "text") {
    std::cout << "C2 = " << j["casimir"].get<std::string>() << "\nd = " << j["d"].dump() << "\n";
    std::cout << "normalization: " << j["normalization"].dump() << "\n";
  } else {
    std::cout << j.dump(2) << "\n";
  }
  return ok ? 0 : 1;
}

int cmd_derive(const RunConfig& c, const std::string& script_path) {
  auto s = suite_config(c);
  if (!script_path.empty()) {
    auto j = read_json_file(script_path);
    s.script = j.is_object() ? j.value("derivations", json::array()) : j;
    if (!s.script.is_array()) throw UsageError("script must be a list of derivations");
  }
  return emit(c, run_backend(c, "qmatrix", s));
}

void add_common(CLI::App* app, RunConfig& c) {
  app->add_option("--params", c.params_file, "parameter file (JSON)");
  app->add_option("--n", c.n, "rank n");
  app->add_option("--q", c.q, "q as num/den");
  app->add_option("--root", c.root, "q^(1/n) as num/den");
  app->add_option("--beta", c.beta, "beta chain, comma separated, or 'infinite'");
  app->add_option("--alpha", c.alpha, "alpha preset: unit | standard");
  app->add_option("--preset", c.preset, "named parameter preset: dj");
  app->add_option("--p", c.p, "weight, e.g. p12=2 (repeatable)");
  app->add_option("--seed", c.seed, "seed for all random draws");
  app->add_option("--draws", c.draws, "parameter draws per suite");
  app->add_option("--points", c.points, "weights per draw");
  app->add_option("--k", c.k, "appendix brute-force size");
  app->add_option("--backend", c.backend, "rational | prime");
  app->add_option("--format", c.format, "json | text");
  app->add_option("--corrupt", c.corrupt, "negative control: broken-beta | wrong-eps-sign | non-unimodular");
  app->add_flag("!--no-oracle", c.oracle, "skip the membership oracle");
  app->add_flag("!--no-timing", c.timing, "omit timing fields");
  app->add_flag("!--basic", c.extended, "skip the slower Hecke checks");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamical R-matrices, Hecke representations and quantum matrix algebras"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string config_file, suite, script, what;

  auto* build = app.add_subcommand("build", "dump R, R(p), tensors and the antisymmetrizer");
  auto* verify = app.add_subcommand("verify", "run a verification suite");
  auto* derive = app.add_subcommand("derive", "replay derivation scripts");
  auto* wznw = app.add_subcommand("wznw", "Casimir, d_j and the determinant normalization");
  auto* dump = app.add_subcommand("dump", "print one object or the resolved config");
  for (auto* sc : {build, verify, derive, wznw, dump}) {
    add_common(sc, cfg);
    sc->add_option("--config", config_file, "run config (JSON)");
  }
  verify->add_option("suite", suite, "params | qdybe | hecke | epsilon | qmatrix | appendix | wznw | all")->required();
  derive->add_option("script", script, "derivation script (JSON); builtins when omitted");
  dump->add_option("what", what, "config | params | R | Rp | eps | E | antisym")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (!config_file.empty()) {
      // flags given on the command line win over the file
      RunConfig from_file;
      from_file.merge(read_json_file(config_file));
      RunConfig defaults;
      auto mine = cfg.to_json(), base = defaults.to_json();
      from_file.command = cfg.command;
      json merged = from_file.to_json();
      for (auto& [key, v] : mine.items())
        if (v != base[key]) merged[key] = v;
      cfg.merge(merged);
    }
    if (build->parsed()) {
      cfg.command = "build";
      std::cout << build_objects(cfg).dump(2) << "\n";
      return 0;
    }
    if (verify->parsed()) {
      cfg.command = "verify";
      return emit(cfg, run_backend(cfg, suite, suite_config(cfg)));
    }
    if (derive->parsed()) {
      cfg.command = "derive";
      return cmd_derive(cfg, script);
    }
    if (wznw->parsed()) {
      cfg.command = "wznw";
      return cmd_wznw(cfg);
    }
    if (dump->parsed()) {
      cfg.command = "dump";
      if (what == "config") {
        std::cout << cfg.to_json().dump(2) << "\n";
        return 0;
      }
      static const std::set<std::string> objects{"params", "R", "Rp", "eps", "E", "antisym"};
      if (!objects.count(what)) throw UsageError("unknown object " + what);
      auto j = build_objects(cfg, what);
      if (!j.contains(what)) throw UsageError(what + " needs dynamical parameters");
      std::cout << j[what].dump(2) << "\n";
      return 0;
    }
  } catch (const DynamicalPole& e) {
    std::cerr << "error: dynamical pole: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
