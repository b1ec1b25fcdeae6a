#pragma once

// JSON derivation scripts for the quantum matrix calculus.
//
// A script lists a start expression, moves, and a claimed end; the optional
// end_moves are applied to the claimed end (equalities run both ways), and an
// optional premultiply list of a-factors is put in front of both sides, which
// is sound once a is known to be invertible.
//
// Labels may carry ranges: "x{1..n}" expands to x1 .. xn, "x{n+1}" to one
// label. Bounds are integers or n, n+c, n-c.

#include <json.hpp>

#include <regex>
#include <sstream>

#include "qdyb/qmatrix.hpp"
#include "qdyb/report.hpp"

namespace qdyb {

inline int script_int(const nlohmann::json& j, int n) {
  if (j.is_number_integer()) return j.get<int>();
  std::string s = j.get<std::string>();
  s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
  int sign = 1;
  if (!s.empty() && s[0] == '-') {
    sign = -1;
    s = s.substr(1);
  }
  static const std::regex re(R"(^(n|\d+)([+-]\d+)?$)");
  std::smatch m;
  if (!std::regex_match(s, m, re)) throw DomainError("bad integer expression: " + s);
  int base = m[1] == "n" ? n : std::stoi(m[1]);
  if (m[2].matched) base += std::stoi(m[2]);
  return sign * base;
}

inline std::vector<std::string> expand_labels(const std::string& s, int n) {
  static const std::regex re(R"(^([A-Za-z_]\w*?)\{([^.}]+)(?:\.\.([^}]+))?\}$)");
  std::smatch m;
  if (!std::regex_match(s, m, re)) return {s};
  int a = script_int(nlohmann::json(m[2].str()), n);
  int b = m[3].matched ? script_int(nlohmann::json(m[3].str()), n) : a;
  std::vector<std::string> out;
  for (int x = a; x <= b; ++x) out.push_back(m[1].str() + std::to_string(x));
  return out;
}

inline std::vector<std::string> expand_label_list(const nlohmann::json& j, int n) {
  std::vector<std::string> out;
  if (j.is_string()) return expand_labels(j.get<std::string>(), n);
  for (const auto& e : j) {
    auto v = expand_labels(e.get<std::string>(), n);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

// Named scalar-valued functions of p available to scripts.
template <class F>
std::function<F(const WeightPoint&)> script_function(const SLnParams<F>& P, const nlohmann::json& spec) {
  const int n = P.n();
  if (spec.is_string()) {
    auto s = spec.get<std::string>();
    if (s == "q^p12") return [P](const WeightPoint& p) { return P.ctx().qpow(p.pdiff(0, 1)); };
    if (s == "f12") return [P](const WeightPoint& p) { return P.fval(0, 1, p.pdiff(0, 1)); };
    if (s == "U") return [P](const WeightPoint& p) { return u_function(P, p); };
    throw DomainError("unknown function " + s);
  }
  // {"random": seed}: prod_{i<j} q^{c_ij p_ij} f(p_ij)^{e_ij} with small random exponents
  std::mt19937_64 rng(spec.at("random").get<std::uint64_t>());
  std::vector<std::tuple<int, int, long, long>> terms;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      terms.emplace_back(i, j, std::uniform_int_distribution<long>(-2, 2)(rng),
                         std::uniform_int_distribution<long>(-1, 1)(rng));
  return [P, terms](const WeightPoint& p) {
    F v(1);
    for (auto [i, j, c, e] : terms) v *= P.ctx().qpow(c * p.pdiff(i, j)) * power(P.fval(i, j, p.pdiff(i, j)), e);
    return v;
  };
}

template <class F>
F script_scalar(const Calculus<F>& C, const nlohmann::json& j) {
  const int n = C.n();
  const auto& ctx = C.ctx();
  auto s = j.get<std::string>();
  if (s == "1/[n]!") return F(1) / ctx.qfact(n);
  if (s == "[n]!") return ctx.qfact(n);
  if (s == "q") return ctx.q();
  if (s == "qbar") return ctx.qbar();
  if (s == "q^(2/n)") return ctx.root_pow(2);
  if (s == "q^(-2/n)") return ctx.root_pow(-2);
  return F::from_mpq(Rational::parse(s).mpq());
}

template <class F>
SlotExpr<F> script_factor(Calculus<F>& C, const nlohmann::json& f) {
  const int n = C.n();
  if (!f.is_object() || f.size() != 1) throw DomainError("factor must be a one-key object: " + f.dump());
  const auto& [key, val] = *f.items().begin();
  auto labels = [&](std::size_t want) {
    auto v = expand_label_list(val, n);
    if (want && v.size() != want) throw DomainError(key + " expects " + std::to_string(want) + " labels");
    return v;
  };
  if (key == "a") {
    if (!val.is_array() || val.size() != 2) throw DomainError("a expects [i-labels, alpha-labels]");
    auto is = expand_label_list(val[0], n), as = expand_label_list(val[1], n);
    if (is.size() != as.size()) throw DomainError("a label ranges differ in length");
    std::vector<SlotExpr<F>> fs;
    for (std::size_t m = 0; m < is.size(); ++m) fs.push_back(expr_a(C, is[m], as[m]));
    return product(C, fs);
  }
  if (key == "ainv") {
    auto l = labels(2);
    return expr_ainv(C, l[0], l[1]);
  }
  if (key == "M") {
    auto l = labels(2);
    return expr_M(C, l[0], l[1]);
  }
  if (key == "det") return expr_det(C, val.get<int>());
  if (key == "E_lo" || key == "E_up") return expr_E(C, labels(n), key == "E_up");
  if (key == "eps_lo" || key == "eps_up") return expr_eps(C, labels(n), key == "eps_up");
  if (key == "K" || key == "K_inv") {
    auto l = labels(2);
    return expr_K(C, l[0], l[1], key == "K" ? 1 : -1);
  }
  if (key == "N") {
    auto l = labels(2);
    return expr_N(C, l[0], l[1]);
  }
  if (key == "D" || key == "D_inv") {
    if (!C.ctx().has_root()) throw DomainError("D needs q^(1/n): give a context root");
    auto l = labels(2);
    return expr_D(C, l[0], l[1], key == "D" ? 1 : -1);
  }
  if (key == "h") return expr_scalar_fn<F>(C, script_function(C.params(), val));
  if (key == "R" || key == "R_inv") return expr_Rc(C, labels(4), key == "R_inv");
  if (key == "delta_i" || key == "delta_a") {
    auto l = labels(2);
    return expr_delta(C, l[0], l[1], key == "delta_a");
  }
  if (key == "scalar") return expr_scalar(C, script_scalar(C, val));
  throw DomainError("unknown factor " + key);
}

template <class F>
SlotExpr<F> script_product(Calculus<F>& C, const nlohmann::json& list) {
  std::vector<SlotExpr<F>> fs;
  for (const auto& f : list) fs.push_back(script_factor(C, f));
  return product(C, fs);
}

inline std::vector<int> script_word(const nlohmann::json& m, int n) {
  std::vector<int> w;
  if (m.contains("word"))
    for (const auto& l : m["word"]) w.push_back(script_int(l, n));
  if (m.contains("chain")) {
    int a = script_int(m["chain"][0], n), b = script_int(m["chain"][1], n);
    for (int x = a;; x += (b >= a ? 1 : -1)) {
      w.push_back(x);
      if (x == b) break;
    }
  }
  return w;
}

template <class F>
SlotExpr<F> apply_move(const Calculus<F>& C, const SlotExpr<F>& e, const nlohmann::json& m) {
  const int n = C.n();
  auto kind = m.at("move").get<std::string>();
  if (kind == "IntertwineRL" || kind == "IntertwineLR") return move_intertwine(C, e, script_word(m, n), kind == "IntertwineRL");
  if (kind == "AbsorbLR" || kind == "AbsorbRL") {
    int i = script_int(m.at("window")[0], n), j = script_int(m.at("window")[1], n);
    return move_absorb(C, e, i, j, kind == "AbsorbLR");
  }
  if (kind == "DetFold") return move_fold(C, e, script_int(m.at("at"), n), FoldKind::Definition);
  if (kind == "EpsCollapseLeft") return move_fold(C, e, script_int(m.at("at"), n), FoldKind::CollapseLeft);
  if (kind == "EpsCollapseRight") return move_fold(C, e, script_int(m.at("at"), n), FoldKind::CollapseRight);
  if (kind == "DetExpand") return move_expand(C, e);
  if (kind == "Simplify") return e;  // products are normalized on construction
  throw MoveError("unknown move " + kind);
}

struct ReplayResult {
  std::string id;
  bool ok = false;
  std::string message;  // failure reason naming the step
  std::optional<Verdict> oracle;
};

// Replays one derivation; certificates it establishes are added to C.certified.
template <class F>
ReplayResult replay(Calculus<F>& C, const nlohmann::json& d, bool run_oracle) {
  ReplayResult r;
  r.id = d.value("id", std::string("unnamed"));
  auto fail = [&](std::string msg) {
    r.ok = false;
    r.message = std::move(msg);
    return r;
  };
  try {
    if (d.value("needs_root", false) && !C.ctx().has_root()) return fail("needs q^(1/n) in the context");
    auto start = script_product(C, d.at("start"));
    auto end = script_product(C, d.at("end"));
    std::set<std::string> uses = start.uses;
    uses.insert(end.uses.begin(), end.uses.end());
    if (run_oracle) r.oracle = membership_oracle(C, start, end);

    if (d.contains("premultiply")) {
      for (const auto& f : d["premultiply"])
        if (!f.is_object() || !f.contains("a")) return fail("premultiply must be a product of a's");
      auto pre = script_product(C, d["premultiply"]);
      uses.insert("a-inverse");
      start = multiply(C, pre, start);
      end = multiply(C, pre, end);
    }
    auto run = [&](SlotExpr<F> e, const char* field) -> std::optional<SlotExpr<F>> {
      if (!d.contains(field)) return e;
      int step = 0;
      for (const auto& m : d[field]) {
        ++step;
        try {
          e = apply_move(C, e, m);
          uses.insert(e.uses.begin(), e.uses.end());
        } catch (const std::exception& ex) {
          r.message = std::string(field) + " step " + std::to_string(step) + " (" + m.value("move", "?") + "): " + ex.what();
          return std::nullopt;
        }
      }
      return e;
    };
    auto s = run(start, "moves");
    if (!s) return fail(r.message);
    auto e = run(end, "end_moves");
    if (!e) return fail(r.message);
    for (const auto& u : uses)
      if (!C.certified.count(u) && u != d.value("establishes", std::string())) return fail("relies on uncertified " + u);
    if (auto diff = compare_exprs(C, *s, *e)) return fail("endpoint mismatch: " + *diff);
    r.ok = true;
    if (d.contains("establishes")) C.certified.insert(d["establishes"].get<std::string>());
  } catch (const std::exception& ex) {
    return fail(std::string("setup: ") + ex.what());
  }
  return r;
}

// Built-in derivations in dependency order.
inline const char* builtin_derivations_json() {
  return R"JSON([
  {"id": "det-fold-lower", "summary": "E_(p) a_1..a_n = det(a) eps_", "establishes": "det-fold",
   "start": [{"E_lo": ["i{1..n}"]}, {"a": ["i{1..n}", "x{1..n}"]}],
   "moves": [{"move": "AbsorbLR", "window": [1, "n"]}, {"move": "DetFold", "at": 1}],
   "end": [{"det": 1}, {"eps_lo": ["x{1..n}"]}]},
  {"id": "det-fold-upper", "summary": "a_1..a_n eps^ = E^(p) det(a)", "establishes": "det-fold",
   "start": [{"a": ["i{1..n}", "x{1..n}"]}, {"eps_up": ["x{1..n}"]}],
   "moves": [{"move": "AbsorbRL", "window": [1, "n"]}, {"move": "DetFold", "at": 1}],
   "end": [{"E_up": ["i{1..n}"]}, {"det": 1}]},
  {"id": "det-commutes-p-q^p12", "summary": "det(a) h(p) = h(p) det(a), h = q^p12", "establishes": "det-commutes-p",
   "start": [{"scalar": "1/[n]!"}, {"E_lo": ["i{1..n}"]}, {"a": ["i{1..n}", "x{1..n}"]}, {"h": "q^p12"}, {"eps_up": ["x{1..n}"]}],
   "moves": [{"move": "DetFold", "at": 1}],
   "end": [{"h": "q^p12"}, {"det": 1}]},
  {"id": "det-commutes-p-f12", "summary": "det(a) h(p) = h(p) det(a), h = f(p12)", "establishes": "det-commutes-p",
   "start": [{"scalar": "1/[n]!"}, {"E_lo": ["i{1..n}"]}, {"a": ["i{1..n}", "x{1..n}"]}, {"h": "f12"}, {"eps_up": ["x{1..n}"]}],
   "moves": [{"move": "DetFold", "at": 1}],
   "end": [{"h": "f12"}, {"det": 1}]},
  {"id": "det-commutes-p-random", "summary": "det(a) h(p) = h(p) det(a), h a random shiftable product", "establishes": "det-commutes-p",
   "start": [{"scalar": "1/[n]!"}, {"E_lo": ["i{1..n}"]}, {"a": ["i{1..n}", "x{1..n}"]}, {"h": {"random": 17}}, {"eps_up": ["x{1..n}"]}],
   "moves": [{"move": "DetFold", "at": 1}],
   "end": [{"h": {"random": 17}}, {"det": 1}]},
  {"id": "det-exchange-a", "summary": "det(a) a = K(p) a det(a)", "establishes": "det-exchange-a",
   "start": [{"scalar": "1/[n]!"}, {"E_lo": ["i{1..n}"]}, {"a": ["i{1..n+1}", "x{1..n+1}"]}, {"eps_up": ["x{1..n}"]}],
   "moves": [{"move": "IntertwineRL", "chain": ["n", 1]}, {"move": "DetFold", "at": 2}],
   "end": [{"K": ["i{n+1}", "y"]}, {"a": ["y", "x{n+1}"]}, {"det": 1}]},
  {"id": "a-inverse-left", "summary": "a^{-1} a = 1", "establishes": "a-inverse",
   "start": [{"ainv": ["u", "j"]}, {"a": ["j", "v"]}],
   "moves": [{"move": "EpsCollapseLeft", "at": 1}],
   "end": [{"delta_a": ["u", "v"]}]},
  {"id": "a-inverse-right", "summary": "a a^{-1} = 1", "establishes": "a-inverse",
   "start": [{"a": ["i", "u"]}, {"ainv": ["u", "j"]}],
   "moves": [{"move": "AbsorbRL", "window": [1, "n"]}, {"move": "EpsCollapseRight", "at": 1}],
   "end": [{"delta_i": ["i", "j"]}]},
  {"id": "central-p", "summary": "Delta = U(p) det(a) commutes with functions of p", "establishes": "central",
   "start": [{"h": "U"}, {"det": 1}, {"h": {"random": 29}}],
   "end": [{"h": {"random": 29}}, {"h": "U"}, {"det": 1}]},
  {"id": "central-a", "summary": "Delta = U(p) det(a) commutes with a", "establishes": "central",
   "start": [{"h": "U"}, {"det": 1}, {"a": ["i", "x"]}],
   "end": [{"a": ["i", "x"]}, {"h": "U"}, {"det": 1}]},
  {"id": "m-matrix-commute", "summary": "[D_2, M_1] = 0", "needs_root": true, "establishes": "m-matrix",
   "start": [{"M": ["r1", "c1"]}, {"D": ["r2", "c2"]}],
   "end": [{"D": ["r2", "c2"]}, {"M": ["r1", "c1"]}]},
  {"id": "m-matrix-exchange", "summary": "M_1 a_2 = q^(2/n) a_2 R^-1 M_2 R^-1", "needs_root": true, "establishes": "m-matrix",
   "premultiply": [{"a": ["i0", "r1"]}],
   "start": [{"M": ["r1", "c1"]}, {"a": ["r2", "c2"]}],
   "moves": [{"move": "AbsorbRL", "window": [1, "n"]}, {"move": "EpsCollapseRight", "at": 1},
             {"move": "IntertwineRL", "word": [1]}],
   "end": [{"scalar": "q^(2/n)"}, {"a": ["r2", "m2"]}, {"R_inv": ["r1", "m2", "n1", "n2"]}, {"M": ["n2", "o2"]},
           {"R_inv": ["n1", "o2", "c1", "c2"]}],
   "end_moves": [{"move": "IntertwineRL", "word": [-1]}, {"move": "AbsorbRL", "window": [2, "n+1"]},
                 {"move": "EpsCollapseRight", "at": 2}]},
  {"id": "m-matrix-reflection", "summary": "M_2 R^-1 M_2 R^-1 = R^-1 M_2 R^-1 M_2", "needs_root": true, "establishes": "m-matrix",
   "premultiply": [{"a": ["i1", "a1"]}, {"a": ["i2", "a2"]}],
   "start": [{"M": ["a2", "b2"]}, {"R_inv": ["a1", "b2", "c1", "c2"]}, {"M": ["c2", "d2"]}, {"R_inv": ["c1", "d2", "e1", "e2"]}],
   "moves": [{"move": "AbsorbRL", "window": [2, "n+1"]}, {"move": "EpsCollapseRight", "at": 2},
             {"move": "IntertwineRL", "word": [-1]},
             {"move": "AbsorbRL", "window": [2, "n+1"]}, {"move": "EpsCollapseRight", "at": 2},
             {"move": "IntertwineRL", "word": [-1]}],
   "end": [{"R_inv": ["a1", "a2", "b1", "b2"]}, {"M": ["b2", "c2"]}, {"R_inv": ["b1", "c2", "e1", "d2"]}, {"M": ["d2", "e2"]}],
   "end_moves": [{"move": "IntertwineRL", "word": [-1]},
                 {"move": "AbsorbRL", "window": [2, "n+1"]}, {"move": "EpsCollapseRight", "at": 2},
                 {"move": "IntertwineRL", "word": [-1]},
                 {"move": "AbsorbRL", "window": [2, "n+1"]}, {"move": "EpsCollapseRight", "at": 2}]}
])JSON";
}

inline nlohmann::json builtin_derivations() { return nlohmann::json::parse(builtin_derivations_json()); }

// Runs a list of derivations in order; with run_oracle the membership oracle
// independently compares each start with its claimed end.
template <class F>
Report run_derivations(Calculus<F>& C, const nlohmann::json& list, bool run_oracle, const std::string& backend) {
  Report rep("qmatrix");
  for (const auto& d : list) {
    ReplayResult res;
    std::string id = d.value("id", std::string("unnamed"));
    rep.check("qmatrix/" + id, d.value("summary", id), backend, [&]() -> std::optional<std::string> {
      res = replay(C, d, run_oracle);
      if (!res.ok) return res.message;
      return std::nullopt;
    });
    if (run_oracle && res.oracle) {
      rep.check("qmatrix/" + id + "/oracle", "relation-span membership of the endpoints", backend,
                [&]() -> std::optional<std::string> {
                  if (*res.oracle == Verdict::Equal) return std::nullopt;
                  return std::string("oracle verdict: ") + verdict_name(*res.oracle);
                });
    }
  }
  return rep;
}

}  // namespace qdyb
