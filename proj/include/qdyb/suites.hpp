#pragma once

// Verification suites shared by the command line tool and the acceptance run.
// Every suite draws its inputs from a seeded Sampler, so a config fixes the
// report up to timing fields.

#include "qdyb/derivation.hpp"
#include "qdyb/levi_civita.hpp"
#include "qdyb/wznw.hpp"

namespace qdyb {

enum class Corruption { None, BrokenBeta, WrongEpsSign, NonUnimodular };

inline Corruption parse_corruption(const std::string& s) {
  if (s.empty() || s == "none") return Corruption::None;
  if (s == "broken-beta") return Corruption::BrokenBeta;
  if (s == "wrong-eps-sign") return Corruption::WrongEpsSign;
  if (s == "non-unimodular") return Corruption::NonUnimodular;
  throw DomainError("unknown corruption " + s);
}

inline const char* corruption_name(Corruption c) {
  switch (c) {
    case Corruption::None: return "none";
    case Corruption::BrokenBeta: return "broken-beta";
    case Corruption::WrongEpsSign: return "wrong-eps-sign";
    case Corruption::NonUnimodular: return "non-unimodular";
  }
  return "?";
}

struct SuiteConfig {
  int n = 2;
  std::uint64_t seed = 7;
  int draws = 3;
  int points = 3;
  int kmax = 6;  // appendix brute force
  bool oracle = true;
  bool extended = true;  // hecke: also the slower antisymmetrizer, expansion and automorphism checks
  Corruption corrupt = Corruption::None;
  std::optional<SLnParams<Rational>> params;  // fixed parameters instead of draws
  std::vector<WeightPoint> weights;           // fixed weights instead of draws
  nlohmann::json script;                      // derivations; null selects the builtins
};

// Corruptions each suite understands; anything else is a usage error.
inline std::set<Corruption> suite_corruptions(const std::string& suite) {
  if (suite == "params" || suite == "qdybe" || suite == "hecke" || suite == "appendix") return {Corruption::BrokenBeta};
  if (suite == "epsilon") return {Corruption::WrongEpsSign};
  if (suite == "qmatrix" || suite == "wznw") return {Corruption::NonUnimodular};
  return {};
}

namespace detail {

inline std::string tag(int n, int draw) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "n%d/draw%02d", n, draw);
  return buf;
}

// beta_21 moved off lambda - beta_12
template <class F>
SLnParams<F> broken_beta(SLnParams<F> P) {
  P.corrupt_beta(1, 0, P.beta(1, 0) + F(1));
  return P;
}

struct Draw {
  SLnParams<Rational> params;
  std::vector<WeightPoint> weights;
};

inline std::vector<Draw> draws(const SuiteConfig& cfg, int n, int reach, std::uint64_t salt = 0) {
  Sampler S(cfg.seed * 1000003 + salt * 7919 + n);
  std::vector<Draw> out;
  int count = cfg.params ? 1 : cfg.draws;
  for (int d = 0; d < count; ++d) {
    auto P = cfg.params ? *cfg.params : S.generic(n);
    std::vector<WeightPoint> ws = cfg.weights;
    if (ws.empty())
      for (int t = 0; t < cfg.points; ++t) ws.push_back(S.pole_free(P, reach));
    out.push_back({P, ws});
  }
  return out;
}

template <class F>
SLnParams<F> lift(const SLnParams<Rational>& P) {
  if constexpr (std::is_same_v<F, Rational>) return P;
  else return P.template map_to<F>();
}

// First witness over all weights of a draw.
template <class Fn>
std::optional<std::string> over(const std::vector<WeightPoint>& ws, Fn&& fn) {
  for (const auto& p : ws)
    if (auto w = fn(p)) return "at " + p.str() + ": " + *w;
  return std::nullopt;
}

// alpha_ij = q for i < j with the all-lambda chain: the standard constant R-matrix.
template <class F>
SLnParams<F> constant_preset(const QContext<F>& ctx) {
  return SLnParams<F>(ctx, std::vector<F>(ctx.n() - 1, ctx.lambda()), AlphaSpec<F>::standard(ctx.n(), ctx.q()));
}

}  // namespace detail

// Parameter space, symmetries and the diagonal D of the inverse relation.
template <class F>
Report suite_params(const SuiteConfig& cfg) {
  Report rep("params");
  const std::string be = F::backend_name;
  const int n = cfg.n;
  int draw = 0;
  for (const auto& d : detail::draws(cfg, n, 3, 1)) {
    auto tag = detail::tag(n, draw++);
    auto P = detail::lift<F>(d.params);
    if (cfg.corrupt == Corruption::BrokenBeta) P = detail::broken_beta(P);
    const auto& ws = d.weights;
    const F lam = P.ctx().lambda();
    rep.check("params/beta-symmetry/" + tag, "beta_ij + beta_ji = lambda", be, [&]() -> std::optional<std::string> {
      if (P.beta_infinite()) return std::nullopt;
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if (P.beta(i, j) + P.beta(j, i) != lam)
            return "beta_" + std::to_string(i + 1) + std::to_string(j + 1) + " + beta_" + std::to_string(j + 1) +
                   std::to_string(i + 1) + " = " + (P.beta(i, j) + P.beta(j, i)).str();
      return std::nullopt;
    });
    rep.check("params/hecke-condition/" + tag, "R(p)^2 = 1 + lambda R(p)", be, [&] {
      return detail::over(ws, [&](const WeightPoint& p) { return witness_str(hecke_residual(build_dyn(P, p), lam)); });
    });
    rep.check("params/inverse/" + tag, "closed-form inverse of R(p)", be, [&] {
      return detail::over(ws, [&](const WeightPoint& p) {
        return diff_str(build_dyn(P, p) * invert_dyn(P, p), TensorOp<F>::identity(n, 2));
      });
    });
    rep.check("params/x1x2/" + tag, "R(p) commutes with X_1 X_2", be,
              [&] { return detail::over(ws, [&](const WeightPoint& p) { return x1x2_commutation(P, p); }); });
    rep.check("params/pi-relation/" + tag, "-(b_ji/b_ij) q^{2p_ij} = pi_ij", be,
              [&] { return detail::over(ws, [&](const WeightPoint& p) { return pi_relation(P, p); }); });
    rep.check("params/canonical-shift/" + tag, "generic xi equals limit xi at q^{2p}/pi", be,
              [&] { return detail::over(ws, [&](const WeightPoint& p) { return canonical_shift_check(P, p); }); });
    rep.check("params/twist/" + tag, "twist by constant psi preserves the braid relation", be, [&] {
      Sampler S(cfg.seed + draw);
      AlphaSpec<F> psi(n);
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) psi.set(i, j, F::from_mpq(S.small_rational(4).mpq()), F(1));
      return detail::over(ws, [&](const WeightPoint& p) -> std::optional<std::string> {
        auto t = twist_check(P, psi, p);
        if (t.ok()) return std::nullopt;
        return t.first();
      });
    });
    rep.check("params/integer-shift/" + tag, "generic R(p) equals the limit R(p + c)", be, [&] {
      Sampler S(cfg.seed * 31 + draw);
      std::vector<long> c;
      for (int k = 0; k + 1 < n; ++k) c.push_back(S.integer(1, 3) * (S.integer(0, 1) ? 1 : -1));
      AlphaSpec<F> flat(n);
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) flat.set(i, j, P.alpha().upper(i, j).c, F(1));
      auto Ps = params_for_shift(P.ctx(), c, flat);
      // the shifted chain has its own integer poles, so the shared weights do not apply
      SLnParams<F> lim(P.ctx(), {}, flat, true);
      std::vector<long> mu(n, 0);
      for (int i = n - 2; i >= 0; --i) mu[i] = mu[i + 1] + c[i];
      std::vector<WeightPoint> sw;
      for (int tries = 0; static_cast<int>(sw.size()) < cfg.points; ++tries) {
        if (tries == 10000) throw DynamicalPole("no pole-free weight for the shifted chain");
        auto p = S.pole_free(Ps, 1);
        if (lim.pole_free(p.shifted(mu, +1), 1)) sw.push_back(p);
      }
      return detail::over(sw, [&](const WeightPoint& p) { return integer_shift_check(Ps, c, p); });
    });
    rep.check("params/d-sigma/" + tag, "D_1 R(p) D_2^-1 = R(p)^-1 sigma", be,
              [&] { return detail::over(ws, [&](const WeightPoint& p) { return gauge_inverse_check(P, p); }); });
  }
  rep.check("params/constant-preset/n" + std::to_string(n), "constant regime reproduces the standard R-matrix", be,
            [&]() -> std::optional<std::string> {
              Sampler S(cfg.seed);
              auto ctx = S.context(n).template map_to<F>();
              auto P = detail::constant_preset(ctx);
              if (P.regime() != Regime::ConstantMultiparam) return "regime " + std::string(regime_name(P.regime()));
              return diff_str(build_dyn(P, S.weight(n)), build_dj(ctx));
            });
  return rep;
}

// Braid relation with shifted arguments, in the explicit and X-conjugated forms.
template <class F>
Report suite_qdybe(const SuiteConfig& cfg) {
  Report rep("qdybe");
  const std::string be = F::backend_name;
  const int n = cfg.n;
  int draw = 0;
  for (const auto& d : detail::draws(cfg, n, 3, 2)) {
    auto tag = detail::tag(n, draw++);
    auto P = detail::lift<F>(d.params);
    if (cfg.corrupt == Corruption::BrokenBeta) P = detail::broken_beta(P);
    rep.check("qdybe/shifted/" + tag, "R12(p) R23(p - v1) R12(p) braid form", be, [&] {
      return detail::over(d.weights, [&](const WeightPoint& p) { return witness_str(qdybe_shifted(P, p)); });
    });
    rep.check("qdybe/x-conjugated/" + tag, "R12 X1 R23 X1^-1 R12 form", be, [&] {
      auto R = dyn_of(P);
      return detail::over(d.weights, [&](const WeightPoint& p) { return qdybe_xconj<F>(R, n, p); });
    });
  }
  return rep;
}

// Hecke representations on k = n + 1 sites, constant and dynamic.
template <class F>
Report suite_hecke(const SuiteConfig& cfg) {
  Report rep("hecke");
  const std::string be = F::backend_name;
  const int n = cfg.n, k = n + 1;
  auto battery = [&](const std::string& tag, const HeckeRep<F>& h) {
    rep.check("hecke/relations/" + tag, "braid, quadratic and locality relations", be, [&] { return hecke_relations(h); });
    rep.check("hecke/top-vanishes/" + tag, "A^(n+1) = 0", be, [&]() -> std::optional<std::string> {
      if (h.antisym(n + 1).is_zero()) return std::nullopt;
      return std::string("A^(n+1) nonzero");
    });
    rep.check("hecke/rank-one/" + tag, "A^(n) of rank one on its window", be, [&]() -> std::optional<std::string> {
      if (window_rank_one(h, h.antisym(n), n)) return std::nullopt;
      return "rank " + std::to_string(exact_rank(h.antisym(n)));
    });
    rep.check("hecke/windowed/" + tag, "windowed vanishing and rank conditions", be, [&] { return windowed_height(h, n); });
    if (cfg.extended) {
      rep.check("hecke/antisymmetrizer/" + tag, "idempotence, g-kill and absorption", be, [&] { return antisym_properties(h); });
      rep.check("hecke/expansion/" + tag, "alternating expansion of A^(j+1)", be, [&]() -> std::optional<std::string> {
        for (int j = 1; j < k; ++j)
          if (auto d = alternating_expansion(h, j)) return "j=" + std::to_string(j) + " " + *d;
        return std::nullopt;
      });
      rep.check("hecke/automorphism/" + tag, "chain conjugation shifts generators and windows", be,
                [&]() -> std::optional<std::string> {
                  for (int r = 0; r + 1 < k; ++r)
                    if (auto d = inner_automorphism(h, 1, r)) return "r=" + std::to_string(r) + " " + *d;
                  return std::nullopt;
                });
    }
    std::vector<std::pair<std::string, std::optional<std::string>>> forms;
    try {
      forms = top_vanishing_forms(h, n);
    } catch (const std::exception& e) {
      forms = {{"all", std::string("exception: ") + e.what()}};
    }
    for (const auto& [form, w] : forms) {
      auto wit = w;
      rep.check("hecke/top-forms/" + tag + "/" + form, "equivalent forms of A^(n+1) = 0", be, [wit] { return wit; });
    }
  };

  Sampler S(cfg.seed * 977 + n);
  auto ctx = (cfg.params ? cfg.params->ctx() : S.context(n)).template map_to<F>();
  if (cfg.corrupt != Corruption::BrokenBeta) battery("constant/n" + std::to_string(n), HeckeRep<F>::constant(build_dj(ctx), ctx, k));

  int draw = 0;
  for (const auto& d : detail::draws(cfg, n, k + 2, 3)) {
    auto P = detail::lift<F>(d.params);
    if (cfg.corrupt == Corruption::BrokenBeta) P = detail::broken_beta(P);
    const auto& p = d.weights.front();
    auto tag = "dynamic/" + detail::tag(n, draw++);
    battery(tag, HeckeRep<F>::dynamic(P, p, k));
    rep.check("hecke/localized-last/" + tag, "X-conjugated images equal the localized-last rep", be,
              [&] { return conjugated_rep_check(P, p, 3); });
  }
  return rep;
}

// Levi-Civita tensors, their normalization and the matrices N, K.
template <class F>
Report suite_epsilon(const SuiteConfig& cfg) {
  Report rep("epsilon");
  const std::string be = F::backend_name;
  const int n = cfg.n;
  const bool wrong = cfg.corrupt == Corruption::WrongEpsSign;
  auto flip = [&](EpsTensor<F> t) {
    if (wrong) {
      auto& v = t.entries.begin()->second;
      v = -v;
    }
    return t;
  };
  auto family = [&](EpsFamily<F> E) {
    if (!wrong) return E;
    return EpsFamily<F>{[E, flip](const WeightPoint& w) { return flip(E.up(w)); }, E.lo};
  };
  auto common = [&](const std::string& tag, const HeckeRep<F>& hn, const HeckeRep<F>& hk, const EpsFamily<F>& E,
                    const WeightPoint& p, bool uppers) {
    const auto& ctx = hn.ctx();
    rep.check("epsilon/eigen/" + tag, "g_i E = -qbar E on both sides, joint eigenspaces of dimension 1", be,
              [&]() -> std::optional<std::string> {
                auto r = eigencheck(hn, E.up(p), E.lo(p));
                if (r.residual) return r.residual;
                if (r.right_kernel != 1 || r.left_kernel != 1)
                  return "kernel dims " + std::to_string(r.right_kernel) + "/" + std::to_string(r.left_kernel);
                return std::nullopt;
              });
    rep.check("epsilon/normalization/" + tag, "E_ . E^ = [n]!", be, [&]() -> std::optional<std::string> {
      F c = contract(E.lo(p), E.up(p));
      if (c == ctx.qfact(n)) return std::nullopt;
      return c.str() + " vs " + ctx.qfact(n).str();
    });
    rep.check("epsilon/projector/" + tag, "(1/[n]!) E^ E_ equals the windowed antisymmetrizer", be,
              [&]() -> std::optional<std::string> {
                for (int i = 1; i + n - 1 <= n + 1; ++i)
                  if (auto d = diff_str(projector_from_eps(E, ctx, p, i, n + 1), hk.antisym(i, i + n - 1)))
                    return "window " + std::to_string(i) + " " + *d;
                return std::nullopt;
              });
    rep.check("epsilon/nk/" + tag, "N(p) K(p) = 1", be, [&]() -> std::optional<std::string> {
      auto nk = build_nk(E, ctx, p);
      return diff_str(nk.N * nk.K, TensorOp<F>::identity(n, 1));
    });
    rep.check("epsilon/relations/" + tag, "generator chains move E across one site", be,
              [&]() -> std::optional<std::string> {
                auto r = eps_relations(hk, E, p, uppers);
                for (auto* s : {&r.lower_down, &r.lower_up, &r.upper_up, &r.upper_down})
                  if (*s) return **s;
                return std::nullopt;
              });
  };

  Sampler S(cfg.seed * 613 + n);
  auto ctx = (cfg.params ? cfg.params->ctx() : S.context(n)).template map_to<F>();
  {
    auto R = build_dj(ctx);
    auto E = family(EpsFamily<F>::constant(ctx));
    auto tag = "constant/n" + std::to_string(n);
    common(tag, HeckeRep<F>::constant(R, ctx, n), HeckeRep<F>::constant(R, ctx, n + 1), E, WeightPoint(std::vector<long>(n, 0)), true);
    rep.check("epsilon/nk-trivial/" + tag, "N = K = 1 for constant tensors", be, [&]() -> std::optional<std::string> {
      auto nk = build_nk(E, ctx, WeightPoint(std::vector<long>(n, 0)));
      if (auto d = diff_str(nk.N, TensorOp<F>::identity(n, 1))) return "N " + *d;
      return diff_str(nk.K, TensorOp<F>::identity(n, 1));
    });
    rep.check("epsilon/constant-limit/" + tag, "dynamical tensors in the constant regime equal the constant ones", be,
              [&]() -> std::optional<std::string> {
                auto P = detail::constant_preset(ctx);
                auto p = S.weight(n);
                auto up = flip(eps_dyn(P, p, true)), lo = eps_dyn(P, p, false);
                if (up.entries != eps_const(ctx, true).entries) return std::string("upper tensors differ");
                if (lo.entries != eps_const(ctx, false).entries) return std::string("lower tensors differ");
                return std::nullopt;
              });
  }
  int draw = 0;
  for (const auto& d : detail::draws(cfg, n, n + 3, 4)) {
    auto P = detail::lift<F>(d.params);
    const auto& p = d.weights.front();
    auto tag = "dynamic/" + detail::tag(n, draw++);
    auto E = family(EpsFamily<F>::dynamic(P));
    common(tag, HeckeRep<F>::dynamic(P, p, n), HeckeRep<F>::dynamic(P, p, n + 1), E, p, false);
    rep.check("epsilon/n-closed-form/" + tag, "N(p) from contractions equals its product formula", be,
              [&]() -> std::optional<std::string> {
                auto nk = build_nk(E, P.ctx(), p);
                return diff_str(nk.N, n_closed_form(P, p).op());
              });
  }
  return rep;
}

// Ordered-sum identities behind the normalization of E.
template <class F>
Report suite_appendix(const SuiteConfig& cfg) {
  Report rep("appendix");
  const std::string be = F::backend_name;
  const int n = cfg.n;
  auto items = [&](const std::string& tag, const std::string& what, const AppendixReport& a) {
    for (const auto& [name, w] : a.items) {
      auto wit = w;
      rep.check("appendix/" + name + "/" + tag, what, be, [wit] { return wit; });
    }
  };
  Sampler S(cfg.seed * 389 + n);
  int draw = 0;
  for (const auto& d : detail::draws(cfg, n, 2, 5)) {
    auto P = detail::lift<F>(d.params);
    if (cfg.corrupt == Corruption::BrokenBeta) P = detail::broken_beta(P);
    auto tag = "params/" + detail::tag(n, draw++);
    const auto& p = d.weights.front();
    items(tag, "identities for xi, b from the parameters", appendix_bruteforce(XiTable<F>::from_params(P, p), P.ctx(), std::min(n, cfg.kmax)));
    rep.check("appendix/pi-relation/" + tag, "-(b_ji/b_ij) q^{2p_ij} = pi_ij", be, [&] { return pi_relation(P, p); });
  }
  if (cfg.corrupt == Corruption::None) {
    // points x_1..x_kmax; d = q and a generic d
    const int m = cfg.kmax;
    auto ctx = S.context(std::max(2, n)).template map_to<F>();
    std::vector<F> x;
    while (static_cast<int>(x.size()) < m) {
      F v = F::from_mpq(S.small_rational(9).mpq());
      if (std::find(x.begin(), x.end(), v) == x.end()) x.push_back(v);
    }
    auto tq = XiTable<F>::from_points(x, ctx.q(), ctx.lambda());
    items("points/d=q/k" + std::to_string(m), "identities for xi, b from distinct points", appendix_bruteforce(tq, ctx, m));
    auto td = XiTable<F>::from_points(x, F::from_mpq(mpq_class(7, 3)), ctx.lambda());
    items("points/d=7|3/k" + std::to_string(m), "identities with a generic d", appendix_bruteforce(td, ctx, m));
    items("xi-only/k" + std::to_string(m), "consequences of the xi-only hypotheses",
          xi_only_bruteforce<F>([&](int i, int j) { return tq.xi(i, j); }, m, ctx, m));
  }
  return rep;
}

// Replays the quantum matrix derivations; the oracle runs for n = 2.
template <class F>
Report suite_qmatrix(const SuiteConfig& cfg) {
  const std::string be = F::backend_name;
  const int n = cfg.n;
  auto d = detail::draws(SuiteConfig{.n = n, .seed = cfg.seed, .draws = 1, .points = 5, .params = cfg.params, .weights = cfg.weights},
                         n, 2 * n + 3, 6)
               .front();
  auto P = detail::lift<F>(d.params);
  Calculus<F> C(P, d.weights, cfg.corrupt != Corruption::NonUnimodular);
  auto script = cfg.script.is_null() ? builtin_derivations() : cfg.script;
  return run_derivations(C, script, cfg.oracle && n == 2, be);
}

// Casimir differences, the unimodular normalization and the D gauge.
template <class F>
Report suite_wznw(const SuiteConfig& cfg) {
  Report rep("wznw");
  const std::string be = F::backend_name;
  const int n = cfg.n;
  Sampler S(cfg.seed * 131 + n);
  rep.check("wznw/dvec/n" + std::to_string(n), "C2(p) - C2(p + v^(j)) = 1/n - 1 - 2p_j on 20 weights", be,
            [&]() -> std::optional<std::string> {
              for (int t = 0; t < 20; ++t) {
                auto p = S.weight(n);
                auto dv = dvec(p);
                if (!dv.agree()) return "at " + p.str();
                mpq_class s(0);
                for (const auto& x : dv.closed) s += x + 1 - mpq_class(1, n);
                if (s != 0) return "sum rule at " + p.str();
              }
              return std::nullopt;
            });
  auto ctx0 = cfg.params ? cfg.params->ctx() : S.context(n);
  if (!ctx0.has_root()) {
    rep.skip("wznw/det-normalization/n" + std::to_string(n), "eigenvalue product of R/q^(1/n)", be, "no root given");
  } else {
    auto ctx = ctx0.template map_to<F>();
    std::optional<F> scale;
    if (cfg.corrupt == Corruption::NonUnimodular) scale = ctx.root() * ctx.q();
    rep.check("wznw/det-normalization/n" + std::to_string(n), "eigenvalue product of R/q^(1/n) is (-1)^C(n,2)", be,
              [&]() -> std::optional<std::string> {
                auto dn = det_normalization(ctx, scale);
                if (dn.ok) return std::nullopt;
                return "ranks " + std::to_string(dn.sym_rank) + "/" + std::to_string(dn.antisym_rank) + " product " +
                       dn.product + (dn.eigen_ok ? "" : " eigen relations fail");
              });
  }
  if (cfg.corrupt == Corruption::NonUnimodular) return rep;
  int draw = 0;
  for (const auto& d : detail::draws(cfg, n, 1, 7)) {
    auto P = detail::lift<F>(d.params);
    auto tag = detail::tag(n, draw++);
    rep.check("wznw/d-mismatch/" + tag, "D_i/D_j over q^{d_i-d_j} equals pi_ij", be, [&] {
      return detail::over(d.weights, [&](const WeightPoint& p) -> std::optional<std::string> {
        auto r = reconcile_d(P, p);
        if (!r.mismatch_is_pi || (P.ctx().has_root() && !r.absolute)) return r.witness;
        return std::nullopt;
      });
    });
    SLnParams<F> Pinf(P.ctx(), {}, P.alpha(), true);
    rep.check("wznw/d-exact/" + tag, "at pi = 1 the Casimir differences give D exactly", be, [&] {
      return detail::over(d.weights, [&](const WeightPoint& p) -> std::optional<std::string> {
        auto r = reconcile_d(Pinf, p);
        if (!r.exact) return std::string("mismatch factor differs from 1");
        if (P.ctx().has_root() && !r.absolute) return r.witness;
        return std::nullopt;
      });
    });
  }
  return rep;
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"params", "qdybe", "hecke", "epsilon", "appendix", "qmatrix", "wznw"};
  return names;
}

template <class F>
Report run_suite(const std::string& name, const SuiteConfig& cfg) {
  if (cfg.corrupt != Corruption::None && name != "all" && !suite_corruptions(name).count(cfg.corrupt))
    throw DomainError(std::string("suite ") + name + " has no corruption " + corruption_name(cfg.corrupt));
  if (name == "params") return suite_params<F>(cfg);
  if (name == "qdybe") return suite_qdybe<F>(cfg);
  if (name == "hecke") return suite_hecke<F>(cfg);
  if (name == "epsilon") return suite_epsilon<F>(cfg);
  if (name == "appendix") return suite_appendix<F>(cfg);
  if (name == "qmatrix") return suite_qmatrix<F>(cfg);
  if (name == "wznw") return suite_wznw<F>(cfg);
  if (name == "all") {
    Report all("all");
    for (const auto& s : suite_names()) {
      auto c = cfg;
      if (!suite_corruptions(s).count(c.corrupt)) c.corrupt = Corruption::None;
      all.merge(run_suite<F>(s, c));
    }
    return all;
  }
  throw DomainError("unknown suite " + name);
}

}  // namespace qdyb
