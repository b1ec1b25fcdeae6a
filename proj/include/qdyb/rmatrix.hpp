#pragma once

// Constant and dynamical Hecke R-matrices, twists, canonical shifts and the
// diagonal D / sigma identity.
//
// R(p) on V(x)V has entries
//   R^{i1 i2}_{j1 j2} = a_{i1 i2} d^{i1}_{j2} d^{i2}_{j1} + b_{i1 i2} d^{i1}_{j1} d^{i2}_{j2},
// with a_ij, b_ij evaluated at p_{i1 i2}.

#include <functional>
#include <optional>
#include <string>

#include "qdyb/params.hpp"
#include "qdyb/report.hpp"
#include "qdyb/shift.hpp"
#include "qdyb/tensor.hpp"

namespace qdyb {

template <class F>
TensorOp<F> build_from_ab(int n, const std::function<F(int, int)>& a, const std::function<F(int, int)>& b) {
  TensorOp<F> R(n, 2);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Index row = flatten({i, j}, n);
      R.add_entry(row, flatten({j, i}, n), a(i, j));
      if (i != j) R.add_entry(row, row, b(i, j));
    }
  return R;
}

// Standard constant R-matrix: q on the diagonal, 1 on swaps, lambda above.
template <class F>
TensorOp<F> build_dj(const QContext<F>& ctx) {
  return build_from_ab<F>(
      ctx.n(), [&](int i, int j) { return i == j ? ctx.q() : F(1); },
      [&](int i, int j) { return i < j ? ctx.lambda() : F(0); });
}

template <class F>
TensorOp<F> build_dyn(const SLnParams<F>& P, const WeightPoint& p) {
  return build_from_ab<F>(
      P.n(), [&](int i, int j) { return P.a(i, j, p); }, [&](int i, int j) { return P.b(i, j, p); });
}

// Closed-form inverse: (a_{i1 i2} - lambda d_{i1 i2}) on swaps, -b_{i2 i1} on the diagonal.
template <class F>
TensorOp<F> invert_dyn(const SLnParams<F>& P, const WeightPoint& p) {
  const F lam = P.ctx().lambda();
  return build_from_ab<F>(
      P.n(), [&](int i, int j) { return P.a(i, j, p) - (i == j ? lam : F(0)); },
      [&](int i, int j) { return -P.b(j, i, p); });
}

// R(p) - lambda, the inverse implied by the Hecke condition.
template <class F>
TensorOp<F> hecke_inverse(const TensorOp<F>& R, const F& lam) {
  return R - TensorOp<F>::identity(R.n(), 2).scaled(lam);
}

// Operator on k sites acting at (i, i+1) (1-based) with an R-matrix that
// depends on the row multi-index: row I uses R(weight(I)).
template <class F>
TensorOp<F> site_dependent(int n, int k, int i, const std::function<TensorOp<F>(const MultiIndex&)>& R_at) {
  TensorOp<F> out(n, k);
  std::map<MultiIndex, TensorOp<F>> cache;
  for (Index r = 0; r < out.rows(); ++r) {
    auto I = unflatten(r, n, k);
    auto it = cache.find(I);
    if (it == cache.end()) it = cache.emplace(I, R_at(I)).first;
    const auto& R = it->second;
    Index local = flatten({I[i - 1], I[i]}, n);
    typename TensorOp<F>::Row row;
    for (const auto& [c, v] : R.row(local)) {
      auto J = I;
      auto m = unflatten(c, n, 2);
      J[i - 1] = m[0];
      J[i] = m[1];
      row.push_back({flatten(J, n), v});
    }
    std::sort(row.begin(), row.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    out.set_row(r, std::move(row));
  }
  return out;
}

// Image of g_i (1-based) in the dynamical representation on k sites:
// row I carries R(p - v^(I_1) - .. - v^(I_{i-1})) at sites i, i+1.
template <class F>
TensorOp<F> dyn_generator(const SLnParams<F>& P, const WeightPoint& p, int i, int k, bool inverse = false) {
  std::map<WeightPoint, TensorOp<F>> memo;
  return site_dependent<F>(P.n(), k, i, [&](const MultiIndex& I) {
    auto w = p;
    for (int m = 0; m < i - 1; ++m) w = w.shifted(I[m], -1);
    auto it = memo.find(w);
    if (it == memo.end()) it = memo.emplace(w, inverse ? invert_dyn(P, w) : build_dyn(P, w)).first;
    return it->second;
  });
}

// Variant localized on the last sites: row I carries R(p + v^(I_{i+2}) + .. + v^(I_k)).
template <class F>
TensorOp<F> dyn_generator_last(const SLnParams<F>& P, const WeightPoint& p, int i, int k) {
  std::map<WeightPoint, TensorOp<F>> memo;
  return site_dependent<F>(P.n(), k, i, [&](const MultiIndex& I) {
    auto w = p;
    for (int m = i + 1; m < k; ++m) w = w.shifted(I[m], +1);
    auto it = memo.find(w);
    if (it == memo.end()) it = memo.emplace(w, build_dyn(P, w)).first;
    return it->second;
  });
}

template <class F>
std::optional<Witness<F>> braid_residual(const TensorOp<F>& g1, const TensorOp<F>& g2) {
  return (g1 * g2 * g1).first_diff(g2 * g1 * g2);
}

template <class F>
std::optional<Witness<F>> hecke_residual(const TensorOp<F>& R, const F& lam) {
  auto one = TensorOp<F>::identity(R.n(), R.k());
  return (R * R).first_diff(one + R.scaled(lam));
}

// Shifted-argument braid relation on V^{(x)3}.
template <class F>
std::optional<Witness<F>> qdybe_shifted(const SLnParams<F>& P, const WeightPoint& p) {
  return braid_residual(dyn_generator(P, p, 1, 3), dyn_generator(P, p, 2, 3));
}

template <class F>
PFactor<F> pf_embed(const std::function<TensorOp<F>(const WeightPoint&)>& R2, int pos) {
  return PFactor<F>{[R2, pos](const WeightPoint& w) { return R2(w).embed(pos, 3); }};
}

template <class F>
std::optional<std::string> shift_word_residual(int n, int k, const std::vector<ShiftFactor<F>>& lhs,
                                               const std::vector<ShiftFactor<F>>& rhs, const WeightPoint& p) {
  auto L = evaluate_word<F>(n, k, lhs, p);
  auto R = evaluate_word<F>(n, k, rhs, p);
  if (auto d = L.first_diff(R)) {
    std::string mu;
    for (long v : d->first) mu += (mu.empty() ? "" : ",") + std::to_string(v);
    return "shift (" + mu + ") " + d->second.str();
  }
  return std::nullopt;
}

// X-conjugated braid relation, evaluated with explicit shift operators.
template <class F>
std::optional<std::string> qdybe_xconj(const std::function<TensorOp<F>(const WeightPoint&)>& R2, int n,
                                       const WeightPoint& p) {
  using SF = ShiftFactor<F>;
  SF r12 = pf_embed<F>(R2, 1), r23 = pf_embed<F>(R2, 2);
  SF x1{XFactor{1, 1}}, x1i{XFactor{1, -1}};
  return shift_word_residual<F>(n, 3, {r12, x1, r23, x1i, r12}, {x1, r23, x1i, r12, x1, r23, x1i}, p);
}

// The two equivalent forms used for twisting: conjugation by X_3^{-1}, and the
// mirror with R_21 = P R P.
template <class F>
std::optional<std::string> qdybe_x3(const std::function<TensorOp<F>(const WeightPoint&)>& R2, int n,
                                    const WeightPoint& p) {
  using SF = ShiftFactor<F>;
  SF r12 = pf_embed<F>(R2, 1), r23 = pf_embed<F>(R2, 2);
  SF x3{XFactor{3, 1}}, x3i{XFactor{3, -1}};
  return shift_word_residual<F>(n, 3, {r23, x3i, r12, x3, r23}, {x3i, r12, x3, r23, x3i, r12, x3}, p);
}

template <class F>
std::optional<std::string> qdybe_mirror(const std::function<TensorOp<F>(const WeightPoint&)>& R21, int n,
                                        const WeightPoint& p) {
  using SF = ShiftFactor<F>;
  SF s12 = pf_embed<F>(R21, 1), s23 = pf_embed<F>(R21, 2);
  SF x1{XFactor{1, 1}}, x1i{XFactor{1, -1}};
  return shift_word_residual<F>(n, 3, {s12, x1i, s23, x1, s12}, {x1i, s23, x1, s12, x1i, s23, x1}, p);
}

template <class F>
std::function<TensorOp<F>(const WeightPoint&)> dyn_of(const SLnParams<F>& P) {
  return [P](const WeightPoint& w) { return build_dyn(P, w); };
}

template <class F>
std::function<TensorOp<F>(const WeightPoint&)> flipped(std::function<TensorOp<F>(const WeightPoint&)> R2, int n) {
  auto Pm = TensorOp<F>::flip(n);
  return [R2, Pm](const WeightPoint& w) { return Pm * R2(w) * Pm; };
}

// R(p) X_1 X_2 = X_1 X_2 R(p)
template <class F>
std::optional<std::string> x1x2_commutation(const SLnParams<F>& P, const WeightPoint& p) {
  using SF = ShiftFactor<F>;
  SF r = PFactor<F>{[&P](const WeightPoint& w) { return build_dyn(P, w); }};
  SF x1{XFactor{1, 1}}, x2{XFactor{2, 1}};
  return shift_word_residual<F>(P.n(), 2, {r, x1, x2}, {x1, x2, r}, p);
}

// ---- twist --------------------------------------------------------------

// psi_ij(x) stored like alpha: psi_ij psi_ji = 1 at opposite arguments.
template <class F>
using TwistSpec = AlphaSpec<F>;

template <class F>
SLnParams<F> twist(const SLnParams<F>& P, const TwistSpec<F>& psi) {
  AlphaSpec<F> a(P.n());
  for (int i = 0; i < P.n(); ++i)
    for (int j = i + 1; j < P.n(); ++j) {
      const auto &al = P.alpha().upper(i, j), &ps = psi.upper(i, j);
      a.set(i, j, al.c / (ps.c * ps.c), al.w / (ps.w * ps.w));
    }
  return P.with_alpha(a);
}

// F_hat(p) = F(p) P with F diagonal psi_{i1 i2}(p_{i1 i2})
template <class F>
TensorOp<F> twist_operator(const TwistSpec<F>& psi, const WeightPoint& p, bool inverse = false) {
  int n = psi.n();
  auto Fd = DiagOp<F>::from_function(n, 2, [&](const MultiIndex& m) { return psi(m[0], m[1], p.pdiff(m[0], m[1])); });
  auto Pm = TensorOp<F>::flip(n);
  if (inverse) return Pm * Fd.inverse().op();
  return Fd.op() * Pm;
}

// A_hat = A P_23 P_12 with A diagonal a_ijk.
template <class F>
TensorOp<F> twist_a_hat(const TwistSpec<F>& psi, const WeightPoint& p) {
  int n = psi.n();
  auto A = DiagOp<F>::from_function(n, 3, [&](const MultiIndex& m) {
    int i = m[0], j = m[1], k = m[2];
    if (i != j) return psi(i, k, p.pdiff(i, k)) * psi(j, k, p.pdiff(j, k));
    F v = psi(i, k, p.pdiff(i, k) + 1);
    return v * v;
  });
  auto Pm = TensorOp<F>::flip(n);
  return A.op() * Pm.embed(2, 3) * Pm.embed(1, 3);
}

struct TwistReport {
  std::optional<std::string> conjugation;  // F R F^{-1} equals the flipped twisted R
  std::optional<std::string> tf;           // F^{-1}_12 X_1^{-1} F_23 = A X_3^{-1} A
  std::optional<std::string> ta;           // R_12 A = A R_23
  std::optional<std::string> qdybe;        // mirror form for F R F^{-1}
  bool ok() const { return !conjugation && !tf && !ta && !qdybe; }
  std::string first() const {
    for (auto* s : {&conjugation, &tf, &ta, &qdybe})
      if (*s) return **s;
    return "";
  }
};

template <class F>
TwistReport twist_check(const SLnParams<F>& P, const TwistSpec<F>& psi, const WeightPoint& p) {
  TwistReport rep;
  const int n = P.n();
  auto P2 = twist(P, psi);
  auto Pm = TensorOp<F>::flip(n);
  auto conj = [&](const WeightPoint& w) {
    return twist_operator(psi, w) * build_dyn(P, w) * twist_operator(psi, w, true);
  };
  if (auto d = conj(p).first_diff(Pm * build_dyn(P2, p) * Pm)) rep.conjugation = "conjugation " + d->str();

  using SF = ShiftFactor<F>;
  SF finv12 = PFactor<F>{[&](const WeightPoint& w) { return twist_operator(psi, w, true).embed(1, 3); }};
  SF f23 = PFactor<F>{[&](const WeightPoint& w) { return twist_operator(psi, w).embed(2, 3); }};
  SF ahat = PFactor<F>{[&](const WeightPoint& w) { return twist_a_hat(psi, w); }};
  SF x1i{XFactor{1, -1}}, x3i{XFactor{3, -1}};
  if (auto d = shift_word_residual<F>(n, 3, {finv12, x1i, f23}, {ahat, x3i, ahat}, p)) rep.tf = "tf " + *d;

  auto A = twist_a_hat(psi, p);
  auto R = build_dyn(P, p);
  if (auto d = (R.embed(1, 3) * A).first_diff(A * R.embed(2, 3))) rep.ta = "ta " + d->str();

  std::function<TensorOp<F>(const WeightPoint&)> S = conj;
  if (auto d = qdybe_mirror<F>(S, n, p)) rep.qdybe = "twisted qdybe " + *d;
  return rep;
}

// ---- canonical shifts ---------------------------------------------------

// xi in the limit regime written through x = q^{2 p}: q (x q^{-2} - 1)/(x - 1).
template <class F>
F xi_limit_x(const QContext<F>& ctx, const F& x) {
  F den = x - F(1);
  if (den.is_zero()) throw DynamicalPole("dynamical pole at x = 1");
  return ctx.q() * (x * ctx.qbar() * ctx.qbar() - F(1)) / den;
}

// Generic xi equals the limit xi after q^{2 p_ij} -> q^{2 p_ij} / pi_ij.
template <class F>
std::optional<std::string> canonical_shift_check(const SLnParams<F>& P, const WeightPoint& p) {
  const auto& ctx = P.ctx();
  for (int i = 0; i < P.n(); ++i)
    for (int j = 0; j < P.n(); ++j) {
      if (i == j) continue;
      F x = ctx.qpow(2 * p.pdiff(i, j)) / P.pi(i, j);
      F lhs = P.xi(i, j, p), rhs = xi_limit_x(ctx, x);
      if (lhs != rhs)
        return "xi_" + std::to_string(i + 1) + std::to_string(j + 1) + ": " + lhs.str() + " vs " + rhs.str();
    }
  return std::nullopt;
}

// Chain beta_k = lambda / (1 - q^{-2 c_k}) gives pi_{k,k+1} = q^{-2 c_k}; then the
// generic R-matrix at p equals the limit one at p + c for constant alpha.
template <class F>
SLnParams<F> params_for_shift(const QContext<F>& ctx, const std::vector<long>& c_chain, const AlphaSpec<F>& alpha) {
  std::vector<F> chain;
  for (long c : c_chain) {
    if (c == 0) throw DomainError("zero offset gives an infinite beta");
    chain.push_back(ctx.lambda() / (F(1) - ctx.qpow(-2 * c)));
  }
  return SLnParams<F>(ctx, chain, alpha);
}

template <class F>
std::optional<std::string> integer_shift_check(const SLnParams<F>& P, const std::vector<long>& c_chain,
                                               const WeightPoint& p) {
  SLnParams<F> lim(P.ctx(), {}, P.alpha(), true);
  std::vector<long> mu(P.n(), 0);
  for (int i = P.n() - 2; i >= 0; --i) mu[i] = mu[i + 1] + c_chain[i];
  if (auto d = build_dyn(P, p).first_diff(build_dyn(lim, p.shifted(mu, +1)))) return d->str();
  return std::nullopt;
}

// ---- D and sigma --------------------------------------------------------

// D_i = q^{-2 p_in} pi_in, D_n = 1
template <class F>
DiagOp<F> gauge_diag(const SLnParams<F>& P, const WeightPoint& p) {
  int n = P.n();
  return DiagOp<F>::from_function(n, 1, [&](const MultiIndex& m) {
    int i = m[0];
    return P.ctx().qpow(-2 * p.pdiff(i, n - 1)) * P.pi(i, n - 1);
  });
}

template <class F>
DiagOp<F> sigma_op(const QContext<F>& ctx) {
  return DiagOp<F>::from_function(ctx.n(), 2,
                                  [&](const MultiIndex& m) { return m[0] == m[1] ? ctx.qpow(2) : F(1); });
}

// D_1 R(p) D_2^{-1} = R(p)^{-1} sigma_12
template <class F>
std::optional<std::string> gauge_inverse_check(const SLnParams<F>& P, const WeightPoint& p) {
  if (P.regime() != Regime::Generic && P.regime() != Regime::BetaInfinity)
    throw DomainError("regime mismatch: pi must be defined");
  int n = P.n();
  auto D = gauge_diag(P, p);
  auto one = DiagOp<F>(n, 1);
  auto lhs = D.kron(one).op() * build_dyn(P, p) * one.kron(D).inverse().op();
  auto rhs = invert_dyn(P, p) * sigma_op(P.ctx()).op();
  if (auto d = lhs.first_diff(rhs)) return d->str();
  return std::nullopt;
}

}  // namespace qdyb
