#pragma once

// Word calculus for the quantum matrix algebra generated by a^i_alpha with
//   R(p)_12 a_1 a_2 = a_1 a_2 R_12,    a f(p) = X f(p) X^{-1} a,
// plus the formal determinant and its inverse.
//
// An expression is kept in the normal form
//   sum L(p)[O, I] a^{I_1}_{A_1} .. a^{I_k}_{A_k} det^d R[A, O']
// where O (i-side) and O' (alpha-side) are labeled free indices. Products are
// normalized on construction: p-functions move left through a's with the X
// shift, and det^d moves right through a's picking up K(p)^d per slot.
// Moves rewrite normal forms using the defining relations; the membership
// oracle decides equality modulo the degree-k relation span independently.

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qdyb/levi_civita.hpp"
#include "qdyb/rmatrix.hpp"

namespace qdyb {

// Memoized p -> TensorOp. Rows are the free i-labels, columns the a-slots.
template <class F>
class LeftFn {
 public:
  using Fn = std::function<TensorOp<F>(const WeightPoint&)>;
  LeftFn() = default;
  explicit LeftFn(Fn f) : impl_(std::make_shared<Impl>(Impl{std::move(f), {}})) {}
  const TensorOp<F>& operator()(const WeightPoint& p) const {
    auto it = impl_->cache.find(p);
    if (it != impl_->cache.end()) return it->second;
    return impl_->cache.emplace(p, impl_->f(p)).first->second;
  }

 private:
  struct Impl {
    Fn f;
    std::map<WeightPoint, TensorOp<F>> cache;
  };
  std::shared_ptr<Impl> impl_;
};

template <class F>
struct SlotExpr {
  int n = 0, k = 0, detpow = 0;
  std::vector<std::string> ilab, alab;
  LeftFn<F> left;
  TensorOp<F> right;           // rows: k slots, cols: alab
  bool pdep = false;            // left depends on p
  std::set<std::string> uses;  // certificates the normalization relied on
};

// Reorders the row (or column) sites of t: new site s is old site perm[s].
template <class F>
TensorOp<F> permute_sites(const TensorOp<F>& t, const std::vector<int>& perm, bool rows) {
  const int n = t.n();
  TensorOp<F> out(n, t.rsites(), t.csites());
  auto remap = [&](Index x, int sites) {
    auto m = unflatten(x, n, sites);
    MultiIndex r(sites);
    for (int s = 0; s < sites; ++s) r[s] = m[perm[s]];
    return flatten(r, n);
  };
  for (Index r = 0; r < t.rows(); ++r)
    for (const auto& [c, v] : t.row(r)) {
      if (rows) out.add_entry(remap(r, t.rsites()), c, v);
      else out.add_entry(r, remap(c, t.csites()), v);
    }
  return out;
}

// Parameters, sample points and cached evaluations shared by expressions.
template <class F>
class Calculus {
 public:
  Calculus(SLnParams<F> P, std::vector<WeightPoint> samples, bool unimodular = true)
      : P_(std::move(P)), samples_(std::move(samples)), unimodular_(unimodular),
        Rc_(build_dj(P_.ctx())), eps_up_(eps_const(P_.ctx(), true)), eps_lo_(eps_const(P_.ctx(), false)) {}

  int n() const { return P_.n(); }
  const SLnParams<F>& params() const { return P_; }
  const QContext<F>& ctx() const { return P_.ctx(); }
  const std::vector<WeightPoint>& samples() const { return samples_; }
  bool unimodular() const { return unimodular_; }
  const TensorOp<F>& Rc() const { return Rc_; }

  // p - sum_{from <= m < to} v^(I_m). With unimodular = false the last basis
  // vector shifts nothing, so the X matrix has determinant != 1.
  WeightPoint shifted(WeightPoint p, const MultiIndex& I, int from, int to) const {
    for (int m = from; m < to; ++m)
      if (unimodular_ || I[m] != n() - 1) p = p.shifted(I[m], -1);
    return p;
  }

  // prod_{from <= t < to} K_{I_t}(p - sum_{from <= m < t} v^(I_m))^d
  F kfactor(const WeightPoint& p, const MultiIndex& I, int from, int to, int d) const {
    F acc(1);
    if (d == 0) return acc;
    WeightPoint w = p;
    for (int t = from; t < to; ++t) {
      F kv = K(w)[I[t]];
      acc *= power(kv, d);
      if (unimodular_ || I[t] != n() - 1) w = w.shifted(I[t], -1);
    }
    return acc;
  }

  const std::vector<F>& K(const WeightPoint& p) const {
    auto it = kcache_.find(p);
    if (it != kcache_.end()) return it->second;
    auto nk = build_nk(EpsFamily<F>::dynamic(P_), ctx(), p);
    std::vector<F> d(n());
    for (int i = 0; i < n(); ++i) d[i] = nk.K.at(i, i);
    return kcache_.emplace(p, d).first->second;
  }
  const std::vector<F>& N(const WeightPoint& p) const {
    auto it = ncache_.find(p);
    if (it != ncache_.end()) return it->second;
    auto nk = build_nk(EpsFamily<F>::dynamic(P_), ctx(), p);
    std::vector<F> d(n());
    for (int i = 0; i < n(); ++i) d[i] = nk.N.at(i, i);
    return ncache_.emplace(p, d).first->second;
  }

  const EpsTensor<F>& E_lo(const WeightPoint& p) const { return eps_at(p, false); }
  const EpsTensor<F>& E_up(const WeightPoint& p) const { return eps_at(p, true); }
  const EpsTensor<F>& eps_lo() const { return eps_lo_; }
  const EpsTensor<F>& eps_up() const { return eps_up_; }

  const HeckeRep<F>& dyn(const WeightPoint& p, int k) const {
    auto key = std::make_pair(p, k);
    auto it = dyn_.find(key);
    if (it != dyn_.end()) return it->second;
    return dyn_.emplace(key, HeckeRep<F>::dynamic(P_, p, k)).first->second;
  }
  const HeckeRep<F>& con(int k) const {
    auto it = con_.find(k);
    if (it != con_.end()) return it->second;
    return con_.emplace(k, HeckeRep<F>::constant(Rc_, ctx(), k)).first->second;
  }

  std::string fresh(const std::string& stem) { return "_" + stem + std::to_string(counter_++); }

  std::set<std::string> certified;

 private:
  const EpsTensor<F>& eps_at(const WeightPoint& p, bool up) const {
    auto key = std::make_pair(p, up);
    auto it = ecache_.find(key);
    if (it != ecache_.end()) return it->second;
    return ecache_.emplace(key, eps_dyn(P_, p, up)).first->second;
  }

  SLnParams<F> P_;
  std::vector<WeightPoint> samples_;
  bool unimodular_;
  TensorOp<F> Rc_;
  EpsTensor<F> eps_up_, eps_lo_;
  int counter_ = 0;
  mutable std::map<WeightPoint, std::vector<F>> kcache_, ncache_;
  mutable std::map<std::pair<WeightPoint, bool>, EpsTensor<F>> ecache_;
  mutable std::map<std::pair<WeightPoint, int>, HeckeRep<F>> dyn_;
  mutable std::map<int, HeckeRep<F>> con_;
};

// ---- leaves ----------------------------------------------------------------

template <class F>
SlotExpr<F> expr_scalar(const Calculus<F>& C, const F& c) {
  SlotExpr<F> e;
  e.n = C.n();
  TensorOp<F> one(C.n(), 0, 0);
  one.add_entry(0, 0, c);
  e.left = LeftFn<F>([one](const WeightPoint&) { return one; });
  e.right = TensorOp<F>::identity(C.n(), 0);
  return e;
}

template <class F>
SlotExpr<F> expr_a(const Calculus<F>& C, const std::string& i, const std::string& alpha) {
  SlotExpr<F> e;
  e.n = C.n();
  e.k = 1;
  e.ilab = {i};
  e.alab = {alpha};
  auto id = TensorOp<F>::identity(C.n(), 1);
  e.left = LeftFn<F>([id](const WeightPoint&) { return id; });
  e.right = id;
  return e;
}

template <class F>
SlotExpr<F> expr_det(const Calculus<F>& C, int power_) {
  auto e = expr_scalar(C, F(1));
  e.detpow = power_;
  return e;
}

// p-dependent tensor on i-labels; f returns a column (rows: labels).
template <class F>
SlotExpr<F> expr_pfunc(const Calculus<F>& C, std::vector<std::string> labels,
                       std::function<TensorOp<F>(const WeightPoint&)> f) {
  SlotExpr<F> e;
  e.n = C.n();
  e.ilab = std::move(labels);
  e.left = LeftFn<F>(std::move(f));
  e.right = TensorOp<F>::identity(C.n(), 0);
  e.pdep = true;
  return e;
}

// Constant tensor on alpha-labels given as a row (cols: labels).
template <class F>
SlotExpr<F> expr_const(const Calculus<F>& C, std::vector<std::string> labels, TensorOp<F> row) {
  auto e = expr_scalar(C, F(1));
  e.alab = std::move(labels);
  e.right = std::move(row);
  return e;
}

template <class F>
TensorOp<F> column_of(const EpsTensor<F>& t) {
  TensorOp<F> c(t.n, t.n, 0);
  for (const auto& [m, v] : t.entries) c.add_entry(flatten(m, t.n), 0, v);
  return c;
}

template <class F>
TensorOp<F> row_of(const EpsTensor<F>& t) {
  TensorOp<F> r(t.n, 0, t.n);
  for (const auto& [m, v] : t.entries) r.add_entry(0, flatten(m, t.n), v);
  return r;
}

// Flattens an operator on `sites` sites into a tensor with 2*sites indices
// (row indices first), as a column or a row.
template <class F>
TensorOp<F> op_as_tensor(const TensorOp<F>& op, bool column) {
  const int n = op.n(), s = op.rsites();
  TensorOp<F> t = column ? TensorOp<F>(n, 2 * s, 0) : TensorOp<F>(n, 0, 2 * s);
  for (Index r = 0; r < op.rows(); ++r)
    for (const auto& [c, v] : op.row(r)) {
      Index x = r * op.cols() + c;
      if (column) t.add_entry(x, 0, v);
      else t.add_entry(0, x, v);
    }
  return t;
}

template <class F>
SlotExpr<F> expr_diag(const Calculus<F>& C, const std::string& x, const std::string& y,
                      std::function<F(const WeightPoint&, int)> d) {
  int n = C.n();
  return expr_pfunc<F>(C, {x, y}, [n, d](const WeightPoint& p) {
    TensorOp<F> t(n, 2, 0);
    for (int i = 0; i < n; ++i) t.add_entry(i * n + i, 0, d(p, i));
    return t;
  });
}

// ---- product ---------------------------------------------------------------

namespace detail {

struct LabelPlan {
  std::vector<std::string> out;
  std::vector<std::pair<int, int>> contracted;  // (pos in X, pos in Y)
  std::vector<int> xfree, yfree;
};

inline LabelPlan plan(const std::vector<std::string>& x, const std::vector<std::string>& y) {
  LabelPlan p;
  for (int a = 0; a < static_cast<int>(x.size()); ++a) {
    auto it = std::find(y.begin(), y.end(), x[a]);
    if (it != y.end()) p.contracted.push_back({a, static_cast<int>(it - y.begin())});
    else {
      p.xfree.push_back(a);
      p.out.push_back(x[a]);
    }
  }
  for (int b = 0; b < static_cast<int>(y.size()); ++b)
    if (std::find(x.begin(), x.end(), y[b]) == x.end()) {
      p.yfree.push_back(b);
      p.out.push_back(y[b]);
    }
  return p;
}

inline bool consistent(const LabelPlan& pl, const MultiIndex& mx, const MultiIndex& my) {
  for (auto [a, b] : pl.contracted)
    if (mx[a] != my[b]) return false;
  return true;
}

inline MultiIndex merged(const LabelPlan& pl, const MultiIndex& mx, const MultiIndex& my) {
  MultiIndex m;
  for (int a : pl.xfree) m.push_back(mx[a]);
  for (int b : pl.yfree) m.push_back(my[b]);
  return m;
}

}  // namespace detail

template <class F>
SlotExpr<F> multiply(const Calculus<F>& C, const SlotExpr<F>& X, const SlotExpr<F>& Y) {
  for (const auto& l : X.ilab)
    if (std::find(Y.alab.begin(), Y.alab.end(), l) != Y.alab.end())
      throw DomainError("label " + l + " used on both index sides");
  for (const auto& l : X.alab)
    if (std::find(Y.ilab.begin(), Y.ilab.end(), l) != Y.ilab.end())
      throw DomainError("label " + l + " used on both index sides");
  const int n = C.n();
  SlotExpr<F> e;
  e.n = n;
  e.k = X.k + Y.k;
  e.detpow = X.detpow + Y.detpow;
  e.uses = X.uses;
  e.uses.insert(Y.uses.begin(), Y.uses.end());
  e.pdep = X.pdep || Y.pdep || (X.detpow != 0 && Y.k > 0) || (X.k > 0 && Y.k > 0);
  if (X.detpow != 0 && Y.pdep) e.uses.insert("det-commutes-p");
  if (X.detpow != 0 && Y.k > 0) e.uses.insert("det-exchange-a");

  auto ip = detail::plan(X.ilab, Y.ilab);
  auto ap = detail::plan(X.alab, Y.alab);
  e.ilab = ip.out;
  e.alab = ap.out;

  // alpha side
  TensorOp<F> R(n, e.k, static_cast<int>(e.alab.size()));
  const int xa = static_cast<int>(X.alab.size()), ya = static_cast<int>(Y.alab.size());
  for (Index rx = 0; rx < X.right.rows(); ++rx)
    for (const auto& [cx, vx] : X.right.row(rx)) {
      auto mx = unflatten(cx, n, xa);
      for (Index ry = 0; ry < Y.right.rows(); ++ry)
        for (const auto& [cy, vy] : Y.right.row(ry)) {
          auto my = unflatten(cy, n, ya);
          if (!detail::consistent(ap, mx, my)) continue;
          R.add_entry(rx * Y.right.rows() + ry, flatten(detail::merged(ap, mx, my), n), vx * vy);
        }
    }
  e.right = std::move(R);

  // i side: L_X(p)[O_X, I_X] L_Y(p - s(I_X))[O_Y, I_Y] Kf(p - s(I_X); I_Y)^{d_X}
  const Calculus<F>* Cp = &C;
  const int xi = static_cast<int>(X.ilab.size()), yi = static_cast<int>(Y.ilab.size());
  const int kx = X.k, ky = Y.k, dx = X.detpow, oi = static_cast<int>(e.ilab.size());
  auto LX = X.left, LY = Y.left;
  e.left = LeftFn<F>([=](const WeightPoint& p) {
    TensorOp<F> L(n, oi, kx + ky);
    const auto& lx = LX(p);
    const Index ycols = ipow(n, ky);
    for (Index ox = 0; ox < lx.rows(); ++ox) {
      if (lx.row(ox).empty()) continue;
      auto mx = unflatten(ox, n, xi);
      for (const auto& [ix, vx] : lx.row(ox)) {
        auto Ix = unflatten(ix, n, kx);
        auto ps = Cp->shifted(p, Ix, 0, kx);
        const auto& ly = LY(ps);
        for (Index oy = 0; oy < ly.rows(); ++oy) {
          if (ly.row(oy).empty()) continue;
          auto my = unflatten(oy, n, yi);
          if (!detail::consistent(ip, mx, my)) continue;
          Index orow = flatten(detail::merged(ip, mx, my), n);
          for (const auto& [iy, vy] : ly.row(oy)) {
            F v = vx * vy;
            if (dx != 0) v *= Cp->kfactor(ps, unflatten(iy, n, ky), 0, ky, dx);
            L.add_entry(orow, ix * ycols + iy, v);
          }
        }
      }
    }
    return L;
  });
  return e;
}

// ---- comparison -----------------------------------------------------------

// Reorders the free labels of e to follow `order` (a permutation of e's labels).
template <class F>
SlotExpr<F> relabel_order(const SlotExpr<F>& e, const std::vector<std::string>& iorder,
                          const std::vector<std::string>& aorder) {
  auto perm_of = [](const std::vector<std::string>& from, const std::vector<std::string>& to) {
    std::vector<int> perm;
    for (const auto& l : to) {
      auto it = std::find(from.begin(), from.end(), l);
      if (it == from.end()) throw DomainError("label mismatch: " + l);
      perm.push_back(static_cast<int>(it - from.begin()));
    }
    return perm;
  };
  auto ip = perm_of(e.ilab, iorder), ap = perm_of(e.alab, aorder);
  SlotExpr<F> out = e;
  out.ilab = iorder;
  out.alab = aorder;
  out.right = permute_sites(e.right, ap, false);
  auto L = e.left;
  out.left = LeftFn<F>([L, ip](const WeightPoint& p) { return permute_sites(L(p), ip, true); });
  return out;
}

// Equality of normal forms as coefficient tensors L (x) R at every sample.
template <class F>
std::optional<std::string> compare_exprs(const Calculus<F>& C, const SlotExpr<F>& A, const SlotExpr<F>& B0) {
  if (A.k != B0.k) return "slot count " + std::to_string(A.k) + " vs " + std::to_string(B0.k);
  if (A.detpow != B0.detpow) return "det power " + std::to_string(A.detpow) + " vs " + std::to_string(B0.detpow);
  auto sorted = [](auto v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  if (sorted(A.ilab) != sorted(B0.ilab) || sorted(A.alab) != sorted(B0.alab)) return "free labels differ";
  auto B = relabel_order(B0, A.ilab, A.alab);
  // R_A = t R_B, then L_A t = L_B
  std::optional<F> t;
  bool ra_zero = A.right.is_zero(), rb_zero = B.right.is_zero();
  if (ra_zero != rb_zero) {
    if (ra_zero) {
      for (const auto& p : C.samples())
        if (!B.left(p).is_zero()) return "alpha side vanishes only on one side";
    } else {
      for (const auto& p : C.samples())
        if (!A.left(p).is_zero()) return "alpha side vanishes only on one side";
    }
    return std::nullopt;
  }
  if (ra_zero) return std::nullopt;
  for (Index r = 0; r < B.right.rows() && !t; ++r)
    if (!B.right.row(r).empty()) {
      auto [c, vb] = B.right.row(r).front();
      t = A.right.at(r, c) / vb;
    }
  if (t->is_zero()) return "alpha sides not proportional";
  if (auto d = A.right.first_diff(B.right.scaled(*t))) return "alpha side " + d->str();
  for (const auto& p : C.samples()) {
    if (auto d = A.left(p).scaled(*t).first_diff(B.left(p))) return "at " + p.str() + " i side " + d->str();
  }
  return std::nullopt;
}

// ---- moves -----------------------------------------------------------------

struct MoveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class F>
TensorOp<F> word_image(const HeckeRep<F>& h, const std::vector<int>& word) {
  auto t = h.one();
  for (int l : word) t = t * (l > 0 ? h.g(l) : h.g_inv(-l));
  return t;
}

inline std::vector<int> word_inverse(std::vector<int> w) {
  std::reverse(w.begin(), w.end());
  for (auto& l : w) l = -l;
  return w;
}

// L a R = L rho_d(w) a rho_c(w)^{-1} R. RL inserts w; LR inserts w^{-1}.
template <class F>
SlotExpr<F> move_intertwine(const Calculus<F>& C, const SlotExpr<F>& e, std::vector<int> word, bool rl) {
  for (int l : word)
    if (l == 0 || std::abs(l) >= e.k) throw MoveError("generator out of range for " + std::to_string(e.k) + " slots");
  if (!rl) word = word_inverse(word);
  SlotExpr<F> out = e;
  out.right = word_image(C.con(e.k), word_inverse(word)) * e.right;
  auto L = e.left;
  const Calculus<F>* Cp = &C;
  int k = e.k;
  out.left = LeftFn<F>([L, Cp, k, word](const WeightPoint& p) { return L(p) * word_image(Cp->dyn(p, k), word); });
  return out;
}

// LR: L rho_d(A) = L lets rho_c(A) enter R. RL: rho_c(A) R = R lets rho_d(A) enter L.
template <class F>
SlotExpr<F> move_absorb(const Calculus<F>& C, const SlotExpr<F>& e, int i, int j, bool lr) {
  if (i < 1 || j > e.k || i > j) throw MoveError("window out of range");
  SlotExpr<F> out = e;
  const int k = e.k;
  if (lr) {
    for (const auto& p : C.samples()) {
      const auto& L = e.left(p);
      if (auto d = (L * C.dyn(p, k).antisym(i, j)).first_diff(L))
        throw MoveError("left factor does not absorb the antisymmetrizer at " + p.str() + ": " + d->str());
    }
    out.right = C.con(k).antisym(i, j) * e.right;
  } else {
    if (auto d = (C.con(k).antisym(i, j) * e.right).first_diff(e.right))
      throw MoveError("right factor does not absorb the antisymmetrizer: " + d->str());
    auto L = e.left;
    const Calculus<F>* Cp = &C;
    out.left = LeftFn<F>([L, Cp, k, i, j](const WeightPoint& p) { return L(p) * Cp->dyn(p, k).antisym(i, j); });
  }
  return out;
}

namespace detail {

// Splits a slot multi-index into (pre, window, post) around window [s, s+n).
inline MultiIndex join(const MultiIndex& pre, const MultiIndex& w, const MultiIndex& post) {
  MultiIndex m = pre;
  m.insert(m.end(), w.begin(), w.end());
  m.insert(m.end(), post.begin(), post.end());
  return m;
}

inline MultiIndex without_window(const MultiIndex& m, int s, int n) {
  MultiIndex r(m.begin(), m.begin() + s);
  r.insert(r.end(), m.begin() + s + n, m.end());
  return r;
}

inline MultiIndex identity_tuple(int n) {
  MultiIndex m(n);
  std::iota(m.begin(), m.end(), 0);
  return m;
}

}  // namespace detail

// Extracts M with L[O, (pre, w, post)] = M[O, (pre, post)] * T(p - s(pre))[w], checking equality.
template <class F>
TensorOp<F> factor_left(const Calculus<F>& C, const TensorOp<F>& L, const WeightPoint& p, int s,
                        bool upper, const F& scale) {
  const int n = C.n(), k = L.csites();
  TensorOp<F> M(n, L.rsites(), k - n);
  auto id = detail::identity_tuple(n);
  for (Index o = 0; o < L.rows(); ++o)
    for (const auto& [c, v] : L.row(o)) {
      auto I = unflatten(c, n, k);
      MultiIndex w(I.begin() + s, I.begin() + s + n);
      if (w != id) continue;
      MultiIndex pre(I.begin(), I.begin() + s);
      auto ps = C.shifted(p, pre, 0, s);
      const auto& T = upper ? C.E_up(ps) : C.E_lo(ps);
      M.add_entry(o, flatten(detail::without_window(I, s, n), n), v / (T[id] * scale));
    }
  TensorOp<F> back(n, L.rsites(), k);
  for (Index o = 0; o < M.rows(); ++o)
    for (const auto& [c, v] : M.row(o)) {
      auto J = unflatten(c, n, k - n);
      MultiIndex pre(J.begin(), J.begin() + s), post(J.begin() + s, J.end());
      const auto& T = upper ? C.E_up(C.shifted(p, pre, 0, s)) : C.E_lo(C.shifted(p, pre, 0, s));
      for (const auto& [w, tv] : T.entries) back.add_entry(o, flatten(detail::join(pre, w, post), n), v * tv * scale);
    }
  if (auto d = back.first_diff(L)) throw MoveError("window does not carry the dynamical tensor at " + p.str() + ": " + d->str());
  return M;
}

// Extracts R' with R[(pre, w, post), O'] = T[w] R'[(pre, post), O'].
template <class F>
TensorOp<F> factor_right(const Calculus<F>& C, const TensorOp<F>& R, int s, const EpsTensor<F>& T) {
  const int n = C.n(), k = R.rsites();
  auto id = detail::identity_tuple(n);
  TensorOp<F> Rp(n, k - n, R.csites());
  for (Index r = 0; r < R.rows(); ++r) {
    auto A = unflatten(r, n, k);
    MultiIndex w(A.begin() + s, A.begin() + s + n);
    if (w != id) continue;
    for (const auto& [c, v] : R.row(r)) Rp.add_entry(flatten(detail::without_window(A, s, n), n), c, v / T[id]);
  }
  TensorOp<F> back(n, k, R.csites());
  for (Index r = 0; r < Rp.rows(); ++r) {
    auto J = unflatten(r, n, k - n);
    MultiIndex pre(J.begin(), J.begin() + s), post(J.begin() + s, J.end());
    for (const auto& [w, tv] : T.entries)
      for (const auto& [c, v] : Rp.row(r)) back.add_entry(flatten(detail::join(pre, w, post), n), c, tv * v);
  }
  if (auto d = back.first_diff(R)) throw MoveError("window does not carry the constant tensor: " + d->str());
  return Rp;
}

// Contracts the constant tensor T into R over window slots: R'[(pre, post)] = sum_w T[w] R[(pre, w, post)].
template <class F>
TensorOp<F> contract_right(const Calculus<F>& C, const TensorOp<F>& R, int s, const EpsTensor<F>& T) {
  const int n = C.n(), k = R.rsites();
  TensorOp<F> out(n, k - n, R.csites());
  for (Index r = 0; r < R.rows(); ++r) {
    if (R.row(r).empty()) continue;
    auto A = unflatten(r, n, k);
    MultiIndex w(A.begin() + s, A.begin() + s + n);
    F tv = T[w];
    if (tv.is_zero()) continue;
    for (const auto& [c, v] : R.row(r)) out.add_entry(flatten(detail::without_window(A, s, n), n), c, tv * v);
  }
  return out;
}

// Multiplies L'[O, (pre, post)] by Kf(p - s(pre); post)^d for a det placed after pre.
template <class F>
TensorOp<F> with_kfactor(const Calculus<F>& C, const TensorOp<F>& M, const WeightPoint& p, int s, int d) {
  const int n = C.n(), k = M.csites();
  if (s == k || d == 0) return M;
  TensorOp<F> out(n, M.rsites(), k);
  for (Index o = 0; o < M.rows(); ++o)
    for (const auto& [c, v] : M.row(o)) {
      auto J = unflatten(c, n, k);
      out.add_entry(o, c, v * C.kfactor(C.shifted(p, J, 0, s), J, s, k, d));
    }
  return out;
}

enum class FoldKind { Definition, CollapseLeft, CollapseRight };

// Window [s+1, s+n] (1-based start s+1):
//   Definition:    (1/[n]!) E_(p) a_w eps^  -> det
//   CollapseLeft:  E_(p) a_w                -> det eps_
//   CollapseRight: a_w eps^                 -> E^(p) det
// The new det sits after the prefix; moving it right uses the det/a exchange.
template <class F>
SlotExpr<F> move_fold(const Calculus<F>& C, const SlotExpr<F>& e, int start, FoldKind kind) {
  const int n = C.n(), s = start - 1;
  if (s < 0 || s + n > e.k) throw MoveError("fold window out of range");
  SlotExpr<F> out = e;
  out.k = e.k - n;
  out.detpow = e.detpow + 1;
  if (s + n < e.k) out.uses.insert("det-exchange-a");
  if (kind != FoldKind::Definition) out.uses.insert("det-fold");
  F inv_fact = F(1) / C.ctx().qfact(n);

  if (kind == FoldKind::CollapseRight) {
    out.right = factor_right(C, e.right, s, C.eps_up());
  } else if (kind == FoldKind::Definition) {
    out.right = factor_right(C, e.right, s, C.eps_up());
  } else {
    out.right = contract_right(C, e.right, s, C.eps_lo());
  }

  // Verify the i-side factorization eagerly at every sample.
  std::map<WeightPoint, TensorOp<F>> Ms;
  for (const auto& p : C.samples()) {
    const auto& L = e.left(p);
    TensorOp<F> M;
    if (kind == FoldKind::CollapseRight) {
      M = TensorOp<F>(n, L.rsites(), e.k - n);
      for (Index o = 0; o < L.rows(); ++o)
        for (const auto& [c, v] : L.row(o)) {
          auto I = unflatten(c, n, e.k);
          MultiIndex w(I.begin() + s, I.begin() + s + n), pre(I.begin(), I.begin() + s);
          F tv = C.E_up(C.shifted(p, pre, 0, s))[w];
          if (!tv.is_zero()) M.add_entry(o, flatten(detail::without_window(I, s, n), n), v * tv);
        }
    } else {
      M = factor_left(C, L, p, s, false, kind == FoldKind::Definition ? inv_fact : F(1));
    }
    Ms.emplace(p, with_kfactor(C, M, p, s, 1));
  }
  auto shared = std::make_shared<std::map<WeightPoint, TensorOp<F>>>(std::move(Ms));
  out.left = LeftFn<F>([shared](const WeightPoint& p) {
    auto it = shared->find(p);
    if (it == shared->end()) throw MoveError("folded expression evaluated off the sample set at " + p.str());
    return it->second;
  });
  return out;
}

// a-block det -> a-block (1/[n]!) E_(p) a_w eps^ for the det at the right end.
template <class F>
SlotExpr<F> move_expand(const Calculus<F>& C, const SlotExpr<F>& e) {
  if (e.detpow <= 0) throw MoveError("no det to expand");
  const int n = C.n(), k = e.k;
  SlotExpr<F> out = e;
  out.k = k + n;
  out.detpow = e.detpow - 1;
  F inv_fact = F(1) / C.ctx().qfact(n);
  TensorOp<F> R(n, k + n, static_cast<int>(e.alab.size()));
  for (Index r = 0; r < e.right.rows(); ++r)
    for (const auto& [w, tv] : C.eps_up().entries)
      for (const auto& [c, v] : e.right.row(r)) R.add_entry(r * ipow(n, n) + flatten(w, n), c, tv * v);
  out.right = std::move(R);
  auto L = e.left;
  const Calculus<F>* Cp = &C;
  out.left = LeftFn<F>([L, Cp, n, k, inv_fact](const WeightPoint& p) {
    const auto& l = L(p);
    TensorOp<F> t(n, l.rsites(), k + n);
    for (Index o = 0; o < l.rows(); ++o)
      for (const auto& [c, v] : l.row(o)) {
        auto I = unflatten(c, n, k);
        const auto& T = Cp->E_lo(Cp->shifted(p, I, 0, k));
        for (const auto& [w, tv] : T.entries) t.add_entry(o, c * ipow(n, n) + flatten(w, n), v * tv * inv_fact);
      }
    return t;
  });
  return out;
}

// ---- membership oracle ----------------------------------------------------

enum class Verdict { Equal, Unequal, Inconclusive };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Equal: return "equal";
    case Verdict::Unequal: return "unequal";
    default: return "inconclusive";
  }
}

// Decides A - B in span{ rho_d(g_i) (x) 1 - 1 (x) rho_c(g_i)^T } at each sample,
// after equalizing det powers by expanding the larger one.
template <class F>
Verdict membership_oracle(const Calculus<F>& C, SlotExpr<F> A, SlotExpr<F> B, Index max_dim = 4096) {
  // right multiplication by det^m is invertible, so shift both powers to be >= 0
  if (int m = std::min(A.detpow, B.detpow); m < 0) {
    A.detpow -= m;
    B.detpow -= m;
  }
  while (A.detpow > B.detpow) A = move_expand(C, A);
  while (B.detpow > A.detpow) B = move_expand(C, B);
  if (A.k != B.k) return Verdict::Unequal;
  auto sorted = [](auto v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  if (sorted(A.ilab) != sorted(B.ilab) || sorted(A.alab) != sorted(B.alab)) return Verdict::Unequal;
  B = relabel_order(B, A.ilab, A.alab);
  const int n = C.n(), k = A.k;
  const Index side = ipow(n, k), dim = side * side;
  if (dim > max_dim) return Verdict::Inconclusive;
  using Row = typename TensorOp<F>::Row;
  for (const auto& p : C.samples()) {
    Echelon<F> span;
    const auto& hd = C.dyn(p, k);
    const auto& hc = C.con(k);
    for (int i = 1; i < k; ++i) {
      const auto& gd = hd.g(i);
      auto gct = hc.g(i).transpose();
      for (Index I2 = 0; I2 < side; ++I2)
        for (Index Aa = 0; Aa < side; ++Aa) {
          std::map<Index, F> acc;
          for (const auto& [I, v] : gd.row(I2)) acc[I * side + Aa] += v;
          for (const auto& [A2, v] : gct.row(Aa)) acc[I2 * side + A2] -= v;
          Row r;
          for (auto& [c, v] : acc)
            if (!v.is_zero()) r.push_back({c, v});
          if (!r.empty()) span.add(std::move(r));
        }
    }
    const auto& LA = A.left(p);
    const auto& LB = B.left(p);
    const Index outs_i = LA.rows(), outs_a = A.right.cols();
    auto Rat = A.right.transpose(), Rbt = B.right.transpose();
    for (Index o = 0; o < outs_i; ++o)
      for (Index o2 = 0; o2 < outs_a; ++o2) {
        std::map<Index, F> acc;
        for (const auto& [I, v] : LA.row(o))
          for (const auto& [Aa, w] : Rat.row(o2)) acc[I * side + Aa] += v * w;
        for (const auto& [I, v] : LB.row(o))
          for (const auto& [Aa, w] : Rbt.row(o2)) acc[I * side + Aa] -= v * w;
        Row r;
        for (auto& [c, v] : acc)
          if (!v.is_zero()) r.push_back({c, v});
        if (!r.empty() && !span.contains(r)) return Verdict::Unequal;
      }
  }
  return Verdict::Equal;
}

// ---- named factors -----------------------------------------------------------

template <class F>
SlotExpr<F> expr_E(const Calculus<F>& C, std::vector<std::string> labels, bool upper) {
  if (static_cast<int>(labels.size()) != C.n()) throw DomainError("E needs n labels");
  const Calculus<F>* Cp = &C;
  return expr_pfunc<F>(C, std::move(labels),
                       [Cp, upper](const WeightPoint& p) { return column_of(upper ? Cp->E_up(p) : Cp->E_lo(p)); });
}

template <class F>
SlotExpr<F> expr_eps(const Calculus<F>& C, std::vector<std::string> labels, bool upper) {
  if (static_cast<int>(labels.size()) != C.n()) throw DomainError("eps needs n labels");
  return expr_const<F>(C, std::move(labels), row_of(upper ? C.eps_up() : C.eps_lo()));
}

template <class F>
SlotExpr<F> expr_K(const Calculus<F>& C, const std::string& x, const std::string& y, int power_ = 1) {
  const Calculus<F>* Cp = &C;
  return expr_diag<F>(C, x, y, [Cp, power_](const WeightPoint& p, int i) { return power(Cp->K(p)[i], power_); });
}

template <class F>
SlotExpr<F> expr_N(const Calculus<F>& C, const std::string& x, const std::string& y) {
  const Calculus<F>* Cp = &C;
  return expr_diag<F>(C, x, y, [Cp](const WeightPoint& p, int i) { return Cp->N(p)[i]; });
}

// q^{d_i} pi_in with d_i = 1/n - 1 - 2 p_i (p centered), written with r = q^{1/n}.
template <class F>
F d_entry(const SLnParams<F>& P, const WeightPoint& p, int i) {
  const int n = P.n();
  long sum = 0;
  for (long v : p.reps()) sum += v;
  long e = 1 - n - 2 * (n * p.reps()[i] - sum);
  F pi = i == n - 1 ? F(1) : P.pi(i, n - 1);
  return P.ctx().root_pow(e) * pi;
}

template <class F>
SlotExpr<F> expr_D(const Calculus<F>& C, const std::string& x, const std::string& y, int power_ = 1) {
  const SLnParams<F>* P = &C.params();
  return expr_diag<F>(C, x, y, [P, power_](const WeightPoint& p, int i) { return power(d_entry(*P, p, i), power_); });
}

// U(p) = prod_{i<j} phi_ij(p_ij) / f(p_ij), phi(x) = c^x w^{x(x-1)/2}.
template <class F>
F u_function(const SLnParams<F>& P, const WeightPoint& p) {
  F u(1);
  for (int i = 0; i < P.n(); ++i)
    for (int j = i + 1; j < P.n(); ++j) {
      long x = p.pdiff(i, j);
      const auto& g = P.alpha().upper(i, j);
      u *= power(g.c, x) * power(g.w, x * (x - 1) / 2) / P.fval(i, j, x);
    }
  return u;
}

template <class F>
SlotExpr<F> expr_scalar_fn(const Calculus<F>& C, std::function<F(const WeightPoint&)> h) {
  const int n = C.n();
  return expr_pfunc<F>(C, {}, [n, h](const WeightPoint& p) {
    TensorOp<F> t(n, 0, 0);
    t.add_entry(0, 0, h(p));
    return t;
  });
}

// Constant R (or its inverse) on alpha labels (row1, row2, col1, col2).
template <class F>
SlotExpr<F> expr_Rc(const Calculus<F>& C, std::vector<std::string> labels, bool inverse) {
  if (labels.size() != 4) throw DomainError("R needs four labels");
  auto R = inverse ? hecke_inverse(C.Rc(), C.ctx().lambda()) : C.Rc();
  return expr_const<F>(C, std::move(labels), op_as_tensor(R, false));
}

template <class F>
SlotExpr<F> expr_delta(const Calculus<F>& C, const std::string& x, const std::string& y, bool alpha_side) {
  auto id = op_as_tensor(TensorOp<F>::identity(C.n(), 1), !alpha_side);
  if (alpha_side) return expr_const<F>(C, {x, y}, id);
  return expr_pfunc<F>(C, {x, y}, [id](const WeightPoint&) { return id; });
}

template <class F>
SlotExpr<F> product(const Calculus<F>& C, const std::vector<SlotExpr<F>>& fs) {
  if (fs.empty()) return expr_scalar(C, F(1));
  auto e = fs.front();
  for (std::size_t i = 1; i < fs.size(); ++i) e = multiply(C, e, fs[i]);
  return e;
}

// a^{-1}[alpha, j] = (-1)^{n-1}/[n-1]! det^{-1} E_{<2..n+1|}(p) a_2 .. a_n eps^{|1..n>}
// with j the last lower index of E.
template <class F>
SlotExpr<F> expr_ainv(Calculus<F>& C, const std::string& alpha, const std::string& j) {
  const int n = C.n();
  F c = F(n % 2 == 1 ? 1 : -1) / C.ctx().qfact(n - 1);
  std::vector<std::string> is, as{alpha};
  for (int m = 1; m < n; ++m) {
    is.push_back(C.fresh("i"));
    as.push_back(C.fresh("b"));
  }
  auto elab = is;
  elab.push_back(j);
  std::vector<SlotExpr<F>> fs{expr_scalar(C, c), expr_det(C, -1), expr_E(C, elab, false)};
  for (int m = 0; m < n - 1; ++m) fs.push_back(expr_a(C, is[m], as[m + 1]));
  fs.push_back(expr_eps(C, as, true));
  return product(C, fs);
}

// M[alpha, beta] = a^{-1} D a
template <class F>
SlotExpr<F> expr_M(Calculus<F>& C, const std::string& alpha, const std::string& beta) {
  auto x = C.fresh("j"), y = C.fresh("j");
  return product(C, {expr_ainv(C, alpha, x), expr_D(C, x, y), expr_a(C, y, beta)});
}

}  // namespace qdyb
