#pragma once

// Quantum Levi-Civita tensors (constant and dynamical), the rank-one
// projectors they span, the diagonal N/K matrices, and brute-force checks of
// the permutation-sum identities behind their normalization.

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "qdyb/hecke.hpp"

namespace qdyb {

inline std::vector<MultiIndex> permutations(int n) {
  MultiIndex s(n);
  std::iota(s.begin(), s.end(), 0);
  std::vector<MultiIndex> out;
  do out.push_back(s);
  while (std::next_permutation(s.begin(), s.end()));
  return out;
}

inline int inversions(const MultiIndex& s) {
  int l = 0;
  for (std::size_t a = 0; a < s.size(); ++a)
    for (std::size_t b = a + 1; b < s.size(); ++b)
      if (s[a] > s[b]) ++l;
  return l;
}

template <class F>
struct EpsTensor {
  int n = 0;
  bool upper = true;
  std::map<MultiIndex, F> entries;  // keyed by index tuples with distinct entries

  F operator[](const MultiIndex& m) const {
    auto it = entries.find(m);
    return it == entries.end() ? F(0) : it->second;
  }

  // Upper tensors as columns (n^n x 1), lower ones as rows (1 x n^n).
  TensorOp<F> op() const {
    TensorOp<F> t = upper ? TensorOp<F>(n, n, 0) : TensorOp<F>(n, 0, n);
    for (const auto& [m, v] : entries) {
      Index x = flatten(m, n);
      if (upper) t.add_entry(x, 0, v);
      else t.add_entry(0, x, v);
    }
    return t;
  }

  nlohmann::json to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [m, v] : entries) {
      std::string key;
      for (int x : m) key += std::to_string(x + 1);
      j[key] = v.str();
    }
    return j;
  }
};

// eps^{s} = qbar^{n(n-1)/2} (-q)^{l(s)}, eps_{s} = (-q)^{l(s)}
template <class F>
EpsTensor<F> eps_const(const QContext<F>& ctx, bool upper) {
  EpsTensor<F> e{ctx.n(), upper, {}};
  const int n = ctx.n();
  for (const auto& s : permutations(n)) {
    F v = power(-ctx.q(), inversions(s));
    if (upper) v *= ctx.qpow(-static_cast<long>(n) * (n - 1) / 2);
    e.entries[s] = v;
  }
  return e;
}

// Upper: (-1)^l prod_{inverted pairs (j,i)} alpha_ji(p_ji) prod_{a<b} xi_{i_a i_b}.
// Lower: (-1)^l prod_{inverted pairs (j,i)} alpha_ij(p_ij).
template <class F>
EpsTensor<F> eps_dyn(const SLnParams<F>& P, const WeightPoint& p, bool upper) {
  const int n = P.n();
  EpsTensor<F> e{n, upper, {}};
  for (const auto& s : permutations(n)) {
    F v(inversions(s) % 2 == 0 ? 1 : -1);
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        int x = s[a], y = s[b];
        if (x > y) v *= upper ? P.alpha()(x, y, p.pdiff(x, y)) : P.alpha()(y, x, p.pdiff(y, x));
        if (upper) v *= P.xi(x, y, p);
      }
    e.entries[s] = v;
  }
  return e;
}

template <class F>
F contract(const EpsTensor<F>& lo, const EpsTensor<F>& up) {
  F s(0);
  for (const auto& [m, v] : lo.entries) s += v * up[m];
  return s;
}

// Evaluates the co/contravariant tensors at any weight; constant tensors ignore it.
template <class F>
struct EpsFamily {
  std::function<EpsTensor<F>(const WeightPoint&)> up, lo;

  static EpsFamily constant(const QContext<F>& ctx) {
    auto u = eps_const(ctx, true), l = eps_const(ctx, false);
    return {[u](const WeightPoint&) { return u; }, [l](const WeightPoint&) { return l; }};
  }
  static EpsFamily dynamic(const SLnParams<F>& P) {
    return {[P](const WeightPoint& w) { return eps_dyn(P, w, true); },
            [P](const WeightPoint& w) { return eps_dyn(P, w, false); }};
  }
};

struct EigenReport {
  std::optional<std::string> residual;
  std::size_t right_kernel = 0, left_kernel = 0;
};

// g_i E = -qbar E and E^t g_i = -qbar E^t on a k = n rep, plus the dimensions of
// the joint (-qbar)-eigenspaces on both sides.
template <class F>
EigenReport eigencheck(const HeckeRep<F>& h, const EpsTensor<F>& up, const EpsTensor<F>& lo) {
  EigenReport rep;
  const int n = h.n();
  if (h.k() != n) throw DomainError("eigencheck needs k = n");
  const F mq = -h.ctx().qbar();
  auto col = up.op(), row = lo.op();
  std::vector<TensorOp<F>> shifted, shifted_t;
  for (int i = 1; i < n; ++i) {
    if (auto d = diff_str(h.g(i) * col, col.scaled(mq))) {
      rep.residual = "upper g" + std::to_string(i) + " " + *d;
    }
    if (auto d = diff_str(row * h.g(i), row.scaled(mq))) {
      if (!rep.residual) rep.residual = "lower g" + std::to_string(i) + " " + *d;
    }
    auto m = h.g(i) + h.one().scaled(h.ctx().qbar());
    shifted.push_back(m);
    shifted_t.push_back(m.transpose());
  }
  std::vector<const TensorOp<F>*> a, b;
  for (auto& m : shifted) a.push_back(&m);
  for (auto& m : shifted_t) b.push_back(&m);
  Index dim = ipow(n, n);
  rep.right_kernel = dim - sparse_rank<F>(TensorOp<F>::stack_rows(a));
  rep.left_kernel = dim - sparse_rank<F>(TensorOp<F>::stack_rows(b));
  return rep;
}

// (1/[n]!) E^{|w>} E_{<w|} on the window w = i..i+n-1 of k sites; the tensors
// are evaluated at p - v^(I_1) - .. - v^(I_{i-1}) for row prefix I.
template <class F>
TensorOp<F> projector_from_eps(const EpsFamily<F>& E, const QContext<F>& ctx, const WeightPoint& p, int i, int k) {
  const int n = ctx.n();
  if (i < 1 || i + n - 1 > k) throw DomainError("window out of range");
  F norm = F(1) / ctx.qfact(n);
  TensorOp<F> out(n, k);
  std::map<WeightPoint, std::pair<EpsTensor<F>, EpsTensor<F>>> cache;
  for (Index r = 0; r < out.rows(); ++r) {
    auto I = unflatten(r, n, k);
    MultiIndex win(I.begin() + (i - 1), I.begin() + (i - 1 + n));
    auto w = p;
    for (int m = 0; m < i - 1; ++m) w = w.shifted(I[m], -1);
    auto it = cache.find(w);
    if (it == cache.end()) it = cache.emplace(w, std::make_pair(E.up(w), E.lo(w))).first;
    F u = it->second.first[win];
    if (u.is_zero()) continue;
    for (const auto& [m, v] : it->second.second.entries) {
      auto J = I;
      std::copy(m.begin(), m.end(), J.begin() + (i - 1));
      out.add_entry(r, flatten(J, n), u * v * norm);
    }
  }
  return out;
}

template <class F>
struct NKMatrices {
  TensorOp<F> N, K;  // full one-site matrices from the contractions
};

// N^i_j = c sum_k E_{k j}(p - v^(i)) E^{i k}(p), K^i_j = c sum_k E_{j k}(p) E^{k i}(p - v^(j)),
// c = (-1)^{n-1}/[n-1]!, with k running over n-1 indices.
template <class F>
NKMatrices<F> build_nk(const EpsFamily<F>& E, const QContext<F>& ctx, const WeightPoint& p) {
  const int n = ctx.n();
  F c = F(n % 2 == 1 ? 1 : -1) / ctx.qfact(n - 1);
  NKMatrices<F> out{TensorOp<F>(n, 1), TensorOp<F>(n, 1)};
  auto up0 = E.up(p), lo0 = E.lo(p);
  for (int i = 0; i < n; ++i) {
    auto lo_i = E.lo(p.shifted(i, -1)), up_i = E.up(p.shifted(i, -1));
    for (int j = 0; j < n; ++j) {
      F nv(0), kv(0);
      for (const auto& [m, v] : up0.entries)
        if (m[0] == i) {
          MultiIndex rest(m.begin() + 1, m.end());
          rest.push_back(j);
          nv += lo_i[rest] * v;
        }
      // K^j_i: lower index i carries the shift
      for (const auto& [m, v] : lo0.entries)
        if (m[0] == i) {
          MultiIndex rest(m.begin() + 1, m.end());
          rest.push_back(j);
          kv += v * up_i[rest];
        }
      out.N.add_entry(i, j, c * nv);
      out.K.add_entry(j, i, c * kv);
    }
  }
  return out;
}

// N^i_i = prod_{j != i} alpha_ij(p_ij - theta_ji) xi_ij(p_ij), theta_ji = 1 for j > i.
template <class F>
DiagOp<F> n_closed_form(const SLnParams<F>& P, const WeightPoint& p) {
  return DiagOp<F>::from_function(P.n(), 1, [&](const MultiIndex& m) {
    int i = m[0];
    F v(1);
    for (int j = 0; j < P.n(); ++j) {
      if (j == i) continue;
      long x = p.pdiff(i, j);
      v *= P.alpha()(i, j, x - (j > i ? 1 : 0)) * P.xi(i, j, x);
    }
    return v;
  });
}

// Relations on k = n+1 sites, written as matrices with one free one-site index:
//   lower_down: E_{<1..n|}(p) g_n..g_1 = q K(p) X_1 E_{<2..n+1|}(p) X_1^{-1}
//   lower_up:   X_1 E_{<2..n+1|}(p) X_1^{-1} g_1..g_n = q N(p) E_{<1..n|}(p)
//   upper_up:   g_1..g_n (E^{|1..n>} (x) 1) = q E^{|2..n+1>} N
//   upper_down: g_n..g_1 (1 (x) E^{|2..n+1>}) = q E^{|1..n>} K
struct RelationReport {
  std::optional<std::string> lower_down, lower_up, upper_up, upper_down;
};

template <class F>
RelationReport eps_relations(const HeckeRep<F>& h, const EpsFamily<F>& E, const WeightPoint& p, bool uppers) {
  const int n = h.n(), k = n + 1;
  if (h.k() != k) throw DomainError("relations need k = n + 1");
  const F q = h.ctx().q();
  auto nk = build_nk(E, h.ctx(), p);
  auto down = h.chain(n, 1), up = h.chain(1, n);
  auto lo0 = E.lo(p);
  std::vector<EpsTensor<F>> lo_shift;
  for (int i = 0; i < n; ++i) lo_shift.push_back(E.lo(p.shifted(i, -1)));
  RelationReport rep;

  // rows: free index; columns: k sites
  TensorOp<F> E1(n, 1, k), E2(n, 1, k);  // E_{<1..n|}(p) (x) free last, X_1 E_{<2..n+1|} X_1^{-1} with free first
  for (const auto& [m, v] : lo0.entries)
    for (int i = 0; i < n; ++i) {
      auto J = m;
      J.push_back(i);
      E1.add_entry(i, flatten(J, n), v);
    }
  for (int i = 0; i < n; ++i)
    for (const auto& [m, v] : lo_shift[i].entries) {
      MultiIndex J{i};
      J.insert(J.end(), m.begin(), m.end());
      E2.add_entry(i, flatten(J, n), v);
    }
  rep.lower_down = diff_str(E1 * down, (nk.K * E2).scaled(q));
  rep.lower_up = diff_str(E2 * up, (nk.N * E1).scaled(q));

  if (uppers) {
    auto up0 = E.up(p);
    TensorOp<F> C1(n, k, 1), C2(n, k, 1);  // E^{|1..n>} (x) 1 and 1 (x) E^{|2..n+1>}
    for (const auto& [m, v] : up0.entries)
      for (int i = 0; i < n; ++i) {
        auto J = m;
        J.push_back(i);
        C1.add_entry(flatten(J, n), i, v);
        MultiIndex L{i};
        L.insert(L.end(), m.begin(), m.end());
        C2.add_entry(flatten(L, n), i, v);
      }
    // q E^{|2..n+1>} N: entry [I; j] = q E^{I_2..I_{n+1}} N^{I_1}_j
    rep.upper_up = diff_str(up * C1, (C2 * nk.N).scaled(q));
    rep.upper_down = diff_str(down * C2, (C1 * nk.K).scaled(q));
  }
  return rep;
}

// ---- permutation-sum identities -----------------------------------------

// xi_ij = d - b_ij with b_ij = lambda x_j / (x_j - x_i): b_ij + b_ji = lambda and
// the cyclic three-term relation hold for any distinct x.
template <class F>
struct XiTable {
  int n;
  std::vector<F> b;  // n x n, zero diagonal
  F d, lam;
  F bij(int i, int j) const { return b[i * n + j]; }
  F xi(int i, int j) const { return d - bij(i, j); }

  static XiTable from_points(const std::vector<F>& x, const F& d, const F& lam) {
    int n = static_cast<int>(x.size());
    XiTable t{n, std::vector<F>(n * n, F(0)), d, lam};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) t.b[i * n + j] = lam * x[j] / (x[j] - x[i]);
    return t;
  }
  static XiTable from_params(const SLnParams<F>& P, const WeightPoint& p) {
    int n = P.n();
    XiTable t{n, std::vector<F>(n * n, F(0)), P.ctx().q(), P.ctx().lambda()};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) t.b[i * n + j] = P.b(i, j, p);
    return t;
  }
};

// sum over orderings of idx of prod_{a<b} xi_{i_a i_b}
template <class F>
F ordered_sum(const std::function<F(int, int)>& xi, MultiIndex idx) {
  std::sort(idx.begin(), idx.end());
  F s(0);
  do {
    F v(1);
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = a + 1; b < idx.size(); ++b) v *= xi(idx[a], idx[b]);
    s += v;
  } while (std::next_permutation(idx.begin(), idx.end()));
  return s;
}

// sum_r prod_{l != r} f(i_l, i_r)
template <class F>
F row_sum(const std::function<F(int, int)>& f, const MultiIndex& idx) {
  F s(0);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    F v(1);
    for (std::size_t l = 0; l < idx.size(); ++l)
      if (l != r) v *= f(idx[l], idx[r]);
    s += v;
  }
  return s;
}

// All increasing index subsets of size m from 0..n-1.
inline std::vector<MultiIndex> subsets(int n, int m) {
  std::vector<MultiIndex> out;
  MultiIndex cur;
  std::function<void(int)> rec = [&](int start) {
    if (static_cast<int>(cur.size()) == m) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < n; ++i) {
      cur.push_back(i);
      rec(i + 1);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

struct AppendixReport {
  std::vector<std::pair<std::string, std::optional<std::string>>> items;
  bool ok() const {
    for (const auto& [_, w] : items)
      if (w) return false;
    return true;
  }
};

// Checks, for every index subset of size up to kmax:
//   ordered sums equal [k]_d!, row sums of xi equal [k+1]_d, row sums of b equal lambda^{m-1},
//   and b cycles of length up to 5 reverse with sign (-1)^k.
template <class F>
AppendixReport appendix_bruteforce(const XiTable<F>& t, const QContext<F>& ctx, int kmax) {
  AppendixReport rep;
  auto xi = [&](int i, int j) { return t.xi(i, j); };
  auto bf = [&](int i, int j) { return t.bij(i, j); };
  auto first = [](std::optional<std::string>& slot, const std::string& s) {
    if (!slot) slot = s;
  };
  std::optional<std::string> ik, a2, a3, cyc;
  for (int k = 1; k <= kmax; ++k)
    for (const auto& idx : subsets(t.n, k)) {
      F want = ctx.qfact_d(k, t.d);
      F got = ordered_sum<F>(xi, idx);
      if (got != want) first(ik, "I_" + std::to_string(k) + ": " + got.str() + " vs " + want.str());
      if (k >= 2) {
        F rs = row_sum<F>(xi, idx);
        if (rs != ctx.qnum_d(k, t.d)) first(a2, "xi row sum k=" + std::to_string(k) + ": " + rs.str());
        F bs = row_sum<F>(bf, idx);
        if (bs != power(t.lam, k - 1)) first(a3, "b row sum m=" + std::to_string(k) + ": " + bs.str());
      }
      if (k >= 2 && k <= 5) {
        auto perm = idx;
        do {
          F fwd(1), bwd(1);
          for (int a = 0; a < k; ++a) {
            fwd *= t.bij(perm[a], perm[(a + 1) % k]);
            bwd *= t.bij(perm[(a + 1) % k], perm[a]);
          }
          if (fwd != bwd * F(k % 2 == 0 ? 1 : -1)) first(cyc, "cycle length " + std::to_string(k));
        } while (std::next_permutation(perm.begin(), perm.end()));
      }
    }
  rep.items = {{"ordered-sum", ik}, {"xi-row-sum", a2}, {"b-row-sum", a3}, {"b-cycle", cyc}};
  return rep;
}

// From xi-only hypotheses (xi_ij + xi_ji = [2] and three-index row sums = [3]),
// the row sums equal [k] and ordered sums equal [k]! for all k up to kmax.
template <class F>
AppendixReport xi_only_bruteforce(const std::function<F(int, int)>& xi, int n, const QContext<F>& ctx, int kmax) {
  AppendixReport rep;
  std::optional<std::string> hyp, rows, sums;
  for (int k = 2; k <= std::min(3, n); ++k)
    for (const auto& idx : subsets(n, k))
      if (row_sum<F>(xi, idx) != ctx.qnum(k) && !hyp) hyp = "hypothesis fails at k=" + std::to_string(k);
  for (int k = 1; k <= kmax; ++k)
    for (const auto& idx : subsets(n, k)) {
      if (k >= 2 && row_sum<F>(xi, idx) != ctx.qnum(k) && !rows) rows = "row sum k=" + std::to_string(k);
      if (ordered_sum<F>(xi, idx) != ctx.qfact(k) && !sums) sums = "ordered sum k=" + std::to_string(k);
    }
  rep.items = {{"hypotheses", hyp}, {"row-sums", rows}, {"ordered-sums", sums}};
  return rep;
}

// -(b_ji / b_ij) q^{2 p_ij} = pi_ij
template <class F>
std::optional<std::string> pi_relation(const SLnParams<F>& P, const WeightPoint& p) {
  for (int i = 0; i < P.n(); ++i)
    for (int j = 0; j < P.n(); ++j) {
      if (i == j) continue;
      F lhs = -(P.b(j, i, p) / P.b(i, j, p)) * P.ctx().qpow(2 * p.pdiff(i, j));
      if (lhs != P.pi(i, j))
        return "pi_" + std::to_string(i + 1) + std::to_string(j + 1) + ": " + lhs.str() + " vs " + P.pi(i, j).str();
    }
  return std::nullopt;
}

}  // namespace qdyb
