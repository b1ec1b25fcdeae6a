#pragma once

// Hecke algebra words, their images on V^{(x)k}, and the q-antisymmetrizer
// towers.
//
// A^(i,j) is the antisymmetrizer of the subalgebra generated by g_i..g_{j-1};
// A^(j) = A^(1,j) and A^(j,j) = 1. Symmetrizers are the same recursion with
// q replaced by -1/q.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qdyb/report.hpp"
#include "qdyb/rmatrix.hpp"
#include "qdyb/shift.hpp"

namespace qdyb {

// Linear combination of words; letter +i is g_i, -i is g_i^{-1} (1-based).
template <class F>
class HeckeWord {
 public:
  using Word = std::vector<int>;

  HeckeWord() = default;
  static HeckeWord one() { return term({}, F(1)); }
  static HeckeWord term(Word w, const F& c) {
    HeckeWord h;
    h.add(std::move(w), c);
    return h;
  }
  static HeckeWord gen(int i) { return term({i}, F(1)); }
  static HeckeWord gen_inv(int i) { return term({-i}, F(1)); }
  // g_from g_{from +- 1} .. g_to
  static HeckeWord chain(int from, int to) {
    Word w;
    int step = from <= to ? 1 : -1;
    for (int i = from;; i += step) {
      w.push_back(i);
      if (i == to) break;
    }
    return term(w, F(1));
  }

  void add(Word w, const F& c) {
    if (c.is_zero()) return;
    auto& v = terms_[std::move(w)];
    v += c;
  }
  const std::map<Word, F>& terms() const { return terms_; }

  HeckeWord operator+(const HeckeWord& o) const {
    HeckeWord r = *this;
    for (const auto& [w, c] : o.terms_) r.add(w, c);
    return r;
  }
  HeckeWord operator-(const HeckeWord& o) const { return *this + o.scaled(F(-1)); }
  HeckeWord scaled(const F& s) const {
    HeckeWord r;
    for (const auto& [w, c] : terms_) r.add(w, c * s);
    return r;
  }
  HeckeWord operator*(const HeckeWord& o) const {
    HeckeWord r;
    for (const auto& [a, c] : terms_)
      for (const auto& [b, d] : o.terms_) {
        Word w = a;
        w.insert(w.end(), b.begin(), b.end());
        r.add(w, c * d);
      }
    return r;
  }

  int max_letter() const {
    int m = 0;
    for (const auto& [w, _] : terms_)
      for (int x : w) m = std::max(m, std::abs(x));
    return m;
  }

 private:
  std::map<Word, F> terms_;
};

enum class Flavor { Constant, Dynamic, LocalizedLast };

inline const char* flavor_name(Flavor f) {
  switch (f) {
    case Flavor::Constant: return "constant";
    case Flavor::Dynamic: return "dynamic";
    case Flavor::LocalizedLast: return "localized-last";
  }
  return "?";
}

template <class F>
class HeckeRep {
 public:
  static HeckeRep constant(const TensorOp<F>& R, const QContext<F>& ctx, int k) {
    HeckeRep h(ctx, R.n(), k, Flavor::Constant);
    for (int i = 1; i < k; ++i) h.g_.push_back(R.embed(i, k));
    h.finish();
    return h;
  }

  static HeckeRep dynamic(const SLnParams<F>& P, const WeightPoint& p, int k) {
    HeckeRep h(P.ctx(), P.n(), k, Flavor::Dynamic);
    for (int i = 1; i < k; ++i) h.g_.push_back(dyn_generator(P, p, i, k));
    h.finish();
    return h;
  }

  static HeckeRep localized_last(const SLnParams<F>& P, const WeightPoint& p, int k) {
    HeckeRep h(P.ctx(), P.n(), k, Flavor::LocalizedLast);
    for (int i = 1; i < k; ++i) h.g_.push_back(dyn_generator_last(P, p, i, k));
    h.finish();
    return h;
  }

  // Arbitrary generator images (used for negative controls).
  static HeckeRep from_images(const QContext<F>& ctx, int n, int k, std::vector<TensorOp<F>> g) {
    HeckeRep h(ctx, n, k, Flavor::Constant);
    h.g_ = std::move(g);
    h.finish();
    return h;
  }

  int n() const { return n_; }
  int k() const { return k_; }
  Flavor flavor() const { return flavor_; }
  const QContext<F>& ctx() const { return ctx_; }

  const TensorOp<F>& g(int i) const {
    if (i < 1 || i >= k_) throw DomainError("generator index out of range");
    return g_[i - 1];
  }
  const TensorOp<F>& g_inv(int i) const {
    if (i < 1 || i >= k_) throw DomainError("generator index out of range");
    return ginv_[i - 1];
  }
  TensorOp<F> one() const { return TensorOp<F>::identity(n_, k_); }

  TensorOp<F> apply(const HeckeWord<F>& h) const {
    TensorOp<F> out(n_, k_);
    for (const auto& [w, c] : h.terms()) {
      TensorOp<F> t = one();
      for (int x : w) t = t * (x > 0 ? g(x) : g_inv(-x));
      out = out + t.scaled(c);
    }
    return out;
  }

  // g_from .. g_to as an operator
  TensorOp<F> chain(int from, int to) const { return apply(HeckeWord<F>::chain(from, to)); }

  // Antisymmetrizer A^(i,j) grown on the right: A^(i,j-1)(q^{m-1} - [m-1] g_{j-1})A^(i,j-1)/[m].
  const TensorOp<F>& antisym(int i, int j) const { return tower(i, j, false); }
  const TensorOp<F>& antisym(int j) const { return tower(1, j, false); }
  const TensorOp<F>& sym(int i, int j) const { return tower(i, j, true); }

  // Same element grown on the left: A^(i+1,j)(q^{m-1} - [m-1] g_i)A^(i+1,j)/[m].
  TensorOp<F> antisym_left(int i, int j) const {
    if (i == j) return one();
    int m = j - i + 1;
    const auto& inner = antisym(i + 1, j);
    auto mid = one().scaled(ctx_.qpow(m - 1)) - g(i).scaled(ctx_.qnum(m - 1));
    return (inner * mid * inner).scaled(F(1) / ctx_.qnum(m));
  }

 private:
  HeckeRep(const QContext<F>& ctx, int n, int k, Flavor f) : ctx_(ctx), n_(n), k_(k), flavor_(f) {}

  void finish() {
    for (const auto& x : g_) ginv_.push_back(x - TensorOp<F>::identity(n_, k_).scaled(ctx_.lambda()));
  }

  // [m] evaluated at base point qq
  static F qnum_at(const F& qq, long m) {
    F lam = qq - F(1) / qq;
    if (lam.is_zero()) return F(m) * power(qq, m - 1);
    return (power(qq, m) - power(F(1) / qq, m)) / lam;
  }

  const TensorOp<F>& tower(int i, int j, bool symmetric) const {
    if (i < 1 || j > k_ || i > j) throw DomainError("antisymmetrizer window out of range");
    auto key = std::make_tuple(i, j, symmetric);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    TensorOp<F> out;
    if (i == j) {
      out = one();
    } else {
      F qq = symmetric ? -ctx_.qbar() : ctx_.q();
      int m = j - i + 1;
      F qm = qnum_at(qq, m);
      if (qm.is_zero()) throw DomainError("vanishing q-integer in antisymmetrizer");
      const auto& prev = tower(i, j - 1, symmetric);
      auto mid = one().scaled(power(qq, m - 1)) - g(j - 1).scaled(qnum_at(qq, m - 1));
      out = (prev * mid * prev).scaled(F(1) / qm);
    }
    return memo_.emplace(key, std::move(out)).first->second;
  }

  QContext<F> ctx_;
  int n_, k_;
  Flavor flavor_;
  std::vector<TensorOp<F>> g_, ginv_;
  mutable std::map<std::tuple<int, int, bool>, TensorOp<F>> memo_;
};

template <class F>
std::optional<std::string> diff_str(const TensorOp<F>& a, const TensorOp<F>& b) {
  if (auto d = a.first_diff(b)) return d->str();
  return std::nullopt;
}

// Braid, quadratic and locality relations of the generator images.
template <class F>
std::optional<std::string> hecke_relations(const HeckeRep<F>& h) {
  const F lam = h.ctx().lambda();
  for (int i = 1; i < h.k(); ++i) {
    if (auto d = diff_str(h.g(i) * h.g(i), h.one() + h.g(i).scaled(lam))) return "quadratic g" + std::to_string(i) + " " + *d;
    if (i + 1 < h.k())
      if (auto d = diff_str(h.g(i) * h.g(i + 1) * h.g(i), h.g(i + 1) * h.g(i) * h.g(i + 1)))
        return "braid g" + std::to_string(i) + " " + *d;
    for (int j = i + 2; j < h.k(); ++j)
      if (auto d = diff_str(h.g(i) * h.g(j), h.g(j) * h.g(i)))
        return "locality g" + std::to_string(i) + "g" + std::to_string(j) + " " + *d;
  }
  return std::nullopt;
}

// (g_i + qbar) A^(j) = A^(j) (g_i + qbar) = 0 for i < j, and
// A^(j) A^(i,l) = A^(i,l) A^(j) = A^(j) for windows inside 1..j.
template <class F>
std::optional<std::string> antisym_properties(const HeckeRep<F>& h) {
  const auto zero = TensorOp<F>::zero(h.n(), h.k());
  for (int j = 1; j <= h.k(); ++j) {
    const auto& A = h.antisym(j);
    if (auto d = diff_str(A * A, A)) return "idempotent A" + std::to_string(j) + " " + *d;
    for (int i = 1; i < j; ++i) {
      auto gi = h.g(i) + h.one().scaled(h.ctx().qbar());
      if (auto d = diff_str(gi * A, zero)) return "left kill " + *d;
      if (auto d = diff_str(A * gi, zero)) return "right kill " + *d;
    }
    for (int i = 1; i <= j; ++i)
      for (int l = i; l <= j; ++l) {
        const auto& B = h.antisym(i, l);
        if (auto d = diff_str(A * B, A)) return "absorb " + *d;
        if (auto d = diff_str(B * A, A)) return "absorb " + *d;
      }
    if (auto d = diff_str(h.antisym_left(1, j), A)) return "left-grown tower " + *d;
  }
  return std::nullopt;
}

// "Rank one" is meant on the window of the antisymmetrizer: as an operator on
// V^{(x)k} the image of an m-site antisymmetrizer then has rank n^(k-m).
template <class F>
bool window_rank_one(const HeckeRep<F>& h, const TensorOp<F>& A, int m) {
  return exact_rank(A) == ipow(h.n(), h.k() - m);
}

// Smallest m with A^(m+1) = 0 and A^(m) of rank one (m < k), or A^(k) of rank one.
template <class F>
std::optional<int> height(const HeckeRep<F>& h) {
  for (int m = 1; m <= h.k(); ++m) {
    if (m < h.k()) {
      if (h.antisym(m + 1).is_zero() && window_rank_one(h, h.antisym(m), m)) return m;
    } else if (window_rank_one(h, h.antisym(m), m)) {
      return m;
    }
  }
  return std::nullopt;
}

// Windowed height conditions: A^(i,n+i) = 0 for i = 1..k-n and A^(j,n+j-1) of
// rank one for j = 1..k-n+1.
template <class F>
std::optional<std::string> windowed_height(const HeckeRep<F>& h, int n) {
  for (int i = 1; i + n <= h.k(); ++i)
    if (!h.antisym(i, n + i).is_zero()) return "A(" + std::to_string(i) + "," + std::to_string(n + i) + ") nonzero";
  for (int j = 1; j + n - 1 <= h.k(); ++j)
    if (!window_rank_one(h, h.antisym(j, n + j - 1), n))
      return "rank A(" + std::to_string(j) + "," + std::to_string(n + j - 1) + ") = " +
             std::to_string(exact_rank(h.antisym(j, n + j - 1)));
  return std::nullopt;
}

// The six equivalent forms of A^(n+1) = 0 on a rep with k = n+1 sites.
template <class F>
std::vector<std::pair<std::string, std::optional<std::string>>> top_vanishing_forms(const HeckeRep<F>& h, int n) {
  if (h.k() != n + 1) throw DomainError("battery needs k = n + 1");
  const auto& ctx = h.ctx();
  F c = ctx.q() * ctx.qnum(n) * F(n % 2 == 1 ? 1 : -1);
  F inv2 = F(1) / (ctx.qnum(n) * ctx.qnum(n));
  const auto& An = h.antisym(1, n);
  const auto& A2 = h.antisym(2, n + 1);
  auto down = n >= 1 ? h.chain(n, 1) : h.one();
  auto up = n >= 1 ? h.chain(1, n) : h.one();
  std::vector<std::pair<std::string, std::optional<std::string>>> out;
  out.push_back({"a", diff_str(An * down, (An * A2).scaled(c))});
  out.push_back({"b", diff_str(up * An, (A2 * An).scaled(c))});
  out.push_back({"c", diff_str(down * A2, (An * A2).scaled(c))});
  out.push_back({"d", diff_str(A2 * up, (A2 * An).scaled(c))});
  out.push_back({"e", diff_str(An * A2 * An, An.scaled(inv2))});
  out.push_back({"f", diff_str(A2 * An * A2, A2.scaled(inv2))});
  return out;
}

// A^(j+1) = [j+1]^{-1} A^(j) (q^j - q^{j-1} g_j + .. + (-1)^j g_j .. g_1)
template <class F>
std::optional<std::string> alternating_expansion(const HeckeRep<F>& h, int j) {
  const auto& ctx = h.ctx();
  HeckeWord<F> s;
  for (int m = 0; m <= j; ++m) {
    F c = ctx.qpow(j - m) * F(m % 2 == 0 ? 1 : -1);
    if (m == 0) s = s + HeckeWord<F>::one().scaled(c);
    else s = s + HeckeWord<F>::chain(j, j - m + 1).scaled(c);
  }
  auto rhs = (h.antisym(j) * h.apply(s)).scaled(F(1) / ctx.qnum(j + 1));
  return diff_str(h.antisym(j + 1), rhs);
}

// phi_i(t) = (g_i .. g_{r+i}) t (g_i .. g_{r+i})^{-1} maps g_m to g_{m+1} for
// i <= m < r+i and A^(i,r+i) to A^(i+1,r+i+1).
template <class F>
std::optional<std::string> inner_automorphism(const HeckeRep<F>& h, int i, int r) {
  if (r == 0) {
    // phi_i(1) = 1 is the only statement for trivial windows
    auto c = h.g(i);
    auto ci = h.g_inv(i);
    return diff_str(c * h.one() * ci, h.one());
  }
  if (i + r >= h.k()) throw DomainError("window exceeds the representation");
  auto c = h.chain(i, r + i);
  std::vector<int> letters;
  for (int m = r + i; m >= i; --m) letters.push_back(-m);
  auto cinv = h.apply(HeckeWord<F>::term(letters, F(1)));
  if (auto d = diff_str(c * cinv, h.one())) return "chain inverse " + *d;
  for (int m = i; m < r + i; ++m)
    if (auto d = diff_str(c * h.g(m) * cinv, h.g(m + 1))) return "generator g" + std::to_string(m) + " " + *d;
  return diff_str(c * h.antisym(i, r + i) * cinv, h.antisym(i + 1, r + i + 1));
}

// The dynamic image of g_i is not of the form 1 (x) M (x) 1 for i >= 2: returns
// true when a row pair differing only before site i acts differently.
template <class F>
bool is_nonlocal(const HeckeRep<F>& h, int i) {
  const int n = h.n(), k = h.k();
  const auto& G = h.g(i);
  for (Index r = 0; r < G.rows(); ++r) {
    auto I = unflatten(r, n, k);
    for (int s = 0; s < k; ++s) {
      if (s == i - 1 || s == i) continue;
      auto J = I;
      J[s] = (I[s] + 1) % n;
      Index r2 = flatten(J, n);
      for (const auto& [c, v] : G.row(r)) {
        auto C = unflatten(c, n, k);
        C[s] = J[s];
        if (G.at(r2, flatten(C, n)) != v) return true;
      }
    }
  }
  return false;
}

// (X_1 .. X_k)^{-1} rho(g_i) (X_1 .. X_k) equals the localized-last image.
template <class F>
std::optional<std::string> conjugated_rep_check(const SLnParams<F>& P, const WeightPoint& p, int k) {
  using SF = ShiftFactor<F>;
  auto bar = HeckeRep<F>::localized_last(P, p, k);
  for (int i = 1; i < k; ++i) {
    std::vector<SF> lhs;
    for (int s = 1; s <= k; ++s) lhs.push_back(XFactor{s, -1});
    lhs.push_back(PFactor<F>{[&P, i, k](const WeightPoint& w) { return dyn_generator(P, w, i, k); }});
    for (int s = 1; s <= k; ++s) lhs.push_back(XFactor{s, 1});
    std::vector<SF> rhs{PFactor<F>{[&P, i, k](const WeightPoint& w) { return dyn_generator_last(P, w, i, k); }}};
    if (auto d = shift_word_residual<F>(P.n(), k, lhs, rhs, p)) return "g" + std::to_string(i) + " " + *d;
  }
  return std::nullopt;
}

}  // namespace qdyb
