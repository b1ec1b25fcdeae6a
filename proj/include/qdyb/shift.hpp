#pragma once

// Products of p-dependent operators and shift operators X.
//
// An element is sum_mu M_mu(p) S(mu) with S(mu) f(p) = f(p - mu) S(mu).
// X_s = diag over site s of S(v^(j)); X_s^e contributes S(e v^(j)) on the
// rows whose site-s index is j. Words are evaluated right to left at a base
// point, memoized on (position, weight).

#include <functional>
#include <map>
#include <variant>
#include <vector>

#include "qdyb/params.hpp"
#include "qdyb/tensor.hpp"

namespace qdyb {

using ShiftKey = std::vector<long>;  // normalized weight (last entry zero)

inline ShiftKey normalize_shift(ShiftKey mu) {
  long last = mu.back();
  for (auto& v : mu) v -= last;
  return mu;
}

template <class F>
class ShiftMat {
 public:
  ShiftMat() = default;
  ShiftMat(int n, int k) : n_(n), k_(k) {}

  void add(const ShiftKey& mu, const TensorOp<F>& m) {
    auto key = normalize_shift(mu);
    auto it = terms_.find(key);
    if (it == terms_.end()) terms_.emplace(key, m);
    else it->second = it->second + m;
  }
  void prune() {
    for (auto it = terms_.begin(); it != terms_.end();)
      it = it->second.is_zero() ? terms_.erase(it) : std::next(it);
  }
  const std::map<ShiftKey, TensorOp<F>>& terms() const { return terms_; }

  friend bool operator==(ShiftMat a, ShiftMat b) {
    a.prune();
    b.prune();
    return a.terms_ == b.terms_;
  }

  // First differing entry, together with the shift it sits at.
  std::optional<std::pair<ShiftKey, Witness<F>>> first_diff(ShiftMat o) const {
    ShiftMat a = *this;
    a.prune();
    o.prune();
    std::map<ShiftKey, int> keys;
    for (auto& [k, _] : a.terms_) keys[k];
    for (auto& [k, _] : o.terms_) keys[k];
    for (auto& [k, _] : keys) {
      auto x = a.terms_.count(k) ? a.terms_.at(k) : TensorOp<F>(n_, k_);
      auto y = o.terms_.count(k) ? o.terms_.at(k) : TensorOp<F>(n_, k_);
      if (auto w = x.first_diff(y)) return std::make_pair(k, *w);
    }
    return std::nullopt;
  }

 private:
  int n_ = 0, k_ = 0;
  std::map<ShiftKey, TensorOp<F>> terms_;
};

template <class F>
struct PFactor {
  std::function<TensorOp<F>(const WeightPoint&)> at;
};

struct XFactor {
  int site;  // 1-based
  long exponent;
};

template <class F>
using ShiftFactor = std::variant<PFactor<F>, XFactor>;

// Evaluates the ordered product of factors at p.
template <class F>
ShiftMat<F> evaluate_word(int n, int k, const std::vector<ShiftFactor<F>>& word, const WeightPoint& p) {
  std::map<std::pair<std::size_t, WeightPoint>, ShiftMat<F>> memo;
  // Tails made only of X factors do not depend on the base point.
  std::vector<bool> pure(word.size() + 1, true);
  for (std::size_t i = word.size(); i-- > 0;)
    pure[i] = pure[i + 1] && std::holds_alternative<XFactor>(word[i]);
  std::function<ShiftMat<F>(std::size_t, const WeightPoint&)> ev = [&](std::size_t i, const WeightPoint& at) {
    if (i == word.size()) {
      ShiftMat<F> one(n, k);
      one.add(ShiftKey(n, 0), TensorOp<F>::identity(n, k));
      return one;
    }
    auto key = std::make_pair(i, pure[i] ? p : at);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    ShiftMat<F> out(n, k);
    if (auto* pf = std::get_if<PFactor<F>>(&word[i])) {
      auto m = pf->at(at);
      auto rest = ev(i + 1, at);
      for (const auto& [mu, t] : rest.terms()) out.add(mu, m * t);
    } else {
      const auto& xf = std::get<XFactor>(word[i]);
      for (int j = 0; j < n; ++j) {
        ShiftKey mu(n, 0);
        mu[j] = xf.exponent;
        // S(mu) B(p) = B(p - mu) S(mu), then project rows on site index j.
        auto rest = ev(i + 1, at.shifted(mu, -1));
        const int site = xf.site - 1;
        for (const auto& [nu, t] : rest.terms()) {
          ShiftKey tot = nu;
          for (int s = 0; s < n; ++s) tot[s] += mu[s];
          out.add(tot, t.filter_rows([&](const MultiIndex& m) { return m[site] == j; }));
        }
      }
    }
    out.prune();
    memo.emplace(key, out);
    return out;
  };
  return ev(0, p);
}

}  // namespace qdyb
