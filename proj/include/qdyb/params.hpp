#pragma once

// Parameter family of SL(n)-type dynamical R-matrices.
//
// A WeightPoint holds integer representatives p_1..p_n of the dynamical
// variables modulo (1,..,1); only differences p_ij = p_i - p_j are
// meaningful. Shifting by v^(i) adds 1 to p_i.

#include <json.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qdyb/scalar.hpp"

namespace qdyb {

class WeightPoint {
 public:
  WeightPoint() = default;
  explicit WeightPoint(std::vector<long> p) : p_(std::move(p)) {
    if (p_.empty()) throw DomainError("empty weight");
    normalize();
  }

  // Builds from p_ij for i < j given row-major (p12, p13, .., p1n, p23, ..).
  static WeightPoint from_pdiff(int n, const std::vector<long>& upper) {
    if (static_cast<long>(upper.size()) != static_cast<long>(n) * (n - 1) / 2)
      throw DomainError("expected n(n-1)/2 differences");
    std::vector<std::vector<long>> d(n, std::vector<long>(n, 0));
    std::size_t t = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        d[i][j] = upper[t++];
        d[j][i] = -d[i][j];
      }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          if (d[i][j] + d[j][k] != d[i][k]) throw DomainError("weight differences are not additive");
    std::vector<long> p(n);
    for (int i = 0; i < n; ++i) p[i] = d[i][n - 1];
    return WeightPoint(p);
  }

  // "p12=2,p23=-1" style; missing pairs are inferred by additivity from the chain.
  static WeightPoint parse(int n, const std::string& s) {
    std::map<std::pair<int, int>, long> given;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      auto eq = item.find('=');
      if (item.size() < 4 || item[0] != 'p' || eq == std::string::npos || eq != 3)
        throw DomainError("bad weight item: " + item);
      int i = item[1] - '0', j = item[2] - '0';
      if (i < 1 || j < 1 || i > n || j > n || i == j) throw DomainError("bad weight index: " + item);
      long v = std::stol(item.substr(eq + 1));
      if (i > j) {
        std::swap(i, j);
        v = -v;
      }
      given[{i - 1, j - 1}] = v;
    }
    std::vector<long> chain(n, 0);  // chain[i] = p_{i,i+1}
    std::vector<bool> known(n, false);
    for (int i = 0; i + 1 < n; ++i) {
      auto it = given.find({i, i + 1});
      if (it != given.end()) {
        chain[i] = it->second;
        known[i] = true;
      }
    }
    std::vector<long> p(n, 0);
    for (int i = n - 2; i >= 0; --i) p[i] = p[i + 1] + chain[i];
    for (auto& [ij, v] : given) {
      if (p[ij.first] - p[ij.second] == v) continue;
      // A single non-adjacent entry may determine one missing link.
      int missing = -1, cnt = 0;
      for (int t = ij.first; t < ij.second; ++t)
        if (!known[t]) missing = t, ++cnt;
      if (cnt != 1) throw DomainError("weight differences are not additive");
      chain[missing] += v - (p[ij.first] - p[ij.second]);
      known[missing] = true;
      for (int i = n - 2; i >= 0; --i) p[i] = p[i + 1] + chain[i];
    }
    return WeightPoint(p);
  }

  int n() const { return static_cast<int>(p_.size()); }
  long p(int i) const { return p_[i]; }
  long pdiff(int i, int j) const { return p_[i] - p_[j]; }
  const std::vector<long>& reps() const { return p_; }

  // p + s v^(i)
  WeightPoint shifted(int i, long s = 1) const {
    auto q = p_;
    q[i] += s;
    return WeightPoint(q);
  }
  WeightPoint shifted(const std::vector<long>& mu, long sign = 1) const {
    auto q = p_;
    for (std::size_t i = 0; i < q.size(); ++i) q[i] += sign * mu[i];
    return WeightPoint(q);
  }

  // Representative with sum zero, as exact rationals.
  std::vector<mpq_class> centered() const {
    mpq_class mean(0);
    for (long v : p_) mean += v;
    mean /= static_cast<long>(p_.size());
    std::vector<mpq_class> out;
    for (long v : p_) out.push_back(mpq_class(v) - mean);
    return out;
  }

  std::string str() const {
    std::string s;
    for (int i = 0; i < n(); ++i)
      for (int j = i + 1; j < n(); ++j) {
        if (!s.empty()) s += ",";
        s += "p" + std::to_string(i + 1) + std::to_string(j + 1) + "=" + std::to_string(pdiff(i, j));
      }
    return s;
  }

  friend bool operator==(const WeightPoint& a, const WeightPoint& b) { return a.p_ == b.p_; }
  friend bool operator<(const WeightPoint& a, const WeightPoint& b) { return a.p_ < b.p_; }

 private:
  void normalize() {
    long last = p_.back();
    for (auto& v : p_) v -= last;
  }
  std::vector<long> p_;
};

// alpha_ij(x) = c_ij w_ij^x for i < j. The relation alpha_ij(x) alpha_ji(-x) = 1
// then gives alpha_ji(x) = c_ij^{-1} w_ij^x.
template <class F>
struct Geometric {
  F c{1};
  F w{1};
  F operator()(long x) const { return c * power(w, x); }
};

template <class F>
class AlphaSpec {
 public:
  AlphaSpec() = default;
  explicit AlphaSpec(int n) : n_(n), upper_(n * n) {}

  static AlphaSpec unit(int n) { return AlphaSpec(n); }

  // alpha_ij = q for i < j, qbar for i > j
  static AlphaSpec standard(int n, const F& q) {
    AlphaSpec a(n);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) a.set(i, j, q, F(1));
    return a;
  }

  void set(int i, int j, const F& c, const F& w) {
    if (i >= j) throw DomainError("alpha entries are set for i < j");
    if (c.is_zero() || w.is_zero()) throw DomainError("alpha must be invertible");
    upper_[i * n_ + j] = {c, w};
  }
  const Geometric<F>& upper(int i, int j) const { return upper_[i * n_ + j]; }

  F operator()(int i, int j, long x) const {
    if (i == j) return F(1);
    if (i < j) return upper_[i * n_ + j](x);
    const auto& g = upper_[j * n_ + i];
    return power(g.w, x) / g.c;
  }

  bool is_constant() const {
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j)
        if (upper_[i * n_ + j].w != F(1)) return false;
    return true;
  }

  int n() const { return n_; }

  template <class G>
  AlphaSpec<G> map_to() const {
    AlphaSpec<G> a(n_);
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j) {
        const auto& g = upper(i, j);
        a.set(i, j, G::from_mpq(g.c.mpq()), G::from_mpq(g.w.mpq()));
      }
    return a;
  }

 private:
  int n_ = 0;
  std::vector<Geometric<F>> upper_;
};

enum class Regime { Generic, BetaInfinity, ConstantMultiparam, Intermediate };

inline const char* regime_name(Regime r) {
  switch (r) {
    case Regime::Generic: return "generic";
    case Regime::BetaInfinity: return "beta-infinity";
    case Regime::ConstantMultiparam: return "constant-multiparam";
    case Regime::Intermediate: return "intermediate";
  }
  return "?";
}

template <class F>
class SLnParams {
 public:
  // beta_chain holds beta_1..beta_{n-1}; an empty chain with beta_infinite set
  // selects the limit regime.
  SLnParams(QContext<F> ctx, std::vector<F> beta_chain, AlphaSpec<F> alpha, bool beta_infinite = false)
      : ctx_(std::move(ctx)), chain_(std::move(beta_chain)), alpha_(std::move(alpha)), inf_(beta_infinite) {
    const int n = ctx_.n();
    if (alpha_.n() != n) throw DomainError("alpha size differs from n");
    if (!inf_ && static_cast<int>(chain_.size()) != n - 1) throw DomainError("expected n-1 beta parameters");
    beta_.assign(n * n, F(0));
    if (inf_) return;
    const F lam = ctx_.lambda();
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        F prod(1), shifted(1);
        for (int k = i; k < j; ++k) {
          prod *= chain_[k];
          shifted *= chain_[k] - lam;
        }
        F den = prod - shifted;
        if (den.is_zero()) throw DomainError("degenerate beta chain");
        beta_[i * n + j] = lam * prod / den;
        beta_[j * n + i] = lam - beta_[i * n + j];
      }
  }

  const QContext<F>& ctx() const { return ctx_; }
  int n() const { return ctx_.n(); }
  bool beta_infinite() const { return inf_; }
  const std::vector<F>& beta_chain() const { return chain_; }
  const AlphaSpec<F>& alpha() const { return alpha_; }

  F beta(int i, int j) const {
    if (inf_) throw DomainError("beta is infinite in this regime");
    return beta_[i * n() + j];
  }

  // Overwrites one derived beta, breaking the symmetry on purpose (negative controls).
  void corrupt_beta(int i, int j, const F& v) {
    if (inf_) throw DomainError("beta is infinite in this regime");
    beta_[i * n() + j] = v;
  }

  SLnParams with_alpha(AlphaSpec<F> a) const {
    SLnParams out = *this;
    out.alpha_ = std::move(a);
    return out;
  }

  F pi(int i, int j) const {
    if (inf_) return F(1);
    F b = beta(i, j);
    if (i == j) return F(1);
    if (b.is_zero()) throw DomainError("pi undefined: beta_ij vanishes");
    return (b - ctx_.lambda()) / b;
  }

  Regime regime() const {
    if (inf_) return Regime::BetaInfinity;
    const F lam = ctx_.lambda();
    bool all_lam = true, all_zero = true, none = true;
    for (const auto& b : chain_) {
      all_lam = all_lam && b == lam;
      all_zero = all_zero && b.is_zero();
      none = none && !(b == lam || b.is_zero());
    }
    if (all_lam || all_zero) return Regime::ConstantMultiparam;
    if (none) return Regime::Generic;
    return Regime::Intermediate;
  }

  // f(x, beta_ij), or [x] in the limit regime.
  F fval(int i, int j, long x) const {
    if (inf_) return ctx_.qnum(x);
    return ctx_.f_func(x, beta(i, j));
  }

  // xi_ij at p_ij = x
  F xi(int i, int j, long x) const {
    if (i == j) return ctx_.q();
    F den = fval(i, j, x);
    if (den.is_zero())
      throw DynamicalPole("dynamical pole at p" + std::to_string(i + 1) + std::to_string(j + 1) + "=" +
                          std::to_string(x));
    return fval(i, j, x - 1) / den;
  }
  F a(int i, int j, long x) const {
    if (i == j) return ctx_.q();
    return alpha_(i, j, x) * xi(i, j, x);
  }
  F b(int i, int j, long x) const {
    if (i == j) return F(0);
    return ctx_.q() - xi(i, j, x);
  }

  F xi(int i, int j, const WeightPoint& p) const { return xi(i, j, p.pdiff(i, j)); }
  F a(int i, int j, const WeightPoint& p) const { return a(i, j, p.pdiff(i, j)); }
  F b(int i, int j, const WeightPoint& p) const { return b(i, j, p.pdiff(i, j)); }

  // True when every f(p_ij + s) with |s| <= reach is nonzero.
  bool pole_free(const WeightPoint& p, int reach) const {
    for (int i = 0; i < n(); ++i)
      for (int j = 0; j < n(); ++j) {
        if (i == j) continue;
        for (long s = -reach - 1; s <= reach + 1; ++s)
          if (fval(i, j, p.pdiff(i, j) + s).is_zero()) return false;
      }
    return true;
  }

  template <class G>
  SLnParams<G> map_to() const {
    std::vector<G> ch;
    for (const auto& b : chain_) ch.push_back(G::from_mpq(b.mpq()));
    return SLnParams<G>(ctx_.template map_to<G>(), ch, alpha_.template map_to<G>(), inf_);
  }

 private:
  QContext<F> ctx_;
  std::vector<F> chain_;
  AlphaSpec<F> alpha_;
  bool inf_;
  std::vector<F> beta_;
};

// JSON form: {n, q, root?, beta:[..] | "infinite", alpha: "standard" | "unit" | [{i,j,c,w}], regime?}
inline SLnParams<Rational> params_from_json(const nlohmann::json& j) {
  int n = j.at("n").get<int>();
  Rational q = Rational::parse(j.at("q").get<std::string>());
  std::optional<Rational> root;
  if (j.contains("root") && !j["root"].is_null()) root = Rational::parse(j["root"].get<std::string>());
  QContext<Rational> ctx(q, n, root);
  bool inf = false;
  std::vector<Rational> chain;
  const auto& jb = j.at("beta");
  if (jb.is_string()) {
    if (jb.get<std::string>() != "infinite") throw DomainError("beta must be a list or \"infinite\"");
    inf = true;
  } else {
    for (const auto& b : jb) chain.push_back(Rational::parse(b.get<std::string>()));
  }
  AlphaSpec<Rational> alpha(n);
  const auto& ja = j.contains("alpha") ? j["alpha"] : nlohmann::json("unit");
  if (ja.is_string()) {
    auto s = ja.get<std::string>();
    if (s == "standard") alpha = AlphaSpec<Rational>::standard(n, q);
    else if (s != "unit") throw DomainError("unknown alpha preset: " + s);
  } else {
    for (const auto& e : ja)
      alpha.set(e.at("i").get<int>() - 1, e.at("j").get<int>() - 1, Rational::parse(e.at("c").get<std::string>()),
                Rational::parse(e.value("w", std::string("1"))));
  }
  SLnParams<Rational> P(ctx, chain, alpha, inf);
  if (j.contains("regime") && j["regime"].get<std::string>() != regime_name(P.regime()))
    throw DomainError("declared regime does not match the parameters");
  return P;
}

inline nlohmann::json params_to_json(const SLnParams<Rational>& P) {
  nlohmann::json j;
  j["n"] = P.n();
  j["q"] = P.ctx().q().str();
  if (P.ctx().has_root()) j["root"] = P.ctx().root().str();
  if (P.beta_infinite()) {
    j["beta"] = "infinite";
  } else {
    j["beta"] = nlohmann::json::array();
    for (const auto& b : P.beta_chain()) j["beta"].push_back(b.str());
  }
  j["alpha"] = nlohmann::json::array();
  for (int i = 0; i < P.n(); ++i)
    for (int k = i + 1; k < P.n(); ++k) {
      const auto& g = P.alpha().upper(i, k);
      j["alpha"].push_back({{"i", i + 1}, {"j", k + 1}, {"c", g.c.str()}, {"w", g.w.str()}});
    }
  j["regime"] = regime_name(P.regime());
  return j;
}

// Deterministic draws of parameters and pole-free weights.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng_); }

  // Small rational with numerator in [-m, m] \ {0} and denominator in [1, m].
  Rational small_rational(long m = 7) {
    long a = 0;
    while (a == 0) a = integer(-m, m);
    return Rational(mpq_class(a, integer(1, m)));
  }

  // q = r^n with a small rational root r, so q^(1/n) is exact.
  QContext<Rational> context(int n) {
    for (;;) {
      Rational r = small_rational(4);
      if (r == Rational(1) || r == Rational(-1)) continue;
      if (r.mpq() < 0) r = -r;
      try {
        return QContext<Rational>(power(r, n), n, r);
      } catch (const DomainError&) {
      }
    }
  }

  // Generic beta chain with random geometric alpha.
  SLnParams<Rational> generic(int n, bool geometric_alpha = true) {
    for (;;) {
      auto ctx = context(n);
      std::vector<Rational> chain;
      for (int k = 0; k + 1 < n; ++k) chain.push_back(small_rational(9));
      AlphaSpec<Rational> alpha(n);
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          alpha.set(i, j, small_rational(5), geometric_alpha ? small_rational(3) : Rational(1));
      try {
        SLnParams<Rational> P(ctx, chain, alpha);
        if (P.regime() == Regime::Generic) return P;
      } catch (const DomainError&) {
      }
    }
  }

  WeightPoint weight(int n, long range = 12) {
    std::vector<long> p(n);
    for (auto& v : p) v = integer(-range, range);
    return WeightPoint(p);
  }

  // Redraws until every f needed within `reach` shifts is nonzero.
  template <class F>
  WeightPoint pole_free(const SLnParams<F>& P, int reach, long range = 12) {
    for (int tries = 0; tries < 10000; ++tries) {
      auto p = weight(P.n(), range + 4 * reach);
      if (P.pole_free(p, reach)) return p;
    }
    throw DynamicalPole("no pole-free weight found");
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace qdyb
