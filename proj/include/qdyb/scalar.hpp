#pragma once

// Exact field elements and q-number arithmetic.
//
// Two backends share one interface:
//   Rational      gmp rationals, results are certain
//   ModPrime<P>   residues modulo a prime P > 2^61, results are probabilistic
// Every templated routine in the library takes the field as a parameter F.

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace qdyb {

struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised whenever an evaluation hits f(p,beta) = 0 or [p] = 0.
struct DynamicalPole : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Rational {
 public:
  static constexpr bool probabilistic = false;
  static constexpr const char* backend_name = "rational";

  Rational() : v_(0) {}
  Rational(long x) : v_(x) {}  // NOLINT implicit by design, integers embed
  explicit Rational(const mpq_class& x) : v_(x) { v_.canonicalize(); }

  static Rational from_mpq(const mpq_class& x) { return Rational(x); }

  // Accepts "a", "a/b", "-a/b".
  static Rational parse(const std::string& s) {
    mpq_class x;
    if (s.empty() || x.set_str(s, 10) != 0) throw DomainError("bad rational literal: " + s);
    if (x.get_den() == 0) throw DomainError("zero denominator: " + s);
    x.canonicalize();
    return Rational(x);
  }

  const mpq_class& mpq() const { return v_; }
  bool is_zero() const { return sgn(v_) == 0; }

  // Canonical "num/den" with den > 0; integers keep the "/1".
  std::string str() const { return v_.get_num().get_str() + "/" + v_.get_den().get_str(); }

  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw DomainError("division by zero");
    v_ /= o.v_;
    return *this;
  }
  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  Rational operator-() const { return Rational(mpq_class(-v_)); }
  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }

 private:
  mpq_class v_;
};

// Default modulus: the largest prime below 2^62.
inline constexpr std::uint64_t kDefaultPrime = 4611686018427387847ULL;

template <std::uint64_t P = kDefaultPrime>
class ModPrime {
  static_assert(P > (1ULL << 61), "modulus must exceed 2^61");

 public:
  static constexpr bool probabilistic = true;
  static constexpr const char* backend_name = "prime";
  static constexpr std::uint64_t modulus = P;

  ModPrime() : v_(0) {}
  ModPrime(long x) {  // NOLINT
    long r = x % static_cast<long>(P);
    if (r < 0) r += static_cast<long>(P);
    v_ = static_cast<std::uint64_t>(r);
  }

  static ModPrime from_mpq(const mpq_class& x) {
    mpz_class m(std::to_string(P));
    mpz_class num = x.get_num() % m;
    if (num < 0) num += m;
    mpz_class den = x.get_den() % m;
    if (den == 0) throw DomainError("denominator vanishes modulo the prime");
    ModPrime a = raw(std::stoull(num.get_str()));
    ModPrime b = raw(std::stoull(den.get_str()));
    return a / b;
  }

  static ModPrime parse(const std::string& s) { return from_mpq(Rational::parse(s).mpq()); }

  bool is_zero() const { return v_ == 0; }
  std::uint64_t residue() const { return v_; }
  std::string str() const { return std::to_string(v_) + "/1"; }

  ModPrime& operator+=(const ModPrime& o) {
    v_ += o.v_;
    if (v_ >= P) v_ -= P;
    return *this;
  }
  ModPrime& operator-=(const ModPrime& o) {
    v_ = v_ >= o.v_ ? v_ - o.v_ : v_ + P - o.v_;
    return *this;
  }
  ModPrime& operator*=(const ModPrime& o) {
    v_ = static_cast<std::uint64_t>((static_cast<unsigned __int128>(v_) * o.v_) % P);
    return *this;
  }
  ModPrime& operator/=(const ModPrime& o) {
    if (o.is_zero()) throw DomainError("division by zero");
    return *this *= o.inverse();
  }
  friend ModPrime operator+(ModPrime a, const ModPrime& b) { return a += b; }
  friend ModPrime operator-(ModPrime a, const ModPrime& b) { return a -= b; }
  friend ModPrime operator*(ModPrime a, const ModPrime& b) { return a *= b; }
  friend ModPrime operator/(ModPrime a, const ModPrime& b) { return a /= b; }
  ModPrime operator-() const { return raw(v_ == 0 ? 0 : P - v_); }
  friend bool operator==(const ModPrime& a, const ModPrime& b) { return a.v_ == b.v_; }
  friend bool operator!=(const ModPrime& a, const ModPrime& b) { return a.v_ != b.v_; }

 private:
  static ModPrime raw(std::uint64_t v) {
    ModPrime r;
    r.v_ = v;
    return r;
  }
  ModPrime inverse() const {
    ModPrime base = *this, acc = raw(1);
    std::uint64_t e = P - 2;
    while (e) {
      if (e & 1) acc *= base;
      base *= base;
      e >>= 1;
    }
    return acc;
  }
  std::uint64_t v_;
};

using Prime = ModPrime<>;

template <class F>
F power(F x, long e) {
  if (e < 0) {
    if (x.is_zero()) throw DomainError("negative power of zero");
    x = F(1) / x;
    e = -e;
  }
  F acc(1);
  while (e) {
    if (e & 1) acc *= x;
    x *= x;
    e >>= 1;
  }
  return acc;
}

template <class F>
F from_mpq(const mpq_class& x) {
  return F::from_mpq(x);
}

// q together with the derived constants qbar and lambda = q - qbar.
// The optional root r satisfies r^n = q and unlocks q^{k/n}.
template <class F>
class QContext {
 public:
  QContext(F q, int n, std::optional<F> root = std::nullopt) : q_(q), n_(n), root_(root) {
    if (q.is_zero()) throw DomainError("q must be nonzero");
    if (n < 1) throw DomainError("n must be positive");
    qbar_ = F(1) / q;
    lam_ = q - qbar_;
    if (root_ && power(*root_, n) != q) throw DomainError("root^n differs from q");
    for (int j = 2; j <= n + 1; ++j)
      if (qnum(j).is_zero()) throw DomainError("[" + std::to_string(j) + "] vanishes; q is not generic");
  }

  const F& q() const { return q_; }
  const F& qbar() const { return qbar_; }
  const F& lambda() const { return lam_; }
  int n() const { return n_; }
  bool has_root() const { return root_.has_value(); }
  const F& root() const {
    if (!root_) throw DomainError("operation needs q^(1/n); supply a root");
    return *root_;
  }

  F qpow(long e) const { return power(q_, e); }

  // r^e = q^(e/n)
  F root_pow(long e) const { return power(root(), e); }

  // [j] = (q^j - qbar^j)/(q - qbar); continued to j q^(j-1) at q = +-1.
  F qnum(long j) const {
    if (lam_.is_zero()) return F(j) * power(q_, j - 1);
    return (power(q_, j) - power(qbar_, j)) / lam_;
  }

  F qfact(long j) const {
    if (j < 0) throw DomainError("q-factorial of a negative integer");
    F acc(1);
    for (long m = 1; m <= j; ++m) acc *= qnum(m);
    return acc;
  }

  // [k]_d = (d^k - (d - lambda)^k)/lambda; continued to k d^(k-1) at lambda = 0.
  F qnum_d(long k, const F& d) const {
    if (lam_.is_zero()) return F(k) * power(d, k - 1);
    return (power(d, k) - power(d - lam_, k)) / lam_;
  }

  F qfact_d(long k, const F& d) const {
    F acc(1);
    for (long m = 1; m <= k; ++m) acc *= qnum_d(m, d);
    return acc;
  }

  // f(p, beta) = qbar^p + [p] beta
  F f_func(long p, const F& beta) const { return power(qbar_, p) + qnum(p) * beta; }

  // Same context mapped into another field.
  template <class G>
  QContext<G> map_to() const {
    static_assert(std::is_same_v<F, Rational>, "only rational contexts can be mapped");
    std::optional<G> r;
    if (root_) r = G::from_mpq(root_->mpq());
    return QContext<G>(G::from_mpq(q_.mpq()), n_, r);
  }

 private:
  F q_;
  int n_;
  std::optional<F> root_;
  F qbar_, lam_;
};

}  // namespace qdyb
