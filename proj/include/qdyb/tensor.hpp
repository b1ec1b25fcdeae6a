#pragma once

// Sparse exact operators on V^{(x)k}, dim V = n.
//
// Multi-indices (i_1..i_k) are ordered lexicographically with site 1 most
// significant; flat index = sum_s i_s n^(k-s). Operators may be rectangular
// (rsites row sites, csites column sites) so that tensors such as the
// Levi-Civita columns fit the same type.

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qdyb/scalar.hpp"

namespace qdyb {

using Index = std::uint32_t;
using MultiIndex = std::vector<int>;

inline Index ipow(int n, int k) {
  Index r = 1;
  while (k-- > 0) r *= static_cast<Index>(n);
  return r;
}

inline MultiIndex unflatten(Index x, int n, int k) {
  MultiIndex m(k);
  for (int s = k - 1; s >= 0; --s) {
    m[s] = static_cast<int>(x % n);
    x /= n;
  }
  return m;
}

inline Index flatten(const MultiIndex& m, int n) {
  Index x = 0;
  for (int v : m) x = x * n + static_cast<Index>(v);
  return x;
}

template <class F>
struct Witness {
  MultiIndex row, col;
  F lhs, rhs;
  std::string str() const {
    auto mi = [](const MultiIndex& m) {
      std::string s;
      for (int v : m) s += std::to_string(v + 1);
      return s;
    };
    return "entry [" + mi(row) + "][" + mi(col) + "]: " + lhs.str() + " vs " + rhs.str();
  }
};

template <class F>
class TensorOp {
 public:
  using Row = std::vector<std::pair<Index, F>>;

  TensorOp() = default;
  TensorOp(int n, int rsites, int csites) : n_(n), rk_(rsites), ck_(csites), rows_(ipow(n, rsites)) {}
  TensorOp(int n, int k) : TensorOp(n, k, k) {}

  static TensorOp identity(int n, int k) {
    TensorOp t(n, k);
    for (Index i = 0; i < t.rows(); ++i) t.rows_[i].push_back({i, F(1)});
    return t;
  }

  static TensorOp zero(int n, int k) { return TensorOp(n, k); }

  // Maps e_{i_1}..e_{i_k} to the tensor with site s carrying i_{sigma(s)}.
  static TensorOp permutation(int n, const std::vector<int>& sigma) {
    int k = static_cast<int>(sigma.size());
    TensorOp t(n, k);
    for (Index c = 0; c < t.cols(); ++c) {
      auto m = unflatten(c, n, k);
      MultiIndex r(k);
      for (int s = 0; s < k; ++s) r[s] = m[sigma[s]];
      t.rows_[flatten(r, n)].push_back({c, F(1)});
    }
    return t;
  }

  // Flip P x_1 y_2 = y_1 x_2 on two sites.
  static TensorOp flip(int n) { return permutation(n, {1, 0}); }

  static TensorOp from_dense(int n, int rsites, int csites, const std::function<F(Index, Index)>& f) {
    TensorOp t(n, rsites, csites);
    for (Index r = 0; r < t.rows(); ++r)
      for (Index c = 0; c < t.cols(); ++c) {
        F v = f(r, c);
        if (!v.is_zero()) t.rows_[r].push_back({c, v});
      }
    return t;
  }

  int n() const { return n_; }
  int rsites() const { return rk_; }
  int csites() const { return ck_; }
  int k() const { return rk_; }
  Index rows() const { return ipow(n_, rk_); }
  Index cols() const { return ipow(n_, ck_); }
  const Row& row(Index r) const { return rows_[r]; }

  F at(Index r, Index c) const {
    const auto& row = rows_[r];
    auto it = std::lower_bound(row.begin(), row.end(), c, [](const auto& e, Index x) { return e.first < x; });
    if (it != row.end() && it->first == c) return it->second;
    return F(0);
  }
  F at(const MultiIndex& r, const MultiIndex& c) const { return at(flatten(r, n_), flatten(c, n_)); }

  // Accumulates v into (r, c); keeps rows sorted and drops zeros.
  void add_entry(Index r, Index c, const F& v) {
    if (v.is_zero()) return;
    auto& row = rows_[r];
    auto it = std::lower_bound(row.begin(), row.end(), c, [](const auto& e, Index x) { return e.first < x; });
    if (it != row.end() && it->first == c) {
      it->second += v;
      if (it->second.is_zero()) row.erase(it);
    } else {
      row.insert(it, {c, v});
    }
  }
  void set_row(Index r, Row row) { rows_[r] = std::move(row); }

  std::size_t nnz() const {
    std::size_t s = 0;
    for (const auto& r : rows_) s += r.size();
    return s;
  }
  bool is_zero() const { return nnz() == 0; }

  TensorOp operator*(const TensorOp& o) const {
    if (n_ != o.n_ || ck_ != o.rk_) throw DomainError("operator shapes do not compose");
    TensorOp out(n_, rk_, o.ck_);
    std::vector<F> acc(o.cols());
    std::vector<char> used(o.cols(), 0);
    std::vector<Index> touched;
    for (Index r = 0; r < rows(); ++r) {
      touched.clear();
      for (const auto& [m, a] : rows_[r])
        for (const auto& [c, b] : o.rows_[m]) {
          if (!used[c]) {
            used[c] = 1;
            acc[c] = a * b;
            touched.push_back(c);
          } else {
            acc[c] += a * b;
          }
        }
      std::sort(touched.begin(), touched.end());
      Row row;
      for (Index c : touched) {
        if (!acc[c].is_zero()) row.push_back({c, acc[c]});
        used[c] = 0;
      }
      out.rows_[r] = std::move(row);
    }
    return out;
  }

  TensorOp combine(const TensorOp& o, const F& s) const {
    if (n_ != o.n_ || rk_ != o.rk_ || ck_ != o.ck_) throw DomainError("operator shapes differ");
    TensorOp out(n_, rk_, ck_);
    for (Index r = 0; r < rows(); ++r) {
      const auto &a = rows_[r], &b = o.rows_[r];
      Row row;
      std::size_t x = 0, y = 0;
      while (x < a.size() || y < b.size()) {
        if (y == b.size() || (x < a.size() && a[x].first < b[y].first)) {
          row.push_back(a[x++]);
        } else if (x == a.size() || b[y].first < a[x].first) {
          F v = s * b[y].second;
          if (!v.is_zero()) row.push_back({b[y].first, v});
          ++y;
        } else {
          F v = a[x].second + s * b[y].second;
          if (!v.is_zero()) row.push_back({a[x].first, v});
          ++x, ++y;
        }
      }
      out.rows_[r] = std::move(row);
    }
    return out;
  }
  TensorOp operator+(const TensorOp& o) const { return combine(o, F(1)); }
  TensorOp operator-(const TensorOp& o) const { return combine(o, F(-1)); }

  TensorOp scaled(const F& s) const {
    TensorOp out(n_, rk_, ck_);
    if (s.is_zero()) return out;
    for (Index r = 0; r < rows(); ++r)
      for (const auto& [c, v] : rows_[r]) out.rows_[r].push_back({c, v * s});
    return out;
  }
  friend TensorOp operator*(const F& s, const TensorOp& t) { return t.scaled(s); }

  friend bool operator==(const TensorOp& a, const TensorOp& b) {
    if (a.n_ != b.n_ || a.rk_ != b.rk_ || a.ck_ != b.ck_) return false;
    return a.rows_ == b.rows_;
  }

  // First entry (row-major) where the two operators differ.
  std::optional<Witness<F>> first_diff(const TensorOp& o) const {
    if (n_ != o.n_ || rk_ != o.rk_ || ck_ != o.ck_) throw DomainError("operator shapes differ");
    for (Index r = 0; r < rows(); ++r) {
      if (rows_[r] == o.rows_[r]) continue;
      std::vector<Index> cs;
      for (const auto& e : rows_[r]) cs.push_back(e.first);
      for (const auto& e : o.rows_[r]) cs.push_back(e.first);
      std::sort(cs.begin(), cs.end());
      for (Index c : cs) {
        F x = at(r, c), y = o.at(r, c);
        if (x != y) return Witness<F>{unflatten(r, n_, rk_), unflatten(c, n_, ck_), x, y};
      }
    }
    return std::nullopt;
  }

  TensorOp transpose() const {
    TensorOp out(n_, ck_, rk_);
    for (Index r = 0; r < rows(); ++r)
      for (const auto& [c, v] : rows_[r]) out.rows_[c].push_back({r, v});
    return out;
  }

  // A (x) B with A on the leading sites.
  TensorOp kron(const TensorOp& b) const {
    if (n_ != b.n_) throw DomainError("site dimensions differ");
    TensorOp out(n_, rk_ + b.rk_, ck_ + b.ck_);
    Index br = b.rows(), bc = b.cols();
    for (Index r = 0; r < rows(); ++r)
      for (Index s = 0; s < br; ++s) {
        Row row;
        for (const auto& [c, v] : rows_[r])
          for (const auto& [d, w] : b.rows_[s]) row.push_back({c * bc + d, v * w});
        out.rows_[r * br + s] = std::move(row);
      }
    return out;
  }

  // This (square, m sites) acting on sites pos..pos+m-1 (1-based) of k sites.
  TensorOp embed(int pos, int k) const {
    if (rk_ != ck_) throw DomainError("only square operators embed");
    int m = rk_;
    if (pos < 1 || pos + m - 1 > k) throw DomainError("embedding position out of range");
    auto left = identity(n_, pos - 1), right = identity(n_, k - pos - m + 1);
    return left.kron(*this).kron(right);
  }

  // Rows stacked on top of each other; column shapes must agree.
  static std::vector<Row> stack_rows(const std::vector<const TensorOp*>& ops) {
    std::vector<Row> out;
    for (auto* t : ops)
      for (const auto& r : t->rows_)
        if (!r.empty()) out.push_back(r);
    return out;
  }

  const std::vector<Row>& all_rows() const { return rows_; }

  // Keeps the rows whose multi-index satisfies keep; equals a projector times this.
  TensorOp filter_rows(const std::function<bool(const MultiIndex&)>& keep) const {
    TensorOp out(n_, rk_, ck_);
    for (Index r = 0; r < rows(); ++r)
      if (!rows_[r].empty() && keep(unflatten(r, n_, rk_))) out.rows_[r] = rows_[r];
    return out;
  }

 private:
  int n_ = 0, rk_ = 0, ck_ = 0;
  std::vector<Row> rows_;
};

// Incremental row echelon form over sparse rows. Each incoming row is reduced
// against the pivots found so far; pivots are kept monic.
template <class F>
class Echelon {
 public:
  using Row = typename TensorOp<F>::Row;

  // Reduces r against the pivots; the result is empty iff r lies in their span.
  Row reduce(Row r) const {
    while (!r.empty()) {
      auto it = pivots_.find(r.front().first);
      if (it == pivots_.end()) break;
      r = axpy(r, r.front().second, it->second);
    }
    return r;
  }

  // Returns true if r enlarged the span.
  bool add(Row r) {
    r = reduce(std::move(r));
    if (r.empty()) return false;
    F lead = r.front().second;
    for (auto& e : r) e.second /= lead;
    Index key = r.front().first;
    pivots_.emplace(key, std::move(r));
    return true;
  }

  bool contains(const Row& r) const { return reduce(r).empty(); }
  std::size_t rank() const { return pivots_.size(); }

 private:
  // x - s*y
  static Row axpy(const Row& x, const F& s, const Row& y) {
    Row out;
    std::size_t a = 0, b = 0;
    while (a < x.size() || b < y.size()) {
      if (b == y.size() || (a < x.size() && x[a].first < y[b].first)) {
        out.push_back(x[a++]);
      } else if (a == x.size() || y[b].first < x[a].first) {
        out.push_back({y[b].first, -(s * y[b].second)});
        ++b;
      } else {
        F v = x[a].second - s * y[b].second;
        if (!v.is_zero()) out.push_back({x[a].first, v});
        ++a, ++b;
      }
    }
    return out;
  }

  std::map<Index, Row> pivots_;
};

template <class F>
std::size_t sparse_rank(const std::vector<typename TensorOp<F>::Row>& input) {
  Echelon<F> e;
  for (const auto& r : input) e.add(r);
  return e.rank();
}

template <class F>
std::size_t exact_rank(const TensorOp<F>& t) {
  return sparse_rank<F>(t.all_rows());
}

// Diagonal operator on V^{(x)k}.
template <class F>
class DiagOp {
 public:
  DiagOp() = default;
  DiagOp(int n, int k) : n_(n), k_(k), d_(ipow(n, k), F(1)) {}

  static DiagOp from_function(int n, int k, const std::function<F(const MultiIndex&)>& f) {
    DiagOp d(n, k);
    for (Index x = 0; x < d.d_.size(); ++x) d.d_[x] = f(unflatten(x, n, k));
    return d;
  }

  int n() const { return n_; }
  int k() const { return k_; }
  const F& operator[](Index x) const { return d_[x]; }
  F& operator[](Index x) { return d_[x]; }

  DiagOp operator*(const DiagOp& o) const {
    DiagOp out = *this;
    for (Index x = 0; x < d_.size(); ++x) out.d_[x] *= o.d_[x];
    return out;
  }
  DiagOp inverse() const {
    DiagOp out = *this;
    for (auto& v : out.d_) {
      if (v.is_zero()) throw DomainError("singular diagonal");
      v = F(1) / v;
    }
    return out;
  }
  TensorOp<F> op() const {
    TensorOp<F> t(n_, k_);
    for (Index x = 0; x < d_.size(); ++x) t.add_entry(x, x, d_[x]);
    return t;
  }
  DiagOp kron(const DiagOp& o) const {
    return from_function(n_, k_ + o.k_, [&](const MultiIndex& m) {
      MultiIndex a(m.begin(), m.begin() + k_), b(m.begin() + k_, m.end());
      return d_[flatten(a, n_)] * o.d_[flatten(b, n_)];
    });
  }

 private:
  int n_ = 0, k_ = 0;
  std::vector<F> d_;
};

// x op x^{-1}
template <class F>
TensorOp<F> dress(const TensorOp<F>& op, const DiagOp<F>& x) {
  auto inv = x.inverse();
  TensorOp<F> out(op.n(), op.k());
  for (Index r = 0; r < op.rows(); ++r) {
    typename TensorOp<F>::Row row;
    for (const auto& [c, v] : op.row(r)) row.push_back({c, x[r] * v * inv[c]});
    out.set_row(r, std::move(row));
  }
  return out;
}

// Dump format: {n, k, entries:[[[i..],[j..],"num/den"]]}, indices 1-based.
template <class F>
nlohmann::json dump_json(const TensorOp<F>& t) {
  nlohmann::json j;
  j["n"] = t.n();
  j["k"] = t.rsites();
  if (t.csites() != t.rsites()) j["kcol"] = t.csites();
  j["entries"] = nlohmann::json::array();
  for (Index r = 0; r < t.rows(); ++r)
    for (const auto& [c, v] : t.row(r)) {
      auto a = unflatten(r, t.n(), t.rsites()), b = unflatten(c, t.n(), t.csites());
      for (auto& x : a) ++x;
      for (auto& x : b) ++x;
      j["entries"].push_back({a, b, v.str()});
    }
  return j;
}

template <class F>
TensorOp<F> load_json(const nlohmann::json& j) {
  int n = j.at("n").get<int>(), k = j.at("k").get<int>();
  int kc = j.value("kcol", k);
  TensorOp<F> t(n, k, kc);
  for (const auto& e : j.at("entries")) {
    auto a = e.at(0).get<MultiIndex>(), b = e.at(1).get<MultiIndex>();
    if (static_cast<int>(a.size()) != k || static_cast<int>(b.size()) != kc) throw DomainError("bad multi-index length");
    for (auto& x : a) {
      if (x < 1 || x > n) throw DomainError("index out of range");
      --x;
    }
    for (auto& x : b) {
      if (x < 1 || x > n) throw DomainError("index out of range");
      --x;
    }
    t.add_entry(flatten(a, n), flatten(b, n), F::parse(e.at(2).get<std::string>()));
  }
  return t;
}

}  // namespace qdyb
