#pragma once

// Casimir values, conformal-dimension differences and the unimodular
// normalization of the constant R-matrix.

#include "qdyb/hecke.hpp"
#include "qdyb/report.hpp"
#include "qdyb/rmatrix.hpp"

namespace qdyb {

struct WeightVector {
  int n = 0;
  std::vector<mpq_class> p;  // sum zero

  static WeightVector from(const WeightPoint& w) { return {w.n(), w.centered()}; }
  mpq_class pdiff(int i, int j) const { return p[i] - p[j]; }
};

// C2(p) = (1/n) sum_{i<k} p_ik^2 - n(n^2-1)/12
inline mpq_class casimir(const WeightVector& w) {
  mpq_class s(0);
  for (int i = 0; i < w.n; ++i)
    for (int k = i + 1; k < w.n; ++k) s += w.pdiff(i, k) * w.pdiff(i, k);
  s /= w.n;
  mpq_class shift(w.n * (w.n * w.n - 1), 12);
  shift.canonicalize();
  return s - shift;
}

struct DVec {
  std::vector<mpq_class> by_casimir;  // C2(p) - C2(p + v^(j))
  std::vector<mpq_class> closed;      // 1/n - 1 - 2 p_j
  bool agree() const { return by_casimir == closed; }
};

inline DVec dvec(const WeightPoint& p) {
  DVec d;
  const int n = p.n();
  auto c0 = casimir(WeightVector::from(p));
  auto w = WeightVector::from(p);
  for (int j = 0; j < n; ++j) {
    d.by_casimir.push_back(c0 - casimir(WeightVector::from(p.shifted(j, 1))));
    d.closed.push_back(mpq_class(1, n) - 1 - 2 * w.p[j]);
  }
  return d;
}

struct DetNormalization {
  std::size_t sym_rank = 0, antisym_rank = 0;
  std::size_t want_sym = 0, want_antisym = 0;
  bool eigen_ok = false;  // R' S = q/r S and R' A = -qbar/r A
  std::string product;    // product of the eigenvalues of R' = R/r
  long sign = 0;          // (-1)^{C(n,2)}
  bool ok = false;
};

// scale defaults to q^(1/n); other values give the non-unimodular control.
template <class F>
DetNormalization det_normalization(const QContext<F>& ctx, std::optional<F> scale = std::nullopt) {
  const int n = ctx.n();
  DetNormalization out;
  const F r = scale ? *scale : ctx.root();  // throws without a root
  auto R = build_dj(ctx);
  auto h = HeckeRep<F>::constant(R, ctx, 2);
  const auto& S = h.sym(1, 2);
  const auto& A = h.antisym(1, 2);
  auto Rp = R.scaled(F(1) / r);
  F up = ctx.q() / r, down = -ctx.qbar() / r;
  out.eigen_ok = !(Rp * S).first_diff(S.scaled(up)) && !(Rp * A).first_diff(A.scaled(down)) &&
                 !(S + A).first_diff(h.one());
  out.sym_rank = exact_rank(S);
  out.antisym_rank = exact_rank(A);
  out.want_sym = static_cast<std::size_t>(n * (n + 1) / 2);
  out.want_antisym = static_cast<std::size_t>(n * (n - 1) / 2);
  F prod = power(up, static_cast<long>(out.sym_rank)) * power(down, static_cast<long>(out.antisym_rank));
  out.product = prod.str();
  out.sign = out.want_antisym % 2 ? -1 : 1;
  out.ok = out.eigen_ok && out.sym_rank == out.want_sym && out.antisym_rank == out.want_antisym && prod == F(out.sign);
  return out;
}

// Compares q^{d_i - d_j} from the Casimir differences with the ratio D_i/D_j
// of the diagonal matrix D_1 R(p) D_2^{-1} = R(p)^{-1} sigma. The ratio of the
// two is pi_ij, so in the beta-infinity regime (pi = 1) they agree.
template <class F>
struct DReconciliation {
  std::vector<std::vector<F>> mismatch;  // (D_i/D_j) / q^{d_i - d_j}
  bool mismatch_is_pi = false;
  bool exact = false;       // all mismatches are 1
  bool absolute = false;    // r^{n d_j} pi_jn proportional to D_j (needs root)
  std::string witness;
};

template <class F>
DReconciliation<F> reconcile_d(const SLnParams<F>& P, const WeightPoint& p) {
  const int n = P.n();
  const auto& ctx = P.ctx();
  DReconciliation<F> out;
  auto D = gauge_diag(P, p);
  auto d = dvec(p).closed;
  out.mismatch.assign(n, std::vector<F>(n, F(1)));
  out.mismatch_is_pi = true;
  out.exact = true;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      mpq_class e = d[i] - d[j];  // an even integer
      if (e.get_den() != 1) throw DomainError("d_i - d_j not integral");
      F qd = ctx.qpow(e.get_num().get_si());
      F m = D[i] / D[j] / qd;
      out.mismatch[i][j] = m;
      if (i != j && m != P.pi(i, j)) {
        out.mismatch_is_pi = false;
        if (out.witness.empty()) out.witness = "mismatch at (" + std::to_string(i + 1) + "," + std::to_string(j + 1) + "): " + m.str() + " vs pi " + P.pi(i, j).str();
      }
      if (m != F(1)) out.exact = false;
    }
  if (ctx.has_root()) {
    // r^{n d_j} pi_jn is a constant multiple of D_j
    out.absolute = true;
    std::optional<F> scale;
    for (int j = 0; j < n; ++j) {
      mpq_class e = d[j] * n;
      if (e.get_den() != 1) throw DomainError("n d_j not integral");
      F v = ctx.root_pow(e.get_num().get_si()) * (j == n - 1 ? F(1) : P.pi(j, n - 1)) / D[j];
      if (!scale) scale = v;
      if (v != *scale) {
        out.absolute = false;
        if (out.witness.empty()) out.witness = "scale differs at " + std::to_string(j + 1);
      }
    }
  }
  return out;
}

inline std::string rat_str(const mpq_class& x) {
  return x.get_den() == 1 ? x.get_num().get_str() : x.get_num().get_str() + "/" + x.get_den().get_str();
}

}  // namespace qdyb
