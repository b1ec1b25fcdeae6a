#include <gtest/gtest.h>

#include "qdyb/params.hpp"
#include "qdyb/tensor.hpp"

using namespace qdyb;

namespace {

Rational Q(long a, long b = 1) { return Rational(mpq_class(a, b)); }

}  // namespace

TEST(Scalar, RationalParseAndPrint) {
  EXPECT_EQ(Rational::parse("6/4").str(), "3/2");
  EXPECT_EQ(Rational::parse("-5").str(), "-5/1");
  EXPECT_THROW(Rational::parse("1/0"), DomainError);
  EXPECT_THROW(Rational::parse("x"), DomainError);
  EXPECT_THROW(Q(1) / Q(0), DomainError);
}

TEST(Scalar, PrimeFieldInverseAndMapping) {
  Prime a = Prime::from_mpq(mpq_class(3, 7));
  EXPECT_EQ(a * Prime(7), Prime(3));
  EXPECT_EQ(a * (Prime(1) / a), Prime(1));
  EXPECT_EQ(Prime::parse("-1/2") + Prime::parse("1/2"), Prime(0));
  EXPECT_THROW(Prime(1) / Prime(0), DomainError);
}

// Values computed by tests/oracle/oracle.py.
TEST(Scalar, QNumbersMatchOracle) {
  QContext<Rational> ctx(Q(2), 2);
  EXPECT_EQ(ctx.qnum(2), Q(5, 2));
  EXPECT_EQ(ctx.qfact(3), Q(105, 8));
  EXPECT_EQ(ctx.f_func(2, Q(1)), Q(11, 4));
  EXPECT_EQ(ctx.qnum(0), Q(0));
  EXPECT_EQ(ctx.qnum(-3), -ctx.qnum(3));
}

TEST(Scalar, QNumbersAtOneContinue) {
  QContext<Rational> ctx(Q(1), 3);
  EXPECT_EQ(ctx.qnum(4), Q(4));
  EXPECT_EQ(ctx.qfact(3), Q(6));
  EXPECT_EQ(ctx.qnum_d(3, Q(5)), Q(75));
}

TEST(Scalar, NonGenericQRejected) {
  EXPECT_THROW(QContext<Rational>(Q(0), 2), DomainError);
  EXPECT_THROW(QContext<Rational>(Q(8), 3, Q(3)), DomainError);
  QContext<Rational> ok(Q(8), 3, Q(2));
  EXPECT_EQ(ok.root_pow(3), Q(8));
  EXPECT_THROW(QContext<Rational>(Q(8), 3).root(), DomainError);
}

class QIdentity : public ::testing::TestWithParam<int> {};

// [j][k+1] - [j+1][k] = [j-k] and f(p+1) = qbar f(p) + q^p beta over random q
TEST_P(QIdentity, Properties) {
  Sampler S(100 + GetParam());
  for (int t = 0; t < 20; ++t) {
    auto q = S.small_rational(6);
    if (q == Q(1) || q == Q(-1)) continue;
    QContext<Rational> ctx(q, 2);
    long j = S.integer(-8, 8), k = S.integer(-8, 8);
    EXPECT_EQ(ctx.qnum(j) * ctx.qnum(k + 1) - ctx.qnum(j + 1) * ctx.qnum(k), ctx.qnum(j - k));
    auto beta = S.small_rational(9);
    long p = S.integer(-10, 10);
    EXPECT_EQ(ctx.f_func(p + 1, beta), ctx.qbar() * ctx.f_func(p, beta) + ctx.qpow(p) * beta);
    EXPECT_EQ(ctx.f_func(0, beta), Q(1));
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, QIdentity, ::testing::Range(0, 5));

TEST(Params, BetaFromChainMatchesOracle) {
  QContext<Rational> ctx(Q(2), 3);
  SLnParams<Rational> P(ctx, {Q(1), Q(3)}, AlphaSpec<Rational>::unit(3));
  EXPECT_EQ(P.beta(0, 2), Q(6, 5));
  QContext<Rational> c2(Q(2), 2);
  SLnParams<Rational> P2(c2, {Q(1)}, AlphaSpec<Rational>::unit(2));
  EXPECT_EQ(P2.pi(0, 1), Q(-1, 2));
  EXPECT_EQ(P2.xi(0, 1, 2), Q(6, 11));
}

class ParamInvariants : public ::testing::TestWithParam<int> {};

TEST_P(ParamInvariants, BetaAndPi) {
  const int n = GetParam();
  Sampler S(31 * n);
  for (int t = 0; t < 10; ++t) {
    auto P = S.generic(n);
    const auto lam = P.ctx().lambda();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        EXPECT_EQ(P.beta(i, j) + P.beta(j, i), lam);
        EXPECT_EQ(P.pi(i, j) * P.pi(j, i), Q(1));
        for (int k = 0; k < n; ++k) {
          if (k == i || k == j) continue;
          // beta_ij beta_jk = beta_ik (beta_ij + beta_jk - lambda)
          auto bij = P.beta(i, j), bjk = P.beta(j, k);
          EXPECT_EQ(bij * bjk, P.beta(i, k) * (bij + bjk - lam));
          EXPECT_EQ(P.pi(i, k), P.pi(i, j) * P.pi(j, k));
        }
      }
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        long x = S.integer(-5, 5);
        EXPECT_EQ(P.alpha()(i, j, x) * P.alpha()(j, i, -x), Q(1));
      }
  }
}

INSTANTIATE_TEST_SUITE_P(Ranks, ParamInvariants, ::testing::Values(2, 3, 4, 5));

TEST(Params, RegimeClassification) {
  QContext<Rational> ctx(Q(2), 3);
  auto a = AlphaSpec<Rational>::unit(3);
  EXPECT_EQ(SLnParams<Rational>(ctx, {Q(3, 2), Q(3, 2)}, a).regime(), Regime::ConstantMultiparam);
  EXPECT_EQ(SLnParams<Rational>(ctx, {Q(0), Q(0)}, a).regime(), Regime::ConstantMultiparam);
  EXPECT_EQ(SLnParams<Rational>(ctx, {Q(3, 2), Q(5)}, a).regime(), Regime::Intermediate);
  EXPECT_EQ(SLnParams<Rational>(ctx, {Q(7), Q(5)}, a).regime(), Regime::Generic);
  SLnParams<Rational> inf(ctx, {}, a, true);
  EXPECT_EQ(inf.regime(), Regime::BetaInfinity);
  EXPECT_EQ(inf.pi(0, 2), Q(1));
  EXPECT_THROW(inf.beta(0, 1), DomainError);
  EXPECT_THROW(SLnParams<Rational>(ctx, {Q(1)}, a), DomainError);
}

TEST(Params, PoleIsReported) {
  // f(1, -1/2) = 1/2 + [1](-1/2) = 0 at q = 2
  QContext<Rational> ctx(Q(2), 2);
  SLnParams<Rational> P(ctx, {Q(2)}, AlphaSpec<Rational>::unit(2));
  P.corrupt_beta(0, 1, Q(-1, 2));
  EXPECT_THROW(P.xi(0, 1, 1), DynamicalPole);
}

TEST(Params, WeightParsingAndShifts) {
  auto p = WeightPoint::parse(3, "p12=2,p23=-1");
  EXPECT_EQ(p.pdiff(0, 2), 1);
  EXPECT_EQ(p.shifted(1, -1).pdiff(0, 1), 3);
  EXPECT_THROW(WeightPoint::parse(3, "p1x=2"), DomainError);
  EXPECT_THROW(WeightPoint::from_pdiff(3, {1, 1, 1}), DomainError);
  auto c = WeightPoint({4, 1, 0}).centered();
  EXPECT_EQ(c[0] + c[1] + c[2], 0);
}

TEST(Params, JsonRoundTrip) {
  Sampler S(3);
  auto P = S.generic(3);
  auto Q2 = params_from_json(params_to_json(P));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i != j) EXPECT_EQ(P.beta(i, j), Q2.beta(i, j));
      EXPECT_EQ(P.alpha()(i, j, 3), Q2.alpha()(i, j, 3));
    }
}

TEST(Params, SamplerIsDeterministic) {
  Sampler a(9), b(9);
  auto P = a.generic(3), R = b.generic(3);
  EXPECT_EQ(params_to_json(P).dump(), params_to_json(R).dump());
  EXPECT_EQ(a.pole_free(P, 4).str(), b.pole_free(R, 4).str());
}

TEST(Tensor, IndexingAndProducts) {
  EXPECT_EQ(flatten({1, 0, 2}, 3), 11u);
  EXPECT_EQ(unflatten(11, 3, 3), (MultiIndex{1, 0, 2}));
  auto P = TensorOp<Rational>::flip(2);
  EXPECT_EQ(P * P, TensorOp<Rational>::identity(2, 2));
  auto cyc = TensorOp<Rational>::permutation(2, {1, 2, 0});
  EXPECT_EQ(cyc * cyc * cyc, TensorOp<Rational>::identity(2, 3));
  EXPECT_EQ(exact_rank(TensorOp<Rational>::identity(3, 2)), 9u);
  EXPECT_EQ(exact_rank(P - TensorOp<Rational>::identity(2, 2)), 1u);
}

TEST(Tensor, JsonRoundTrip) {
  auto A = TensorOp<Rational>::flip(3).scaled(Q(-2, 3));
  auto B = load_json<Rational>(dump_json(A));
  EXPECT_EQ(A, B);
  EXPECT_FALSE(A.first_diff(B));
  EXPECT_TRUE(A.first_diff(TensorOp<Rational>::flip(3)));
}
