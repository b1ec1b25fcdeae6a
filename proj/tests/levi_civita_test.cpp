#include <gtest/gtest.h>

#include "qdyb/levi_civita.hpp"

using namespace qdyb;

namespace {

Rational Q(long a, long b = 1) { return Rational(mpq_class(a, b)); }

SLnParams<Rational> instance3() {
  QContext<Rational> ctx(Q(3, 2), 3);
  AlphaSpec<Rational> a(3);
  a.set(0, 1, Q(2), Q(1, 3));
  a.set(0, 2, Q(-1, 2), Q(3));
  a.set(1, 2, Q(5, 4), Q(2));
  return SLnParams<Rational>(ctx, {Q(2), Q(-1, 3)}, a);
}

}  // namespace

// Frozen from tests/oracle/oracle.py, which also checks the -qbar eigen equation.
TEST(LeviCivita, DynamicTensorsN2) {
  QContext<Rational> ctx(Q(2), 2);
  SLnParams<Rational> P(ctx, {Q(1)}, AlphaSpec<Rational>::unit(2));
  WeightPoint p({2, 0});
  auto up = eps_dyn(P, p, true), lo = eps_dyn(P, p, false);
  EXPECT_EQ((up[{0, 1}]), Q(6, 11));
  EXPECT_EQ((up[{1, 0}]), Q(-43, 22));
  EXPECT_EQ((lo[{0, 1}]), Q(1));
  EXPECT_EQ((lo[{1, 0}]), Q(-1));
  EXPECT_EQ((up[{0, 0}]), Q(0));
}

TEST(LeviCivita, DynamicTensorsN3) {
  auto P = instance3();
  WeightPoint p({4, 1, 0});
  auto up = eps_dyn(P, p, true), lo = eps_dyn(P, p, false);
  EXPECT_EQ((up[{0, 1, 2}]), Q(1667196, 1503545));
  EXPECT_EQ((up[{0, 2, 1}]), Q(185244, 1503545));
  EXPECT_EQ((up[{1, 0, 2}]), Q(-111866913, 3007090));
  EXPECT_EQ((up[{1, 2, 0}]), Q(-26294245, 10825524));
  EXPECT_EQ((up[{2, 0, 1}]), Q(587810, 73072287));
  EXPECT_EQ((up[{2, 1, 0}]), Q(-26294245, 97429716));
  EXPECT_EQ((lo[{0, 1, 2}]), Q(1));
  EXPECT_EQ((lo[{0, 2, 1}]), Q(-5, 2));
  EXPECT_EQ((lo[{1, 0, 2}]), Q(-2, 27));
  EXPECT_EQ((lo[{1, 2, 0}]), Q(-3));
  EXPECT_EQ((lo[{2, 0, 1}]), Q(-405, 4));
  EXPECT_EQ((lo[{2, 1, 0}]), Q(15, 2));
  EXPECT_EQ(contract(lo, up), Q(1729, 216));
  EXPECT_EQ(P.ctx().qfact(3), Q(1729, 216));

  auto nk = build_nk(EpsFamily<Rational>::dynamic(P), P.ctx(), p);
  EXPECT_EQ(nk.N.at(0, 0), Q(-1667196, 1503545));
  EXPECT_EQ(nk.N.at(1, 1), Q(103869, 1328));
  EXPECT_EQ(nk.N.at(2, 2), Q(34175, 2641167));
  EXPECT_EQ(nk.N.at(0, 1), Q(0));
  EXPECT_EQ(nk.N, n_closed_form(P, p).op());
}

TEST(LeviCivita, ConstantTensors) {
  QContext<Rational> ctx(Q(2), 3);
  auto up = eps_const(ctx, true), lo = eps_const(ctx, false);
  EXPECT_EQ((lo[{2, 1, 0}]), Q(-8));
  EXPECT_EQ((up[{0, 1, 2}]), Q(1, 8));
  EXPECT_EQ(contract(lo, up), ctx.qfact(3));
  auto h = HeckeRep<Rational>::constant(build_dj(ctx), ctx, 3);
  auto rep = eigencheck(h, up, lo);
  EXPECT_EQ(rep.residual, std::nullopt);
  EXPECT_EQ(rep.right_kernel, 1u);
  EXPECT_EQ(rep.left_kernel, 1u);
}

class EpsilonProperty : public ::testing::TestWithParam<int> {};

TEST_P(EpsilonProperty, DynamicRandomDraw) {
  const int n = GetParam();
  Sampler S(500 + n);
  auto P = S.generic(n);
  auto p = S.pole_free(P, n + 3);
  auto up = eps_dyn(P, p, true), lo = eps_dyn(P, p, false);
  EXPECT_EQ(contract(lo, up), P.ctx().qfact(n));

  auto hn = HeckeRep<Rational>::dynamic(P, p, n);
  auto rep = eigencheck(hn, up, lo);
  EXPECT_EQ(rep.residual, std::nullopt);
  EXPECT_EQ(rep.right_kernel, 1u);
  EXPECT_EQ(rep.left_kernel, 1u);

  auto E = EpsFamily<Rational>::dynamic(P);
  auto h = HeckeRep<Rational>::dynamic(P, p, n + 1);
  for (int i = 1; i + n - 1 <= n + 1; ++i)
    EXPECT_EQ(projector_from_eps(E, P.ctx(), p, i, n + 1), h.antisym(i, i + n - 1)) << "window " << i;
  auto nk = build_nk(E, P.ctx(), p);
  EXPECT_EQ(nk.N, n_closed_form(P, p).op());
  auto rel = eps_relations(h, E, p, false);
  EXPECT_EQ(rel.lower_down, std::nullopt);
  EXPECT_EQ(rel.lower_up, std::nullopt);
}

INSTANTIATE_TEST_SUITE_P(Ranks, EpsilonProperty, ::testing::Values(2, 3));

TEST(LeviCivita, WrongSignBreaksEigenEquation) {
  QContext<Rational> ctx(Q(3), 2);
  auto up = eps_const(ctx, true), lo = eps_const(ctx, false);
  up.entries.begin()->second = -up.entries.begin()->second;
  auto h = HeckeRep<Rational>::constant(build_dj(ctx), ctx, 2);
  EXPECT_TRUE(eigencheck(h, up, lo).residual.has_value());
}

TEST(Appendix, OrderedSumsMatchOracle) {
  auto P = instance3();
  WeightPoint p({4, 1, 0});
  std::function<Rational(int, int)> xi = [&](int i, int j) { return P.xi(i, j, p); };
  EXPECT_EQ(ordered_sum<Rational>(xi, {0, 1, 2}), Q(1729, 216));
}

class AppendixProperty : public ::testing::TestWithParam<int> {};

TEST_P(AppendixProperty, PointConfigurations) {
  const int n = GetParam();
  Sampler S(900 + n);
  auto P = S.generic(n);
  auto p = S.pole_free(P, 2);
  auto rep = appendix_bruteforce(XiTable<Rational>::from_params(P, p), P.ctx(), n);
  for (const auto& [name, w] : rep.items) EXPECT_EQ(w, std::nullopt) << name;
  EXPECT_EQ(pi_relation(P, p), std::nullopt);

  std::vector<Rational> x;
  for (int i = 0; i < n; ++i) x.push_back(Q(2 * i + 3, i + 1));
  auto t = XiTable<Rational>::from_points(x, Q(7, 3), P.ctx().lambda());
  EXPECT_TRUE(appendix_bruteforce(t, P.ctx(), n).ok());

  std::function<Rational(int, int)> xi = [&](int i, int j) { return P.xi(i, j, p); };
  EXPECT_TRUE(xi_only_bruteforce(xi, n, P.ctx(), n).ok());
}

INSTANTIATE_TEST_SUITE_P(Sizes, AppendixProperty, ::testing::Values(3, 4, 5));

TEST(Appendix, BrokenSymmetryFails) {
  Sampler S(8);
  auto P = S.generic(3);
  auto p = S.pole_free(P, 2);
  P.corrupt_beta(1, 0, P.beta(1, 0) + Rational(1));
  auto rep = appendix_bruteforce(XiTable<Rational>::from_params(P, p), P.ctx(), 3);
  EXPECT_FALSE(rep.ok());
}

TEST(Appendix, SubsetEnumeration) {
  EXPECT_EQ(subsets(5, 2).size(), 10u);
  EXPECT_EQ(subsets(4, 0).size(), 1u);
  EXPECT_EQ(permutations(4).size(), 24u);
  EXPECT_EQ(inversions({2, 0, 1}), 2);
}
