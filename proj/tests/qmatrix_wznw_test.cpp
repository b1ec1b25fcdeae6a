#include <gtest/gtest.h>

#include "qdyb/suites.hpp"

using namespace qdyb;
using nlohmann::json;

namespace {

Rational Q(long a, long b = 1) { return Rational(mpq_class(a, b)); }

Calculus<Rational> small_calculus(bool unimodular = true) {
  Sampler S(41);
  auto P = S.generic(2);
  std::vector<WeightPoint> ws;
  for (int t = 0; t < 3; ++t) ws.push_back(S.pole_free(P, 7));
  return Calculus<Rational>(P, ws, unimodular);
}

}  // namespace

TEST(Script, IntegerExpressionsAndLabels) {
  EXPECT_EQ(script_int(json(3), 4), 3);
  EXPECT_EQ(script_int(json("n+1"), 4), 5);
  EXPECT_EQ(script_int(json("-n"), 4), -4);
  EXPECT_EQ(script_int(json("n - 2"), 4), 2);
  EXPECT_THROW(script_int(json("m"), 4), DomainError);
  EXPECT_EQ(expand_labels("x{1..n}", 3), (std::vector<std::string>{"x1", "x2", "x3"}));
  EXPECT_EQ(expand_labels("y", 3), (std::vector<std::string>{"y"}));
  EXPECT_EQ(expand_label_list(json::array({"a", "b{2..n}"}), 3), (std::vector<std::string>{"a", "b2", "b3"}));
}

TEST(Derivation, BuiltinsReplayWithOracleAtN2) {
  auto C = small_calculus();
  auto rep = run_derivations(C, builtin_derivations(), true, "rational");
  for (const auto& r : rep.records()) EXPECT_EQ(r.status, "pass") << r.id << ": " << r.witness;
  for (const char* c : {"det-fold", "det-commutes-p", "det-exchange-a", "a-inverse", "central", "m-matrix"})
    EXPECT_TRUE(C.certified.count(c)) << c;
  EXPECT_GT(rep.records().size(), builtin_derivations().size());
}

TEST(Derivation, InapplicableMoveNamesTheStep) {
  auto C = small_calculus();
  json d = {{"id", "bad"},
            {"start", json::array({json{{"a", json::array({"i", "x"})}}})},
            {"moves", json::array({json{{"move", "Simplify"}}, json{{"move", "EpsCollapseRight"}, {"at", 1}}})},
            {"end", json::array({json{{"a", json::array({"i", "x"})}}})}};
  auto r = replay(C, d, false);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.message.rfind("moves step 2 (EpsCollapseRight)", 0), 0u) << r.message;
}

TEST(Derivation, WrongEndpointIsRejectedByBothChecks) {
  auto C = small_calculus();
  json d = {{"id", "swap"},
            {"start", json::array({json{{"a", json::array({"i", "x"})}}, json{{"a", json::array({"j", "y"})}}})},
            {"end", json::array({json{{"a", json::array({"j", "y"})}}, json{{"a", json::array({"i", "x"})}}})}};
  auto r = replay(C, d, true);
  EXPECT_FALSE(r.ok);
  ASSERT_TRUE(r.oracle.has_value());
  EXPECT_NE(*r.oracle, Verdict::Equal);
}

TEST(Derivation, UncertifiedDependencyIsRejected) {
  auto C = small_calculus();
  json list = builtin_derivations();
  json commute;
  for (const auto& d : list)
    if (d["id"] == "m-matrix-commute") commute = d;
  auto r = replay(C, commute, false);
  EXPECT_FALSE(r.ok);
  EXPECT_NE(r.message.find("uncertified"), std::string::npos) << r.message;
}

TEST(Derivation, NonUnimodularShiftBreaksCertificates) {
  auto C = small_calculus(false);
  auto rep = run_derivations(C, builtin_derivations(), false, "rational");
  EXPECT_FALSE(rep.passed());
}

TEST(Wznw, CasimirAndDVector) {
  EXPECT_EQ(casimir(WeightVector::from(WeightPoint({1, 0}))), 0);
  EXPECT_EQ(casimir(WeightVector::from(WeightPoint({1, 0, -1}))), 0);
  EXPECT_EQ(casimir(WeightVector::from(WeightPoint({2, 0}))), mpq_class(3, 2));
  auto d = dvec(WeightPoint({1, 0}));
  EXPECT_TRUE(d.agree());
  EXPECT_EQ(d.closed[0], mpq_class(-3, 2));
  EXPECT_EQ(d.closed[1], mpq_class(1, 2));
}

TEST(Wznw, DVectorProperty) {
  Sampler S(61);
  for (int n = 2; n <= 5; ++n)
    for (int t = 0; t < 10; ++t) {
      auto p = S.weight(n);
      auto d = dvec(p);
      EXPECT_TRUE(d.agree()) << p.str();
      mpq_class s(0);
      for (const auto& x : d.closed) s += x;
      EXPECT_EQ(s, mpq_class(1 - n));
    }
}

TEST(Wznw, DeterminantNormalization) {
  const long want[] = {0, 0, -1, -1, 1};
  for (int n = 2; n <= 4; ++n) {
    auto r = Q(3, 2);
    QContext<Rational> ctx(power(r, n), n, r);
    auto dn = det_normalization(ctx);
    EXPECT_TRUE(dn.ok) << n;
    EXPECT_EQ(dn.sign, want[n]);
    EXPECT_EQ(dn.product, Rational(want[n]).str());
    EXPECT_FALSE(det_normalization(ctx, std::optional<Rational>(r * ctx.q())).ok);
  }
  EXPECT_THROW(det_normalization(QContext<Rational>(Q(2), 2)), DomainError);
}

TEST(Wznw, DGaugeReconciliation) {
  Sampler S(71);
  auto P = S.generic(3);
  auto p = S.pole_free(P, 2);
  auto rec = reconcile_d(P, p);
  EXPECT_TRUE(rec.mismatch_is_pi) << rec.witness;
  EXPECT_FALSE(rec.exact);
  EXPECT_TRUE(rec.absolute) << rec.witness;
  SLnParams<Rational> inf(P.ctx(), {}, P.alpha(), true);
  auto r2 = reconcile_d(inf, p);
  EXPECT_TRUE(r2.exact);
  EXPECT_TRUE(r2.absolute);
}

TEST(Suites, CorruptionTable) {
  EXPECT_EQ(parse_corruption("broken-beta"), Corruption::BrokenBeta);
  EXPECT_THROW(parse_corruption("nope"), DomainError);
  SuiteConfig cfg;
  cfg.corrupt = Corruption::WrongEpsSign;
  EXPECT_THROW(run_suite<Rational>("qdybe", cfg), DomainError);
}

class SuiteRun : public ::testing::TestWithParam<std::string> {};

// Every suite passes at n = 2 and fails, with a witness, under its corruption.
TEST_P(SuiteRun, PassesAndDetectsCorruption) {
  SuiteConfig cfg;
  cfg.n = 2;
  cfg.draws = 2;
  cfg.points = 2;
  cfg.kmax = 4;
  auto ok = run_suite<Rational>(GetParam(), cfg);
  EXPECT_TRUE(ok.passed()) << ok.to_text();
  EXPECT_FALSE(ok.records().empty());
  for (auto c : suite_corruptions(GetParam())) {
    cfg.corrupt = c;
    auto bad = run_suite<Rational>(GetParam(), cfg);
    EXPECT_FALSE(bad.passed()) << corruption_name(c);
    bool witnessed = false;
    for (const auto& r : bad.records()) witnessed = witnessed || (r.status == "fail" && !r.witness.empty());
    EXPECT_TRUE(witnessed);
  }
}

INSTANTIATE_TEST_SUITE_P(All, SuiteRun,
                         ::testing::Values("params", "qdybe", "hecke", "epsilon", "appendix", "qmatrix", "wznw"),
                         [](const auto& info) { return info.param; });

TEST(Suites, PrimeBackendAgrees) {
  SuiteConfig cfg;
  cfg.n = 3;
  cfg.draws = 1;
  cfg.points = 2;
  auto rep = run_suite<Prime>("hecke", cfg);
  EXPECT_TRUE(rep.passed()) << rep.to_text();
  for (const auto& r : rep.records()) EXPECT_EQ(r.backend, "prime");
}

TEST(Suites, ReportIsDeterministic) {
  SuiteConfig cfg;
  cfg.n = 2;
  auto a = run_suite<Rational>("qdybe", cfg).to_json(false, cfg.seed).dump();
  auto b = run_suite<Rational>("qdybe", cfg).to_json(false, cfg.seed).dump();
  EXPECT_EQ(a, b);
}
