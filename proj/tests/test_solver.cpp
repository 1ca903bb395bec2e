#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "mcmle/crosscheck.hpp"
#include "mcmle/sampling.hpp"
#include "mcmle/solver.hpp"

namespace mcmle {
namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no mcmle::Error thrown";
  return ErrorCode::InvalidArgument;
}

TEST(SolveScoreRoot, Linear) {
  const auto r = solve_score_root([](double x) { return -x + 5.0; }, 0.0, 10.0);
  EXPECT_NEAR(r.root, 5.0, 1e-12);
  EXPECT_LE(std::abs(r.residual), 1e-12);
}

TEST(SolveScoreRoot, ParetoScoreMatchesClosedForm) {
  const std::vector<double> x = {1.0, std::numbers::e, std::numbers::e * std::numbers::e};
  const auto r = solve_score_root([&](double psi) { return score_psi(FamilyId::ParetoShape, 1.0, psi, x); },
                                  0.01, 100.0);
  EXPECT_NEAR(r.root, 1.0, 1e-12);
  EXPECT_NEAR(r.root, mle(FamilyId::ParetoShape, x).psi_hat_mle, 1e-12);
}

TEST(SolveScoreRoot, NoSignChange) {
  EXPECT_EQ(code_of([] { solve_score_root([](double x) { return x * x + 1.0; }, 0.0, 10.0); }),
            ErrorCode::NoSignChange);
}

TEST(SolveScoreRoot, MaxIterations) {
  const auto f = [](double x) { return std::atan(x - 0.3); };
  EXPECT_EQ(code_of([&] { solve_score_root(f, -10.0, 50.0, {1e-12, 1}); }), ErrorCode::MaxIterationsExceeded);
}

TEST(SolveScoreRoot, FallsBackToBisectionWhenNewtonLeavesBracket) {
  // Newton from x = 20 on atan overshoots far outside [-10, 50].
  const auto r = solve_score_root([](double x) { return std::atan(x - 0.3); }, -10.0, 50.0);
  EXPECT_EQ(r.method_used, RootMethod::BisectionFallback);
  EXPECT_NEAR(r.root, 0.3, 1e-11);
  EXPECT_LE(std::abs(r.residual), 1e-12);
}

TEST(SolveScoreRoot, RootAtBracketEnd) {
  const auto r = solve_score_root([](double x) { return x - 2.0; }, 2.0, 3.0);
  EXPECT_EQ(r.root, 2.0);
  EXPECT_EQ(r.iterations, 0u);
}

TEST(SolveScoreRoot, BadArguments) {
  EXPECT_EQ(code_of([] { solve_score_root([](double x) { return x; }, 1.0, -1.0); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(code_of([] { solve_score_root([](double x) { return x; }, -1.0, 1.0, {0.0, 10}); }),
            ErrorCode::InvalidArgument);
}

TEST(NumericDerivative, Polynomial) {
  EXPECT_NEAR(numeric_derivative([](double x) { return x * x; }, 3.0, 1e-5), 6.0, 1e-8);
}

TEST(NumericDerivative, ConstantIsExactlyZero) {
  EXPECT_EQ(numeric_derivative([](double) { return 4.25; }, 1.7, 1e-3), 0.0);
}

TEST(NumericDerivative, InverseShapeScoreSlope) {
  RngStream s = derive_substream(5, 5);
  const auto batch = sample_family(FamilyId::ParetoInverseShape, s, 1.0, 0.5, 10);
  const double th = theta_hat(FamilyId::ParetoInverseShape, batch.values);
  for (double at : {0.1, 0.5, 3.0}) {
    const double d = numeric_derivative(
        [&](double psi) { return score_psi(FamilyId::ParetoInverseShape, th, psi, batch.values); }, at, 1e-6);
    EXPECT_NEAR(d, -10.0, 1e-6);
  }
}

TEST(NumericDerivative, NonFinite) {
  EXPECT_EQ(code_of([] { numeric_derivative([](double x) { return std::log(x); }, 0.0, 1.0); }),
            ErrorCode::NonFiniteEvaluation);
  EXPECT_EQ(code_of([] { numeric_derivative([](double x) { return x; }, 0.0, 0.0); }), ErrorCode::InvalidArgument);
}

class SolverFamilyTest : public ::testing::TestWithParam<FamilyId> {};

TEST_P(SolverFamilyTest, NumericRootsMatchClosedForms) {
  const FamilyId f = GetParam();
  RngStream meta = derive_substream(31, static_cast<std::uint64_t>(f));
  for (std::size_t i = 0; i < 10000; ++i) {
    const std::size_t n = 2 + static_cast<std::size_t>(meta.next_uniform() * 30);
    const double theta = is_pareto(f) ? 0.5 + 3.0 * meta.next_uniform() : -3.0 + 6.0 * meta.next_uniform();
    const double psi = 0.1 + 4.0 * meta.next_uniform();
    RngStream s = derive_substream(32, i);
    const auto batch = sample_family(f, s, theta, psi, n);
    const auto closed = mcmle(f, batch);
    const auto root_mle = numeric_mle(f, batch.values);
    const auto root_mc = numeric_mcmle(f, batch.values);
    ASSERT_LE(std::abs(root_mle.root - closed.psi_hat_mle), 1e-9 * closed.psi_hat_mle) << i;
    ASSERT_LE(std::abs(root_mc.root - *closed.psi_hat_mcmle), 1e-9 * *closed.psi_hat_mcmle) << i;
  }
}

TEST_P(SolverFamilyTest, CentralDifferenceMatchesAnalyticCurvature) {
  const FamilyId f = GetParam();
  for (std::size_t i = 0; i < 200; ++i) {
    RngStream s = derive_substream(33, i);
    const auto batch = sample_family(f, s, 1.0, 1.5, 12);
    const double th = theta_hat(f, batch.values);
    const double at = 0.5 + 0.01 * static_cast<double>(i);
    const double numeric =
        numeric_derivative([&](double psi) { return score_psi(f, th, psi, batch.values); }, at);
    const double analytic = f == FamilyId::ParetoShape ? -y_statistic(f, batch.values) : -12.0;
    EXPECT_NEAR(numeric / analytic, 1.0, 1e-6);
  }
}

INSTANTIATE_TEST_SUITE_P(AllFamilies, SolverFamilyTest, ::testing::ValuesIn(kAllFamilies),
                         [](const auto& info) {
                           std::string name(family_name(info.param));
                           std::erase(name, '-');
                           return name;
                         });

}  // namespace
}  // namespace mcmle
