#include <random>

#include "support.hpp"

using namespace swp;
using namespace swp::test;

namespace {

BudgetParams<double> flat_params(const Grid& g) {
  return make_budget_params(constant(g, 0.1), normalize_distribution(constant(g, 1.0)), constant(g, 1.0));
}

Profile bathtub(const Grid& g) {
  return Profile::from_function(g, [](double z) {
    return 0.05 + 0.45 * std::exp(-(z - 20) / 3) + 0.6 * std::exp((z - 70) / 3);
  });
}

// Nondecreasing cost with omega' <= mu * omega at every node, including the one-sided end.
Profile admissible_cost(const Profile& mu, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto& g = mu.grid;
  Profile w(g);
  w[0] = 1.0 + u(rng);
  for (Eigen::Index j = 0; j < g.n; ++j) {
    double cap = mu[j];
    if (j == g.n - 1) cap = std::min(cap, mu[g.n]);
    w[j + 1] = w[j] * (1.0 + g.dz * cap * u(rng));
  }
  return w;
}

double relative_l1(const Profile& a, const Profile& b) {
  return integrate(a.grid, (a.values - b.values).cwiseAbs()) / integrate(b.grid, b.values.cwiseAbs());
}

}  // namespace

TEST(BudgetParams, DerivativeIsForwardDifference) {
  const auto g = working_age_grid();
  const auto p = make_budget_params(constant(g, 0.1), normalize_distribution(constant(g, 1.0)),
                                    Profile::from_function(g, [](double z) { return z * z; }));
  EXPECT_DOUBLE_EQ(p.omega_prime[0], 41.0);   // 21^2 - 20^2
  EXPECT_DOUBLE_EQ(p.omega_prime[50], 139.0); // 70^2 - 69^2, one-sided at z_max
}

TEST(BudgetParams, ValidationRejectsBadCost) {
  const auto g = working_age_grid();
  auto p = flat_params(g);
  p.omega[10] = -1.0;
  EXPECT_THROW(validate(p), Error);
  p = flat_params(g);
  p.omega[g.n] = 0.0;
  EXPECT_THROW(validate(p), Error);
}

TEST(HiringRateBudget, ZeroState) {
  const auto g = working_age_grid();
  const auto h = hiring_rate_budget(PopulationState<double>{0.0, Profile(g)}, flat_params(g));
  EXPECT_EQ(h.rate, 0.0);
}

TEST(HiringRateBudget, FlatCostClosedForm) {
  // h = mu P + rho(z_max) = 0.1 * 500 + 10.
  const auto g = working_age_grid();
  const auto h = hiring_rate_budget(PopulationState<double>{0.0, constant(g, 10.0)}, flat_params(g));
  EXPECT_NEAR(h.rate, 60.0, 1e-12);
  EXPECT_NEAR(h.terms.attrition, 50.0, 1e-12);
  EXPECT_NEAR(h.terms.retirement, 10.0, 1e-12);
  EXPECT_EQ(h.terms.aging, 0.0);
  EXPECT_NEAR(h.denominator, 1.0, 1e-12);
}

TEST(HiringRateBudget, StationaryBaseNeedsUnitHiring) {
  const auto g = working_age_grid();
  const auto p = make_budget_params(bathtub(g), gaussian(g, 22, 2.5), Profile::from_function(g, [](double z) { return z - 18; }));
  const auto base = stationary_base(p.mu, p.gamma);
  for (double scale : {1.0, 7.5}) {
    PopulationState<double> s{0.0, Profile(g, scale * base.values)};
    EXPECT_NEAR(hiring_rate_budget(s, p).rate, scale, 1e-12 * scale);
    const auto next = step_budget(s, p, 0.3);
    EXPECT_NEAR(hiring_rate_budget(next, p).rate, scale, 1e-12 * scale);
  }
}

TEST(HiringRateBudget, DegenerateWhenCostMissesHiring) {
  const auto g = working_age_grid();
  Profile gamma(g);
  gamma[1] = 1.0;
  Profile omega = Profile::from_function(g, [](double z) { return z > 30 ? 1.0 : 0.0; });
  const auto p = make_budget_params(constant(g, 0.1), gamma, omega);
  try {
    hiring_rate_budget(PopulationState<double>{0.0, constant(g, 1.0)}, p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Degenerate);
  }
}

TEST(BudgetAssumption, ConstantCostHolds) {
  const auto g = working_age_grid();
  const auto report = check_budget_assumption(flat_params(g));
  EXPECT_TRUE(report.holds);
  EXPECT_GE(report.margin, 0.0);
}

TEST(BudgetAssumption, LinearCostWithThirtyPercentAttritionHolds) {
  const auto g = working_age_grid();
  const auto p = make_budget_params(constant(g, 0.3), normalize_distribution(constant(g, 1.0)),
                                    Profile::from_function(g, [](double z) { return z; }));
  const auto report = check_budget_assumption(p);
  EXPECT_TRUE(report.holds);
  EXPECT_NEAR(report.margin, 0.3 * 20 - 1, 1e-12);
  EXPECT_EQ(report.worst_node, 0);
}

TEST(BudgetAssumption, ExponentialCostViolates) {
  const auto g = working_age_grid();
  const auto p = make_budget_params(constant(g, 0.3), normalize_distribution(constant(g, 1.0)),
                                    Profile::from_function(g, [](double z) { return std::exp(z); }));
  const auto report = check_budget_assumption(p);
  EXPECT_FALSE(report.holds);
  EXPECT_LT(report.margin, 0.0);
}

TEST(StepBudget, ZeroStaysZero) {
  const auto g = working_age_grid();
  const auto next = step_budget(PopulationState<double>{0.0, Profile(g)}, flat_params(g), 0.5);
  EXPECT_EQ(next.rho.values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(StepBudget, GoldenOneStep) {
  // h = 60; node 1: 10 * 0.95 + 0.5 * (60 * 0.02 - 10) = 5.1; others: 9.5 + 0.6 = 10.1.
  const auto g = working_age_grid();
  const auto p = flat_params(g);
  const auto next = step_budget(PopulationState<double>{0.0, constant(g, 10.0)}, p, 0.5);
  EXPECT_EQ(next.rho[0], 0.0);
  EXPECT_NEAR(next.rho[1], 5.1, 1e-13);
  for (Eigen::Index j = 2; j <= g.n; ++j) EXPECT_NEAR(next.rho[j], 10.1, 1e-13);
  EXPECT_NEAR(integrate(next.rho), 500.0, 1e-10);
}

TEST(StepBudget, StationaryFamilyIsFixed) {
  const auto g = working_age_grid(0.5);
  const auto p = make_budget_params(bathtub(g), gaussian(g, 25, 3), Profile::from_function(g, [](double z) { return 1 + 0.01 * z; }));
  const Profile rho(g, 4.0 * stationary_base(p.mu, p.gamma).values);
  const auto next = step_budget(PopulationState<double>{0.0, rho}, p, 0.9 * budget_cfl_bound(p.mu));
  EXPECT_LT(sup_norm(Profile(g, next.rho.values - rho.values)), 1e-12 * sup_norm(rho));
}

TEST(StepBudget, CflViolationGivesAdmissibleStep) {
  const auto g = working_age_grid();
  try {
    step_budget(PopulationState<double>{0.0, constant(g, 1.0)}, flat_params(g), 2.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CflViolation);
    EXPECT_NE(std::string(e.what()).find("0.9090909091"), std::string::npos) << e.what();
  }
}

TEST(StepBudget, DefaultStepIsNinetyPercentOfBound) {
  const auto g = working_age_grid();
  const auto mu = bathtub(g);
  const double bound = g.dz / (1 + g.dz * mu.values.maxCoeff());
  EXPECT_DOUBLE_EQ(budget_cfl_bound(mu), bound);
  EXPECT_DOUBLE_EQ(default_budget_dt(mu), 0.9 * bound);
  EXPECT_NO_THROW(step_budget(PopulationState<double>{0.0, constant(g, 1.0)},
                              make_budget_params(mu, gaussian(g, 25, 3), constant(g, 1.0)), bound));
}

TEST(StationaryFamily, SelfScaling) {
  const auto g = working_age_grid();
  const auto p = make_budget_params(bathtub(g), gaussian(g, 25, 3), Profile::from_function(g, [](double z) { return z; }));
  const auto base = stationary_base(p.mu, p.gamma);
  EXPECT_NEAR(stationary_family(p, base).predicted_scale, 1.0, 1e-14);
  EXPECT_NEAR(stationary_family(p, Profile(g, 3.0 * base.values)).predicted_scale, 3.0, 1e-14);
}

TEST(StationaryFamily, DegenerateBase) {
  const auto g = working_age_grid();
  auto p = flat_params(g);
  p.gamma.values.setZero();
  EXPECT_THROW(stationary_family(p, constant(g, 1.0)), Error);
}

TEST(RelativeEntropy, ConstantRatio) {
  const auto g = working_age_grid();
  const auto p = make_budget_params(bathtub(g), gaussian(g, 25, 3), Profile::from_function(g, [](double z) { return z; }));
  const auto family = stationary_family(p, constant(g, 1.0));
  const double m = 2.5;
  const PopulationState<double> s{0.0, Profile(g, m * family.base.values)};
  EXPECT_NEAR(relative_entropy(s, family, p), m * m * integrate(g, p.omega.values.cwiseProduct(family.base.values)),
              1e-9);
  EXPECT_EQ(relative_entropy(PopulationState<double>{0.0, Profile(g)}, family, p), 0.0);
  const auto u = entropy_ratio(s, family, p);
  for (Eigen::Index j = 0; j <= g.n; ++j) EXPECT_NEAR(u[j], m, 1e-12);
}

TEST(RelativeEntropy, BoundaryRatioIsHiringRate) {
  const auto g = working_age_grid();
  const auto p = make_budget_params(bathtub(g), gaussian(g, 22, 2.5), Profile::from_function(g, [](double z) { return z - 18; }));
  const PopulationState<double> s{0.0, gaussian(g, 40, 9, 1000.0)};
  EXPECT_NEAR(boundary_ratio(s, p), hiring_rate_budget(s, p).rate, 1e-10);
}

TEST(SimulateBudget, SeriesShareTimeAxis) {
  const auto g = working_age_grid();
  const auto p = flat_params(g);
  const auto r = simulate_budget(p, constant(g, 10.0), 0.5, 5.0);
  EXPECT_EQ(r.model, ModelKind::Budget);
  ASSERT_EQ(r.times.size(), 11u);
  EXPECT_EQ(r.budget.size(), 11u);
  EXPECT_EQ(r.entropy.size(), 11u);
  EXPECT_EQ(r.hiring_terms.size(), 11u);
  EXPECT_NEAR(r.hiring.front(), 60.0, 1e-12);
  EXPECT_EQ(r.snapshots.front().rho[0], 0.0);
}

TEST(SimulateBudget, BudgetConstant) {
  const auto g = working_age_grid();
  const auto p = make_budget_params(bathtub(g), gaussian(g, 22, 2.5), Profile::from_function(g, [](double z) { return z - 18; }));
  const auto r = simulate_budget(p, gaussian(g, 23, 2, 1000.0), default_budget_dt(p.mu), 200.0);
  EXPECT_LT(budget_drift(r), 1e-10);
}

TEST(SimulateBudget, AgingUnderFlatBudgetShrinksHeadcount) {
  const auto g = working_age_grid();
  const auto p = make_budget_params(bathtub(g), gaussian(g, 22, 2.5), Profile::from_function(g, [](double z) { return z - 18; }));
  const auto r = simulate_budget(p, gaussian(g, 23, 2, 1000.0), default_budget_dt(p.mu), 200.0);
  EXPECT_LT(r.headcount.back(), r.headcount.front());
}

TEST(SimulateBudget, ConvergesToPredictedMember) {
  // Older workforce, flat cost: the long-run profile is m * base.
  const auto g = working_age_grid();
  const Profile mu = Profile::from_function(g, [](double z) { return 0.01 + 0.8 * std::exp((z - 70) / 2); });
  const auto p = make_budget_params(mu, gaussian(g, 28, 4), constant(g, 60000.0));
  const auto rho0 = gaussian(g, 45, 8, 1000.0);
  const auto family = stationary_family(p, rho0);
  const auto r = simulate_budget(p, rho0, default_budget_dt(mu), 200.0, SimulationOptions{0});
  EXPECT_LT(relative_l1(r.snapshots.back().rho, family.limit()), 0.02);
}

TEST(SimulateBudget, EntropyAndHiringUnderAssumption) {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const auto g = working_age_grid(u(rng) < 0.5 ? 1.0 : 0.5);
    Profile mu(g), gamma(g), rho0(g);
    for (Eigen::Index j = 0; j < g.nodes(); ++j) {
      mu[j] = 0.03 + 0.3 * u(rng);
      gamma[j] = 0.02 + std::exp(-0.5 * std::pow((g.age(j) - 25) / 2.0, 2));
      rho0[j] = 100 * u(rng);
    }
    const auto p = make_budget_params(mu, normalize_distribution(gamma), admissible_cost(mu, rng));
    ASSERT_TRUE(check_budget_assumption(p).holds);
    const auto r = simulate_budget(p, rho0, default_budget_dt(mu), 60.0);
    EXPECT_LE(max_entropy_increase(r), kEntropySlack);
    EXPECT_GE(*std::min_element(r.hiring.begin(), r.hiring.end()), 0.0);
    EXPECT_LT(budget_drift(r), 1e-10);
  }
}
