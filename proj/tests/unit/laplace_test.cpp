#include "treelocate/laplace.hpp"
#include "treelocate/stats.hpp"

#include "support/expect_error.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

namespace treelocate {
namespace {

using testing::three_observer_tree;

std::vector<DelayModel> exp_delays(std::initializer_list<double> rates)
{
    std::vector<DelayModel> out;
    for (double r : rates)
        out.push_back(DelayModel::exponential(r));
    return out;
}

TEST(Incidence, RowsFromHubU)
{
    const auto fx = three_observer_tree();
    const auto a = incidence_matrix(fx.tree, fx.observers, fx.u);
    ASSERT_EQ(a.rows(), 3u);
    ASSERT_EQ(a.cols(), 5u);
    EXPECT_EQ(a.row_edges(0), (std::vector<EdgeId>{fx.a}));
    EXPECT_EQ(a.row_edges(1), (std::vector<EdgeId>{fx.e}));
    EXPECT_EQ(a.row_edges(2), (std::vector<EdgeId>{fx.b, fx.d}));
    EXPECT_TRUE(a.column_rows(fx.c).empty());
    EXPECT_EQ(a.column_rows(fx.b), (std::vector<std::size_t>{2}));
    EXPECT_EQ(a.row_sum(2), 2u);
    const std::vector<double> t{1.0, 2.0, 4.0};
    EXPECT_EQ(a.left_multiply(t), (std::vector<double>{1.0, 4.0, 0.0, 4.0, 2.0}));
}

TEST(Incidence, RowsFromLeafW)
{
    const auto fx = three_observer_tree();
    const auto a = incidence_matrix(fx.tree, fx.observers, fx.w);
    EXPECT_EQ(a.row_edges(0), (std::vector<EdgeId>{fx.a, fx.b, fx.c}));
    EXPECT_EQ(a.row_edges(1), (std::vector<EdgeId>{fx.b, fx.c, fx.e}));
    EXPECT_EQ(a.row_edges(2), (std::vector<EdgeId>{fx.c, fx.d}));
    EXPECT_ERROR_KIND(incidence_matrix(fx.tree, fx.observers, fx.o2), ErrorKind::CandidateIsObserver);
}

TEST(CandidateLaplace, FactorizesOverEdges)
{
    const auto fx = three_observer_tree();
    const std::vector<DelayModel> d{DelayModel::exponential(1.0), DelayModel::uniform(0.0, 2.0),
                                    DelayModel::pos_normal(1.0, 0.25), DelayModel::abs_cauchy(0.5),
                                    DelayModel::exponential(3.0)};
    const std::vector<double> t{0.3, 0.7, 1.1};
    const double expect = d[fx.a].laplace(t[0]) * d[fx.e].laplace(t[1]) * d[fx.b].laplace(t[2]) *
                          d[fx.d].laplace(t[2]);
    EXPECT_NEAR(candidate_laplace(fx.tree, fx.observers, d, fx.u, t), expect, 1e-15);
    const double expect_w = d[fx.c].laplace(t[0] + t[1] + t[2]) * d[fx.b].laplace(t[0] + t[1]) *
                            d[fx.a].laplace(t[0]) * d[fx.e].laplace(t[1]) * d[fx.d].laplace(t[2]);
    EXPECT_NEAR(candidate_laplace(fx.tree, fx.observers, d, fx.w, t), expect_w, 1e-15);
    EXPECT_EQ(candidate_laplace(fx.tree, fx.observers, d, fx.w, std::vector<double>{0, 0, 0}), 1.0);
}

TEST(CandidateLaplace, EdgeCoefficientsSkipIdleEdges)
{
    const auto fx = three_observer_tree();
    const auto d = exp_delays({1, 1, 1, 1, 1});
    const CandidateTransform phi(fx.tree, fx.observers, d, fx.u);
    const std::vector<double> t{1.0, 2.0, 4.0};
    auto coeffs = phi.edge_coefficients(t);
    std::sort(coeffs.begin(), coeffs.end());
    const std::vector<std::pair<EdgeId, double>> want{{fx.a, 1.0}, {fx.b, 4.0}, {fx.d, 4.0}, {fx.e, 2.0}};
    EXPECT_EQ(coeffs, want);
    EXPECT_ERROR_KIND(CandidateTransform(fx.tree, fx.observers, exp_delays({1, 1}), fx.u),
                      ErrorKind::DimensionMismatch);
}

TEST(CandidateLaplace, MatchesMonteCarlo)
{
    const auto fx = three_observer_tree();
    const std::vector<DelayModel> d{DelayModel::pos_normal(1.0, 0.5), DelayModel::uniform(0.0, 2.0),
                                    DelayModel::exponential(2.0), DelayModel::exponential(0.5),
                                    DelayModel::pos_normal(2.0, 1.0)};
    Rng rng(77);
    for (NodeId v : {fx.u, fx.v, fx.w}) {
        const auto times = testing::sample_observer_times(fx.tree, fx.observers, d, v, 200000, rng);
        for (const std::vector<double> t : {std::vector{0.2, 0.2, 0.2}, std::vector{1.0, 0.1, 0.5},
                                            std::vector{0.0, 2.0, 0.3}}) {
            const auto mc = testing::monte_carlo_laplace(times, t);
            EXPECT_NEAR(candidate_laplace(fx.tree, fx.observers, d, v, t), mc.mean, 4.0 * mc.standard_error() + 1e-9)
                << "v=" << v;
        }
    }
}

TEST(CandidateLaplace, SymmetricCandidatesAreBitIdentical)
{
    // Star with observers on three leaves and two free leaves 4, 5.
    const Tree t = star_tree(6);
    const std::vector<NodeId> obs{1, 2, 3};
    const auto d = std::vector<DelayModel>(5, DelayModel::pos_normal(1.0, 0.25));
    const std::vector<double> arg{0.37, 1.91, 0.05};
    EXPECT_EQ(candidate_laplace(t, obs, d, 4, arg), candidate_laplace(t, obs, d, 5, arg));
}

TEST(EmpiricalLaplace, AveragesSamples)
{
    std::vector<Observation> s(2);
    s[0].times = {{1, 1.0}, {2, 2.0}};
    s[1].times = {{1, 3.0}, {2, 0.0}};
    const std::vector<NodeId> obs{1, 2};
    const std::vector<double> t{1.0, 0.5};
    EXPECT_NEAR(empirical_laplace(s, obs, t), 0.5 * (std::exp(-2.0) + std::exp(-3.0)), 1e-15);
    EXPECT_ERROR_KIND(empirical_laplace(std::vector<Observation>{}, obs, t), ErrorKind::NoSamples);
}

TEST(ConditionalSumFactor, SpecialCases)
{
    const std::vector<double> one{2.0};
    EXPECT_NEAR(conditional_sum_factor(one, std::vector<double>{0.7}, 1.5), std::exp(-0.7 * 1.5), 1e-15);
    const std::vector<double> three{1.0, 2.0, 3.0};
    EXPECT_EQ(conditional_sum_factor(three, std::vector<double>{0, 0, 0}, 2.0), 1.0);
    // Equal tilts: the sum is fixed, so the factor is exp(-c tau).
    EXPECT_NEAR(conditional_sum_factor(three, std::vector<double>{0.4, 0.4, 0.4}, 2.0), std::exp(-0.8), 1e-12);
    EXPECT_ERROR_KIND(conditional_sum_factor(three, std::vector<double>{0, 0, 0}, 0.0), ErrorKind::DegenerateTime);
    EXPECT_ERROR_KIND(conditional_sum_factor(three, std::vector<double>{1.0}, 1.0), ErrorKind::DimensionMismatch);
}

TEST(ConditionalSumFactor, TwoStageClosedForm)
{
    // X1 | X1 + X2 = tau has density proportional to exp(-(l1 - l2) x) on [0, tau].
    const double l1 = 1.0, l2 = 2.5, c1 = 0.8, c2 = 0.3, tau = 1.7;
    const double k = l1 - l2 + c1 - c2;
    const double num = std::exp(-c2 * tau) * (1.0 - std::exp(-k * tau)) / k;
    const double den = (1.0 - std::exp(-(l1 - l2) * tau)) / (l1 - l2);
    EXPECT_NEAR(conditional_sum_factor(std::vector{l1, l2}, std::vector{c1, c2}, tau), num / den, 1e-13);
}

TEST(ConditionalSumFactor, MatchesRejectionWindow)
{
    Rng rng(4242);
    const std::vector<double> rates{1.0, 1.5, 0.8};
    const std::vector<double> tilts{1.2, 0.5, 0.1};
    const double tau = 2.0;
    const auto mc = testing::rejection_window_conditional(rates, tilts, tau, 0.01, 4000000, rng);
    ASSERT_GT(mc.draws, 10000u);
    EXPECT_NEAR(conditional_sum_factor(rates, tilts, tau), mc.mean, 4.0 * mc.standard_error() + 2e-3);
}

TEST(Conditional, IdentitiesOnThreeObserverTree)
{
    const auto fx = three_observer_tree();
    const std::vector<double> r{1.0, 2.0, 0.5, 1.5, 3.0};
    const auto d = exp_delays({1.0, 2.0, 0.5, 1.5, 3.0});
    const std::vector<double> t{0.4, 0.9, 1.3};
    const double tau3 = 1.1;
    // [u, o3] = {b, d}: the conditional collapses to exp(-t3 tau3).
    const double want3 = d[fx.a].laplace(t[0]) * d[fx.e].laplace(t[1]) * std::exp(-t[2] * tau3);
    EXPECT_NEAR(conditional_laplace_exponential(fx.tree, fx.observers, d, fx.u, fx.o3, tau3, t), want3, 1e-14);
    const double tau1 = 0.6;
    const double want1 =
        std::exp(-t[0] * tau1) * d[fx.b].laplace(t[2]) * d[fx.d].laplace(t[2]) * d[fx.e].laplace(t[1]);
    EXPECT_NEAR(conditional_laplace_exponential(fx.tree, fx.observers, d, fx.u, fx.o1, tau1, t), want1, 1e-14);
    // From w the path to o1 is {c, b, a} with tilts t1+t2+t3, t1+t2, t1.
    const double want_w = d[fx.d].laplace(t[2]) * d[fx.e].laplace(t[1]) *
                          conditional_sum_factor(std::vector{r[fx.a], r[fx.b], r[fx.c]},
                                                 std::vector{t[0], t[0] + t[1], t[0] + t[1] + t[2]}, tau1);
    EXPECT_NEAR(conditional_laplace_exponential(fx.tree, fx.observers, d, fx.w, fx.o1, tau1, t), want_w, 1e-14);
    EXPECT_ERROR_KIND(conditional_laplace_exponential(fx.tree, fx.observers, d, fx.w, fx.w, tau1, t),
                      ErrorKind::InvalidParameter);
}

TEST(Conditional, AveragesBackToUnconditional)
{
    // E[phi_v(t | tau_o)] over tau_o equals phi_v(t).
    const auto fx = three_observer_tree();
    const auto d = exp_delays({1.0, 2.0, 0.5, 1.5, 3.0});
    const ConditionalTransform phi(fx.tree, fx.observers, d, fx.w);
    const std::vector<double> t{0.4, 0.9, 1.3};
    Rng rng(5);
    const auto times = testing::sample_observer_times(fx.tree, fx.observers, d, fx.w, 100000, rng);
    for (std::size_t slot = 0; slot < 3; ++slot) {
        RunningStats s;
        for (const auto& row : times)
            s.add(phi.conditional(t, slot, row[slot]));
        EXPECT_NEAR(s.mean(), phi(t), 4.0 * s.standard_error() + 1e-6) << "slot " << slot;
    }
}

TEST(Conditional, RejectsNonExponentialSteinerEdges)
{
    const auto fx = three_observer_tree();
    auto d = exp_delays({1, 1, 1, 1, 1});
    d[fx.c] = DelayModel::uniform(0.0, 1.0);
    // c is off the Steiner tree of u and the observers.
    EXPECT_NO_THROW(ConditionalTransform(fx.tree, fx.observers, d, fx.u));
    EXPECT_ERROR_KIND(ConditionalTransform(fx.tree, fx.observers, d, fx.w), ErrorKind::UnsupportedDelayModel);
}

TEST(Check, CombinationAndEdgeCases)
{
    const std::vector<double> conds{0.2, 0.4};
    EXPECT_NEAR(hajek_combine(0.5, conds, 2), (0.5 + 0.6) / 3.0, 1e-15);
    EXPECT_ERROR_KIND(hajek_combine(0.5, conds, 3), ErrorKind::DimensionMismatch);
    // One observer: only the conditional survives.
    EXPECT_EQ(hajek_combine(0.9, std::vector<double>{0.3}, 1), 0.3);

    const auto fx = three_observer_tree();
    const auto d = exp_delays({1, 1, 1, 1, 1});
    Observation obs;
    obs.times = {{fx.o1, 0.5}, {fx.o2, 1.0}, {fx.o3, 2.0}};
    EXPECT_EQ(check_statistic(fx.tree, fx.observers, d, fx.u, obs, std::vector<double>{0, 0, 0}), 1.0);

    const Tree p = path_tree(3);
    const std::vector<NodeId> single{2};
    Observation one;
    one.times = {{2, 1.3}};
    const auto dp = exp_delays({1, 1});
    const double t = 0.7;
    EXPECT_NEAR(check_statistic(p, single, dp, 0, one, std::vector{t}), std::exp(-t * 1.3), 1e-14);
}

TEST(Check, UnbiasedForTheTransform)
{
    const auto fx = three_observer_tree();
    const auto d = exp_delays({1.0, 2.0, 0.5, 1.5, 3.0});
    const ConditionalTransform phi(fx.tree, fx.observers, d, fx.v);
    const std::vector<double> t{0.3, 0.6, 0.2};
    Rng rng(6);
    const auto times = testing::sample_observer_times(fx.tree, fx.observers, d, fx.v, 100000, rng);
    RunningStats raw;
    RunningStats checked;
    for (const auto& row : times) {
        raw.add(std::exp(-(t[0] * row[0] + t[1] * row[1] + t[2] * row[2])));
        checked.add(phi.check(t, row));
    }
    EXPECT_NEAR(checked.mean(), phi(t), 4.0 * checked.standard_error() + 1e-6);
    EXPECT_LT(checked.variance(), raw.variance());
}

} // namespace
} // namespace treelocate
