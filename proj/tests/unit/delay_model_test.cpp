#include "treelocate/delay_model.hpp"

#include "support/expect_error.hpp"
#include "support/oracles.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace treelocate {
namespace {

using testing::quadrature_laplace;

std::vector<DelayModel> all_families()
{
    return {DelayModel::exponential(1.0), DelayModel::exponential(3.5), DelayModel::pos_normal(1.0, 0.25),
            DelayModel::pos_normal(1.0, 1.0), DelayModel::pos_normal(0.0, 2.0), DelayModel::uniform(0.0, 2.0),
            DelayModel::uniform(0.5, 0.75), DelayModel::abs_cauchy(1.0), DelayModel::abs_cauchy(0.2)};
}

TEST(DelayModel, ParameterValidation)
{
    EXPECT_ERROR_KIND(DelayModel::exponential(0.0), ErrorKind::InvalidParameter);
    EXPECT_ERROR_KIND(DelayModel::exponential(-1.0), ErrorKind::InvalidParameter);
    EXPECT_ERROR_KIND(DelayModel::pos_normal(-0.1, 1.0), ErrorKind::InvalidParameter);
    EXPECT_ERROR_KIND(DelayModel::pos_normal(1.0, 0.0), ErrorKind::InvalidParameter);
    EXPECT_ERROR_KIND(DelayModel::uniform(1.0, 1.0), ErrorKind::InvalidParameter);
    EXPECT_ERROR_KIND(DelayModel::uniform(-1.0, 1.0), ErrorKind::InvalidParameter);
    EXPECT_ERROR_KIND(DelayModel::abs_cauchy(0.0), ErrorKind::InvalidParameter);
}

TEST(Laplace, TableValues)
{
    EXPECT_DOUBLE_EQ(DelayModel::exponential(1.0).laplace(1.0), 0.5);
    EXPECT_NEAR(DelayModel::uniform(0.0, 2.0).laplace(1.0), (1.0 - std::exp(-2.0)) / 2.0, 1e-15);
    EXPECT_NEAR(DelayModel::uniform(0.0, 2.0).laplace(1.0), 0.432332, 1e-6);
    for (const auto& m : all_families())
        EXPECT_EQ(m.laplace(0.0), 1.0) << m.describe();
    EXPECT_ERROR_KIND(DelayModel::exponential(1.0).laplace(-1.0), ErrorKind::NegativeArgument);
}

TEST(Laplace, PosNormalAndAbsCauchyAgainstQuadrature)
{
    EXPECT_NEAR(DelayModel::pos_normal(1.0, 0.25).laplace(2.0), quadrature_laplace(DelayModel::pos_normal(1.0, 0.25), 2.0),
                1e-8);
    const double cauchy = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [](double x) { return std::exp(-x) * 2.0 / std::numbers::pi / (1.0 + x * x); }, 0.0, INFINITY, 15, 1e-14);
    EXPECT_NEAR(DelayModel::abs_cauchy(1.0).laplace(1.0), cauchy, 1e-6);
}

TEST(Laplace, AllFamiliesAgainstQuadrature)
{
    for (const auto& m : all_families())
        for (double t : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 40.0})
            EXPECT_NEAR(m.laplace(t), quadrature_laplace(m, t), 1e-9) << m.describe() << " t=" << t;
}

TEST(Laplace, PosNormalFarTail)
{
    // Past the switch to the continued fraction the value stays positive,
    // finite and decreasing.
    const auto m = DelayModel::pos_normal(1.0, 0.25);
    double prev = 1.0;
    for (double t = 10.0; t < 2000.0; t *= 1.3) {
        const double v = m.laplace(t);
        EXPECT_GT(v, 0.0);
        EXPECT_LT(v, prev);
        prev = v;
    }
    // Around the switch the two evaluations agree.
    const double z_switch_t = (20.0 + 1.0 / 0.25) / 0.25;
    EXPECT_NEAR(m.laplace(std::nextafter(z_switch_t, 0.0)) / m.laplace(std::nextafter(z_switch_t, 1e9)), 1.0, 1e-10);
    EXPECT_NEAR(m.laplace(300.0), quadrature_laplace(m, 300.0), 1e-14);
}

TEST(Laplace, StrictlyDecreasing)
{
    for (const auto& m : all_families()) {
        double prev = 1.0;
        for (double t = 0.05; t < 50.0; t *= 1.5) {
            const double v = m.laplace(t);
            EXPECT_LT(v, prev) << m.describe();
            EXPECT_GT(v, 0.0);
            prev = v;
        }
    }
}

TEST(Density, Basics)
{
    EXPECT_DOUBLE_EQ(DelayModel::exponential(1.0).density(0.0), 1.0);
    EXPECT_EQ(DelayModel::uniform(0.0, 2.0).density(3.0), 0.0);
    EXPECT_ERROR_KIND(DelayModel::exponential(1.0).density(-1.0), ErrorKind::NegativeArgument);
    for (const auto& m : all_families())
        for (double x : {0.0, 0.3, 1.0, 1.9, 4.0})
            EXPECT_NEAR(m.density(x), testing::reference_density(m, x), 1e-13) << m.describe();
}

TEST(Density, IntegratesToOne)
{
    using boost::math::quadrature::gauss_kronrod;
    const auto m = DelayModel::pos_normal(1.0, 1.0);
    const double mass =
        gauss_kronrod<double, 61>::integrate([&](double x) { return m.density(x); }, 0.0, INFINITY, 15, 1e-14);
    EXPECT_NEAR(mass, 1.0, 1e-8);
    for (const auto& mm : all_families()) {
        if (std::holds_alternative<Uniform>(mm.params()))
            continue;
        const double total = gauss_kronrod<double, 61>::integrate([&](double x) { return mm.density(x); }, 0.0,
                                                                  INFINITY, 15, 1e-12);
        EXPECT_NEAR(total, 1.0, 1e-7) << mm.describe();
    }
}

TEST(Sample, LawOfLargeNumbers)
{
    Rng rng(42);
    const auto u = DelayModel::uniform(0.0, 2.0);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i)
        sum += u.sample(rng);
    EXPECT_NEAR(sum / 100000.0, 1.0, 0.02);

    const auto e = DelayModel::exponential(1.0);
    int above = 0;
    for (int i = 0; i < 100000; ++i)
        above += e.sample(rng) > 1.0;
    EXPECT_NEAR(above / 100000.0, std::exp(-1.0), 0.01);

    const auto n = DelayModel::pos_normal(1.0, 0.25);
    double s = 0.0;
    for (int i = 0; i < 100000; ++i)
        s += n.sample(rng);
    EXPECT_NEAR(s / 100000.0, 1.0, 0.005); // truncation mass ~3e-5 barely moves the mean
}

TEST(Sample, Nonnegative)
{
    Rng rng(5);
    for (const auto& m : all_families())
        for (int i = 0; i < 20000; ++i)
            ASSERT_GE(m.sample(rng), 0.0) << m.describe();
}

TEST(Sample, AbsCauchyMedianStabilizesMeanDoesNot)
{
    Rng rng(9);
    const auto m = DelayModel::abs_cauchy(2.0);
    std::vector<double> xs;
    std::vector<double> running_means;
    double sum = 0.0;
    for (int i = 1; i <= 1 << 20; ++i) {
        xs.push_back(m.sample(rng));
        sum += xs.back();
        if ((i & (i - 1)) == 0 && i >= 1024)
            running_means.push_back(sum / i);
    }
    std::nth_element(xs.begin(), xs.begin() + xs.size() / 2, xs.end());
    EXPECT_NEAR(xs[xs.size() / 2], 2.0, 0.02); // median of |Cauchy(0, s)| is s
    const auto [lo, hi] = std::minmax_element(running_means.begin(), running_means.end());
    EXPECT_GT(*hi / *lo, 1.2); // the mean keeps drifting
}

TEST(Rescale, ScalesTheDelay)
{
    for (const auto& m : all_families())
        for (double c : {1e-3, 0.5, 7.0})
            for (double t : {0.1, 1.0, 3.0})
                EXPECT_NEAR(m.rescaled(c).laplace(t / c), m.laplace(t), 1e-12) << m.describe();
}

TEST(Json, RoundTripAndErrors)
{
    for (const auto& m : all_families())
        EXPECT_EQ(DelayModel::from_json(m.to_json()), m);
    const auto v = DelayModel::from_json({{"kind", "posnormal"}, {"mean", 1.0}, {"variance", 0.0625}});
    EXPECT_EQ(v, DelayModel::pos_normal(1.0, 0.25));
    EXPECT_ERROR_KIND(DelayModel::from_json({{"kind", "gamma"}}), ErrorKind::ConfigInvalid);
    EXPECT_ERROR_KIND(DelayModel::from_json({{"kind", "exponential"}, {"rate", -1}}), ErrorKind::ConfigInvalid);
    EXPECT_ERROR_KIND(DelayModel::from_json({{"kind", "exponential"}}), ErrorKind::ConfigInvalid);
    EXPECT_ERROR_KIND(DelayModel::from_json(nlohmann::json::array()), ErrorKind::ConfigInvalid);
}

TEST(Json, PerEdgeOverrides)
{
    const nlohmann::json spec = {{"default", {{"kind", "exponential"}, {"rate", 1.0}}},
                                 {"overrides", {{{"edge", 2}, {"kind", "uniform"}, {"lower", 0}, {"upper", 1}}}}};
    const auto d = delays_from_json(spec, 4);
    ASSERT_EQ(d.size(), 4u);
    EXPECT_EQ(d[2], DelayModel::uniform(0.0, 1.0));
    EXPECT_EQ(d[3], DelayModel::exponential(1.0));
    const nlohmann::json bad = {{"default", {{"kind", "exponential"}, {"rate", 1.0}}},
                                {"overrides", {{{"edge", 9}, {"kind", "exponential"}, {"rate", 2}}}}};
    EXPECT_ERROR_KIND(delays_from_json(bad, 4), ErrorKind::ConfigInvalid);
}

TEST(Hypoexp, TwoDistinctRates)
{
    const std::vector<double> r{1.0, 2.0};
    for (double t : {0.1, 0.7, 2.0, 9.0})
        EXPECT_NEAR(hypoexp_density(r, t), 2.0 * (std::exp(-t) - std::exp(-2.0 * t)), 1e-14);
    EXPECT_EQ(hypoexp_density(r, 0.0), 0.0);
    const double mass = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double t) { return hypoexp_density(r, t); }, 0.0, INFINITY, 15, 1e-14);
    EXPECT_NEAR(mass, 1.0, 1e-8);
}

TEST(Hypoexp, RepeatedRatesGiveErlang)
{
    EXPECT_NEAR(hypoexp_density(std::vector<double>{1.0, 1.0}, 1.0), std::exp(-1.0), 1e-15);
    // Erlang(5, 2) at t = 1.3.
    const double t = 1.3;
    const double erlang = std::pow(2.0, 5) * std::pow(t, 4) * std::exp(-2.0 * t) / 24.0;
    EXPECT_NEAR(hypoexp_density(std::vector<double>(5, 2.0), t) / erlang, 1.0, 1e-13);
}

TEST(Hypoexp, ErlangAgainstMonteCarloHistogram)
{
    Rng rng(17);
    std::exponential_distribution<double> e(1.0);
    const double h = 0.05;
    int hits = 0;
    const int draws = 1000000;
    for (int i = 0; i < draws; ++i) {
        const double s = e(rng) + e(rng);
        hits += std::abs(s - 1.0) < h / 2;
    }
    const double p = hits / static_cast<double>(draws);
    const double se = std::sqrt(p * (1 - p) / draws) / h;
    EXPECT_NEAR(p / h, hypoexp_density(std::vector<double>{1.0, 1.0}, 1.0), 4.0 * se + 1e-3);
}

TEST(Hypoexp, MatchesNumericalConvolution)
{
    const std::vector<std::vector<double>> cases{
        {1.0, 3.0}, {1.0, 1.0, 1.0}, {0.5, 1.0, 1.0 + 1e-9}, {2.0, 0.7, 1.1}, {1.0, 1.0 + 1e-5, 1.0 - 1e-5}};
    for (const auto& r : cases)
        for (double t : {0.2, 1.0, 2.5, 6.0})
            EXPECT_NEAR(hypoexp_density(r, t), testing::convolution_hypoexp_density(r, t), 1e-9);
}

TEST(Hypoexp, ClusteredRatesStayAccurate)
{
    // Twelve rates within 1e-7 of each other behave like Erlang(12, 1).
    std::vector<double> r;
    for (int i = 0; i < 12; ++i)
        r.push_back(1.0 + 1e-8 * i);
    const double t = 9.0;
    double log_erlang = 12 * std::log(1.0) + 11 * std::log(t) - t - std::lgamma(12.0);
    EXPECT_NEAR(log_hypoexp_density(r, t), log_erlang, 1e-6);
}

TEST(Hypoexp, Errors)
{
    EXPECT_ERROR_KIND(hypoexp_density(std::vector<double>{}, 1.0), ErrorKind::EmptyRates);
    EXPECT_ERROR_KIND(hypoexp_density(std::vector<double>{1.0}, -1.0), ErrorKind::NegativeArgument);
    EXPECT_ERROR_KIND(hypoexp_density(std::vector<double>{0.0, 1.0}, 1.0), ErrorKind::InvalidParameter);
}

} // namespace
} // namespace treelocate
