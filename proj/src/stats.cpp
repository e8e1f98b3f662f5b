#include "treelocate/stats.hpp"

#include "treelocate/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace treelocate {

void RunningStats::add(double x) noexcept
{
    ++n_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(n_);
    m2_ += delta * (x - mean_);
}

void RunningStats::merge(const RunningStats& other) noexcept
{
    if (other.n_ == 0)
        return;
    if (n_ == 0) {
        *this = other;
        return;
    }
    const double n = static_cast<double>(n_ + other.n_);
    const double delta = other.mean_ - mean_;
    mean_ += delta * static_cast<double>(other.n_) / n;
    m2_ += other.m2_ + delta * delta * static_cast<double>(n_) * static_cast<double>(other.n_) / n;
    n_ += other.n_;
}

double RunningStats::variance() const noexcept
{
    return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1);
}

double RunningStats::stddev() const noexcept
{
    return std::sqrt(variance());
}

double RunningStats::standard_error() const noexcept
{
    return n_ == 0 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_));
}

RunningStats summarize(std::span<const double> xs)
{
    RunningStats s;
    for (double x : xs)
        s.add(x);
    return s;
}

double kolmogorov_survival(double x)
{
    if (x <= 0.0)
        return 1.0;
    if (x < 1.18) {
        // Theta-function form, fast for small x.
        const double pi = 3.14159265358979323846;
        const double w = -pi * pi / (8.0 * x * x);
        double sum = 0.0;
        for (int k = 1; k <= 7; k += 2)
            sum += std::exp(w * k * k);
        return std::clamp(1.0 - std::sqrt(2.0 * pi) / x * sum, 0.0, 1.0);
    }
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-18)
            break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf)
{
    if (sample.empty())
        throw Error(ErrorKind::NoSamples, "KS test needs at least one value");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    // Stephens' finite-sample correction of the asymptotic law.
    const double sqrt_n = std::sqrt(n);
    return {d, kolmogorov_survival((sqrt_n + 0.12 + 0.11 / sqrt_n) * d)};
}

std::vector<double> average_ranks(std::span<const double> x)
{
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
    std::vector<double> ranks(x.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]])
            ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k)
            ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size())
        throw Error(ErrorKind::DimensionMismatch, "Spearman needs paired samples");
    if (x.size() < 2)
        throw Error(ErrorKind::NoSamples, "Spearman needs at least two pairs");
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const RunningStats sx = summarize(rx);
    const RunningStats sy = summarize(ry);
    double cov = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i)
        cov += (rx[i] - sx.mean()) * (ry[i] - sy.mean());
    const double denom = std::sqrt(sx.variance() * sy.variance()) * static_cast<double>(rx.size() - 1);
    return denom == 0.0 ? 0.0 : cov / denom;
}

} // namespace treelocate
