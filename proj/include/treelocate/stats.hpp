#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace treelocate {

/// Welford accumulator.
class RunningStats {
public:
    void add(double x) noexcept;
    void merge(const RunningStats& other) noexcept;

    std::size_t count() const noexcept { return n_; }
    double mean() const noexcept { return mean_; }
    /// Unbiased sample variance; 0 for fewer than two values.
    double variance() const noexcept;
    double stddev() const noexcept;
    /// Standard error of the mean.
    double standard_error() const noexcept;

private:
    std::size_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

RunningStats summarize(std::span<const double> xs);

struct KsResult {
    double statistic;
    double p_value;
};

/// One-sample Kolmogorov-Smirnov test against a continuous c.d.f.
KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf);

/// Asymptotic Kolmogorov survival function P(K > x).
double kolmogorov_survival(double x);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

/// Average ranks (1-based).
std::vector<double> average_ranks(std::span<const double> x);

} // namespace treelocate
