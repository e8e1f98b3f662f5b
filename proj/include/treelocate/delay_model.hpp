#pragma once

#include "treelocate/rng.hpp"

#include "json.hpp"

#include <span>
#include <string>
#include <variant>
#include <vector>

namespace treelocate {

struct Exponential {
    double rate;
};

/// Normal(mean, stddev^2) conditioned on being nonnegative.
struct PosNormal {
    double mean;
    double stddev;
};

struct Uniform {
    double lower;
    double upper;
};

/// |Cauchy(0, scale)|.
struct AbsCauchy {
    double scale;
};

/// Distribution of a single edge delay. Parameters are in time units and are
/// validated on construction; the object is immutable afterwards.
class DelayModel {
public:
    using Variant = std::variant<Exponential, PosNormal, Uniform, AbsCauchy>;

    static DelayModel exponential(double rate);
    static DelayModel pos_normal(double mean, double stddev);
    static DelayModel uniform(double lower, double upper);
    static DelayModel abs_cauchy(double scale);

    const Variant& params() const noexcept { return params_; }
    bool is_exponential() const noexcept { return std::holds_alternative<Exponential>(params_); }
    /// Rate of an exponential model; throws UnsupportedDelayModel otherwise.
    double exponential_rate() const;

    /// E[exp(-t X)], t >= 0.
    double laplace(double t) const;
    /// Probability density at x >= 0.
    double density(double x) const;
    double sample(Rng& rng) const;

    /// Same family with every time-scale parameter multiplied by c > 0, so that
    /// the delay X becomes cX.
    DelayModel rescaled(double c) const;

    std::string describe() const;
    nlohmann::json to_json() const;
    /// {"kind": "exponential", "rate": ...} | {"kind": "posnormal", "mean", "stddev"}
    /// | {"kind": "uniform", "lower", "upper"} | {"kind": "abscauchy", "scale"}.
    static DelayModel from_json(const nlohmann::json& spec);

    friend bool operator==(const DelayModel& a, const DelayModel& b);

private:
    explicit DelayModel(Variant params) : params_(params) {}

    Variant params_;
};

/// Per-edge delay assignment from a config: a default model plus optional
/// overrides `[{"edge": i, ...model...}, ...]`.
std::vector<DelayModel> delays_from_json(const nlohmann::json& spec, std::size_t edge_count);

/// Density of the sum of independent exponentials with the given rates.
double hypoexp_density(std::span<const double> rates, double t);
/// log of hypoexp_density; -inf at t = 0 for two or more stages.
double log_hypoexp_density(std::span<const double> rates, double t);

} // namespace treelocate
