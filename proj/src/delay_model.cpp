#include "treelocate/delay_model.hpp"

#include "treelocate/error.hpp"
#include "treelocate/special_functions.hpp"

#include <fmt/format.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace treelocate {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& what)
{
    if (!ok)
        throw Error(ErrorKind::InvalidParameter, what);
}

double pos_normal_laplace(const PosNormal& p, double t)
{
    const double ratio = p.mean / p.stddev;
    const double z = p.stddev * t - ratio;
    const double norm = normal_cdf(ratio);
    if (z < 20.0)
        return normal_cdf(-z) * std::exp(-p.mean * t + 0.5 * p.stddev * p.stddev * t * t) / norm;
    // Phi(-z) e^{z^2/2} e^{-ratio^2/2}; the exponent identity avoids overflow.
    return scaled_normal_tail(z) * std::exp(-0.5 * ratio * ratio) / norm;
}

double number_field(const nlohmann::json& spec, const char* key)
{
    if (!spec.contains(key) || !spec.at(key).is_number())
        throw Error(ErrorKind::ConfigInvalid, fmt::format("delay spec needs numeric \"{}\"", key));
    return spec.at(key).get<double>();
}

DelayModel model_or_config_error(auto&& make)
{
    try {
        return make();
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::InvalidParameter)
            throw Error(ErrorKind::ConfigInvalid, e.what());
        throw;
    }
}

} // namespace

DelayModel DelayModel::exponential(double rate)
{
    require(rate > 0.0 && std::isfinite(rate), "Exponential rate must be > 0");
    return DelayModel(Exponential{rate});
}

DelayModel DelayModel::pos_normal(double mean, double stddev)
{
    require(mean >= 0.0 && std::isfinite(mean), "PosNormal mean must be >= 0");
    require(stddev > 0.0 && std::isfinite(stddev), "PosNormal stddev must be > 0");
    return DelayModel(PosNormal{mean, stddev});
}

DelayModel DelayModel::uniform(double lower, double upper)
{
    require(lower >= 0.0 && std::isfinite(upper) && upper > lower, "Uniform needs 0 <= lower < upper");
    return DelayModel(Uniform{lower, upper});
}

DelayModel DelayModel::abs_cauchy(double scale)
{
    require(scale > 0.0 && std::isfinite(scale), "AbsCauchy scale must be > 0");
    return DelayModel(AbsCauchy{scale});
}

double DelayModel::exponential_rate() const
{
    if (const auto* e = std::get_if<Exponential>(&params_))
        return e->rate;
    throw Error(ErrorKind::UnsupportedDelayModel, describe() + " is not exponential");
}

double DelayModel::laplace(double t) const
{
    if (t < 0.0 || std::isnan(t))
        throw Error(ErrorKind::NegativeArgument, "Laplace transform needs t >= 0");
    if (t == 0.0)
        return 1.0;
    return std::visit(
        overloaded{
            [t](const Exponential& p) { return p.rate / (p.rate + t); },
            [t](const PosNormal& p) { return pos_normal_laplace(p, t); },
            [t](const Uniform& p) {
                const double width = p.upper - p.lower;
                return std::exp(-p.lower * t) * (-std::expm1(-width * t)) / (width * t);
            },
            [t](const AbsCauchy& p) { return 2.0 / std::numbers::pi * cisi_auxiliary_f(t * p.scale); },
        },
        params_);
}

double DelayModel::density(double x) const
{
    if (x < 0.0 || std::isnan(x))
        throw Error(ErrorKind::NegativeArgument, "density needs x >= 0");
    return std::visit(
        overloaded{
            [x](const Exponential& p) { return p.rate * std::exp(-p.rate * x); },
            [x](const PosNormal& p) {
                const double u = (x - p.mean) / p.stddev;
                return std::exp(-0.5 * u * u) / (p.stddev * std::sqrt(2.0 * std::numbers::pi)) /
                       normal_cdf(p.mean / p.stddev);
            },
            [x](const Uniform& p) { return (x >= p.lower && x <= p.upper) ? 1.0 / (p.upper - p.lower) : 0.0; },
            [x](const AbsCauchy& p) { return 2.0 / std::numbers::pi * p.scale / (p.scale * p.scale + x * x); },
        },
        params_);
}

double DelayModel::sample(Rng& rng) const
{
    return std::visit(
        overloaded{
            [&rng](const Exponential& p) { return std::exponential_distribution<double>(p.rate)(rng); },
            [&rng](const PosNormal& p) {
                std::normal_distribution<double> normal(p.mean, p.stddev);
                double x = normal(rng);
                while (x < 0.0)
                    x = normal(rng);
                return x;
            },
            [&rng](const Uniform& p) { return std::uniform_real_distribution<double>(p.lower, p.upper)(rng); },
            [&rng](const AbsCauchy& p) { return std::abs(std::cauchy_distribution<double>(0.0, p.scale)(rng)); },
        },
        params_);
}

DelayModel DelayModel::rescaled(double c) const
{
    require(c > 0.0 && std::isfinite(c), "rescale factor must be > 0");
    return std::visit(
        overloaded{
            [c](const Exponential& p) { return exponential(p.rate / c); },
            [c](const PosNormal& p) { return pos_normal(p.mean * c, p.stddev * c); },
            [c](const Uniform& p) { return uniform(p.lower * c, p.upper * c); },
            [c](const AbsCauchy& p) { return abs_cauchy(p.scale * c); },
        },
        params_);
}

std::string DelayModel::describe() const
{
    return std::visit(
        overloaded{
            [](const Exponential& p) { return fmt::format("Exponential(rate={})", p.rate); },
            [](const PosNormal& p) { return fmt::format("PosNormal(mean={}, stddev={})", p.mean, p.stddev); },
            [](const Uniform& p) { return fmt::format("Uniform({}, {})", p.lower, p.upper); },
            [](const AbsCauchy& p) { return fmt::format("AbsCauchy(scale={})", p.scale); },
        },
        params_);
}

nlohmann::json DelayModel::to_json() const
{
    return std::visit(
        overloaded{
            [](const Exponential& p) { return nlohmann::json{{"kind", "exponential"}, {"rate", p.rate}}; },
            [](const PosNormal& p) {
                return nlohmann::json{{"kind", "posnormal"}, {"mean", p.mean}, {"stddev", p.stddev}};
            },
            [](const Uniform& p) {
                return nlohmann::json{{"kind", "uniform"}, {"lower", p.lower}, {"upper", p.upper}};
            },
            [](const AbsCauchy& p) { return nlohmann::json{{"kind", "abscauchy"}, {"scale", p.scale}}; },
        },
        params_);
}

DelayModel DelayModel::from_json(const nlohmann::json& spec)
{
    if (!spec.is_object() || !spec.contains("kind") || !spec.at("kind").is_string())
        throw Error(ErrorKind::ConfigInvalid, "delay spec must be an object with a \"kind\" string");
    const std::string kind = spec.at("kind").get<std::string>();
    return model_or_config_error([&] {
        if (kind == "exponential")
            return exponential(number_field(spec, "rate"));
        if (kind == "posnormal") {
            const double mean = number_field(spec, "mean");
            if (spec.contains("variance") && !spec.contains("stddev"))
                return pos_normal(mean, std::sqrt(number_field(spec, "variance")));
            return pos_normal(mean, number_field(spec, "stddev"));
        }
        if (kind == "uniform")
            return uniform(number_field(spec, "lower"), number_field(spec, "upper"));
        if (kind == "abscauchy")
            return abs_cauchy(number_field(spec, "scale"));
        throw Error(ErrorKind::ConfigInvalid, "unknown delay kind \"" + kind + "\"");
    });
}

bool operator==(const DelayModel& a, const DelayModel& b)
{
    return std::visit(
        [](const auto& x, const auto& y) {
            using X = std::decay_t<decltype(x)>;
            using Y = std::decay_t<decltype(y)>;
            if constexpr (!std::is_same_v<X, Y>) {
                return false;
            } else if constexpr (std::is_same_v<X, Exponential>) {
                return x.rate == y.rate;
            } else if constexpr (std::is_same_v<X, PosNormal>) {
                return x.mean == y.mean && x.stddev == y.stddev;
            } else if constexpr (std::is_same_v<X, Uniform>) {
                return x.lower == y.lower && x.upper == y.upper;
            } else {
                return x.scale == y.scale;
            }
        },
        a.params_, b.params_);
}

std::vector<DelayModel> delays_from_json(const nlohmann::json& spec, std::size_t edge_count)
{
    if (spec.is_object() && spec.contains("kind"))
        return std::vector<DelayModel>(edge_count, DelayModel::from_json(spec));
    if (!spec.is_object() || !spec.contains("default"))
        throw Error(ErrorKind::ConfigInvalid, "delays must be a model or {\"default\": model, \"overrides\": [...]}");
    std::vector<DelayModel> out(edge_count, DelayModel::from_json(spec.at("default")));
    if (spec.contains("overrides")) {
        for (const auto& item : spec.at("overrides")) {
            if (!item.contains("edge") || !item.at("edge").is_number_integer() ||
                item.at("edge").get<std::int64_t>() < 0)
                throw Error(ErrorKind::ConfigInvalid, "override needs a nonnegative integer \"edge\"");
            const auto edge = item.at("edge").get<std::size_t>();
            if (edge >= edge_count)
                throw Error(ErrorKind::ConfigInvalid, fmt::format("override edge {} out of range", edge));
            out[edge] = DelayModel::from_json(item);
        }
    }
    return out;
}

double log_hypoexp_density(std::span<const double> rates, double t)
{
    if (rates.empty())
        throw Error(ErrorKind::EmptyRates, "hypoexponential needs at least one rate");
    for (double r : rates)
        require(r > 0.0 && std::isfinite(r), "hypoexponential rates must be > 0");
    if (t < 0.0 || std::isnan(t))
        throw Error(ErrorKind::NegativeArgument, "hypoexponential density needs t >= 0");
    const std::size_t k = rates.size();
    if (k == 1)
        return std::log(rates[0]) - rates[0] * t;
    if (t == 0.0)
        return -std::numeric_limits<double>::infinity();

    double log_rates = 0.0;
    std::vector<double> scaled(k);
    for (std::size_t i = 0; i < k; ++i) {
        log_rates += std::log(rates[i]);
        scaled[i] = rates[i] * t;
    }
    return log_rates + static_cast<double>(k - 1) * std::log(t) - std::lgamma(static_cast<double>(k)) +
           log_simplex_laplace(scaled);
}

double hypoexp_density(std::span<const double> rates, double t)
{
    return std::exp(log_hypoexp_density(rates, t));
}

} // namespace treelocate
