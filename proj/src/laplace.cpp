#include "treelocate/laplace.hpp"

#include "treelocate/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

namespace treelocate {

namespace {

void require_argument(std::span<const double> t, std::size_t dim)
{
    if (t.size() != dim)
        throw Error(ErrorKind::DimensionMismatch,
                    "Laplace argument has " + std::to_string(t.size()) + " coordinates, expected " +
                        std::to_string(dim));
    for (double x : t)
        if (!(x >= 0.0))
            throw Error(ErrorKind::NegativeArgument, "Laplace argument coordinates must be >= 0");
}

double sorted_product(std::vector<double>& factors)
{
    std::sort(factors.begin(), factors.end());
    double p = 1.0;
    for (double f : factors)
        p *= f;
    return p;
}

void require_not_observer(std::span<const NodeId> sorted_observers, NodeId v)
{
    if (std::binary_search(sorted_observers.begin(), sorted_observers.end(), v))
        throw Error(ErrorKind::CandidateIsObserver, "candidate " + std::to_string(v) + " is an observer");
}

} // namespace

PathIncidenceMatrix::PathIncidenceMatrix(NodeId candidate, std::vector<NodeId> observers, std::size_t edge_count)
    : candidate_(candidate), observers_(std::move(observers)), edge_count_(edge_count),
      cells_(observers_.size() * edge_count, 0)
{
}

std::vector<EdgeId> PathIncidenceMatrix::row_edges(std::size_t row) const
{
    std::vector<EdgeId> out;
    for (EdgeId e = 0; e < edge_count_; ++e)
        if (at(row, e))
            out.push_back(e);
    return out;
}

std::vector<std::size_t> PathIncidenceMatrix::column_rows(EdgeId e) const
{
    std::vector<std::size_t> out;
    for (std::size_t r = 0; r < rows(); ++r)
        if (at(r, e))
            out.push_back(r);
    return out;
}

std::size_t PathIncidenceMatrix::row_sum(std::size_t row) const
{
    return row_edges(row).size();
}

std::vector<double> PathIncidenceMatrix::left_multiply(std::span<const double> t) const
{
    require_argument(t, rows());
    std::vector<double> out(edge_count_, 0.0);
    for (std::size_t r = 0; r < rows(); ++r)
        for (EdgeId e = 0; e < edge_count_; ++e)
            if (at(r, e))
                out[e] += t[r];
    return out;
}

PathIncidenceMatrix incidence_matrix(const Tree& tree, std::span<const NodeId> observers, NodeId v)
{
    auto obs = normalize_observers(tree.node_count(), observers);
    if (!tree.contains(v))
        throw Error(ErrorKind::NodeOutOfRange, "candidate " + std::to_string(v));
    require_not_observer(obs, v);
    const Rooting r = root_at(tree, v);
    PathIncidenceMatrix m(v, obs, tree.edge_count());
    for (std::size_t row = 0; row < obs.size(); ++row)
        for (NodeId x = obs[row]; x != v; x = r.parent[x])
            m.set(row, r.parent_edge[x]);
    return m;
}

CandidateTransform::CandidateTransform(const Tree& tree, std::span<const NodeId> observers,
                                       std::span<const DelayModel> delays, NodeId v)
    : candidate_(v), observers_(normalize_observers(tree.node_count(), observers))
{
    if (!tree.contains(v))
        throw Error(ErrorKind::NodeOutOfRange, "candidate " + std::to_string(v));
    if (delays.size() != tree.edge_count())
        throw Error(ErrorKind::DimensionMismatch,
                    std::to_string(delays.size()) + " delay models for " + std::to_string(tree.edge_count()) +
                        " edges");
    require_not_observer(observers_, v);

    const Rooting r = root_at(tree, v);
    std::vector<std::vector<std::uint32_t>> below(tree.node_count());
    for (std::uint32_t slot = 0; slot < observers_.size(); ++slot)
        below[observers_[slot]].push_back(slot);
    // Children before parents; each non-root node with observers below it
    // contributes the edge to its parent.
    for (auto it = r.order.rbegin(); it != r.order.rend(); ++it) {
        const NodeId x = *it;
        if (x == v || below[x].empty())
            continue;
        auto& up = below[r.parent[x]];
        up.insert(up.end(), below[x].begin(), below[x].end());
        std::sort(below[x].begin(), below[x].end());
        steps_.push_back(Step{r.parent_edge[x], std::move(below[x])});
        models_.push_back(delays[r.parent_edge[x]]);
    }
}

std::vector<double> CandidateTransform::step_sums(std::span<const double> t) const
{
    require_argument(t, observers_.size());
    // Sum in increasing order of value so the result depends only on the
    // multiset of coordinates below each edge.
    std::vector<std::uint32_t> by_value(observers_.size());
    std::iota(by_value.begin(), by_value.end(), 0u);
    std::stable_sort(by_value.begin(), by_value.end(), [&](auto a, auto b) { return t[a] < t[b]; });
    std::vector<std::uint32_t> rank(observers_.size());
    for (std::uint32_t i = 0; i < by_value.size(); ++i)
        rank[by_value[i]] = i;

    std::vector<double> sums(steps_.size(), 0.0);
    std::vector<std::uint32_t> buffer;
    for (std::size_t i = 0; i < steps_.size(); ++i) {
        const auto& slots = steps_[i].slots;
        if (slots.size() == 1) {
            sums[i] = t[slots[0]];
            continue;
        }
        buffer.clear();
        for (auto s : slots)
            buffer.push_back(rank[s]);
        std::sort(buffer.begin(), buffer.end());
        double total = 0.0;
        for (auto rk : buffer)
            total += t[by_value[rk]];
        sums[i] = total;
    }
    return sums;
}

double CandidateTransform::operator()(std::span<const double> t) const
{
    const auto sums = step_sums(t);
    std::vector<double> factors;
    factors.reserve(sums.size());
    for (std::size_t i = 0; i < sums.size(); ++i)
        if (sums[i] > 0.0)
            factors.push_back(models_[i].laplace(sums[i]));
    return sorted_product(factors);
}

std::vector<std::pair<EdgeId, double>> CandidateTransform::edge_coefficients(std::span<const double> t) const
{
    const auto sums = step_sums(t);
    std::vector<std::pair<EdgeId, double>> out;
    for (std::size_t i = 0; i < sums.size(); ++i)
        out.emplace_back(steps_[i].edge, sums[i]);
    std::sort(out.begin(), out.end());
    return out;
}

double candidate_laplace(const Tree& tree, std::span<const NodeId> observers, std::span<const DelayModel> delays,
                         NodeId v, std::span<const double> t)
{
    return CandidateTransform(tree, observers, delays, v)(t);
}

double empirical_laplace(std::span<const Observation> samples, std::span<const NodeId> observers,
                         std::span<const double> t)
{
    if (samples.empty())
        throw Error(ErrorKind::NoSamples, "empirical transform needs at least one observation");
    require_argument(t, observers.size());
    double total = 0.0;
    for (const auto& sample : samples) {
        const auto tau = sample.times_for(observers);
        double dot = 0.0;
        for (std::size_t i = 0; i < tau.size(); ++i)
            dot += t[i] * tau[i];
        total += std::exp(-dot);
    }
    return total / static_cast<double>(samples.size());
}

double conditional_sum_factor(std::span<const double> rates, std::span<const double> tilts, double tau)
{
    if (rates.empty())
        throw Error(ErrorKind::EmptyRates, "conditional factor over an empty path");
    if (rates.size() != tilts.size())
        throw Error(ErrorKind::DimensionMismatch, "one tilt per rate required");
    if (!(tau > 0.0) || !std::isfinite(tau))
        throw Error(ErrorKind::DegenerateTime, "conditioning time must be > 0, got " + std::to_string(tau));
    for (double c : tilts)
        if (!(c >= 0.0))
            throw Error(ErrorKind::NegativeArgument, "tilts must be >= 0");

    if (std::all_of(tilts.begin(), tilts.end(), [](double c) { return c == 0.0; }))
        return 1.0;
    if (rates.size() == 1)
        return std::exp(-tilts[0] * tau);

    std::vector<std::pair<double, double>> stages;
    for (std::size_t i = 0; i < rates.size(); ++i)
        stages.emplace_back(rates[i], tilts[i]);
    std::sort(stages.begin(), stages.end());

    std::vector<double> base(stages.size());
    std::vector<double> tilted(stages.size());
    double log_weight = 0.0;
    for (std::size_t i = 0; i < stages.size(); ++i) {
        base[i] = stages[i].first;
        tilted[i] = stages[i].first + stages[i].second;
        log_weight += std::log(base[i] / tilted[i]);
    }
    const double log_ratio =
        log_hypoexp_density(tilted, tau) + log_weight - log_hypoexp_density(base, tau);
    return std::min(1.0, std::exp(log_ratio));
}

ConditionalTransform::ConditionalTransform(const Tree& tree, std::span<const NodeId> observers,
                                           std::span<const DelayModel> delays, NodeId v)
    : CandidateTransform(tree, observers, delays, v)
{
    rates_.reserve(steps_.size());
    for (std::size_t i = 0; i < steps_.size(); ++i) {
        if (!models_[i].is_exponential())
            throw Error(ErrorKind::UnsupportedDelayModel,
                        "conditional transforms need exponential delays; edge " + std::to_string(steps_[i].edge) +
                            " is " + models_[i].describe());
        rates_.push_back(models_[i].exponential_rate());
    }
    path_steps_.resize(observers_.size());
    for (std::uint32_t i = 0; i < steps_.size(); ++i)
        for (auto slot : steps_[i].slots)
            path_steps_[slot].push_back(i);
}

namespace {

double conditional_from_sums(std::span<const double> sums, std::span<const double> rates,
                             std::span<const std::uint32_t> path, double tau_o)
{
    std::vector<char> on_path(sums.size(), 0);
    std::vector<double> path_rates;
    std::vector<double> path_tilts;
    for (auto i : path) {
        on_path[i] = 1;
        path_rates.push_back(rates[i]);
        path_tilts.push_back(sums[i]);
    }
    std::vector<double> factors;
    for (std::size_t i = 0; i < sums.size(); ++i)
        if (!on_path[i] && sums[i] > 0.0)
            factors.push_back(rates[i] / (rates[i] + sums[i]));
    return sorted_product(factors) * conditional_sum_factor(path_rates, path_tilts, tau_o);
}

} // namespace

double ConditionalTransform::conditional(std::span<const double> t, std::size_t slot, double tau_o) const
{
    if (slot >= observers_.size())
        throw Error(ErrorKind::DimensionMismatch, "observer slot " + std::to_string(slot));
    return conditional_from_sums(step_sums(t), rates_, path_steps_[slot], tau_o);
}

std::vector<double> ConditionalTransform::conditionals(std::span<const double> t, std::span<const double> tau) const
{
    if (tau.size() != observers_.size())
        throw Error(ErrorKind::DimensionMismatch, "one observed time per observer required");
    const auto sums = step_sums(t);
    std::vector<double> out(observers_.size());
    for (std::size_t slot = 0; slot < out.size(); ++slot)
        out[slot] = conditional_from_sums(sums, rates_, path_steps_[slot], tau[slot]);
    return out;
}

double ConditionalTransform::check(std::span<const double> t, std::span<const double> tau) const
{
    const auto cond = conditionals(t, tau);
    double dot = 0.0;
    for (std::size_t i = 0; i < tau.size(); ++i)
        dot += t[i] * tau[i];
    return hajek_combine(std::exp(-dot), cond, observers_.size());
}

double conditional_laplace_exponential(const Tree& tree, std::span<const NodeId> observers,
                                       std::span<const DelayModel> delays, NodeId v, NodeId o, double tau_o,
                                       std::span<const double> t)
{
    const ConditionalTransform ct(tree, observers, delays, v);
    const auto& obs = ct.observers();
    const auto it = std::lower_bound(obs.begin(), obs.end(), o);
    if (it == obs.end() || *it != o)
        throw Error(ErrorKind::InvalidParameter, "node " + std::to_string(o) + " is not an observer");
    return ct.conditional(t, static_cast<std::size_t>(it - obs.begin()), tau_o);
}

double check_statistic(const Tree& tree, std::span<const NodeId> observers, std::span<const DelayModel> delays,
                       NodeId v, const Observation& obs, std::span<const double> t)
{
    const ConditionalTransform ct(tree, observers, delays, v);
    const auto tau = obs.times_for(ct.observers());
    return ct.check(t, tau);
}

double hajek_combine(double raw, std::span<const double> conditionals, std::size_t d)
{
    if (d == 0 || conditionals.size() != d)
        throw Error(ErrorKind::DimensionMismatch,
                    std::to_string(conditionals.size()) + " conditionals for dimension " + std::to_string(d));
    double sum = 0.0;
    for (double c : conditionals)
        sum += c;
    const double dd = static_cast<double>(d);
    return ((dd - 1.0) * raw + sum) / (2.0 * dd - 1.0);
}

} // namespace treelocate
