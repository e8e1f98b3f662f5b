#include "treelocate/estimators.hpp"

#include "treelocate/error.hpp"
#include "treelocate/laplace.hpp"
#include "treelocate/observer_reduction.hpp"
#include "treelocate/rng.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <random>
#include <string>

namespace treelocate {

void GridSpec::validate() const
{
    auto fail = [](const std::string& what) { throw Error(ErrorKind::ConfigInvalid, "grid: " + what); };
    if (magnitudes < 1)
        fail("magnitudes must be >= 1");
    if (!(min_magnitude > 0.0) || !(max_magnitude >= min_magnitude) || !std::isfinite(max_magnitude))
        fail("need 0 < min_magnitude <= max_magnitude");
    if (refine_steps > 0 && golden_iterations < 1)
        fail("golden_iterations must be >= 1 when refining");
}

nlohmann::json GridSpec::to_json() const
{
    return {{"magnitudes", magnitudes},
            {"extra_directions", extra_directions},
            {"refine_steps", refine_steps},
            {"seed", seed},
            {"min_magnitude", min_magnitude},
            {"max_magnitude", max_magnitude},
            {"golden_iterations", golden_iterations}};
}

GridSpec GridSpec::from_json(const nlohmann::json& spec)
{
    if (!spec.is_object())
        throw Error(ErrorKind::ConfigInvalid, "grid must be a JSON object");
    GridSpec g;
    try {
        g.magnitudes = spec.value("magnitudes", g.magnitudes);
        g.extra_directions = spec.value("extra_directions", g.extra_directions);
        g.refine_steps = spec.value("refine_steps", g.refine_steps);
        g.seed = spec.value("seed", g.seed);
        g.min_magnitude = spec.value("min_magnitude", g.min_magnitude);
        g.max_magnitude = spec.value("max_magnitude", g.max_magnitude);
        g.golden_iterations = spec.value("golden_iterations", g.golden_iterations);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ConfigInvalid, std::string("grid: ") + e.what());
    }
    for (const auto& [key, value] : spec.items()) {
        (void)value;
        if (!g.to_json().contains(key))
            throw Error(ErrorKind::ConfigInvalid, "grid: unknown key `" + key + "`");
    }
    g.validate();
    return g;
}

std::vector<std::vector<double>> grid_points(const GridSpec& grid, std::size_t dim)
{
    grid.validate();
    if (dim == 0)
        throw Error(ErrorKind::DimensionMismatch, "grid over zero observers");

    std::vector<std::vector<double>> directions;
    for (std::size_t j = 0; j < dim; ++j) {
        std::vector<double> axis(dim, 0.0);
        axis[j] = 1.0;
        directions.push_back(std::move(axis));
    }
    if (dim > 1) {
        directions.emplace_back(dim, 1.0 / std::sqrt(static_cast<double>(dim)));
        Rng rng(derive_seed(grid.seed, dim));
        std::normal_distribution<double> normal;
        for (std::size_t k = 0; k < grid.extra_directions; ++k) {
            std::vector<double> d(dim);
            double norm = 0.0;
            do {
                norm = 0.0;
                for (double& x : d) {
                    x = std::abs(normal(rng));
                    norm += x * x;
                }
            } while (norm == 0.0);
            norm = std::sqrt(norm);
            for (double& x : d)
                x /= norm;
            directions.push_back(std::move(d));
        }
    }

    std::vector<double> magnitudes(grid.magnitudes);
    if (grid.magnitudes == 1) {
        magnitudes[0] = std::sqrt(grid.min_magnitude * grid.max_magnitude);
    } else {
        const double lo = std::log(grid.min_magnitude);
        const double step = (std::log(grid.max_magnitude) - lo) / static_cast<double>(grid.magnitudes - 1);
        for (std::size_t i = 0; i < grid.magnitudes; ++i)
            magnitudes[i] = std::exp(lo + step * static_cast<double>(i));
    }

    std::vector<std::vector<double>> points;
    points.reserve(directions.size() * magnitudes.size());
    for (const auto& d : directions)
        for (double m : magnitudes) {
            std::vector<double> p(dim);
            for (std::size_t j = 0; j < dim; ++j)
                p[j] = m * d[j];
            points.push_back(std::move(p));
        }
    return points;
}

SupResult sup_distance_detail(const TransformFn& f, const TransformFn& g, std::size_t dim, const GridSpec& grid,
                              double scale)
{
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw Error(ErrorKind::NonpositiveArgument, "grid scale must be > 0");
    SupResult best;
    best.value = -1.0;
    auto gap = [&](std::span<const double> t) {
        ++best.evaluations;
        return std::abs(f(t) - g(t));
    };

    for (auto p : grid_points(grid, dim)) {
        for (double& x : p)
            x /= scale;
        const double h = gap(p);
        if (h > best.value) {
            best.value = h;
            best.argmax = std::move(p);
        }
    }

    // Coordinate-wise golden-section search around the incumbent; only
    // improvements are kept, so the grid maximum is a lower bound.
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    std::vector<double> probe;
    for (std::size_t round = 0; round < grid.refine_steps; ++round) {
        for (std::size_t j = 0; j < dim; ++j) {
            const double span_max = *std::max_element(best.argmax.begin(), best.argmax.end());
            double a = 0.0;
            double b = 2.0 * best.argmax[j] + span_max;
            if (!(b > 0.0))
                continue;
            probe = best.argmax;
            auto eval_at = [&](double x) {
                probe[j] = x;
                const double h = gap(probe);
                if (h > best.value) {
                    best.value = h;
                    best.argmax = probe;
                }
                return h;
            };
            double x1 = b - inv_phi * (b - a);
            double x2 = a + inv_phi * (b - a);
            double h1 = eval_at(x1);
            double h2 = eval_at(x2);
            for (std::size_t it = 0; it < grid.golden_iterations; ++it) {
                if (h1 >= h2) {
                    b = x2;
                    x2 = x1;
                    h2 = h1;
                    x1 = b - inv_phi * (b - a);
                    h1 = eval_at(x1);
                } else {
                    a = x1;
                    x1 = x2;
                    h1 = h2;
                    x2 = a + inv_phi * (b - a);
                    h2 = eval_at(x2);
                }
            }
        }
    }
    best.value = std::max(best.value, 0.0);
    return best;
}

double sup_distance(const TransformFn& f, const TransformFn& g, std::size_t dim, const GridSpec& grid, double scale)
{
    return sup_distance_detail(f, g, dim, grid, scale).value;
}

nlohmann::json EstimateReport::to_json() const
{
    nlohmann::json distances = nlohmann::json::array();
    for (const auto& [node, d] : per_candidate)
        distances.push_back({{"node", node}, {"distance", d}});
    nlohmann::json j = {{"selected", selected},
                        {"primary", selected.empty() ? nlohmann::json(nullptr) : nlohmann::json(primary())},
                        {"tied", tied()},
                        {"per_candidate", distances},
                        {"candidates_considered", candidates_considered},
                        {"observers_used", observers_used},
                        {"grid_points_used", grid_points_used},
                        {"reduction_applied", reduction_applied},
                        {"scale", scale},
                        {"warnings", warnings}};
    j["star_center"] = star_center ? nlohmann::json(*star_center) : nlohmann::json(nullptr);
    return j;
}

namespace {

struct Setup {
    std::vector<NodeId> observers;
    std::vector<NodeId> candidates;
    std::vector<std::vector<double>> tau; // per sample, aligned with observers
    double scale = 1.0;
    bool reduced = false;
    std::optional<NodeId> center;
    std::vector<std::string> warnings;
};

Setup prepare(const Tree& tree, std::span<const NodeId> observers, std::span<const Observation> samples,
              bool use_reduction)
{
    if (samples.empty())
        throw Error(ErrorKind::NoSamples, "estimation needs at least one observation");
    const auto all_observers = normalize_observers(tree.node_count(), observers);
    for (const auto& s : samples)
        (void)s.times_for(all_observers);

    Setup setup;
    setup.reduced = use_reduction;
    if (use_reduction) {
        bool first = true;
        for (const auto& s : samples) {
            const Reduction r = reduce(tree, all_observers, s);
            if (first) {
                setup.candidates = r.candidates;
                first = false;
            } else {
                std::vector<NodeId> both;
                std::set_intersection(setup.candidates.begin(), setup.candidates.end(), r.candidates.begin(),
                                      r.candidates.end(), std::back_inserter(both));
                setup.candidates = std::move(both);
            }
            std::vector<NodeId> merged;
            std::set_union(setup.observers.begin(), setup.observers.end(), r.observers.begin(), r.observers.end(),
                           std::back_inserter(merged));
            setup.observers = std::move(merged);
            if (r.arrangement.center && !setup.center) {
                setup.center = r.arrangement.center;
                setup.warnings.push_back("feasible classes form a star around observer " +
                                         std::to_string(*r.arrangement.center) +
                                         "; unconditional transforms used over the union of classes");
            }
        }
    } else {
        setup.observers = all_observers;
        for (NodeId x = 0; x < tree.node_count(); ++x)
            if (!std::binary_search(all_observers.begin(), all_observers.end(), x))
                setup.candidates.push_back(x);
    }
    if (setup.candidates.empty())
        throw Error(ErrorKind::EmptyCandidates, "no candidate source is consistent with every observation");

    double total = 0.0;
    std::size_t count = 0;
    for (const auto& s : samples) {
        setup.tau.push_back(s.times_for(setup.observers));
        for (double x : setup.tau.back()) {
            total += x;
            ++count;
        }
    }
    setup.scale = total / static_cast<double>(count);
    if (!(setup.scale > 0.0) || !std::isfinite(setup.scale))
        throw Error(ErrorKind::DegenerateTime, "mean observed time must be positive and finite");
    return setup;
}

EstimateReport finish(Setup&& setup, std::map<NodeId, double> distances, std::size_t evaluations)
{
    EstimateReport report;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& [node, d] : distances)
        best = std::min(best, d);
    for (const auto& [node, d] : distances)
        if (d == best)
            report.selected.push_back(node);
    report.per_candidate = std::move(distances);
    report.candidates_considered = std::move(setup.candidates);
    report.observers_used = std::move(setup.observers);
    report.grid_points_used = evaluations;
    report.reduction_applied = setup.reduced;
    report.star_center = setup.center;
    report.scale = setup.scale;
    report.warnings = std::move(setup.warnings);
    return report;
}

double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

} // namespace

EstimateReport hat_estimate(const Tree& tree, std::span<const NodeId> observers, std::span<const DelayModel> delays,
                            std::span<const Observation> samples, const GridSpec& grid, bool use_reduction)
{
    Setup setup = prepare(tree, observers, samples, use_reduction);
    const auto& tau = setup.tau;
    const TransformFn empirical = [&tau](std::span<const double> t) {
        double total = 0.0;
        for (const auto& x : tau)
            total += std::exp(-dot(t, x));
        return total / static_cast<double>(tau.size());
    };

    std::map<NodeId, double> distances;
    std::size_t evaluations = 0;
    for (NodeId v : setup.candidates) {
        const CandidateTransform phi(tree, setup.observers, delays, v);
        const auto r = sup_distance_detail(empirical, std::cref(phi), setup.observers.size(), grid, setup.scale);
        distances.emplace(v, r.value);
        evaluations = r.evaluations;
    }
    return finish(std::move(setup), std::move(distances), evaluations);
}

EstimateReport hat_estimate(const Tree& tree, std::span<const NodeId> observers, std::span<const DelayModel> delays,
                            const Observation& obs, const GridSpec& grid, bool use_reduction)
{
    return hat_estimate(tree, observers, delays, std::span<const Observation>(&obs, 1), grid, use_reduction);
}

EstimateReport check_estimate(const Tree& tree, std::span<const NodeId> observers,
                              std::span<const DelayModel> delays, const Observation& obs, const GridSpec& grid,
                              bool use_reduction)
{
    for (const auto& d : delays)
        if (!d.is_exponential())
            throw Error(ErrorKind::UnsupportedDelayModel, "source-check estimation needs exponential delays, got " +
                                                              d.describe());
    Setup setup = prepare(tree, observers, std::span<const Observation>(&obs, 1), use_reduction);
    const auto& tau = setup.tau.front();

    std::map<NodeId, double> distances;
    std::size_t evaluations = 0;
    for (NodeId v : setup.candidates) {
        const ConditionalTransform ct(tree, setup.observers, delays, v);
        const TransformFn check = [&](std::span<const double> t) { return ct.check(t, tau); };
        const auto r = sup_distance_detail(check, std::cref(ct), setup.observers.size(), grid, setup.scale);
        distances.emplace(v, r.value);
        evaluations = r.evaluations;
    }
    return finish(std::move(setup), std::move(distances), evaluations);
}

std::size_t edge_distance_error(const Tree& tree, NodeId estimate, NodeId truth)
{
    if (!tree.contains(estimate))
        throw Error(ErrorKind::NodeOutOfRange, "node " + std::to_string(estimate));
    return edge_distance(tree, estimate, truth);
}

} // namespace treelocate
