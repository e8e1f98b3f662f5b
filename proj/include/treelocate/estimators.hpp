#pragma once

#include "treelocate/delay_model.hpp"
#include "treelocate/simulation.hpp"
#include "treelocate/tree.hpp"

#include "json.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace treelocate {

/// Discretization of a supremum over the nonnegative orthant.
///
/// Grid points are m * d / scale with m log-spaced in
/// [min_magnitude, max_magnitude] and d running over the unit axes, the
/// normalized all-ones vector and `extra_directions` seeded random
/// nonnegative unit vectors. The best grid point is then refined by
/// coordinate-wise golden-section search.
struct GridSpec {
    std::size_t magnitudes = 8;
    std::size_t extra_directions = 8;
    std::size_t refine_steps = 2;
    std::uint64_t seed = 0x5eed;
    double min_magnitude = 1e-2;
    double max_magnitude = 1e2;
    std::size_t golden_iterations = 20;

    void validate() const;
    nlohmann::json to_json() const;
    /// Missing keys keep their defaults; throws ConfigInvalid.
    static GridSpec from_json(const nlohmann::json& spec);
};

/// Raw grid points (before refinement) for dimension `dim` at scale 1.
std::vector<std::vector<double>> grid_points(const GridSpec& grid, std::size_t dim);

using TransformFn = std::function<double(std::span<const double>)>;

struct SupResult {
    double value = 0.0;
    std::vector<double> argmax;
    std::size_t evaluations = 0;
};

/// max |f(t) - g(t)| over the scaled grid plus refinement.
SupResult sup_distance_detail(const TransformFn& f, const TransformFn& g, std::size_t dim, const GridSpec& grid,
                              double scale);
double sup_distance(const TransformFn& f, const TransformFn& g, std::size_t dim, const GridSpec& grid,
                    double scale);

struct EstimateReport {
    /// Candidates attaining the minimum distance exactly, ascending.
    std::vector<NodeId> selected;
    std::map<NodeId, double> per_candidate;
    std::vector<NodeId> candidates_considered;
    std::vector<NodeId> observers_used;
    std::size_t grid_points_used = 0;
    bool reduction_applied = false;
    std::optional<NodeId> star_center;
    double scale = 1.0;
    std::vector<std::string> warnings;

    /// Smallest id in the tie set.
    NodeId primary() const { return selected.front(); }
    bool tied() const noexcept { return selected.size() > 1; }
    nlohmann::json to_json() const;
};

/// Source-hat estimate from a single observation.
EstimateReport hat_estimate(const Tree& tree, std::span<const NodeId> observers, std::span<const DelayModel> delays,
                            const Observation& obs, const GridSpec& grid = {}, bool use_reduction = true);

/// Source-hat estimate from several outbreaks sharing one source.
EstimateReport hat_estimate(const Tree& tree, std::span<const NodeId> observers, std::span<const DelayModel> delays,
                            std::span<const Observation> samples, const GridSpec& grid = {},
                            bool use_reduction = true);

/// Source-check estimate; exponential delays only (UnsupportedDelayModel).
EstimateReport check_estimate(const Tree& tree, std::span<const NodeId> observers,
                              std::span<const DelayModel> delays, const Observation& obs, const GridSpec& grid = {},
                              bool use_reduction = true);

std::size_t edge_distance_error(const Tree& tree, NodeId estimate, NodeId truth);

} // namespace treelocate
