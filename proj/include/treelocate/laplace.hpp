#pragma once

#include "treelocate/delay_model.hpp"
#include "treelocate/simulation.hpp"
#include "treelocate/tree.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace treelocate {

/// 0/1 matrix with one row per observer (sorted ids) and one column per edge;
/// entry (o, e) is 1 iff e lies on the path from the candidate to o.
class PathIncidenceMatrix {
public:
    PathIncidenceMatrix(NodeId candidate, std::vector<NodeId> observers, std::size_t edge_count);

    NodeId candidate() const noexcept { return candidate_; }
    const std::vector<NodeId>& observers() const noexcept { return observers_; }
    std::size_t rows() const noexcept { return observers_.size(); }
    std::size_t cols() const noexcept { return edge_count_; }

    bool at(std::size_t row, EdgeId e) const { return cells_.at(row * edge_count_ + e) != 0; }
    void set(std::size_t row, EdgeId e) { cells_.at(row * edge_count_ + e) = 1; }

    /// Edges of [v, o] for the observer in `row`, ascending.
    std::vector<EdgeId> row_edges(std::size_t row) const;
    /// Observers descending from e, as row indices.
    std::vector<std::size_t> column_rows(EdgeId e) const;
    std::size_t row_sum(std::size_t row) const;
    /// (tA)(e) for every edge.
    std::vector<double> left_multiply(std::span<const double> t) const;

private:
    NodeId candidate_;
    std::vector<NodeId> observers_;
    std::size_t edge_count_;
    std::vector<std::uint8_t> cells_;
};

/// Throws CandidateIsObserver when v is an observer.
PathIncidenceMatrix incidence_matrix(const Tree& tree, std::span<const NodeId> observers, NodeId v);

/// Laplace transform of the observer time vector under source v, prepared for
/// repeated evaluation. Arguments are indexed like `observers()` (sorted ids).
///
/// Products and sums are taken in a canonical order (by value), so candidates
/// related by a symmetry of the tree produce bit-identical values.
class CandidateTransform {
public:
    CandidateTransform(const Tree& tree, std::span<const NodeId> observers, std::span<const DelayModel> delays,
                       NodeId v);

    NodeId candidate() const noexcept { return candidate_; }
    const std::vector<NodeId>& observers() const noexcept { return observers_; }

    double operator()(std::span<const double> t) const;

    /// (tA_v)(e) for the edges of the Steiner tree spanned by v and the
    /// observers; other edges have coefficient 0.
    std::vector<std::pair<EdgeId, double>> edge_coefficients(std::span<const double> t) const;

protected:
    struct Step {
        EdgeId edge;
        /// Observers below this edge, as slots into t.
        std::vector<std::uint32_t> slots;
    };

    std::vector<double> step_sums(std::span<const double> t) const;

    NodeId candidate_;
    std::vector<NodeId> observers_;
    std::vector<DelayModel> models_; // per step
    std::vector<Step> steps_;
};

/// prod_e phi_e((tA_v)(e)); t indexed by sorted observer ids.
double candidate_laplace(const Tree& tree, std::span<const NodeId> observers, std::span<const DelayModel> delays,
                         NodeId v, std::span<const double> t);

/// (1/k) sum_i exp(-<t, tau_i>) over samples, t indexed by `observers`.
double empirical_laplace(std::span<const Observation> samples, std::span<const NodeId> observers,
                         std::span<const double> t);

/// E[exp(-sum c_i X_i) | sum X_i = tau] for independent X_i ~ Exp(rates_i),
/// through the ratio of tilted to untilted hypoexponential densities.
/// Throws DegenerateTime for tau <= 0.
double conditional_sum_factor(std::span<const double> rates, std::span<const double> tilts, double tau);

/// Conditional transforms phi_v(t | tau_o) for every observer o, exponential
/// delays only. Throws UnsupportedDelayModel at construction otherwise.
class ConditionalTransform : public CandidateTransform {
public:
    ConditionalTransform(const Tree& tree, std::span<const NodeId> observers, std::span<const DelayModel> delays,
                         NodeId v);

    /// phi_v(t | tau_o) for the observer in `slot`.
    double conditional(std::span<const double> t, std::size_t slot, double tau_o) const;
    /// All |O| conditionals; `tau` indexed like observers().
    std::vector<double> conditionals(std::span<const double> t, std::span<const double> tau) const;
    /// Variance-reduced statistic combining exp(-<t,tau>) with the conditionals.
    double check(std::span<const double> t, std::span<const double> tau) const;

private:
    std::vector<double> rates_; // per step
    /// Steps on [v, o] for each observer slot.
    std::vector<std::vector<std::uint32_t>> path_steps_;
};

double conditional_laplace_exponential(const Tree& tree, std::span<const NodeId> observers,
                                       std::span<const DelayModel> delays, NodeId v, NodeId o, double tau_o,
                                       std::span<const double> t);

double check_statistic(const Tree& tree, std::span<const NodeId> observers, std::span<const DelayModel> delays,
                       NodeId v, const Observation& obs, std::span<const double> t);

/// ((d-1) raw + sum conditionals) / (2d-1) with d = conditionals.size().
double hajek_combine(double raw, std::span<const double> conditionals, std::size_t d);

} // namespace treelocate
