#pragma once

#include "treelocate/delay_model.hpp"
#include "treelocate/estimators.hpp"
#include "treelocate/simulation.hpp"
#include "treelocate/stats.hpp"
#include "treelocate/tree.hpp"

#include "json.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace treelocate {

enum class ExperimentKind {
    Confusion,
    ScalingNodes,
    ScalingObservers,
    NormalizedDiameter,
    River,
    CheckVsHat,
    Triangle,
    SufficiencyDemo,
};

std::string to_string(ExperimentKind kind);
/// Accepts the snake_case names and the CLI subcommand spellings.
ExperimentKind experiment_kind_from_string(const std::string& name);

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Confusion;
    std::uint64_t seed = 0;
    std::size_t trials = 200;
    std::vector<DelayModel> delays;
    std::vector<std::size_t> sizes;
    std::vector<std::size_t> observer_counts;
    GridSpec grid;
    bool use_reduction = true;
    std::size_t threads = 1;

    // confusion
    std::size_t path_nodes = 11;
    // river
    std::string network_file = "data/river_synthetic.txt";
    std::size_t river_observers = 3;
    // triangle
    std::array<double, 3> rates{1.0, 1.0, 1.0};
    /// Regression guard: compare tau_o | T1 against Exp(l1) instead of the
    /// correct law. The validation must then fail.
    bool naive_triangle_model = false;
    // sufficiency
    std::size_t star_leaves = 3;

    /// Defaults for `kind` (delays, sizes, observer counts).
    static ExperimentConfig defaults(ExperimentKind kind, std::uint64_t seed);
    /// Keys absent from `spec` keep the defaults of the declared kind; a seed
    /// must come from the JSON or from `seed_override`. Throws ConfigInvalid.
    static ExperimentConfig from_json(const nlohmann::json& spec,
                                      std::optional<ExperimentKind> kind_override = std::nullopt,
                                      std::optional<std::uint64_t> seed_override = std::nullopt);
    void validate() const;
    nlohmann::json to_json() const;
};

/// One rectangular result table; cells are numbers or strings.
struct ResultTable {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<nlohmann::json>> rows;
};

struct ExperimentReport {
    std::string experiment;
    nlohmann::json config;
    std::vector<ResultTable> tables;
    nlohmann::json summary = nlohmann::json::object();
    /// Set by validation experiments (triangle, sufficiency).
    std::optional<bool> passed;

    nlohmann::json to_json() const;
};

struct ConfusionMatrix {
    std::string delay;
    std::vector<NodeId> sources;
    std::vector<NodeId> estimates; // column labels
    std::vector<std::vector<std::size_t>> counts;
    std::vector<double> mean_error; // per source

    double diagonal_mass() const;
    ResultTable to_table() const;
};

/// Runs fn(0..count-1) over `threads` workers. fn must only write to its own
/// per-index output slot.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn);

std::vector<ConfusionMatrix> run_confusion(const ExperimentConfig& config);

struct ScalingCell {
    std::string delay;
    std::size_t nodes = 0;
    std::size_t observers = 0;
    std::size_t trials = 0;
    double mean_error = 0.0;
    double std_error = 0.0;
    double mean_normalized = 0.0;
    double std_normalized = 0.0;
};

/// Random Prufer trees, observers uniform among leaves, source uniform among
/// non-observers. Cells span delays x sizes x observer counts.
std::vector<ScalingCell> run_scaling(const ExperimentConfig& config);

struct CheckVsHatCell {
    std::size_t nodes = 0;
    std::size_t observers = 0;
    std::size_t trials = 0;
    double hat_mean = 0.0;
    double hat_std = 0.0;
    double check_mean = 0.0;
    double check_std = 0.0;
};

std::vector<CheckVsHatCell> run_check_vs_hat(const ExperimentConfig& config);

/// Undirected tree with string labels and per-edge delay models.
struct LabeledNetwork {
    Tree tree;
    std::vector<std::string> labels;
    std::vector<DelayModel> delays;
    NodeId root = 0;

    NodeId id_of(const std::string& label) const;
};

/// Lines `u v mu sigma` (PosNormal per edge) or `u v` (delays supplied by the
/// caller); `#` starts a comment. The root is the first label read.
/// Throws FileNotFound or MalformedNetworkFile.
LabeledNetwork load_network(const std::filesystem::path& path);

struct RiverResult {
    std::vector<std::size_t> counts; // per node
    std::size_t trials = 0;
    /// Fraction of estimates among the five nodes nearest the root.
    double top5_mass = 0.0;
    std::vector<NodeId> nearest5;
};

RiverResult run_river(const ExperimentConfig& config, const LabeledNetwork& network);

struct TriangleValidation {
    TriangleClosedForm closed_form;
    std::array<double, 3> empirical_probability{};
    std::array<double, 3> probability_se{};
    std::array<double, 3> empirical_mean{};
    std::array<double, 3> mean_se{};
    KsResult naive_ks{};
    KsResult correct_ks{};
    std::size_t trials = 0;
    bool probabilities_ok = false;
    bool means_ok = false;
    bool ks_ok = false;
    bool passed = false;
};

TriangleValidation run_triangle(const ExperimentConfig& config);

struct SufficiencyDemo {
    std::size_t leaves = 0;
    /// Index 0: source next to observer n+1; index 1: source on the far side.
    std::array<std::size_t, 2> simulated{};
    std::array<std::size_t, 2> accepted{};
    std::array<double, 2> conditional_mean{};
    std::array<double, 2> standard_error{};
    double difference = 0.0;
    double z_score = 0.0;
    double unconditional_mean_left = 0.0;
    bool passed = false;
};

/// Star network: observer n+1 - l - 0 - r - {1..n}. Conditions on
/// observer 0 being infected first; `trials` accepted outbreaks per source.
SufficiencyDemo run_sufficiency_demo(const ExperimentConfig& config);

/// Dispatches on config.kind and packages the result tables.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// CSV: one file per table (`<stem>_<table>.csv` when there are several);
/// JSON: one pretty-printed document with sorted keys. Throws IoError.
std::vector<std::filesystem::path> emit_results(const ExperimentReport& report, const std::filesystem::path& path,
                                                const std::string& format);
/// Same bytes as emit_results, to a stream.
void write_results(const ExperimentReport& report, std::ostream& out, const std::string& format);

std::string format_csv(const ResultTable& table);

} // namespace treelocate
