// treelocate: source-localization experiments and one-shot estimation.

#include "treelocate/error.hpp"
#include "treelocate/estimators.hpp"
#include "treelocate/experiments.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fmt/format.h>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>

namespace {

using namespace treelocate;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitValidation = 4;

struct CommonOptions {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::string out;
    std::string format = "csv";
    bool paper_scale = false;
    bool no_reduction = false;
    std::optional<std::size_t> threads;
};

void add_common(CLI::App* cmd, CommonOptions& o)
{
    cmd->add_option("--config", o.config_path, "JSON experiment config")->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "master seed");
    cmd->add_option("--trials", o.trials, "trials per cell")->check(CLI::PositiveNumber);
    cmd->add_option("--out", o.out, "output path (stdout when omitted)");
    cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_flag("--paper-scale", o.paper_scale, "1000 trials per cell");
    cmd->add_flag("--no-reduction", o.no_reduction, "consider every non-observer as a candidate");
    cmd->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
}

nlohmann::json read_json(const std::string& path, ErrorKind kind)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::FileNotFound, "cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(kind, path + ": " + e.what());
    }
}

int exit_code_for(ErrorKind kind)
{
    static const std::set<ErrorKind> data_errors = {
        ErrorKind::FileNotFound,          ErrorKind::MalformedNetworkFile, ErrorKind::IoError,
        ErrorKind::IncompleteObservation, ErrorKind::TiedMinimum,          ErrorKind::EmptyObservers,
        ErrorKind::NodeOutOfRange,        ErrorKind::CandidateIsObserver,  ErrorKind::ObserversCoverAllNodes,
        ErrorKind::EmptyCandidates,       ErrorKind::DegenerateTime,       ErrorKind::Disconnected,
        ErrorKind::CycleDetected,         ErrorKind::SelfLoop,             ErrorKind::DuplicateEdge,
    };
    return data_errors.count(kind) ? kExitData : kExitConfig;
}

int run_experiment_command(ExperimentKind kind, const CommonOptions& o, const std::optional<std::string>& network)
{
    nlohmann::json spec = nlohmann::json::object();
    if (!o.config_path.empty())
        spec = read_json(o.config_path, ErrorKind::ConfigInvalid);
    if (!spec.contains("seed") && !o.seed)
        throw Error(ErrorKind::ConfigInvalid, "a seed is required (--seed or \"seed\" in the config)");
    ExperimentConfig config = ExperimentConfig::from_json(spec, kind, o.seed ? o.seed : std::nullopt);
    if (o.seed)
        config.seed = *o.seed;
    if (o.trials)
        config.trials = *o.trials;
    else if (o.paper_scale && kind != ExperimentKind::Triangle && kind != ExperimentKind::SufficiencyDemo)
        config.trials = 1000;
    if (o.no_reduction)
        config.use_reduction = false;
    if (o.threads)
        config.threads = *o.threads;
    if (network)
        config.network_file = *network;
    config.validate();

    const ExperimentReport report = run_experiment(config);
    if (o.out.empty()) {
        write_results(report, std::cout, o.format);
    } else {
        for (const auto& p : emit_results(report, o.out, o.format))
            std::cerr << "wrote " << p.string() << '\n';
    }
    if (report.passed && !*report.passed) {
        std::cerr << "validation failed: " << report.summary.dump() << '\n';
        return kExitValidation;
    }
    return kExitOk;
}

struct EstimateOptions {
    std::string network;
    std::string observations;
    std::string delays;
    std::string grid;
    std::string method = "hat";
    bool no_reduction = false;
};

int run_estimate_command(const EstimateOptions& o)
{
    LabeledNetwork net = load_network(o.network);
    if (!o.delays.empty())
        net.delays = delays_from_json(read_json(o.delays, ErrorKind::ConfigInvalid), net.tree.edge_count());
    if (net.delays.size() != net.tree.edge_count())
        throw Error(ErrorKind::ConfigInvalid, "no delay parameters in the network file and no --delays given");
    const GridSpec grid = o.grid.empty() ? GridSpec{} : GridSpec::from_json(read_json(o.grid, ErrorKind::ConfigInvalid));

    const auto times = read_json(o.observations, ErrorKind::MalformedNetworkFile);
    if (!times.is_object())
        throw Error(ErrorKind::MalformedNetworkFile, "observation file must map labels to times");
    Observation obs;
    std::vector<NodeId> observers;
    for (const auto& [label, value] : times.items()) {
        if (!value.is_number())
            throw Error(ErrorKind::MalformedNetworkFile, "time for `" + label + "` is not a number");
        const NodeId id = net.id_of(label);
        obs.times[id] = value.get<double>();
        observers.push_back(id);
    }

    const EstimateReport report =
        o.method == "check" ? check_estimate(net.tree, observers, net.delays, obs, grid, !o.no_reduction)
                            : hat_estimate(net.tree, observers, net.delays, obs, grid, !o.no_reduction);
    nlohmann::json j = report.to_json();
    std::vector<std::string> labels;
    for (NodeId x : report.selected)
        labels.push_back(net.labels[x]);
    j["selected_labels"] = labels;
    j["primary_label"] = net.labels[report.primary()];
    j["method"] = o.method;
    std::cout << j.dump(2) << '\n';
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Source localization on trees from observer infection times"};
    app.require_subcommand(1);

    struct Sub {
        const char* name;
        const char* help;
        ExperimentKind kind;
    };
    const Sub subs[] = {
        {"confusion", "confusion matrices on a path with one observer", ExperimentKind::Confusion},
        {"scaling", "error vs tree size or observer count on random trees", ExperimentKind::ScalingNodes},
        {"normalized", "diameter-normalized error vs tree size", ExperimentKind::NormalizedDiameter},
        {"river", "selection frequencies on a river network", ExperimentKind::River},
        {"check-vs-hat", "paired comparison of the two estimators", ExperimentKind::CheckVsHat},
        {"triangle", "spanning-tree census on the triangle network", ExperimentKind::Triangle},
        {"sufficiency", "conditional means on the star network", ExperimentKind::SufficiencyDemo},
    };

    CommonOptions common;
    std::string vary = "nodes";
    std::string network;
    std::vector<CLI::App*> commands;
    for (const auto& s : subs) {
        CLI::App* cmd = app.add_subcommand(s.name, s.help);
        add_common(cmd, common);
        if (s.kind == ExperimentKind::ScalingNodes)
            cmd->add_option("--vary", vary, "nodes or observers")->check(CLI::IsMember({"nodes", "observers"}));
        if (s.kind == ExperimentKind::River)
            cmd->add_option("--network", network, "labeled edge list `u v mu sigma`");
        commands.push_back(cmd);
    }

    EstimateOptions est;
    CLI::App* estimate = app.add_subcommand("estimate", "estimate the source of one observed outbreak");
    estimate->add_option("--network", est.network, "labeled edge list")->required();
    estimate->add_option("--observations", est.observations, "JSON map label -> time")->required();
    estimate->add_option("--delays", est.delays, "JSON delay spec (overrides file parameters)");
    estimate->add_option("--grid", est.grid, "JSON grid spec");
    estimate->add_option("--method", est.method, "hat or check")->check(CLI::IsMember({"hat", "check"}));
    estimate->add_flag("--no-reduction", est.no_reduction, "consider every non-observer as a candidate");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (estimate->parsed())
            return run_estimate_command(est);
        for (std::size_t i = 0; i < commands.size(); ++i) {
            if (!commands[i]->parsed())
                continue;
            ExperimentKind kind = subs[i].kind;
            if (kind == ExperimentKind::ScalingNodes && vary == "observers")
                kind = ExperimentKind::ScalingObservers;
            return run_experiment_command(kind, common,
                                          network.empty() ? std::nullopt : std::optional<std::string>(network));
        }
    } catch (const Error& e) {
        std::cerr << "treelocate: " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "treelocate: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitConfig;
}
