#include "treelocate/experiments.hpp"

#include "treelocate/error.hpp"
#include "treelocate/observer_reduction.hpp"
#include "treelocate/rng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <variant>

namespace treelocate {

namespace {

struct KindName {
    ExperimentKind kind;
    const char* name;
    const char* command;
};

constexpr KindName kKindNames[] = {
    {ExperimentKind::Confusion, "confusion", "confusion"},
    {ExperimentKind::ScalingNodes, "scaling_nodes", "scaling"},
    {ExperimentKind::ScalingObservers, "scaling_observers", "scaling-observers"},
    {ExperimentKind::NormalizedDiameter, "normalized_diameter", "normalized"},
    {ExperimentKind::River, "river", "river"},
    {ExperimentKind::CheckVsHat, "check_vs_hat", "check-vs-hat"},
    {ExperimentKind::Triangle, "triangle", "triangle"},
    {ExperimentKind::SufficiencyDemo, "sufficiency_demo", "sufficiency"},
};

[[noreturn]] void config_error(const std::string& what)
{
    throw Error(ErrorKind::ConfigInvalid, what);
}

std::string delay_slug(const DelayModel& d)
{
    return std::visit(
        [](const auto& p) -> std::string {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, Exponential>)
                return fmt::format("exponential_{}", p.rate);
            else if constexpr (std::is_same_v<P, PosNormal>)
                return fmt::format("posnormal_{}_{}", p.mean, p.stddev);
            else if constexpr (std::is_same_v<P, Uniform>)
                return fmt::format("uniform_{}_{}", p.lower, p.upper);
            else
                return fmt::format("abscauchy_{}", p.scale);
        },
        d.params());
}

/// k distinct elements of `pool`, in draw order.
std::vector<NodeId> sample_without_replacement(std::vector<NodeId> pool, std::size_t k, Rng& rng)
{
    for (std::size_t i = 0; i < k; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(k);
    return pool;
}

NodeId uniform_non_observer(std::size_t n, std::span<const NodeId> sorted_observers, Rng& rng)
{
    std::vector<NodeId> pool;
    for (NodeId x = 0; x < n; ++x)
        if (!std::binary_search(sorted_observers.begin(), sorted_observers.end(), x))
            pool.push_back(x);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    return pool[pick(rng)];
}

struct RandomInstance {
    Tree tree;
    std::vector<NodeId> observers; // sorted
    NodeId source = kNoNode;
};

RandomInstance random_leaf_instance(std::size_t n, std::size_t k, Rng& rng)
{
    constexpr int kMaxRetries = 1000;
    for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
        Tree tree = random_tree_prufer(n, rng);
        const auto leaf_nodes = leaves(tree);
        if (leaf_nodes.size() < k || leaf_nodes.size() == n)
            continue;
        auto observers = sample_without_replacement(leaf_nodes, k, rng);
        std::sort(observers.begin(), observers.end());
        const NodeId source = uniform_non_observer(n, observers, rng);
        return {std::move(tree), std::move(observers), source};
    }
    throw Error(ErrorKind::NotEnoughLeaves,
                fmt::format("no {}-node tree with at least {} leaves after {} draws", n, k, kMaxRetries));
}

template <typename T>
std::vector<T> read_list(const nlohmann::json& v, const char* key)
{
    try {
        if (v.is_array())
            return v.get<std::vector<T>>();
        return {v.get<T>()};
    } catch (const nlohmann::json::exception& e) {
        config_error(fmt::format("`{}`: {}", key, e.what()));
    }
}

} // namespace

std::string to_string(ExperimentKind kind)
{
    for (const auto& k : kKindNames)
        if (k.kind == kind)
            return k.name;
    return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& name)
{
    for (const auto& k : kKindNames)
        if (name == k.name || name == k.command)
            return k.kind;
    config_error("unknown experiment `" + name + "`");
}

ExperimentConfig ExperimentConfig::defaults(ExperimentKind kind, std::uint64_t seed)
{
    ExperimentConfig c;
    c.kind = kind;
    c.seed = seed;
    const auto exp1 = DelayModel::exponential(1.0);
    switch (kind) {
    case ExperimentKind::Confusion:
        c.delays = {DelayModel::pos_normal(1.0, 0.25), DelayModel::pos_normal(1.0, 0.5),
                    DelayModel::pos_normal(1.0, 1.0),  DelayModel::uniform(0.0, 2.0),
                    exp1,                              DelayModel::abs_cauchy(1.0)};
        break;
    case ExperimentKind::ScalingNodes:
        c.delays = {exp1};
        c.sizes = {20, 40, 60, 80, 100};
        c.observer_counts = {2};
        break;
    case ExperimentKind::ScalingObservers:
        c.delays = {exp1};
        c.sizes = {100};
        c.observer_counts = {1, 2, 5, 10, 20, 40};
        break;
    case ExperimentKind::NormalizedDiameter:
        c.delays = {DelayModel::pos_normal(1.0, 0.25), exp1, DelayModel::uniform(0.0, 2.0)};
        c.sizes = {20, 40, 60, 80, 100};
        c.observer_counts = {2};
        break;
    case ExperimentKind::River:
        break;
    case ExperimentKind::CheckVsHat:
        c.delays = {exp1};
        c.sizes = {50};
        c.observer_counts = {2};
        break;
    case ExperimentKind::Triangle:
        c.trials = 1000000;
        break;
    case ExperimentKind::SufficiencyDemo:
        c.delays = {exp1};
        c.trials = 100000;
        break;
    }
    return c;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& spec, std::optional<ExperimentKind> kind_override,
                                             std::optional<std::uint64_t> seed_override)
{
    if (!spec.is_object())
        config_error("config must be a JSON object");
    static const std::set<std::string> known = {
        "experiment", "seed",    "trials",         "delays",  "sizes",
        "observers",  "grid",    "use_reduction",  "threads", "path_nodes",
        "network",    "river_observers", "rates",  "naive_triangle_model", "star_leaves"};
    for (const auto& [key, value] : spec.items()) {
        (void)value;
        if (!known.count(key))
            config_error("unknown config key `" + key + "`");
    }

    ExperimentKind kind;
    if (kind_override)
        kind = *kind_override;
    else if (spec.contains("experiment") && spec.at("experiment").is_string())
        kind = experiment_kind_from_string(spec.at("experiment").get<std::string>());
    else
        config_error("config needs an `experiment` name");

    std::uint64_t seed = 0;
    if (seed_override)
        seed = *seed_override;
    else if (spec.contains("seed") && spec.at("seed").is_number_integer() && spec.at("seed").get<std::int64_t>() >= 0)
        seed = spec.at("seed").get<std::uint64_t>();
    else
        config_error("config needs an explicit nonnegative integer `seed`");

    ExperimentConfig c = defaults(kind, seed);
    try {
        if (spec.contains("trials"))
            c.trials = spec.at("trials").get<std::size_t>();
        if (spec.contains("delays")) {
            c.delays.clear();
            const auto& d = spec.at("delays");
            if (d.is_array())
                for (const auto& item : d)
                    c.delays.push_back(DelayModel::from_json(item));
            else
                c.delays.push_back(DelayModel::from_json(d));
        }
        if (spec.contains("sizes"))
            c.sizes = read_list<std::size_t>(spec.at("sizes"), "sizes");
        if (spec.contains("observers"))
            c.observer_counts = read_list<std::size_t>(spec.at("observers"), "observers");
        if (spec.contains("grid"))
            c.grid = GridSpec::from_json(spec.at("grid"));
        if (spec.contains("use_reduction"))
            c.use_reduction = spec.at("use_reduction").get<bool>();
        if (spec.contains("threads"))
            c.threads = spec.at("threads").get<std::size_t>();
        if (spec.contains("path_nodes"))
            c.path_nodes = spec.at("path_nodes").get<std::size_t>();
        if (spec.contains("network"))
            c.network_file = spec.at("network").get<std::string>();
        if (spec.contains("river_observers"))
            c.river_observers = spec.at("river_observers").get<std::size_t>();
        if (spec.contains("rates")) {
            const auto r = read_list<double>(spec.at("rates"), "rates");
            if (r.size() != 3)
                config_error("`rates` needs exactly three values");
            std::copy(r.begin(), r.end(), c.rates.begin());
        }
        if (spec.contains("naive_triangle_model"))
            c.naive_triangle_model = spec.at("naive_triangle_model").get<bool>();
        if (spec.contains("star_leaves"))
            c.star_leaves = spec.at("star_leaves").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        config_error(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

void ExperimentConfig::validate() const
{
    if (trials < 1)
        config_error("trials must be >= 1");
    if (threads < 1)
        config_error("threads must be >= 1");
    grid.validate();
    for (auto n : sizes)
        if (n < 2)
            config_error(fmt::format("tree size {} is below 2", n));
    for (auto k : observer_counts)
        if (k < 1)
            config_error("observer counts must be >= 1");
    switch (kind) {
    case ExperimentKind::Confusion:
        if (path_nodes < 2)
            config_error("path_nodes must be >= 2");
        [[fallthrough]];
    case ExperimentKind::ScalingNodes:
    case ExperimentKind::ScalingObservers:
    case ExperimentKind::NormalizedDiameter:
    case ExperimentKind::CheckVsHat:
    case ExperimentKind::SufficiencyDemo:
        if (delays.empty())
            config_error("at least one delay model is required");
        break;
    case ExperimentKind::River:
        if (river_observers < 1)
            config_error("river_observers must be >= 1");
        break;
    case ExperimentKind::Triangle:
        for (double r : rates)
            if (!(r > 0.0) || !std::isfinite(r))
                config_error("triangle rates must be > 0");
        break;
    }
    if (kind != ExperimentKind::Confusion && kind != ExperimentKind::River && kind != ExperimentKind::Triangle &&
        kind != ExperimentKind::SufficiencyDemo && (sizes.empty() || observer_counts.empty()))
        config_error("sizes and observers must be nonempty");
    if (kind == ExperimentKind::CheckVsHat || kind == ExperimentKind::SufficiencyDemo)
        for (const auto& d : delays)
            if (!d.is_exponential())
                config_error(to_string(kind) + " needs exponential delays");
    if (kind == ExperimentKind::SufficiencyDemo && star_leaves < 1)
        config_error("star_leaves must be >= 1");
}

nlohmann::json ExperimentConfig::to_json() const
{
    nlohmann::json d = nlohmann::json::array();
    for (const auto& m : delays)
        d.push_back(m.to_json());
    nlohmann::json j = {{"experiment", to_string(kind)}, {"seed", seed}, {"trials", trials},
                        {"grid", grid.to_json()},       {"use_reduction", use_reduction}};
    switch (kind) {
    case ExperimentKind::Confusion:
        j["delays"] = d;
        j["path_nodes"] = path_nodes;
        break;
    case ExperimentKind::ScalingNodes:
    case ExperimentKind::ScalingObservers:
    case ExperimentKind::NormalizedDiameter:
    case ExperimentKind::CheckVsHat:
        j["delays"] = d;
        j["sizes"] = sizes;
        j["observers"] = observer_counts;
        break;
    case ExperimentKind::River:
        j["network"] = network_file;
        j["river_observers"] = river_observers;
        break;
    case ExperimentKind::Triangle:
        j["rates"] = rates;
        j["naive_triangle_model"] = naive_triangle_model;
        break;
    case ExperimentKind::SufficiencyDemo:
        j["delays"] = d;
        j["star_leaves"] = star_leaves;
        break;
    }
    return j;
}

nlohmann::json ExperimentReport::to_json() const
{
    nlohmann::json tables_json = nlohmann::json::object();
    for (const auto& t : tables)
        tables_json[t.name] = {{"columns", t.columns}, {"rows", t.rows}};
    nlohmann::json j = {{"experiment", experiment}, {"config", config}, {"tables", tables_json},
                        {"summary", summary}};
    j["passed"] = passed ? nlohmann::json(*passed) : nlohmann::json(nullptr);
    return j;
}

void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn)
{
    threads = std::max<std::size_t>(1, std::min(threads, count));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> workers;
    for (std::size_t w = 0; w < threads; ++w)
        workers.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += threads)
                    fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& t : workers)
        t.join();
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// confusion

double ConfusionMatrix::diagonal_mass() const
{
    std::size_t diag = 0;
    std::size_t total = 0;
    for (std::size_t r = 0; r < sources.size(); ++r)
        for (std::size_t c = 0; c < estimates.size(); ++c) {
            total += counts[r][c];
            if (estimates[c] == sources[r])
                diag += counts[r][c];
        }
    return total == 0 ? 0.0 : static_cast<double>(diag) / static_cast<double>(total);
}

ResultTable ConfusionMatrix::to_table() const
{
    ResultTable t;
    t.name = delay;
    t.columns.push_back("source");
    for (NodeId e : estimates)
        t.columns.push_back(fmt::format("est_{}", e));
    t.columns.push_back("mean_error");
    for (std::size_t r = 0; r < sources.size(); ++r) {
        std::vector<nlohmann::json> row{sources[r]};
        for (auto c : counts[r])
            row.emplace_back(c);
        row.emplace_back(mean_error[r]);
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::vector<ConfusionMatrix> run_confusion(const ExperimentConfig& config)
{
    const Tree tree = path_tree(config.path_nodes);
    const std::vector<NodeId> observers{0};
    std::vector<NodeId> sources;
    for (NodeId x = 1; x < config.path_nodes; ++x)
        sources.push_back(x);

    std::vector<ConfusionMatrix> out;
    for (std::size_t m = 0; m < config.delays.size(); ++m) {
        const std::vector<DelayModel> delays(tree.edge_count(), config.delays[m]);
        const std::uint64_t master = derive_seed(config.seed, m);
        const std::size_t total = sources.size() * config.trials;
        std::vector<NodeId> estimate(total);
        parallel_for(total, config.threads, [&](std::size_t i) {
            Rng rng = trial_rng(master, i);
            const NodeId source = sources[i / config.trials];
            const auto obs = simulate_observation(tree, delays, source, observers, rng);
            estimate[i] = hat_estimate(tree, observers, delays, obs, config.grid, config.use_reduction).primary();
        });

        ConfusionMatrix cm;
        cm.delay = delay_slug(config.delays[m]);
        cm.sources = sources;
        cm.estimates = sources;
        cm.counts.assign(sources.size(), std::vector<std::size_t>(sources.size(), 0));
        cm.mean_error.assign(sources.size(), 0.0);
        for (std::size_t i = 0; i < total; ++i) {
            const std::size_t r = i / config.trials;
            ++cm.counts[r][estimate[i] - 1];
            cm.mean_error[r] += static_cast<double>(edge_distance_error(tree, estimate[i], sources[r]));
        }
        for (auto& e : cm.mean_error)
            e /= static_cast<double>(config.trials);
        out.push_back(std::move(cm));
    }
    return out;
}

// ---------------------------------------------------------------------------
// scaling and check-vs-hat

std::vector<ScalingCell> run_scaling(const ExperimentConfig& config)
{
    std::vector<ScalingCell> cells;
    std::uint64_t cell_index = 0;
    for (const auto& model : config.delays)
        for (auto n : config.sizes)
            for (auto k : config.observer_counts) {
                if (k >= n)
                    config_error(fmt::format("{} observers on {} nodes leave no candidate", k, n));
                const std::uint64_t master = derive_seed(config.seed, cell_index++);
                std::vector<double> error(config.trials);
                std::vector<double> normalized(config.trials);
                parallel_for(config.trials, config.threads, [&](std::size_t i) {
                    Rng rng = trial_rng(master, i);
                    const RandomInstance inst = random_leaf_instance(n, k, rng);
                    const std::vector<DelayModel> delays(inst.tree.edge_count(), model);
                    const auto obs = simulate_observation(inst.tree, delays, inst.source, inst.observers, rng);
                    const NodeId est =
                        hat_estimate(inst.tree, inst.observers, delays, obs, config.grid, config.use_reduction)
                            .primary();
                    error[i] = static_cast<double>(edge_distance_error(inst.tree, est, inst.source));
                    normalized[i] = error[i] / static_cast<double>(diameter(inst.tree));
                });
                const auto se = summarize(error);
                const auto sn = summarize(normalized);
                cells.push_back({delay_slug(model), n, k, config.trials, se.mean(), se.stddev(), sn.mean(),
                                 sn.stddev()});
            }
    return cells;
}

std::vector<CheckVsHatCell> run_check_vs_hat(const ExperimentConfig& config)
{
    std::vector<CheckVsHatCell> cells;
    std::uint64_t cell_index = 0;
    const auto& model = config.delays.front();
    for (auto n : config.sizes)
        for (auto k : config.observer_counts) {
            if (k >= n)
                config_error(fmt::format("{} observers on {} nodes leave no candidate", k, n));
            const std::uint64_t master = derive_seed(config.seed, cell_index++);
            std::vector<double> hat_err(config.trials);
            std::vector<double> check_err(config.trials);
            parallel_for(config.trials, config.threads, [&](std::size_t i) {
                Rng rng = trial_rng(master, i);
                const RandomInstance inst = random_leaf_instance(n, k, rng);
                const std::vector<DelayModel> delays(inst.tree.edge_count(), model);
                const auto obs = simulate_observation(inst.tree, delays, inst.source, inst.observers, rng);
                const NodeId hat =
                    hat_estimate(inst.tree, inst.observers, delays, obs, config.grid, config.use_reduction).primary();
                const NodeId check =
                    check_estimate(inst.tree, inst.observers, delays, obs, config.grid, config.use_reduction)
                        .primary();
                hat_err[i] = static_cast<double>(edge_distance_error(inst.tree, hat, inst.source));
                check_err[i] = static_cast<double>(edge_distance_error(inst.tree, check, inst.source));
            });
            const auto sh = summarize(hat_err);
            const auto sc = summarize(check_err);
            cells.push_back({n, k, config.trials, sh.mean(), sh.stddev(), sc.mean(), sc.stddev()});
        }
    return cells;
}

// ---------------------------------------------------------------------------
// river

NodeId LabeledNetwork::id_of(const std::string& label) const
{
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end())
        throw Error(ErrorKind::MalformedNetworkFile, "unknown node label `" + label + "`");
    return static_cast<NodeId>(it - labels.begin());
}

LabeledNetwork load_network(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorKind::FileNotFound, "cannot open network file " + path.string());

    LabeledNetwork net;
    std::map<std::string, NodeId> ids;
    auto id_for = [&](const std::string& label) {
        auto [it, inserted] = ids.emplace(label, static_cast<NodeId>(net.labels.size()));
        if (inserted)
            net.labels.push_back(label);
        return it->second;
    };

    std::vector<std::pair<NodeId, NodeId>> edges;
    std::vector<std::optional<DelayModel>> models;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        std::istringstream fields(line);
        std::vector<std::string> tok;
        for (std::string s; fields >> s;)
            tok.push_back(s);
        if (tok.empty())
            continue;
        auto bad = [&](const std::string& why) {
            throw Error(ErrorKind::MalformedNetworkFile, fmt::format("{}:{}: {}", path.string(), line_no, why));
        };
        if (tok.size() != 2 && tok.size() != 4)
            bad("expected `u v` or `u v mu sigma`");
        const NodeId a = id_for(tok[0]);
        const NodeId b = id_for(tok[1]);
        edges.emplace_back(a, b);
        if (tok.size() == 4) {
            double mu = 0.0;
            double sigma = 0.0;
            try {
                std::size_t used = 0;
                mu = std::stod(tok[2], &used);
                if (used != tok[2].size())
                    bad("bad mu");
                sigma = std::stod(tok[3], &used);
                if (used != tok[3].size())
                    bad("bad sigma");
            } catch (const std::logic_error&) {
                bad("non-numeric delay parameters");
            }
            try {
                models.emplace_back(DelayModel::pos_normal(mu, sigma));
            } catch (const Error& e) {
                bad(e.what());
            }
        } else {
            models.emplace_back(std::nullopt);
        }
    }
    if (net.labels.empty())
        throw Error(ErrorKind::MalformedNetworkFile, path.string() + " has no edges");
    try {
        net.tree = build_tree(net.labels.size(), edges);
    } catch (const Error& e) {
        throw Error(ErrorKind::MalformedNetworkFile, path.string() + ": " + e.what());
    }
    const bool all = std::all_of(models.begin(), models.end(), [](const auto& m) { return m.has_value(); });
    const bool none = std::none_of(models.begin(), models.end(), [](const auto& m) { return m.has_value(); });
    if (!all && !none)
        throw Error(ErrorKind::MalformedNetworkFile, path.string() + " mixes edges with and without parameters");
    if (all)
        for (const auto& m : models)
            net.delays.push_back(*m);
    net.root = 0;
    return net;
}

RiverResult run_river(const ExperimentConfig& config, const LabeledNetwork& network)
{
    const Tree& tree = network.tree;
    if (network.delays.size() != tree.edge_count())
        throw Error(ErrorKind::MalformedNetworkFile, "network file carries no per-edge delay parameters");
    if (config.river_observers + 1 >= tree.node_count())
        config_error("too many river observers for the network");

    std::vector<NodeId> pool;
    for (NodeId x = 0; x < tree.node_count(); ++x)
        if (x != network.root)
            pool.push_back(x);

    std::vector<NodeId> estimate(config.trials);
    parallel_for(config.trials, config.threads, [&](std::size_t i) {
        Rng rng = trial_rng(config.seed, i);
        auto observers = sample_without_replacement(pool, config.river_observers, rng);
        std::sort(observers.begin(), observers.end());
        const auto obs = simulate_observation(tree, network.delays, network.root, observers, rng);
        estimate[i] = hat_estimate(tree, observers, network.delays, obs, config.grid, config.use_reduction).primary();
    });

    RiverResult r;
    r.trials = config.trials;
    r.counts.assign(tree.node_count(), 0);
    for (NodeId e : estimate)
        ++r.counts[e];
    const Rooting rooted = root_at(tree, network.root);
    std::vector<NodeId> by_distance(tree.node_count());
    std::iota(by_distance.begin(), by_distance.end(), 0);
    std::stable_sort(by_distance.begin(), by_distance.end(),
                     [&](NodeId a, NodeId b) { return rooted.depth[a] < rooted.depth[b]; });
    r.nearest5.assign(by_distance.begin(), by_distance.begin() + std::min<std::size_t>(5, by_distance.size()));
    std::size_t near = 0;
    for (NodeId x : r.nearest5)
        near += r.counts[x];
    r.top5_mass = static_cast<double>(near) / static_cast<double>(config.trials);
    return r;
}

// ---------------------------------------------------------------------------
// triangle

TriangleValidation run_triangle(const ExperimentConfig& config)
{
    Rng rng = trial_rng(config.seed, 0);
    const TriangleCensus census = triangle_census(config.rates, config.trials, rng);

    TriangleValidation v;
    v.closed_form = triangle_closed_form(config.rates);
    v.trials = census.trials;
    const double n = static_cast<double>(census.trials);
    std::array<double, 3> target_mean = v.closed_form.conditional_mean;
    const double l1 = config.rates[0];
    const double l2 = config.rates[1];
    const double t1_rate = config.naive_triangle_model ? l1 : l1 + l2;
    if (config.naive_triangle_model)
        target_mean[0] = 1.0 / l1;

    v.probabilities_ok = true;
    v.means_ok = true;
    for (std::size_t k = 0; k < 3; ++k) {
        const double p = v.closed_form.probability[k];
        v.empirical_probability[k] = static_cast<double>(census.counts[k]) / n;
        v.probability_se[k] = std::sqrt(p * (1.0 - p) / n);
        if (std::abs(v.empirical_probability[k] - p) > 4.0 * v.probability_se[k])
            v.probabilities_ok = false;
        const auto s = summarize(census.observer_times[k]);
        v.empirical_mean[k] = s.mean();
        v.mean_se[k] = s.standard_error();
        if (s.count() < 2 || std::abs(s.mean() - target_mean[k]) > 4.0 * v.mean_se[k])
            v.means_ok = false;
    }

    const auto& t1 = census.observer_times[0];
    if (t1.empty()) {
        v.ks_ok = false;
    } else {
        v.naive_ks = ks_test(t1, [l1](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-l1 * x); });
        v.correct_ks = ks_test(t1, [t1_rate](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-t1_rate * x); });
        v.ks_ok = v.correct_ks.p_value >= 0.01 && (config.naive_triangle_model || v.naive_ks.p_value < 0.01);
    }
    v.passed = v.probabilities_ok && v.means_ok && v.ks_ok;
    return v;
}

// ---------------------------------------------------------------------------
// sufficiency

SufficiencyDemo run_sufficiency_demo(const ExperimentConfig& config)
{
    const std::size_t n = config.star_leaves;
    const NodeId center = 0;
    const NodeId far_leaf = static_cast<NodeId>(n + 1);
    const NodeId left = static_cast<NodeId>(n + 2);
    const NodeId right = static_cast<NodeId>(n + 3);
    std::vector<std::pair<NodeId, NodeId>> edges{{far_leaf, left}, {left, center}, {center, right}};
    for (NodeId i = 1; i <= n; ++i)
        edges.emplace_back(right, i);
    const Tree tree = build_tree(n + 4, edges);
    const std::vector<DelayModel> delays(tree.edge_count(), config.delays.front());

    SufficiencyDemo demo;
    demo.leaves = n;
    const std::size_t max_sims = 1000 * config.trials;
    RunningStats unconditional_left;
    const std::array<NodeId, 2> sources{left, right};
    for (std::size_t k = 0; k < 2; ++k) {
        Rng rng = trial_rng(config.seed, k);
        RunningStats cond;
        while (cond.count() < config.trials && demo.simulated[k] < max_sims) {
            const FullInfection inf = simulate_tree(tree, delays, sources[k], rng);
            ++demo.simulated[k];
            if (k == 0)
                unconditional_left.add(inf.times[far_leaf]);
            bool first = true;
            for (NodeId o = 1; o <= far_leaf; ++o)
                first = first && inf.times[center] < inf.times[o];
            if (first)
                cond.add(inf.times[far_leaf]);
        }
        demo.accepted[k] = cond.count();
        demo.conditional_mean[k] = cond.mean();
        demo.standard_error[k] = cond.standard_error();
    }
    demo.unconditional_mean_left = unconditional_left.mean();
    demo.difference = demo.conditional_mean[1] - demo.conditional_mean[0];
    const double se = std::hypot(demo.standard_error[0], demo.standard_error[1]);
    demo.z_score = se > 0.0 ? demo.difference / se : 0.0;
    demo.passed = demo.accepted[0] >= 2 && demo.accepted[1] >= 2 && std::abs(demo.z_score) > 4.0;
    return demo;
}

// ---------------------------------------------------------------------------
// packaging

namespace {

ResultTable scaling_table(const std::vector<ScalingCell>& cells)
{
    ResultTable t{"scaling",
                  {"delay", "nodes", "observers", "trials", "mean_error", "std_error", "mean_normalized",
                   "std_normalized"},
                  {}};
    for (const auto& c : cells)
        t.rows.push_back({c.delay, c.nodes, c.observers, c.trials, c.mean_error, c.std_error, c.mean_normalized,
                          c.std_normalized});
    return t;
}

} // namespace

ExperimentReport run_experiment(const ExperimentConfig& config)
{
    config.validate();
    ExperimentReport report;
    report.experiment = to_string(config.kind);
    report.config = config.to_json();

    switch (config.kind) {
    case ExperimentKind::Confusion: {
        for (const auto& cm : run_confusion(config)) {
            report.tables.push_back(cm.to_table());
            report.summary["diagonal_mass"][cm.delay] = cm.diagonal_mass();
        }
        break;
    }
    case ExperimentKind::ScalingNodes:
    case ExperimentKind::ScalingObservers:
    case ExperimentKind::NormalizedDiameter:
        report.tables.push_back(scaling_table(run_scaling(config)));
        break;
    case ExperimentKind::CheckVsHat: {
        ResultTable t{"check_vs_hat",
                      {"nodes", "observers", "trials", "hat_mean", "hat_std", "check_mean", "check_std"},
                      {}};
        for (const auto& c : run_check_vs_hat(config))
            t.rows.push_back({c.nodes, c.observers, c.trials, c.hat_mean, c.hat_std, c.check_mean, c.check_std});
        report.tables.push_back(std::move(t));
        break;
    }
    case ExperimentKind::River: {
        const LabeledNetwork net = load_network(config.network_file);
        const RiverResult r = run_river(config, net);
        const Rooting rooted = root_at(net.tree, net.root);
        ResultTable t{"river", {"node", "label", "distance_to_root", "count", "frequency"}, {}};
        for (NodeId x = 0; x < net.tree.node_count(); ++x)
            t.rows.push_back({x, net.labels[x], rooted.depth[x], r.counts[x],
                              static_cast<double>(r.counts[x]) / static_cast<double>(r.trials)});
        report.tables.push_back(std::move(t));
        std::vector<std::string> nearest;
        for (NodeId x : r.nearest5)
            nearest.push_back(net.labels[x]);
        report.summary = {{"root", net.labels[net.root]},
                          {"nodes", net.tree.node_count()},
                          {"top5_mass", r.top5_mass},
                          {"nearest5", nearest},
                          {"reference_top5_mass", 0.5}};
        break;
    }
    case ExperimentKind::Triangle: {
        const TriangleValidation v = run_triangle(config);
        ResultTable t{"triangle",
                      {"tree", "probability", "empirical_probability", "probability_se", "conditional_mean",
                       "empirical_mean", "mean_se"},
                      {}};
        for (std::size_t k = 0; k < 3; ++k)
            t.rows.push_back({fmt::format("T{}", k + 1), v.closed_form.probability[k], v.empirical_probability[k],
                              v.probability_se[k], v.closed_form.conditional_mean[k], v.empirical_mean[k],
                              v.mean_se[k]});
        report.tables.push_back(std::move(t));
        report.summary = {{"trials", v.trials},
                          {"probabilities_ok", v.probabilities_ok},
                          {"means_ok", v.means_ok},
                          {"ks_ok", v.ks_ok},
                          {"ks_naive_statistic", v.naive_ks.statistic},
                          {"ks_naive_p", v.naive_ks.p_value},
                          {"ks_correct_statistic", v.correct_ks.statistic},
                          {"ks_correct_p", v.correct_ks.p_value}};
        report.passed = v.passed;
        break;
    }
    case ExperimentKind::SufficiencyDemo: {
        const SufficiencyDemo d = run_sufficiency_demo(config);
        ResultTable t{"sufficiency",
                      {"source", "simulated", "accepted", "acceptance", "conditional_mean", "standard_error"},
                      {}};
        const char* names[2] = {"left", "right"};
        for (std::size_t k = 0; k < 2; ++k)
            t.rows.push_back({names[k], d.simulated[k], d.accepted[k],
                              static_cast<double>(d.accepted[k]) / static_cast<double>(d.simulated[k]),
                              d.conditional_mean[k], d.standard_error[k]});
        report.tables.push_back(std::move(t));
        report.summary = {{"leaves", d.leaves},
                          {"difference", d.difference},
                          {"z_score", d.z_score},
                          {"unconditional_mean_left", d.unconditional_mean_left}};
        report.passed = d.passed;
        break;
    }
    }
    return report;
}

std::string format_csv(const ResultTable& table)
{
    auto cell = [](const nlohmann::json& v) -> std::string {
        if (v.is_string()) {
            const auto s = v.get<std::string>();
            if (s.find_first_of(",\"\n") == std::string::npos)
                return s;
            std::string quoted = "\"";
            for (char c : s) {
                if (c == '"')
                    quoted += '"';
                quoted += c;
            }
            return quoted + "\"";
        }
        if (v.is_number_float())
            return fmt::format("{}", v.get<double>());
        if (v.is_null())
            return "";
        return v.dump();
    };
    std::string out;
    for (std::size_t i = 0; i < table.columns.size(); ++i)
        out += (i ? "," : "") + table.columns[i];
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out += (i ? "," : "") + cell(row[i]);
        out += '\n';
    }
    return out;
}

void write_results(const ExperimentReport& report, std::ostream& out, const std::string& format)
{
    if (format == "json") {
        out << report.to_json().dump(2) << '\n';
    } else if (format == "csv") {
        for (std::size_t i = 0; i < report.tables.size(); ++i) {
            if (report.tables.size() > 1)
                out << (i ? "\n" : "") << "# " << report.tables[i].name << '\n';
            out << format_csv(report.tables[i]);
        }
    } else {
        config_error("unknown output format `" + format + "` (csv or json)");
    }
}

std::vector<std::filesystem::path> emit_results(const ExperimentReport& report, const std::filesystem::path& path,
                                                const std::string& format)
{
    auto write_file = [](const std::filesystem::path& p, const std::string& bytes) {
        std::ofstream f(p, std::ios::binary | std::ios::trunc);
        if (!f)
            throw Error(ErrorKind::IoError, "cannot write " + p.string());
        f << bytes;
        if (!f)
            throw Error(ErrorKind::IoError, "write failed for " + p.string());
    };
    std::vector<std::filesystem::path> written;
    if (format == "json" || report.tables.size() == 1) {
        std::ostringstream s;
        write_results(report, s, format);
        write_file(path, s.str());
        written.push_back(path);
        return written;
    }
    if (format != "csv")
        config_error("unknown output format `" + format + "` (csv or json)");
    for (const auto& t : report.tables) {
        auto p = path;
        p.replace_filename(path.stem().string() + "_" + t.name + (path.has_extension() ? path.extension().string()
                                                                                         : std::string(".csv")));
        write_file(p, format_csv(t));
        written.push_back(p);
    }
    return written;
}

} // namespace treelocate
