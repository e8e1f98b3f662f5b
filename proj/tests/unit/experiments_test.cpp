#include "treelocate/experiments.hpp"

#include "support/expect_error.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace treelocate {
namespace {

namespace fs = std::filesystem;

fs::path temp_dir()
{
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    fs::path p = fs::temp_directory_path() / (std::string("treelocate_") + info->name());
    fs::create_directories(p);
    return p;
}

TEST(Config, KindNames)
{
    EXPECT_EQ(experiment_kind_from_string("check-vs-hat"), ExperimentKind::CheckVsHat);
    EXPECT_EQ(experiment_kind_from_string("check_vs_hat"), ExperimentKind::CheckVsHat);
    EXPECT_EQ(experiment_kind_from_string("scaling"), ExperimentKind::ScalingNodes);
    EXPECT_EQ(to_string(ExperimentKind::Triangle), "triangle");
    EXPECT_ERROR_KIND(experiment_kind_from_string("bogus"), ErrorKind::ConfigInvalid);
}

TEST(Config, ParsingAndValidation)
{
    const nlohmann::json spec = {{"experiment", "confusion"},
                                 {"seed", 7},
                                 {"trials", 3},
                                 {"delays", {{{"kind", "exponential"}, {"rate", 2.0}}}},
                                 {"grid", {{"magnitudes", 4}}}};
    const auto c = ExperimentConfig::from_json(spec);
    EXPECT_EQ(c.kind, ExperimentKind::Confusion);
    EXPECT_EQ(c.seed, 7u);
    EXPECT_EQ(c.trials, 3u);
    ASSERT_EQ(c.delays.size(), 1u);
    EXPECT_EQ(c.delays[0], DelayModel::exponential(2.0));
    EXPECT_EQ(c.grid.magnitudes, 4u);
    EXPECT_EQ(ExperimentConfig::from_json(c.to_json()).to_json(), c.to_json());

    EXPECT_ERROR_KIND(ExperimentConfig::from_json({{"experiment", "confusion"}}), ErrorKind::ConfigInvalid);
    EXPECT_ERROR_KIND(ExperimentConfig::from_json({{"experiment", "confusion"}, {"seed", 1}, {"bogus", 1}}),
                      ErrorKind::ConfigInvalid);
    EXPECT_ERROR_KIND(ExperimentConfig::from_json({{"experiment", "confusion"}, {"seed", 1}, {"trials", 0}}),
                      ErrorKind::ConfigInvalid);
    EXPECT_ERROR_KIND(ExperimentConfig::from_json({{"experiment", "check-vs-hat"},
                                                   {"seed", 1},
                                                   {"delays", {{"kind", "uniform"}, {"lower", 0}, {"upper", 1}}}}),
                      ErrorKind::ConfigInvalid);
    EXPECT_ERROR_KIND(ExperimentConfig::from_json({{"experiment", "triangle"}, {"seed", 1}, {"rates", {1, 2}}}),
                      ErrorKind::ConfigInvalid);
    const auto overridden = ExperimentConfig::from_json({{"seed", 1}}, ExperimentKind::Triangle, 99);
    EXPECT_EQ(overridden.seed, 99u);
    EXPECT_EQ(overridden.kind, ExperimentKind::Triangle);
}

TEST(Csv, Formatting)
{
    ResultTable t{"x", {"a", "b"}, {{1, 2.5}, {"q,r", nullptr}}};
    EXPECT_EQ(format_csv(t), "a,b\n1,2.5\n\"q,r\",\n");
    ResultTable sq{"sq", {"a", "b"}, {{1, 2}, {3, 4}}};
    const auto csv = format_csv(sq);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

ExperimentConfig tiny_confusion(std::uint64_t seed, std::size_t threads)
{
    auto c = ExperimentConfig::defaults(ExperimentKind::Confusion, seed);
    c.trials = 2;
    c.path_nodes = 5;
    c.delays = {DelayModel::exponential(1.0), DelayModel::pos_normal(1.0, 0.25)};
    c.grid.magnitudes = 4;
    c.grid.refine_steps = 1;
    c.threads = threads;
    return c;
}

TEST(Confusion, ShapeAndDeterminism)
{
    const auto c = tiny_confusion(5, 1);
    const auto cms = run_confusion(c);
    ASSERT_EQ(cms.size(), 2u);
    for (const auto& cm : cms) {
        EXPECT_EQ(cm.sources.size(), 4u);
        std::size_t total = 0;
        for (const auto& row : cm.counts)
            for (auto x : row)
                total += x;
        EXPECT_EQ(total, 8u);
        EXPECT_GE(cm.diagonal_mass(), 0.0);
        EXPECT_LE(cm.diagonal_mass(), 1.0);
    }
    std::ostringstream a, b, threaded;
    write_results(run_experiment(c), a, "csv");
    write_results(run_experiment(c), b, "csv");
    write_results(run_experiment(tiny_confusion(5, 3)), threaded, "csv");
    EXPECT_EQ(a.str(), b.str());
    EXPECT_EQ(a.str(), threaded.str());
    std::ostringstream other;
    write_results(run_experiment(tiny_confusion(6, 1)), other, "csv");
    EXPECT_NE(a.str(), other.str());
}

TEST(Confusion, OneTrialPerSource)
{
    auto c = tiny_confusion(1, 1);
    c.trials = 1;
    c.delays.erase(c.delays.begin() + 1, c.delays.end());
    const auto report = run_experiment(c);
    ASSERT_EQ(report.tables.size(), 1u);
    EXPECT_EQ(report.tables[0].rows.size(), 4u);
}

TEST(Scaling, CellsAndErrors)
{
    auto c = ExperimentConfig::defaults(ExperimentKind::ScalingNodes, 3);
    c.sizes = {8, 12};
    c.trials = 4;
    c.grid.magnitudes = 3;
    c.grid.refine_steps = 0;
    const auto cells = run_scaling(c);
    ASSERT_EQ(cells.size(), 2u);
    EXPECT_EQ(cells[0].nodes, 8u);
    EXPECT_EQ(cells[1].trials, 4u);
    for (const auto& cell : cells) {
        EXPECT_GE(cell.mean_error, 0.0);
        EXPECT_GE(cell.mean_normalized, 0.0);
        EXPECT_LE(cell.mean_normalized, 1.0);
    }
    c.sizes = {10};
    c.observer_counts = {9}; // only the star has 9 leaves: 10 of 10^8 trees
    EXPECT_ERROR_KIND(run_scaling(c), ErrorKind::NotEnoughLeaves);
}

TEST(CheckVsHat, PairedCell)
{
    auto c = ExperimentConfig::defaults(ExperimentKind::CheckVsHat, 4);
    c.sizes = {10};
    c.trials = 3;
    c.grid.magnitudes = 3;
    c.grid.refine_steps = 0;
    const auto cells = run_check_vs_hat(c);
    ASSERT_EQ(cells.size(), 1u);
    EXPECT_EQ(cells[0].trials, 3u);
}

TEST(Network, LoadAndRiver)
{
    const auto dir = temp_dir();
    const auto file = dir / "net.txt";
    {
        std::ofstream f(file);
        f << "# synthetic\nmouth a 1 0.25\na b 1 0.25\na c 2 0.5\nc d 1 0.25\nc e 1 0.25\n";
    }
    const auto net = load_network(file);
    EXPECT_EQ(net.tree.node_count(), 6u);
    EXPECT_EQ(net.labels[net.root], "mouth");
    EXPECT_EQ(net.delays.size(), 5u);
    EXPECT_EQ(net.id_of("c"), 3u);
    EXPECT_ERROR_KIND(net.id_of("zz"), ErrorKind::MalformedNetworkFile);

    auto c = ExperimentConfig::defaults(ExperimentKind::River, 8);
    c.trials = 10;
    c.river_observers = 2;
    c.grid.magnitudes = 3;
    c.grid.refine_steps = 0;
    const auto r = run_river(c, net);
    std::size_t total = 0;
    for (auto x : r.counts)
        total += x;
    EXPECT_EQ(total, 10u);
    EXPECT_EQ(r.nearest5.front(), net.root);
    EXPECT_GE(r.top5_mass, 0.0);
    EXPECT_LE(r.top5_mass, 1.0);

    EXPECT_ERROR_KIND(load_network(dir / "missing.txt"), ErrorKind::FileNotFound);
    const auto bad = dir / "bad.txt";
    {
        std::ofstream f(bad);
        f << "a b 1\n";
    }
    EXPECT_ERROR_KIND(load_network(bad), ErrorKind::MalformedNetworkFile);
    const auto cyc = dir / "cycle.txt";
    {
        std::ofstream f(cyc);
        f << "a b\nb c\nc a\n";
    }
    EXPECT_ERROR_KIND(load_network(cyc), ErrorKind::MalformedNetworkFile);
}

TEST(Triangle, SmallRunAndNaiveModelFails)
{
    auto c = ExperimentConfig::defaults(ExperimentKind::Triangle, 10);
    c.trials = 50000;
    const auto ok = run_triangle(c);
    EXPECT_TRUE(ok.probabilities_ok);
    EXPECT_TRUE(ok.means_ok);
    c.naive_triangle_model = true;
    const auto naive = run_triangle(c);
    EXPECT_FALSE(naive.passed);
    const auto report = run_experiment(c);
    ASSERT_TRUE(report.passed.has_value());
    EXPECT_FALSE(*report.passed);
}

TEST(Sufficiency, SmallRun)
{
    auto c = ExperimentConfig::defaults(ExperimentKind::SufficiencyDemo, 2);
    c.trials = 2000;
    const auto d = run_sufficiency_demo(c);
    EXPECT_EQ(d.accepted[0], 2000u);
    EXPECT_EQ(d.accepted[1], 2000u);
    EXPECT_GT(d.simulated[1], d.simulated[0]);
    EXPECT_NEAR(d.conditional_mean[0], 1.5, 5.0 * d.standard_error[0]);
    EXPECT_NEAR(d.conditional_mean[1], 2.25, 5.0 * d.standard_error[1]);
}

TEST(Output, EmitFilesAndJson)
{
    const auto dir = temp_dir();
    auto c = tiny_confusion(9, 1);
    c.trials = 1;
    const auto report = run_experiment(c);
    const auto written = emit_results(report, dir / "conf.csv", "csv");
    ASSERT_EQ(written.size(), 2u);
    for (const auto& p : written)
        EXPECT_TRUE(fs::exists(p));
    const auto js = emit_results(report, dir / "conf.json", "json");
    ASSERT_EQ(js.size(), 1u);
    std::ifstream in(js[0]);
    const auto parsed = nlohmann::json::parse(in);
    EXPECT_EQ(parsed.at("experiment"), "confusion");
    EXPECT_EQ(parsed.at("config").at("seed"), 9);
    std::ostringstream s;
    EXPECT_ERROR_KIND(write_results(report, s, "xml"), ErrorKind::ConfigInvalid);
    EXPECT_ERROR_KIND(emit_results(report, dir / "no" / "such" / "dir.csv", "csv"), ErrorKind::IoError);
}

} // namespace
} // namespace treelocate
