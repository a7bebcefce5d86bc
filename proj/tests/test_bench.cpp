#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pikfnn/bench.hpp"
#include "pikfnn/metrics.hpp"
#include "pikfnn/problem_config.hpp"

using namespace pikfnn;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("pikfnn_test_" + name);
    fs::remove_all(dir);
    return dir;
}

json laplace_config() {
    return json::parse(R"({
        "name": "laplace-disk",
        "operator": {"kind": "laplace", "dim": 2},
        "kernels": ["fundamental:laplace:2d"],
        "geometry": {"shape": "circle", "radius": 1.0, "boundary_nodes": 60},
        "sources": {"placement": "circle", "radius": 3.0},
        "exact": {"name": "quadratic-harmonic"},
        "train": {"tol": 1e-12},
        "test": {"grid": 200}
    })");
}

} // namespace

TEST(Metrics, Examples) {
    EXPECT_NEAR(metric_rerr(1.1, 1.0), 0.1, 1e-15);
    EXPECT_EQ(metric_rerr(1.0, 1.0), 0.0);
    EXPECT_NEAR(metric_rerr(0.9, 1.0), -0.1, 1e-15);
    EXPECT_THROW(metric_rerr(1.0, 0.0), DomainError);
    EXPECT_EQ(metric_l2(Eigen::Vector2d(1, 2), Eigen::Vector2d(1, 2)), 0.0);
    EXPECT_NEAR(metric_l2(Eigen::Vector2d(1, 1), Eigen::Vector2d(1, 2)), 0.4472136, 1e-7);
    EXPECT_DOUBLE_EQ(metric_l2(Eigen::Vector3d(2, -4, 6), Eigen::Vector3d(1, -2, 3)), 1.0);
    EXPECT_THROW(metric_l2(Eigen::Vector2d(1, 1), Eigen::Vector2d(0, 0)), DomainError);
    EXPECT_THROW(metric_l2(Eigen::Vector2d(1, 1), Eigen::Vector3d(1, 1, 1)), ValidationError);
    EXPECT_DOUBLE_EQ(metric_r_squared(Eigen::Vector3d(1, 2, 3), Eigen::Vector3d(1, 2, 3)), 1.0);
}

TEST(Metrics, ZeroExactValuesAreExcludedAndCounted) {
    std::vector<SpaceTimePoint> pts(3);
    for (auto& p : pts) {
        p.dim = 1;
    }
    const auto rep = compute_metrics(pts, Eigen::Vector3d(1.0, 0.5, 2.2), Eigen::Vector3d(1.0, 0.0, 2.0));
    EXPECT_EQ(rep.excluded_zero, 1u);
    EXPECT_NEAR(rep.max_rerr, 0.1, 1e-14);
    EXPECT_TRUE(std::isnan(rep.per_point[1].rerr));
}

TEST(Bench, ExactSolutionsSatisfyTheirProblems) {
    for (const auto& name : builtin_names()) {
        const auto p = make_builtin(name);
        EXPECT_LE(check_exact_solution(p), 1e-5) << name;
    }
}

TEST(Bench, UnknownNamesAndParamsAreRejected) {
    EXPECT_THROW(make_builtin("example11"), ValidationError);
    EXPECT_THROW(make_builtin("example3", {{"Nn", 10}}), ValidationError);
    EXPECT_THROW(make_builtin("example3", {{"N", 0}}), ValidationError);
    EXPECT_THROW(make_builtin("example3", {{"N", "many"}}), ValidationError);
    EXPECT_NO_THROW(make_builtin("example8"));
}

TEST(Bench, OutputsAreDeterministicAndConsistent) {
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    const json params = {{"N", 100}, {"tol", 1e-8}};
    run_benchmark("example3", params, {a.string(), true});
    const auto res = run_benchmark("example3", params, {b.string(), true});
    for (const auto* f : {"field.csv", "loss.csv", "model.txt"}) {
        ASSERT_TRUE(fs::exists(a / f)) << f;
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    }
    const auto summary = json::parse(slurp(a / "summary.json"));
    EXPECT_EQ(summary["name"], "example3");
    EXPECT_EQ(summary["seed"], res.summary["seed"]);
    EXPECT_EQ(summary["config_hash"], res.summary["config_hash"]);

    // The L2 error recomputed from field.csv matches the reported one.
    std::istringstream in(slurp(a / "field.csv"));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "x1,x2,u_pred,u_ana,rerr");
    double num = 0.0;
    double den = 0.0;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        std::vector<double> v;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) {
            v.push_back(std::stod(cell));
        }
        ASSERT_EQ(v.size(), 5u);
        num += (v[2] - v[3]) * (v[2] - v[3]);
        den += v[3] * v[3];
        ++rows;
    }
    EXPECT_EQ(rows, res.metrics.per_point.size());
    EXPECT_NEAR(std::sqrt(num / den), summary["metrics"]["l2"].get<double>(), 1e-14);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Bench, ElasticPlateStresses) {
    const auto res = run_benchmark("example10");
    ASSERT_TRUE(res.summary.contains("extra"));
    const auto& e = res.summary["extra"];
    EXPECT_LE(std::abs(e["sigma11_rerr"].get<double>()), 1e-6);
    EXPECT_LE(std::abs(e["sigma22_rerr"].get<double>()), 1e-6);
    EXPECT_LE(res.metrics.l2, 1e-6);
}

TEST(Config, GenericLaplaceProblemRuns) {
    auto cfg = load_config(laplace_config());
    EXPECT_EQ(cfg.problem.name, "laplace-disk");
    EXPECT_EQ(cfg.problem.colloc.size(), 60u);
    EXPECT_EQ(cfg.problem.model.sources.size(), 60u);
    const auto res = run_problem(cfg.problem);
    EXPECT_LE(res.metrics.l2, 1e-6);
    EXPECT_LE(res.exact_residual, 1e-5);
}

TEST(Config, BuiltinFormOverridesTraining) {
    const auto cfg = load_config(json::parse(R"({"builtin": "example3", "params": {"N": 50},
                                                 "train": {"tol": 1e-6}, "outputs": {"dir": "out3"}})"),
                                 "/tmp/base");
    EXPECT_EQ(cfg.problem.train.tol, 1e-6);
    EXPECT_EQ(cfg.problem.colloc.size(), 50u);
    EXPECT_EQ(cfg.out_dir, "/tmp/base/out3");
}

TEST(Config, ErrorsAreRaisedBeforeCompute) {
    auto j = laplace_config();
    j["kernels"] = {"fundamental:laplace:3d"};
    EXPECT_THROW(load_config(j), ValidationError);
    j = laplace_config();
    j["operator"]["dim"] = 3;
    EXPECT_THROW(load_config(j), ValidationError);
    j = laplace_config();
    j["colour"] = "blue";
    EXPECT_THROW(load_config(j), ConfigurationError);
    j = laplace_config();
    j["geometry"]["shape"] = "blob";
    EXPECT_THROW(load_config(j), ConfigurationError);
    j = laplace_config();
    j["sources"] = {{"placement", "file"}, {"file", "missing_sources.txt"}};
    EXPECT_THROW(load_config(j, "/nonexistent"), ValidationError);
    j = laplace_config();
    j["train"] = {{"optimiser", "lm"}};
    EXPECT_THROW(load_config(j), ConfigurationError);
    j = laplace_config();
    j["kernels"] = {"fundamental:nosuch:2d"};
    EXPECT_THROW(load_config(j), ValidationError);
    EXPECT_THROW(load_config_file("/nonexistent/config.json"), ValidationError);
}

TEST(Config, NodeFileGeometry) {
    const auto dir = scratch("nodes");
    fs::create_directories(dir);
    {
        std::ofstream f(dir / "bnd.txt");
        f.precision(17);
        f << "# dim=2 time=0 normals=0 kind_col=0\n";
        for (const auto& n : gen_boundary(Shape::circle(1.0), 40)) {
            f << n.x[0] << ',' << n.x[1] << ",0\n";
        }
        std::ofstream s(dir / "src.txt");
        s.precision(17);
        s << "# dim=2 time=0 normals=0 kind_col=0\n";
        for (const auto& n : gen_boundary(Shape::circle(3.0), 40)) {
            s << n.x[0] << ',' << n.x[1] << ",0\n";
        }
        std::ofstream t(dir / "test.txt");
        t << "# dim=2\n0.1,0.2,0\n-0.3,0.4,0\n0.5,-0.5,0\n";
    }
    json j = {{"kernels", {"fundamental:laplace:2d"}},
              {"geometry", {{"nodes", "bnd.txt"}}},
              {"sources", {{"placement", "file"}, {"file", "src.txt"}}},
              {"exact", {{"name", "linear"}, {"a", {1.0, 2.0}}, {"b", 3.0}}},
              {"test", {{"file", "test.txt"}}}};
    auto cfg = load_config(j, dir);
    const auto res = run_problem(cfg.problem);
    EXPECT_EQ(res.metrics.per_point.size(), 3u);
    EXPECT_LE(res.metrics.l2, 1e-6);
    fs::remove_all(dir);
}
