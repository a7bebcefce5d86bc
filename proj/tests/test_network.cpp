#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <random>
#include <sstream>

#include "pikfnn/fd_operator.hpp"
#include "pikfnn/geometry.hpp"
#include "pikfnn/network.hpp"

using namespace pikfnn;

namespace {

PikfnnModel one_source_model(std::vector<double> s, const std::string& id = "fundamental:laplace:2d") {
    PikfnnModel m;
    m.dim = static_cast<int>(s.size());
    m.families = {{parse_kernel_id(id), false}};
    Node n;
    n.dim = m.dim;
    std::copy(s.begin(), s.end(), n.x.begin());
    m.sources.points = {n};
    return m;
}

CollocationSet dirichlet(const std::vector<Node>& nodes, double value = 0.0) {
    CollocationSet c;
    c.dim = nodes.front().dim;
    for (const auto& n : nodes) {
        c.add(n, ConditionKind::Dirichlet, value);
    }
    return c;
}

PikfnnModel circle_model(const std::string& id, int n_sources, double radius) {
    PikfnnModel m;
    m.dim = 2;
    m.families = {{parse_kernel_id(id), false}};
    m.sources = gen_sources(Shape::circle(1.0), SourcePlacement::scaled_circle(radius), static_cast<std::size_t>(n_sources));
    return m;
}

Eigen::VectorXd random_weights(std::size_t n, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd w(static_cast<Eigen::Index>(n));
    for (auto& v : w) {
        v = u(rng);
    }
    return w;
}

} // namespace

TEST(Assemble, SingleLaplaceEntry) {
    const auto m = one_source_model({3.0, 0.0});
    const auto dm = assemble(m, dirichlet({make_node({1.0, 0.0})}));
    ASSERT_EQ(dm.entries.rows(), 1);
    ASSERT_EQ(dm.entries.cols(), 1);
    EXPECT_NEAR(dm.entries(0, 0), -std::log(2.0) / (2 * std::numbers::pi), 1e-15);
    EXPECT_NEAR(dm.entries(0, 0), -0.1103178, 1e-7);
}

TEST(Assemble, Errors) {
    auto m = one_source_model({3.0, 0.0});
    const auto c = dirichlet({make_node({1.0, 0.0})});
    auto empty = m;
    empty.families.clear();
    EXPECT_THROW(assemble(empty, c), ValidationError);
    EXPECT_THROW(assemble(m, dirichlet({make_node({1.0, 0.0, 0.0})})), ValidationError);
    auto bad = m;
    bad.families = {{parse_kernel_id("fundamental:laplace:3d"), false}};
    EXPECT_THROW(assemble(bad, c), ValidationError);
    auto coincide = one_source_model({1.0, 0.0});
    EXPECT_THROW(assemble(coincide, c), SingularityError);
}

TEST(Assemble, RowKindsUseTheRightFunctional) {
    const auto m = one_source_model({3.0, 0.5});
    auto n = make_node({1.0, 0.2});
    n.has_normal = true;
    n.normal[0] = 0.6;
    n.normal[1] = 0.8;
    CollocationSet c;
    c.dim = 2;
    c.add(n, ConditionKind::Dirichlet, 0.0);
    c.add(n, ConditionKind::Neumann, 0.0);
    const auto dm = assemble(m, c);
    const auto& fam = m.families[0].kernel;
    const auto x = n.point();
    const auto s = m.sources.points[0].point();
    EXPECT_EQ(dm.entries(0, 0), eval_kernel(fam, x, s));
    const auto g = eval_kernel_gradient(fam, x, s);
    EXPECT_NEAR(dm.entries(1, 0), 0.6 * g[0] + 0.8 * g[1], 1e-9);
}

TEST(Assemble, TwoFamiliesDoubleTheColumns) {
    PikfnnModel m;
    m.dim = 3;
    m.families = {{parse_kernel_id("fundamental:mod-helmholtz:3d?k=1"), false},
                  {parse_kernel_id("fundamental:mod-helmholtz:3d?k=1.7320508075688772"), false}};
    const auto colloc = gen_boundary(Shape::sphere(1.0), 120);
    m.sources = gen_sources(Shape::sphere(1.0), SourcePlacement::scaled_sphere(3.0), 120);
    const auto dm = assemble(m, dirichlet(colloc));
    EXPECT_EQ(dm.entries.rows(), 120);
    EXPECT_EQ(dm.entries.cols(), 240);
    // Family-major: column 120 + j is the second family at source j.
    const auto x = colloc[5].point();
    EXPECT_EQ(dm.entries(5, 127), eval_kernel(m.families[1].kernel, x, m.sources.points[7].point()));
    EXPECT_EQ(dm.entries(5, 7), eval_kernel(m.families[0].kernel, x, m.sources.points[7].point()));
}

TEST(Assemble, IsDeterministic) {
    const auto m = circle_model("fundamental-real:helmholtz:2d?k=14.142135623730951", 80, 3.0);
    const auto c = dirichlet(gen_boundary(Shape::square(-1.0, 1.0), 80));
    const auto a = assemble(m, c);
    const auto b = assemble(m, c);
    EXPECT_EQ(std::memcmp(a.entries.data(), b.entries.data(), sizeof(double) * static_cast<std::size_t>(a.entries.size())), 0);
}

TEST(Forward, ExamplesAndLinearity) {
    auto m = one_source_model({0.0, 0.0});
    m.weights = Eigen::VectorXd::Constant(1, 2.0);
    const auto y = forward(m, {make_node({std::numbers::e, 0.0}).point()});
    EXPECT_NEAR(y(0), -1.0 / std::numbers::pi, 1e-15);
    EXPECT_NEAR(y(0), -0.3183099, 1e-7);

    auto cm = circle_model("fundamental:laplace:2d", 40, 2.5);
    std::vector<SpaceTimePoint> pts;
    for (const auto& n : sample_interior(Shape::circle(1.0), 30, 4)) {
        pts.push_back(n.point());
    }
    cm.weights = Eigen::VectorXd::Zero(40);
    EXPECT_EQ(forward(cm, pts).cwiseAbs().maxCoeff(), 0.0);
    cm.weights = random_weights(40, 1);
    const auto u1 = forward(cm, pts);
    cm.weights *= 2.0;
    const auto u2 = forward(cm, pts);
    EXPECT_EQ((u2 - 2.0 * u1).cwiseAbs().maxCoeff(), 0.0);

    auto unset = cm;
    unset.weights.resize(0);
    EXPECT_THROW(forward(unset, pts), ValidationError);
    auto at_source = cm;
    EXPECT_THROW(forward(at_source, {cm.sources.points[0].point()}), SingularityError);
}

TEST(Forward, MatchesMatrixPath) {
    auto m = circle_model("fundamental:mod-helmholtz:2d?k=2", 60, 3.0);
    const auto nodes = gen_boundary(Shape::circle(1.0), 90);
    const auto dm = assemble(m, dirichlet(nodes));
    m.weights = random_weights(60, 9);
    std::vector<SpaceTimePoint> pts;
    for (const auto& n : nodes) {
        pts.push_back(n.point());
    }
    const Eigen::VectorXd a = dm.entries * m.weights;
    const Eigen::VectorXd b = forward(m, pts);
    EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff()));
}

// Any weight vector gives a field that satisfies the homogeneous PDE.
TEST(Forward, FieldSatisfiesThePde) {
    for (const std::string id : {"fundamental:laplace:2d", "fundamental:mod-helmholtz:2d?k=2",
                                 "fundamental-real:helmholtz:2d?k=3"}) {
        auto m = circle_model(id, 30, 2.5);
        m.weights = random_weights(30, 3);
        const auto& k = m.families[0].kernel;
        ScalarField u = [&m](const SpaceTimePoint& q) { return forward(m, {q})(0); };
        for (const auto& n : sample_interior(Shape::circle(1.0), 20, 11)) {
            const auto p = n.point();
            const double lu = apply_operator_fd(k.op, u, p, 1e-3, FdOrder::Sixth);
            const double scale = std::max(1.0, std::abs(u(p)) * std::max(1.0, k.op.k * k.op.k));
            EXPECT_LE(std::abs(lu) / scale, 1e-5) << id;
        }
    }
}

TEST(Residual, Examples) {
    auto m = one_source_model({3.0, 0.0});
    DesignMatrix dm;
    dm.entries = Eigen::MatrixXd::Constant(1, 1, 2.0);
    dm.row_kind = {ConditionKind::Dirichlet};
    m.weights = Eigen::VectorXd::Constant(1, 1.0);
    EXPECT_EQ(residual(m, dm, Eigen::VectorXd::Constant(1, 4.0))(0), -2.0);
    m.weights(0) = 2.0;
    EXPECT_EQ(residual(m, dm, Eigen::VectorXd::Constant(1, 4.0))(0), 0.0);
    EXPECT_THROW(residual(m, dm, Eigen::VectorXd::Zero(2)), ValidationError);
}

TEST(Model, WriteReadRoundTrip) {
    auto m = circle_model("fundamental-real:helmholtz:2d?k=14.142135623730951", 25, 3.0);
    m.families.push_back({parse_kernel_id("fundamental:laplace:2d"), false});
    m.weights = random_weights(50, 17) * 1e-3;
    std::stringstream ss;
    write_model(ss, m);
    const auto back = read_model(ss);
    ASSERT_EQ(back.families.size(), 2u);
    EXPECT_EQ(kernel_id(back.families[0].kernel), kernel_id(m.families[0].kernel));
    ASSERT_EQ(back.weights.size(), m.weights.size());
    EXPECT_EQ(back.weights, m.weights);
    ASSERT_EQ(back.sources.size(), m.sources.size());
    for (std::size_t i = 0; i < m.sources.size(); ++i) {
        EXPECT_EQ(back.sources.points[i].x, m.sources.points[i].x);
    }
    const std::vector<SpaceTimePoint> probe = {make_node({0.3, -0.2}).point(), make_node({-0.7, 0.1}).point()};
    EXPECT_EQ(forward(back, probe), forward(m, probe));

    std::istringstream junk("# pikfnn model\ndim two\n");
    EXPECT_THROW(read_model(junk), ParseError);
}

TEST(Model, ComplexSplitDoublesWeights) {
    PikfnnModel m = circle_model("fundamental:helmholtz:2d?k=3", 20, 3.0);
    m.families[0].complex_split = true;
    EXPECT_EQ(m.neuron_count(), 40u);
    const auto dm = assemble(m, dirichlet(gen_boundary(Shape::circle(1.0), 30)));
    EXPECT_EQ(dm.entries.cols(), 40);
    auto bad = circle_model("fundamental:laplace:2d", 20, 3.0);
    bad.families[0].complex_split = true;
    EXPECT_THROW(bad.validate(), ValidationError);
}
