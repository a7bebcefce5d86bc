#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "pikfnn/geometry.hpp"
#include "pikfnn/node_io.hpp"

using namespace pikfnn;

namespace {

double norm(const Node& n) {
    double s = 0.0;
    for (int d = 0; d < n.dim; ++d) {
        s += n.x[static_cast<std::size_t>(d)] * n.x[static_cast<std::size_t>(d)];
    }
    return std::sqrt(s);
}

double normal_norm(const Node& n) {
    double s = 0.0;
    for (int d = 0; d < n.dim; ++d) {
        s += n.normal[static_cast<std::size_t>(d)] * n.normal[static_cast<std::size_t>(d)];
    }
    return std::sqrt(s);
}

// The node moved by h along its normal.
Node shifted(Node n, double h) {
    for (int d = 0; d < n.dim; ++d) {
        n.x[static_cast<std::size_t>(d)] += h * n.normal[static_cast<std::size_t>(d)];
    }
    return n;
}

} // namespace

TEST(Boundary, CircleFourNodes) {
    const auto b = gen_boundary(Shape::circle(1.0), 4);
    ASSERT_EQ(b.size(), 4u);
    const double expect[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (int i = 0; i < 4; ++i) {
        EXPECT_NEAR(b[static_cast<std::size_t>(i)].x[0], expect[i][0], 1e-15);
        EXPECT_NEAR(b[static_cast<std::size_t>(i)].x[1], expect[i][1], 1e-15);
        EXPECT_TRUE(b[static_cast<std::size_t>(i)].has_normal);
        EXPECT_NEAR(b[static_cast<std::size_t>(i)].normal[0], expect[i][0], 1e-15);
        EXPECT_NEAR(b[static_cast<std::size_t>(i)].normal[1], expect[i][1], 1e-15);
    }
}

TEST(Boundary, SquareEdgesAreCornerExclusive) {
    const auto b = gen_boundary(Shape::square(-1.0, 1.0), 80);
    ASSERT_EQ(b.size(), 80u);
    int bottom = 0, right = 0, top = 0, left = 0;
    for (const auto& n : b) {
        const bool corner = std::abs(std::abs(n.x[0]) - 1.0) < 1e-14 && std::abs(std::abs(n.x[1]) - 1.0) < 1e-14;
        EXPECT_FALSE(corner);
        EXPECT_NEAR(normal_norm(n), 1.0, 1e-15);
        bottom += std::abs(n.x[1] + 1.0) < 1e-14;
        top += std::abs(n.x[1] - 1.0) < 1e-14;
        left += std::abs(n.x[0] + 1.0) < 1e-14;
        right += std::abs(n.x[0] - 1.0) < 1e-14;
    }
    EXPECT_EQ(bottom, 20);
    EXPECT_EQ(right, 20);
    EXPECT_EQ(top, 20);
    EXPECT_EQ(left, 20);
}

TEST(Boundary, SpherePoles) {
    const auto b = gen_boundary(Shape::sphere(1.0), 2);
    ASSERT_EQ(b.size(), 2u);
    EXPECT_NEAR(std::abs(b[0].x[2]), 1.0, 1e-15);
    EXPECT_NEAR(b[0].x[2], -b[1].x[2], 1e-15);
    EXPECT_NEAR(b[0].x[0], 0.0, 1e-15);
    EXPECT_NEAR(b[1].x[1], 0.0, 1e-15);
}

// Every generator puts its nodes on the surface with unit outward normals.
TEST(Boundary, NodesOnSurfaceWithUnitNormals) {
    for (const auto& b : {gen_boundary(Shape::sphere(2.0), 300), gen_boundary(Shape::hypersphere4(1.5), 200)}) {
        for (const auto& n : b) {
            EXPECT_NEAR(norm(n), n.dim == 3 ? 2.0 : 1.5, 1e-13);
            EXPECT_NEAR(normal_norm(n), 1.0, 1e-13);
            double dot = 0.0;
            for (int d = 0; d < n.dim; ++d) {
                dot += n.x[static_cast<std::size_t>(d)] * n.normal[static_cast<std::size_t>(d)];
            }
            EXPECT_GT(dot, 0.0);
        }
    }
    const auto torus = Shape::torus(1.0, 0.35, {1.2, 0.0, 0.8});
    for (const auto& n : gen_boundary(torus, 200)) {
        const double rho = std::hypot(n.x[0] - 1.2, n.x[1]);
        EXPECT_NEAR(std::hypot(rho - 1.0, n.x[2] - 0.8), 0.35, 1e-13);
        EXPECT_NEAR(normal_norm(n), 1.0, 1e-13);
        // A step along the outward normal leaves the solid.
        EXPECT_FALSE(torus.contains(shifted(n, 1e-3).coords()));
        EXPECT_TRUE(torus.contains(shifted(n, -1e-3).coords()));
    }
    const auto L = Shape::lshape(1.0);
    for (const auto& n : gen_boundary(L, 120)) {
        EXPECT_TRUE(L.contains(shifted(n, -1e-4).coords()));
        EXPECT_FALSE(L.contains(shifted(n, 1e-4).coords()));
    }
}

TEST(Boundary, PolygonOrientationIsNormalized) {
    const auto cw = Shape::polygon({{0, 0}, {0, 1}, {1, 1}, {1, 0}});
    for (const auto& n : gen_boundary(cw, 40)) {
        EXPECT_FALSE(cw.contains(shifted(n, 1e-6).coords()));
    }
    EXPECT_THROW(Shape::polygon({{0, 0}, {1, 1}}), ValidationError);
    EXPECT_THROW(cw.contains(make_node({0.5, 0.5, 0.5}).coords()), ValidationError);
}

TEST(Interior, GridAndSamplesInsideShape) {
    const auto L = Shape::lshape(1.0);
    const auto g = gen_interior_grid(L, 300);
    EXPECT_GT(g.size(), 200u);
    EXPECT_LT(g.size(), 400u);
    for (const auto& n : g) {
        EXPECT_TRUE(L.contains(n.coords()));
        EXPECT_FALSE(n.x[0] > 0.0 && n.x[1] > 0.0);
    }
    const auto s = sample_interior(Shape::sphere(1.0), 50, 3);
    EXPECT_EQ(s.size(), 50u);
    for (const auto& n : s) {
        EXPECT_LT(norm(n), 1.0);
    }
    EXPECT_EQ(sample_interior(Shape::sphere(1.0), 50, 3)[7].x, s[7].x);
}

TEST(Sources, ScaledCircleAndCavity) {
    const auto shape = Shape::circle(1.0);
    const auto colloc = gen_boundary(shape, 400);
    const auto s = gen_sources(shape, SourcePlacement::scaled_circle(3.0), 400, colloc);
    ASSERT_EQ(s.points.size(), 400u);
    for (const auto& p : s.points) {
        EXPECT_NEAR(norm(p), 3.0, 1e-14);
        EXPECT_FALSE(p.has_normal);
    }
    const auto cav = gen_sources(shape, SourcePlacement::scaled_circle(0.5), 1600, colloc);
    ASSERT_EQ(cav.points.size(), 1600u);
    for (const auto& p : cav.points) {
        EXPECT_NEAR(norm(p), 0.5, 1e-14);
    }
}

TEST(Sources, CoincidentSourcesAreRejected) {
    const auto shape = Shape::circle(1.0);
    const auto colloc = gen_boundary(shape, 16);
    EXPECT_THROW(gen_sources(shape, SourcePlacement::scaled_circle(1.0), 16, colloc), ValidationError);
    EXPECT_THROW(gen_sources(shape, SourcePlacement::scaled_circle(2.0), 0), DomainError);
    EXPECT_THROW(gen_sources(shape, SourcePlacement::scaled_sphere(2.0), 10), DomainError);
}

TEST(Sources, InflatedSquare) {
    const auto shape = Shape::square(-1.0, 1.0);
    const auto s = gen_sources(shape, SourcePlacement::inflated(1.5), 80, gen_boundary(shape, 80));
    for (const auto& p : s.points) {
        EXPECT_NEAR(std::max(std::abs(p.x[0]), std::abs(p.x[1])), 1.5, 1e-14);
    }
}

TEST(Sources, DelayedKeepSpaceAndShiftTime) {
    std::vector<Node> nodes;
    for (int i = 0; i < 100; ++i) {
        auto n = make_node({0.01 * i, 1.0 - 0.01 * i});
        n.has_t = true;
        n.t = 20.0 * (i % 5 + 1);
        nodes.push_back(n);
    }
    const auto s = gen_delayed_sources(nodes, 200.0);
    ASSERT_EQ(s.points.size(), 100u);
    EXPECT_EQ(s.delay_dt, 200.0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        EXPECT_EQ(s.points[i].x, nodes[i].x);
        EXPECT_EQ(s.points[i].t, nodes[i].t - 200.0);
        EXPECT_LT(s.points[i].t, 0.0);
    }
    EXPECT_THROW(gen_delayed_sources(nodes, 0.0), DomainError);
}

TEST(SpaceTime, RowCounts) {
    const auto b998 = gen_boundary(Shape::torus(), 998);
    const auto init = gen_interior_grid(Shape::torus(), 1279);
    std::vector<Node> i1279(init.begin(), init.begin() + std::min<std::size_t>(init.size(), 1279));
    while (i1279.size() < 1279) {
        i1279.push_back(b998[i1279.size() % b998.size()]);
    }
    const auto g = gen_spacetime_grid(b998, {20, 40, 60, 80, 100}, i1279);
    EXPECT_EQ(g.count(ConditionKind::Dirichlet), 4990u);
    EXPECT_EQ(g.count(ConditionKind::Initial), 1279u);

    const auto one = gen_spacetime_grid({make_node({0.5, 0.5})}, {1.0}, {make_node({0.5, 0.5})});
    EXPECT_EQ(one.count(ConditionKind::Dirichlet), 1u);
    EXPECT_EQ(one.count(ConditionKind::Initial), 1u);

    const auto ten = gen_spacetime_grid(gen_boundary(Shape::circle(1.0), 10), {20, 40}, {});
    EXPECT_EQ(ten.size(), 20u);
    EXPECT_EQ(ten.nodes[10].t, 40.0);
    EXPECT_THROW(gen_spacetime_grid(b998, {}, {}), DomainError);
    EXPECT_THROW(gen_spacetime_grid(b998, {2.0, 1.0}, {}), DomainError);
}

TEST(NodeFiles, RoundTripIsBitExact) {
    CollocationSet set;
    set.dim = 3;
    for (const auto& n : gen_boundary(Shape::sphere(1.3), 25)) {
        set.add(n, ConditionKind::Dirichlet, std::exp(n.x[0]) / 3.0);
        set.add(n, ConditionKind::Neumann, std::sin(n.x[1]) * 1e-7);
    }
    std::stringstream ss;
    write_nodes(ss, set);
    const auto back = read_nodes(ss);
    ASSERT_EQ(back.size(), set.size());
    EXPECT_EQ(back.count(ConditionKind::Neumann), 25u);
    for (std::size_t i = 0; i < set.size(); ++i) {
        EXPECT_EQ(back.nodes[i].x, set.nodes[i].x);
        EXPECT_EQ(back.nodes[i].normal, set.nodes[i].normal);
        EXPECT_EQ(back.values[i], set.values[i]);
        EXPECT_EQ(back.kinds[i], set.kinds[i]);
    }
}

TEST(NodeFiles, ThreeDirichletNodes) {
    std::istringstream in("# dim=2 time=0 normals=0 kind_col=0\n0,0,1\n1,0,2\n\n0,1,3\n");
    const auto s = read_nodes(in);
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s.count(ConditionKind::Dirichlet), 3u);
    EXPECT_EQ(s.values[2], 3.0);
}

TEST(NodeFiles, CauchyFileGivesTwoRowsPerLocation) {
    std::ostringstream out;
    out.precision(17);
    out << "# dim=2 time=0 normals=1 kind_col=1\n";
    const int N = 6;
    for (int i = 0; i < N; ++i) {
        const double a = 2 * std::numbers::pi * i / N;
        for (char k : {'D', 'N'}) {
            out << std::cos(a) << ',' << std::sin(a) << ',' << std::cos(a) << ',' << std::sin(a) << ',' << k << ",1\n";
        }
    }
    std::istringstream in(out.str());
    const auto s = read_nodes(in);
    EXPECT_EQ(s.size(), 2u * N);
    EXPECT_EQ(s.count(ConditionKind::Neumann), static_cast<std::size_t>(N));
}

TEST(NodeFiles, Errors) {
    auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return read_nodes(in);
    };
    EXPECT_THROW(parse("# dim=2 time=0 normals=1 kind_col=0\n0,0,0,0,1\n"), ValidationError);
    EXPECT_THROW(parse("0,0,1\n"), ParseError);
    EXPECT_THROW(parse("# dim=2\n0,abc,1\n"), ParseError);
    EXPECT_THROW(parse("# dim=2\n0,0\n"), ParseError);
    EXPECT_THROW(parse("# dim=7\n"), ParseError);
    EXPECT_THROW(parse("# dim=2 kind_col=1\n0,0,Q,1\n"), ParseError);
    EXPECT_THROW(parse("# dim=2 kind_col=1\n0,0,N,1\n"), ValidationError);
    try {
        parse("# dim=2\n0,0,1\n0,x,1\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3);
    }
    EXPECT_THROW(load_nodes("/nonexistent/file.txt"), ValidationError);
}
