#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "arw/topology.hpp"

using namespace arw;

TEST_CASE("line neighbors and packing") {
    Topology t = Topology::line();
    VertexId o = t.origin();
    CHECK(Topology::line_coord(o) == 0);
    auto n = t.neighbors(o);
    REQUIRE(n.size() == 2);
    CHECK(Topology::line_coord(n[0]) == -1);
    CHECK(Topology::line_coord(n[1]) == 1);
    CHECK(t.degree(o) == 2);
    // negative coordinates round-trip through the packing
    VertexId neg = Topology::line_vertex(-17);
    CHECK(Topology::line_coord(neg) == -17);
    CHECK(t.describe(neg) == "-17");
    CHECK(t.parse("-17") == neg);
}

TEST_CASE("grid neighbors in documented order") {
    Topology t = Topology::grid2d();
    VertexId v = Topology::grid_vertex(3, -2);
    auto n = t.neighbors(v);
    REQUIRE(n.size() == 4);
    CHECK(n[0] == Topology::grid_vertex(2, -2));
    CHECK(n[1] == Topology::grid_vertex(4, -2));
    CHECK(n[2] == Topology::grid_vertex(3, -3));
    CHECK(n[3] == Topology::grid_vertex(3, -1));
    CHECK(t.describe(v) == "3,-2");
    CHECK(t.parse("3,-2") == v);
}

TEST_CASE("regular tree structure") {
    Topology t = Topology::regular_tree(3);
    VertexId root = t.origin();
    CHECK(t.degree(root) == 3);
    auto rn = t.neighbors(root);
    REQUIRE(rn.size() == 3);
    for (VertexId c : rn) {
        auto cn = t.neighbors(c);
        REQUIRE(cn.size() == 3);
        CHECK(cn[0] == root);  // parent first
        for (std::size_t i = 1; i < cn.size(); ++i) {
            // neighbor relation is symmetric
            auto back = t.neighbors(cn[i]);
            CHECK(std::find(back.begin(), back.end(), c) != back.end());
        }
    }
    CHECK_FALSE(t.valid(VertexId{0}));
}

TEST_CASE("cycle and path boundary degrees") {
    Topology c = Topology::cycle(5);
    CHECK(c.degree(VertexId{0}) == 2);
    auto n0 = c.neighbors(VertexId{0});
    CHECK(n0[0] == VertexId{4});
    CHECK(n0[1] == VertexId{1});

    Topology p = Topology::path(4);
    CHECK(p.degree(VertexId{0}) == 1);
    CHECK(p.degree(VertexId{1}) == 2);
    CHECK(p.degree(VertexId{3}) == 1);
    CHECK(p.neighbors(VertexId{0}).size() == 1);
    CHECK_FALSE(p.valid(VertexId{4}));
    CHECK(p.parse("4") == std::nullopt);
}

TEST_CASE("ball sizes") {
    Topology line = Topology::line();
    CHECK(line.ball(line.origin(), 0).size() == 1);
    CHECK(line.ball(line.origin(), 3).size() == 7);

    Topology grid = Topology::grid2d();
    // |B_r| = 2r^2 + 2r + 1 on Z^2
    CHECK(grid.ball(grid.origin(), 2).size() == 13);

    Topology tree = Topology::regular_tree(3);
    // 1 + 3 + 6 = 10 vertices within distance 2
    auto b = tree.ball(tree.origin(), 2);
    CHECK(b.size() == 10);
    std::set<VertexId> uniq(b.begin(), b.end());
    CHECK(uniq.size() == b.size());
}

TEST_CASE("ball is BFS-ordered") {
    Topology t = Topology::line();
    auto b = t.ball(t.origin(), 2);
    REQUIRE(b.size() == 5);
    CHECK(Topology::line_coord(b[0]) == 0);
    CHECK(Topology::line_coord(b[1]) == -1);
    CHECK(Topology::line_coord(b[2]) == 1);
    CHECK(Topology::line_coord(b[3]) == -2);
    CHECK(Topology::line_coord(b[4]) == 2);
}

TEST_CASE("parse rejects malformed input") {
    Topology g = Topology::grid2d();
    CHECK(g.parse("12") == std::nullopt);
    CHECK(g.parse("a,b") == std::nullopt);
    CHECK(g.parse("1,2,3") == std::nullopt);
    Topology l = Topology::line();
    CHECK(l.parse("") == std::nullopt);
    CHECK(l.parse("3.5") == std::nullopt);
}
