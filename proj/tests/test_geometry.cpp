#include "doctest.h"

#include <cmath>
#include <set>

#include "pmaflow/geometry.hpp"

using namespace pmaflow;

namespace {

int32_t node_at(const Grid& g, double x, double y) {
    for (std::size_t p = 0; p < g.n_interior(); ++p) {
        if (std::abs(g.interior[p].x - x) < 1e-12 && std::abs(g.interior[p].y - y) < 1e-12)
            return int32_t(p);
    }
    return -1;
}

}  // namespace

TEST_CASE("unit disk node counts at the reference spacings") {
    const Domain disk = make_disk({0.0, 0.0}, 1.0);
    CHECK(build_grid(disk, 0.5)->n_interior() == 9);
    CHECK(build_grid(disk, 0.125)->n_interior() == 193);
    CHECK(build_grid(disk, 0.125)->n_boundary() == 144);
}

TEST_CASE("too-coarse lattice has no interior nodes") {
    const Domain disk = make_disk({0.0, 0.0}, 1.0);
    CHECK_THROWS_AS(build_grid(disk, 3.0), EmptyGrid);
}

TEST_CASE("arms shorten exactly at the circle") {
    const Domain disk = make_disk({0.0, 0.0}, 1.0);
    const auto g = build_grid(disk, 0.5);

    const int32_t p_edge = node_at(*g, 0.5, 0.0);
    REQUIRE(p_edge >= 0);
    const Arm& ax = g->arms[p_edge][0];  // +x
    CHECK(ax.to_boundary == 1);
    CHECK(ax.len == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(g->boundary[ax.target].x == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(g->boundary[ax.target].y == doctest::Approx(0.0).epsilon(1e-14));

    const int32_t p_corner = node_at(*g, 0.5, 0.5);
    REQUIRE(p_corner >= 0);
    const Arm& cx = g->arms[p_corner][0];
    CHECK(cx.to_boundary == 1);
    CHECK(cx.len == doctest::Approx(std::sqrt(0.75) - 0.5).epsilon(1e-14));

    // The center keeps full arms in all eight directions.
    const int32_t p_center = node_at(*g, 0.0, 0.0);
    REQUIRE(p_center >= 0);
    CHECK(g->has_cut[p_center] == 0);
    for (int k = 0; k < 8; ++k) {
        CHECK(g->arms[p_center][k].to_boundary == 0);
        CHECK(g->arms[p_center][k].len == doctest::Approx(g->full_len(k)).epsilon(1e-14));
    }
    CHECK(g->has_cut[p_edge] == 1);
}

TEST_CASE("opposite arm directions pair up") {
    const auto g = build_grid(make_disk({0.0, 0.0}, 1.0), 0.25);
    for (int k = 0; k < 8; ++k) {
        const Vec2 d = g->dir(k);
        const Vec2 o = g->dir(k ^ 1);
        CHECK(d.x == doctest::Approx(-o.x).epsilon(1e-15));
        CHECK(d.y == doctest::Approx(-o.y).epsilon(1e-15));
        CHECK(d.norm() == doctest::Approx(1.0).epsilon(1e-15));
    }
    // Full arms land on the neighbor found through the index map.
    for (std::size_t p = 0; p < g->n_interior(); ++p) {
        for (int k = 0; k < 8; ++k) {
            const Arm& a = g->arms[p][k];
            if (a.to_boundary) continue;
            const auto [i, j] = g->ij[p];
            const int32_t q = g->find(i + Grid::kDirSteps[k][0], j + Grid::kDirSteps[k][1]);
            CHECK(q == a.target);
        }
    }
}

TEST_CASE("boundary nodes are deduplicated") {
    const auto g = build_grid(make_disk({0.0, 0.0}, 1.0), 0.25);
    std::set<std::pair<double, double>> seen;
    for (const Vec2& b : g->boundary) {
        CHECK(std::abs(b.norm() - 1.0) < 1e-12);
        CHECK(seen.insert({b.x, b.y}).second);
    }
}

TEST_CASE("ellipse geometry") {
    // x^2 + 4 y^2 = 1: semi-axes 1 and 1/2.
    const Domain ell = make_ellipse({0.0, 0.0}, Sym2{1.0, 0.0, 4.0});
    CHECK(boundary_distance(ell, {0.0, 0.0}) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ell.contains({0.9, 0.0}));
    CHECK(!ell.contains({0.0, 0.6}));

    const auto bbox = domain_bbox(ell);
    CHECK(bbox[0].x == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(bbox[0].y == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(bbox[1].x == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(bbox[1].y == doctest::Approx(0.5).epsilon(1e-12));

    CHECK(ray_exit_length(ell, {0.0, 0.0}, {1.0, 0.0}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ray_exit_length(ell, {0.0, 0.0}, {0.0, 1.0}) == doctest::Approx(0.5).epsilon(1e-12));

    CHECK_THROWS_AS(make_ellipse({0.0, 0.0}, Sym2{1.0, 3.0, 1.0}), NonConvexDomain);
}

TEST_CASE("disk distance and projection") {
    const Domain disk = make_disk({1.0, 2.0}, 2.0);
    CHECK(boundary_distance(disk, {1.0, 2.0}) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(boundary_distance(disk, {2.0, 2.0}) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(boundary_distance(disk, {5.0, 2.0}), OutsideDomain);

    const Vec2 p = project_boundary(disk, {2.0, 2.0});
    CHECK(p.x == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(p.y == doctest::Approx(2.0).epsilon(1e-14));

    const Vec2 bp = disk.boundary_point(0.0);
    CHECK(bp.x == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(bp.y == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("grid function reads both node classes through arms") {
    const auto g = build_grid(make_disk({0.0, 0.0}, 1.0), 0.5);
    GridFunction u(g);
    for (std::size_t p = 0; p < g->n_interior(); ++p) u.vi[p] = g->interior[p].x;
    for (std::size_t b = 0; b < g->n_boundary(); ++b) u.vb[b] = g->boundary[b].x;

    const int32_t p_edge = node_at(*g, 0.5, 0.0);
    const Arm& cut = g->arms[p_edge][0];
    CHECK(u.at_arm(cut) == doctest::Approx(1.0).epsilon(1e-14));
    const Arm& full = g->arms[p_edge][1];  // -x points back inside
    CHECK(full.to_boundary == 0);
    CHECK(u.at_arm(full) == doctest::Approx(0.0).epsilon(1e-14));
}
