#include <catch2/catch_amalgamated.hpp>

#include "ibm/grid.hpp"

using namespace ibm;

TEST_CASE("uniform limit: 4x4 grid") {
    Rect box{0.0, 1.0, 0.0, 1.0};
    const double r[4] = {1.0, 1.0, 1.0, 1.0};
    auto g = build_stretched_grid(box, box, 0.25, r);
    REQUIRE(g.nx == 4);
    REQUIRE(g.ny == 4);
    for (double w : g.dx) REQUIRE_THAT(w, Catch::Matchers::WithinRel(0.25, 1e-14));
    for (double w : g.dy) REQUIRE_THAT(w, Catch::Matchers::WithinRel(0.25, 1e-14));
}

TEST_CASE("unknown counts per variable") {
    Rect box{0.0, 1.0, 0.0, 1.0};
    const double r[4] = {1.0, 1.0, 1.0, 1.0};
    auto g2 = build_stretched_grid(box, box, 0.5, r);
    REQUIRE(g2.n_u() == 2);
    REQUIRE(g2.n_v() == 2);
    REQUIRE(g2.n_p() == 4);
}

TEST_CASE("cylinder-grid of the 30x30 domain with h 0.02 and ratio 1.02") {
    Rect dom{-15.0, 15.0, -15.0, 15.0};
    Rect uni{-0.54, 0.54, -0.54, 0.54};
    const double r[4] = {1.02, 1.02, 1.02, 1.02};
    auto g = build_stretched_grid(dom, uni, 0.02, r);
    REQUIRE(g.nx == 330);
    REQUIRE(g.ny == 330);
    REQUIRE(g.n_p() == 108900);

    SECTION("widths sum to the domain width") {
        double s = 0.0;
        for (double w : g.dx) s += w;
        REQUIRE_THAT(s, Catch::Matchers::WithinRel(30.0, 1e-10));
    }
    SECTION("uniform region spacing is exactly h") {
        for (int i = 0; i < g.nx; ++i) {
            const double xc = g.x_c[static_cast<size_t>(i)];
            if (xc > -0.54 && xc < 0.54)
                REQUIRE_THAT(g.dx[static_cast<size_t>(i)], Catch::Matchers::WithinRel(0.02, 1e-12));
        }
    }
    SECTION("stretched cells follow the ratio except the outermost") {
        // walk outward from the uniform region on the high side
        int i0 = g.cell_of_x(0.54 + 1e-9);
        for (int i = i0; i + 2 < g.nx; ++i) {
            const double ratio = g.dx[static_cast<size_t>(i) + 1] / g.dx[static_cast<size_t>(i)];
            REQUIRE_THAT(ratio, Catch::Matchers::WithinAbs(1.02, 1e-10));
        }
    }
    SECTION("faces exactly reach the boundary") {
        REQUIRE(g.x_faces.front() == -15.0);
        REQUIRE(g.x_faces.back() == 15.0);
    }
}

TEST_CASE("face coordinates rebuild from cumulative widths") {
    Rect dom{-2.0, 3.0, 0.0, 1.0};
    Rect uni{-0.5, 0.5, 0.25, 0.75};
    const double r[4] = {1.05, 1.1, 1.03, 1.2};
    auto g = build_stretched_grid(dom, uni, 0.05, r);
    double acc = g.x_faces.front();
    for (int i = 0; i < g.nx; ++i) {
        acc += g.dx[static_cast<size_t>(i)];
        REQUIRE_THAT(acc, Catch::Matchers::WithinAbs(g.x_faces[static_cast<size_t>(i) + 1], 1e-12 * 5.0));
    }
    for (int i = 0; i < g.nx; ++i) REQUIRE(g.dx[static_cast<size_t>(i)] > 0.0);
    for (int i = 0; i + 1 <= g.nx; ++i)
        REQUIRE(g.x_faces[static_cast<size_t>(i) + 1] > g.x_faces[static_cast<size_t>(i)]);
}

TEST_CASE("monotone refinement") {
    // Halving h doubles the uniform core; the geometric outer zones add cells
    // logarithmically (the 330/450 pair of cylinder grids behaves the same
    // way), so total counts grow strictly but less than 2x.
    Rect dom{-4.0, 4.0, -4.0, 4.0};
    Rect uni{-0.5, 0.5, -0.5, 0.5};
    const double r[4] = {1.02, 1.02, 1.02, 1.02};
    auto coarse = build_stretched_grid(dom, uni, 0.05, r);
    auto fine = build_stretched_grid(dom, uni, 0.025, r);
    REQUIRE(fine.nx > coarse.nx);
    REQUIRE(fine.ny > coarse.ny);
    auto count_uniform = [](const StaggeredGrid& g) {
        int n = 0;
        for (int i = 0; i < g.nx; ++i)
            if (g.x_c[static_cast<size_t>(i)] > g.uniform_region.x0 &&
                g.x_c[static_cast<size_t>(i)] < g.uniform_region.x1)
                ++n;
        return n;
    };
    REQUIRE(count_uniform(fine) == 2 * count_uniform(coarse));
}

TEST_CASE("uniform region snapping and rejection") {
    Rect dom{-2.0, 2.0, -2.0, 2.0};
    const double r[4] = {1.05, 1.05, 1.05, 1.05};
    SECTION("within half a cell: snapped outward") {
        Rect uni{-0.53, 0.53, -0.53, 0.53};   // 10.6 cells of 0.1: grows to 11
        auto g = build_stretched_grid(dom, uni, 0.1, r);
        // snapped region contains the request
        REQUIRE(g.uniform_region.x0 <= -0.53);
        REQUIRE(g.uniform_region.x1 >= 0.53);
        REQUIRE_THAT(g.uniform_region.width(), Catch::Matchers::WithinRel(1.1, 1e-12));
    }
    SECTION("outward growth beyond half a cell: rejected") {
        Rect uni{-0.51, 0.51, -0.51, 0.51};   // 10.2 cells: containing multiple is 0.8 cells away
        REQUIRE_THROWS_AS(build_stretched_grid(dom, uni, 0.1, r), std::invalid_argument);
    }
    SECTION("ratio below one rejected") {
        Rect uni{-0.5, 0.5, -0.5, 0.5};
        const double bad[4] = {0.9, 1.0, 1.0, 1.0};
        REQUIRE_THROWS_AS(build_stretched_grid(dom, uni, 0.1, bad), std::invalid_argument);
    }
    SECTION("uniform region outside the domain rejected") {
        Rect uni{-3.0, 0.5, -0.5, 0.5};
        REQUIRE_THROWS_AS(build_stretched_grid(dom, uni, 0.1, r), std::invalid_argument);
    }
}
