#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>

#include "cip/grid.hpp"

using namespace cip;

static GridSpec square(int cells) {
    const double h = 1.0 / cells;
    return GridSpec::make(2, {0, 0, 0}, {1, 1, 0}, h, {h, h, 0}, {1 - h, 1 - h, 0});
}

TEST_CASE("grid construction snaps node counts and Omega") {
    const GridSpec g = GridSpec::make(2, {-4, -1, 0}, {4, 4, 0}, 0.125,
                                      {-3.5, -0.5, 0}, {3.5, 3.5, 0});
    CHECK(g.n[0] == 65);
    CHECK(g.n[1] == 41);
    CHECK(g.h[0] == Catch::Approx(0.125));
    CHECK(g.coord(0, g.oi0[0]) == Catch::Approx(-3.5));
    CHECK(g.coord(1, g.oi1[1]) == Catch::Approx(3.5));

    // extent not a multiple of the target spacing: h is adjusted
    const GridSpec g3 = GridSpec::make(3, {-0.5, -1.08, -0.32}, {0.5, 1.08, 0.32}, 0.08,
                                       {-0.3, -1.0, -0.08}, {0.3, 1.0, 0.08});
    for (int a = 0; a < 3; ++a) {
        CHECK(g3.h[a] * (g3.n[a] - 1) == Catch::Approx(g3.hi[a] - g3.lo[a]));
        CHECK(g3.oi0[a] >= 1);
        CHECK(g3.oi1[a] <= g3.n[a] - 2);
    }
}

TEST_CASE("grid rejects Omega touching or leaving G") {
    CHECK_THROWS_AS(GridSpec::make(2, {0, 0, 0}, {1, 1, 0}, 0.1, {0.0, 0.1, 0}, {0.9, 0.9, 0}),
                    config_error);
    CHECK_THROWS_AS(GridSpec::make(2, {0, 0, 0}, {1, 1, 0}, 0.1, {0.1, 0.1, 0}, {1.5, 0.9, 0}),
                    config_error);
    CHECK_THROWS_AS(GridSpec::make(2, {0, 0, 0}, {0, 1, 0}, 0.1, {0.1, 0.1, 0}, {0.9, 0.9, 0}),
                    config_error);
}

TEST_CASE("index and unflatten are inverse") {
    const GridSpec g = GridSpec::make(3, {0, 0, 0}, {1, 2, 3}, 0.25,
                                      {0.25, 0.25, 0.25}, {0.75, 1.75, 2.75});
    std::array<int, 3> p;
    for (std::size_t idx = 0; idx < g.node_count(); idx += 7) {
        g.unflatten(idx, p);
        CHECK(g.index(p[0], p[1], p[2]) == idx);
    }
}

TEST_CASE("omega boundary enumeration counts") {
    const GridSpec g = square(10); // Omega index box [1,9]^2, 9x9 nodes
    CHECK(omega_boundary_nodes(g).size() == 4 * 9 - 4);
    CHECK(omega_face_nodes(g, 1, +1).size() == 9);
    const auto regions = omega_boundary_regions(g, 1, +1);
    REQUIRE(regions.size() == 2);
    CHECK(regions[0].tag == BoundaryTag::backscatter);
    CHECK(regions[0].nodes.size() + regions[1].nodes.size() == omega_boundary_nodes(g).size());
}

TEST_CASE("gradient is exact on linear fields") {
    const GridSpec g = square(16);
    ScalarField f(g);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        const auto p = g.node_pos(i);
        f[i] = 3.0 * p[0] - 2.0 * p[1] + 0.5;
    }
    const auto gr = gradient(f);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        CHECK(gr[0][i] == Catch::Approx(3.0).margin(1e-12));
        CHECK(gr[1][i] == Catch::Approx(-2.0).margin(1e-12));
    }
}

TEST_CASE("laplacian is exact on quadratics inside") {
    const GridSpec g = square(16);
    ScalarField f(g);
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        const auto p = g.node_pos(i);
        f[i] = p[0] * p[0] + 3.0 * p[1] * p[1];
    }
    const auto lap = laplacian(f);
    std::array<int, 3> ijk;
    for (std::size_t i = 0; i < g.node_count(); ++i) {
        g.unflatten(i, ijk);
        if (g.in_omega(ijk)) CHECK(lap[i] == Catch::Approx(8.0).margin(1e-10));
    }
}

TEST_CASE("L2 norm over Omega matches the continuum for constants") {
    const GridSpec g = square(20);
    ScalarField f(g, 2.0);
    const double area = (g.omega_hi(0) - g.omega_lo(0)) * (g.omega_hi(1) - g.omega_lo(1));
    CHECK(l2_norm_omega(f) == Catch::Approx(2.0 * std::sqrt(area)));
    CHECK_THROWS_AS(l2_relative_diff(ScalarField(g), f), numeric_error);
    CHECK(l2_relative_diff(f, f) == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("mollify preserves constants and damps spikes") {
    const GridSpec g = square(12);
    ScalarField f(g, 3.0);
    const ScalarField mc = mollify(f, 3);
    for (double v : mc.values) CHECK(v == Catch::Approx(3.0));

    ScalarField spike(g);
    spike.at(6, 6) = 1.0;
    const ScalarField ms = mollify(spike, 1);
    CHECK(ms.at(6, 6) == Catch::Approx(0.2));
    CHECK(ms.at(5, 6) == Catch::Approx(0.2));
    CHECK_THROWS_AS(mollify(spike, -1), config_error);
}

TEST_CASE("FLD1 round-trip") {
    const GridSpec g = square(8);
    ScalarField f(g);
    for (std::size_t i = 0; i < g.node_count(); ++i) f[i] = 0.1 * (double)i - 2.0;
    const auto path = (std::filesystem::temp_directory_path() / "cip_grid_rt.fld1").string();
    write_fld1(f, path);
    const ScalarField r = read_fld1(path);
    REQUIRE(r.grid.n == g.n);
    CHECK(r.grid.lo[0] == Catch::Approx(g.lo[0]));
    for (std::size_t i = 0; i < g.node_count(); ++i) CHECK(r[i] == f[i]);
    std::filesystem::remove(path);
    CHECK_THROWS_AS(read_fld1("/nonexistent/file.fld1"), config_error);
}
