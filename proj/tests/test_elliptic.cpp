#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "cip/elliptic.hpp"
#include "cip/verify.hpp"

using namespace cip;

static GridSpec square(int cells) {
    const double h = 1.0 / cells;
    return GridSpec::make(2, {0, 0, 0}, {1, 1, 0}, h, {h, h, 0}, {1 - h, 1 - h, 0});
}

TEST_CASE("missing Dirichlet data is a configuration error") {
    EllipticProblem p;
    p.grid = square(8);
    p.on_omega = true;
    CHECK_THROWS_AS(solve_drift_dirichlet(p), config_error);
}

TEST_CASE("homogeneous problem returns the zero extension") {
    const GridSpec g = square(10);
    EllipticProblem p;
    p.grid = g;
    p.on_omega = true;
    for (auto idx : omega_boundary_nodes(g)) p.dirichlet[idx] = 0.0;
    const ScalarField q = solve_drift_dirichlet(p);
    for (double v : q.values) CHECK(v == 0.0);
}

TEST_CASE("manufactured solutions, exactness and convergence order") {
    const auto rep = verify_elliptic();
    for (const auto& c : rep) {
        INFO(c.name << ": measured " << c.measured << " vs " << c.threshold);
        CHECK(c.pass);
    }
}

TEST_CASE("Peclet guard warns or throws on strong drift") {
    const GridSpec g = square(10);
    EllipticProblem p;
    p.grid = g;
    p.on_omega = true;
    p.drift.assign(2, ScalarField(g, 100.0)); // |b| h / 2 = 5
    for (auto idx : omega_boundary_nodes(g)) p.dirichlet[idx] = 1.0;
    std::string warn;
    CHECK_NOTHROW(solve_drift_dirichlet(p, 1e-8, false, &warn));
    CHECK(warn.find("Peclet") != std::string::npos);
    CHECK_THROWS_AS(solve_drift_dirichlet(p, 1e-8, true), config_error);
}

TEST_CASE("first tail scales the harmonic extension by 1/sbar") {
    const GridSpec g = square(12);
    const auto bnodes = omega_boundary_nodes(g);
    std::vector<double> psi(bnodes.size());
    for (std::size_t i = 0; i < bnodes.size(); ++i) {
        const auto p = g.node_pos(bnodes[i]);
        psi[i] = 0.1 * p[0] + 0.05 * p[1];
    }
    const double sbar = 3.0;
    auto [p, V] = solve_first_tail(g, bnodes, psi, sbar);
    for (std::size_t i = 0; i < p.values.size(); ++i)
        CHECK(V[i] == Catch::Approx(p[i] / sbar).margin(1e-14));
    for (std::size_t i = 0; i < bnodes.size(); ++i)
        CHECK(p[bnodes[i]] == Catch::Approx(-sbar * sbar * psi[i]).margin(1e-12));
    CHECK_THROWS_AS(solve_first_tail(g, bnodes, std::vector<double>(2, 0.0), sbar),
                    config_error);
}

TEST_CASE("pseudo-frequency field: validation and positivity") {
    const GridSpec g = square(10);
    ScalarField c(g, 1.0);
    std::unordered_map<std::size_t, double> bc;
    std::array<int, 3> ijk;
    for (std::size_t idx = 0; idx < g.node_count(); ++idx) {
        g.unflatten(idx, ijk);
        if (g.on_g_boundary(ijk)) bc[idx] = 1.0;
    }
    CHECK_THROWS_AS(solve_pseudofreq_field(c, -1.0, bc), config_error);
    ScalarField bad(g, 0.5);
    CHECK_THROWS_AS(solve_pseudofreq_field(bad, 2.0, bc), config_error);

    const ScalarField w = solve_pseudofreq_field(c, 2.0, bc);
    for (double v : w.values) {
        CHECK(v > 0.0);
        CHECK(v <= 1.0 + 1e-12); // maximum principle: no interior max above the data
    }
}

TEST_CASE("3D fundamental-solution sandwich at reduced size") {
    const auto rep = verify_bounds(47); // the acceptance gate runs 64^3
    for (const auto& c : rep) {
        INFO(c.name << ": measured " << c.measured << " vs " << c.threshold);
        CHECK(c.pass);
    }
}
