#include <catch2/catch_amalgamated.hpp>

#include "cip/cwf.hpp"
#include "cip/verify.hpp"

using namespace cip;

TEST_CASE("cwf rejects out-of-range intervals and small lambda") {
    const auto sg = PseudoFreqGrid::make(2.0, 3.0, 0.05);
    CHECK_THROWS_AS(compute_cwf(0, sg, 100.0), config_error);
    CHECK_THROWS_AS(compute_cwf(sg.N + 1, sg, 100.0), config_error);
    CHECK_THROWS_AS(compute_cwf(1, sg, 10.0), config_error); // lambda h < 1
}

TEST_CASE("closed forms agree with independent quadrature") {
    for (double lambda : {20.0, 50.0, 200.0}) {
        const auto sg = PseudoFreqGrid::make(2.0, 3.0, 0.05);
        for (int n : {1, 7, sg.N}) {
            const auto cf = compute_cwf(n, sg, lambda);
            const auto cq = compute_cwf_quadrature(n, sg, lambda);
            CHECK(cf.A1 == Catch::Approx(cq.A1).margin(1e-10));
            CHECK(cf.A2 == Catch::Approx(cq.A2).margin(1e-10));
            CHECK(cf.I1_over_I0 == Catch::Approx(cq.I1_over_I0).margin(1e-10));
        }
    }
    // a wide interval too (3D belt settings)
    const auto sgw = PseudoFreqGrid::make(4.0, 11.0, 1.0);
    const auto cf = compute_cwf(3, sgw, 2.0);
    const auto cq = compute_cwf_quadrature(3, sgw, 2.0);
    CHECK(cf.A1 == Catch::Approx(cq.A1).margin(1e-9));
    CHECK(cf.A2 == Catch::Approx(cq.A2).margin(1e-9));
    CHECK(cf.I1_over_I0 == Catch::Approx(cq.I1_over_I0).margin(1e-9));
}

TEST_CASE("randomized bounds and limits") {
    const auto rep = verify_cwf();
    for (const auto& c : rep) {
        INFO(c.name << ": measured " << c.measured << " vs " << c.threshold);
        CHECK(c.pass);
    }
}

TEST_CASE("coefficients degenerate correctly on a collapsing interval") {
    // with h -> 0 the weighted averages approach the endpoint values:
    // A2 -> 2 s_{n-1}, A1 -> 2 s_{n-1}^2, I1/I0 -> 0
    const double sp = 3.0;
    for (double h : {1e-3, 1e-4}) {
        const auto sg = PseudoFreqGrid::make(sp - h, sp, h);
        const auto c = compute_cwf(1, sg, 2.0 / h);
        CHECK(c.A2 == Catch::Approx(2.0 * sp).epsilon(1e-2));
        CHECK(c.A1 == Catch::Approx(2.0 * sp * sp).epsilon(1e-2));
        CHECK(std::abs(c.I1_over_I0) < 10.0 * h);
    }
}
