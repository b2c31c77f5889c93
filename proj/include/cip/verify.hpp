#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "cip/cwf.hpp"
#include "cip/elliptic.hpp"
#include "cip/grid.hpp"
#include "cip/laplace.hpp"
#include "cip/recon.hpp"
#include "cip/scenario.hpp"
#include "cip/wave.hpp"

namespace cip {

struct CheckResult {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double threshold = 0.0;
};

using Report = std::vector<CheckResult>;

inline bool all_pass(const Report& r) {
    for (const auto& c : r)
        if (!c.pass) return false;
    return true;
}

namespace checks {

inline void add(Report& r, const std::string& name, double measured, double threshold,
                bool below = true) {
    r.push_back({name, below ? measured <= threshold : measured >= threshold,
                 measured, threshold});
}

} // namespace checks

// --- CWF coefficient bounds and limits --------------------------------------

inline Report verify_cwf(int samples = 1000, std::uint64_t seed = 7) {
    Report rep;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uh(0.01, 1.0), us(0.5, 3.0), ul(1.0, 100.0);
    std::uniform_int_distribution<int> uN(1, 20);
    int bound_fail = 0;
    for (int t = 0; t < samples; ++t) {
        const double h = uh(rng);
        const int N = uN(rng);
        const double smin = us(rng);
        const auto sg = PseudoFreqGrid::make(smin, smin + N * h, h);
        const double lambda = ul(rng) / h; // lambda*h in [1, 100]
        std::uniform_int_distribution<int> un(1, N);
        const auto c = compute_cwf(un(rng), sg, lambda);
        const double sbar2 = sg.s_max * sg.s_max;
        if (std::abs(c.A1) + std::abs(c.A2) > 8.0 * sbar2) ++bound_fail;
        if (std::abs(c.I1_over_I0) > 4.0 * sbar2 / lambda) ++bound_fail;
    }
    checks::add(rep, "cwf randomized bound violations", bound_fail, 0);

    // lambda -> inf limits by Richardson extrapolation in 1/lambda
    const auto sg = PseudoFreqGrid::make(2.0, 3.0, 0.05);
    const int n = 1;
    const double sp = sg.s(n - 1);
    const double l1 = 1e3, l2 = 1e4;
    const auto c1 = compute_cwf(n, sg, l1), c2 = compute_cwf(n, sg, l2);
    auto extrap = [&](double v1, double v2) { return (l2 * v2 - l1 * v1) / (l2 - l1); };
    checks::add(rep, "cwf A1 limit 2 s_{n-1}^2",
                std::abs(extrap(c1.A1, c2.A1) - 2.0 * sp * sp) / (2.0 * sp * sp), 1e-3);
    checks::add(rep, "cwf A2 limit 2 s_{n-1}",
                std::abs(extrap(c1.A2, c2.A2) - 2.0 * sp) / (2.0 * sp), 1e-3);
    checks::add(rep, "cwf I1/I0 limit 0", std::abs(extrap(c1.I1_over_I0, c2.I1_over_I0)), 1e-3);

    // closed form vs independent quadrature
    const auto cf = compute_cwf(3, sg, 20.0);
    const auto cq = compute_cwf_quadrature(3, sg, 20.0);
    const double dmax = std::max({std::abs(cf.A1 - cq.A1), std::abs(cf.A2 - cq.A2),
                                  std::abs(cf.I1_over_I0 - cq.I1_over_I0)});
    checks::add(rep, "cwf closed form vs quadrature", dmax, 1e-10);

    // |I1/I0| decreasing in lambda
    double prev = std::abs(compute_cwf(1, sg, 20.0).I1_over_I0);
    bool mono = true;
    for (double l : {40.0, 80.0, 160.0, 320.0}) {
        const double cur = std::abs(compute_cwf(1, sg, l).I1_over_I0);
        if (cur > prev) mono = false;
        prev = cur;
    }
    checks::add(rep, "cwf |I1/I0| monotone in lambda", mono ? 0 : 1, 0);
    return rep;
}

// --- Laplace transform analytic pairs ---------------------------------------

inline Report verify_transform() {
    Report rep;
    const double T = 25.0, tau = 1e-4, s = 2.0;
    const int nsteps = (int)std::lround(T / tau) + 1;
    TimeTrace tr;
    tr.nodes = {0, 1};
    tr.coords = {{0, 0, 0}, {0, 0, 0}};
    tr.tau = tau;
    tr.T = T;
    tr.nsteps = nsteps;
    tr.samples.resize(2 * (std::size_t)nsteps);
    for (int j = 0; j < nsteps; ++j) {
        const double t = j * tau;
        tr.sample(0, j) = std::exp(-t);
        tr.sample(1, j) = 1.0;
    }
    const auto w = laplace_transform(tr, s);
    checks::add(rep, "transform of exp(-t) vs 1/(s+1)", std::abs(w[0] - 1.0 / (s + 1.0)), 1e-8);
    checks::add(rep, "transform of 1 vs (1-e^{-sT})/s",
                std::abs(w[1] - (1.0 - std::exp(-s * T)) / s), 1e-8);
    const auto dw = laplace_transform_ds(tr, s);
    checks::add(rep, "ds-transform of exp(-t) vs -1/(s+1)^2",
                std::abs(dw[0] + 1.0 / ((s + 1.0) * (s + 1.0))), 1e-8);

    // central-difference consistency, second order in delta
    auto err_at = [&](double delta) {
        const auto wp = laplace_transform(tr, s + delta);
        const auto wm = laplace_transform(tr, s - delta);
        return std::abs((wp[0] - wm[0]) / (2.0 * delta) - dw[0]);
    };
    const double e1 = err_at(2e-2), e2 = err_at(1e-2);
    checks::add(rep, "ds-transform central-difference order", e1 / e2, 3.2, false);
    return rep;
}

// --- Elliptic solves: exactness, max principle, convergence order -----------

namespace detail {

inline GridSpec unit_square_grid(int cells) {
    return GridSpec::make(2, {0, 0, 0}, {1, 1, 0}, 1.0 / cells,
                          {1.0 / cells, 1.0 / cells, 0},
                          {1.0 - 1.0 / cells, 1.0 - 1.0 / cells, 0});
}

/// Relative L2(Omega) error of the drift solve against a manufactured
/// q* = sin(x) cos(y) with b = (1, -1).
inline double manufactured_drift_error(int cells) {
    const GridSpec g = unit_square_grid(cells);
    ScalarField exact(g);
    EllipticProblem p;
    p.grid = g;
    p.on_omega = true;
    p.drift.assign(2, ScalarField(g));
    p.rhs = ScalarField(g);
    for (std::size_t idx = 0; idx < g.node_count(); ++idx) {
        const auto pos = g.node_pos(idx);
        const double x = pos[0], y = pos[1];
        exact[idx] = std::sin(x) * std::cos(y);
        p.drift[0][idx] = 1.0;
        p.drift[1][idx] = -1.0;
        // f = Lap q* + b . grad q*
        p.rhs[idx] = -2.0 * std::sin(x) * std::cos(y) + std::cos(x) * std::cos(y) +
                     std::sin(x) * std::sin(y);
    }
    for (auto bidx : omega_boundary_nodes(g)) p.dirichlet[bidx] = exact[bidx];
    const ScalarField q = solve_drift_dirichlet(p, 1e-12);
    return l2_relative_diff(exact, q);
}

/// Error of the zeroth-order (pseudo-frequency type) solve against
/// w* = 2 + sin(x) sinh(y), c manufactured from the residual.
inline double manufactured_helmholtz_error(int cells, double s) {
    const GridSpec g = unit_square_grid(cells);
    ScalarField exact(g);
    EllipticProblem p;
    p.grid = g;
    p.on_omega = false;
    p.rhs = ScalarField(g);
    p.zeroth = ScalarField(g);
    for (std::size_t idx = 0; idx < g.node_count(); ++idx) {
        const auto pos = g.node_pos(idx);
        const double x = pos[0], y = pos[1];
        exact[idx] = 2.0 + std::sin(x) * std::sinh(y);
        p.zeroth[idx] = s * s;
        p.rhs[idx] = -s * s * exact[idx]; // Lap w* = 0
    }
    std::array<int, 3> q;
    for (std::size_t idx = 0; idx < g.node_count(); ++idx) {
        g.unflatten(idx, q);
        if (g.on_g_boundary(q)) p.dirichlet[idx] = exact[idx];
    }
    const ScalarField w = solve_drift_dirichlet(p, 1e-12);
    ScalarField diff = w;
    for (std::size_t i = 0; i < diff.values.size(); ++i) diff.values[i] -= exact.values[i];
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < diff.values.size(); ++i) {
        num += diff.values[i] * diff.values[i];
        den += exact.values[i] * exact.values[i];
    }
    return std::sqrt(num / den);
}

} // namespace detail

inline Report verify_elliptic() {
    Report rep;

    // discrete-harmonic exactness: x^2 - y^2 boundary data reproduced
    {
        const GridSpec g = detail::unit_square_grid(24);
        ScalarField exact(g);
        for (std::size_t idx = 0; idx < g.node_count(); ++idx) {
            const auto pos = g.node_pos(idx);
            exact[idx] = pos[0] * pos[0] - pos[1] * pos[1];
        }
        EllipticProblem p;
        p.grid = g;
        p.on_omega = true;
        for (auto bidx : omega_boundary_nodes(g)) p.dirichlet[bidx] = exact[bidx];
        const ScalarField q = solve_drift_dirichlet(p, 1e-13);
        double mx = 0.0;
        for (std::size_t i = 0; i < q.values.size(); ++i) {
            std::array<int, 3> ijk;
            g.unflatten(i, ijk);
            if (g.in_omega(ijk)) mx = std::max(mx, std::abs(q[i] - exact[i]));
        }
        checks::add(rep, "elliptic harmonic exactness (x^2 - y^2)", mx, 1e-9);
    }

    // discrete maximum principle
    {
        const GridSpec g = detail::unit_square_grid(20);
        EllipticProblem p;
        p.grid = g;
        p.on_omega = true;
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> uni(0.0, 2.0);
        for (auto bidx : omega_boundary_nodes(g)) p.dirichlet[bidx] = uni(rng);
        const ScalarField q = solve_drift_dirichlet(p, 1e-12);
        double mn = 1e300;
        std::array<int, 3> ijk;
        for (std::size_t i = 0; i < q.values.size(); ++i) {
            g.unflatten(i, ijk);
            if (g.in_omega_interior(ijk)) mn = std::min(mn, q[i]);
        }
        checks::add(rep, "elliptic maximum principle (interior min)", -mn, 1e-10);
    }

    // measured convergence order on a refinement pair, drift solve
    {
        const double e1 = detail::manufactured_drift_error(16);
        const double e2 = detail::manufactured_drift_error(32);
        const double order = std::log2(e1 / e2);
        checks::add(rep, "drift solve order >= 1.8", order, 1.8, false);
        checks::add(rep, "drift solve order <= 2.2", order, 2.2);
    }
    {
        const double e1 = detail::manufactured_helmholtz_error(16, 2.0);
        const double e2 = detail::manufactured_helmholtz_error(32, 2.0);
        const double order = std::log2(e1 / e2);
        checks::add(rep, "pseudo-frequency solve order >= 1.8", order, 1.8, false);
        checks::add(rep, "pseudo-frequency solve order <= 2.2", order, 2.2);
    }

    // constant first tail: psi == k  ->  p == -sbar^2 k, V == -sbar k
    {
        const GridSpec g = detail::unit_square_grid(16);
        const auto bnodes = omega_boundary_nodes(g);
        const double k = 0.7, sbar = 3.0;
        std::vector<double> psi(bnodes.size(), k);
        auto [p, V] = solve_first_tail(g, bnodes, psi, sbar, 1e-12);
        double mx = 0.0;
        std::array<int, 3> ijk;
        for (std::size_t i = 0; i < p.values.size(); ++i) {
            g.unflatten(i, ijk);
            if (!g.in_omega(ijk)) continue;
            mx = std::max(mx, std::abs(p[i] + sbar * sbar * k));
            mx = std::max(mx, std::abs(V[i] + sbar * k));
        }
        checks::add(rep, "first tail constant data", mx, 1e-9);
    }
    return rep;
}

// --- Forward solver: d'Alembert oracle, absorption, convergence -------------

namespace detail {

inline GridSpec strip_grid(double hm) {
    return GridSpec::make(2, {-1, 0, 0}, {1, 4, 0}, hm, {-1 + hm, hm, 0}, {1 - hm, 4 - hm, 0});
}

inline TimeTrace strip_trace(double hm, double omega_src = 7.0, double T = 4.0) {
    const GridSpec g = strip_grid(hm);
    ScalarField one(g, 1.0);
    WaveConfig cfg;
    cfg.omega_src = omega_src;
    cfg.T = T;
    cfg.tau = 0.25 * hm; // halves with the mesh so sample times nest
    const int probe_j = (int)std::lround(2.0 / g.h[1]);
    return solve_forward(one, cfg, {g.index(g.n[0] / 2, probe_j)});
}

} // namespace detail

inline Report verify_forward() {
    Report rep;

    // plane wave against the 1D d'Alembert solution at depth 2
    {
        const auto tr = detail::strip_trace(0.025);
        double mx = 0.0, scale = 0.0;
        for (int j = 0; j < tr.nsteps; ++j) {
            const double t = j * tr.tau;
            const double ref = waveform_integral(t - 2.0, 7.0);
            mx = std::max(mx, std::abs(tr.sample(0, j) - ref));
            scale = std::max(scale, std::abs(ref));
        }
        checks::add(rep, "forward trace vs d'Alembert (relative)", mx / scale, 0.02);
    }

    // energy exits through the absorbing faces
    {
        const GridSpec g = detail::strip_grid(0.05);
        ScalarField one(g, 1.0);
        WaveConfig cfg;
        cfg.omega_src = 7.0;
        cfg.T = 12.0;
        cip::detail::WaveStepper st(one, cfg);
        double peak = 0.0, last = 0.0;
        for (int j = 1; j < st.nsteps(); ++j) {
            st.advance();
            last = st.energy();
            peak = std::max(peak, last);
        }
        checks::add(rep, "forward residual energy fraction", last / peak, 0.05);
    }

    // convergence order against the exact solution, L2 in time (the pulse
    // is only C^1, so the max norm super-converges at the wavefront kink)
    {
        auto rms_err = [](const TimeTrace& t) {
            double acc = 0.0;
            for (int j = 0; j < t.nsteps; ++j) {
                const double d = t.sample(0, j) - waveform_integral(j * t.tau - 2.0, 7.0);
                acc += d * d;
            }
            return std::sqrt(acc / t.nsteps);
        };
        const double e1 = rms_err(detail::strip_trace(0.05));
        const double e2 = rms_err(detail::strip_trace(0.025));
        const double order = std::log2(e1 / e2);
        checks::add(rep, "forward solver order >= 1.8", order, 1.8, false);
        checks::add(rep, "forward solver order <= 2.2", order, 2.2);
    }
    return rep;
}

// --- Fundamental-solution sandwich (3D) -------------------------------------

inline Report verify_bounds(int cells = 63, double s = 3.0, double d = 4.0) {
    Report rep;
    const double hm = 1.0 / cells;
    const GridSpec g = GridSpec::make(3, {0, 0, 0}, {1, 1, 1}, hm,
                                      {hm, hm, hm}, {1 - hm, 1 - hm, 1 - hm});
    const std::array<double, 3> x0{0.5, 0.5, -0.25};
    auto fundamental = [&](std::size_t idx, double dc) {
        const auto p = g.node_pos(idx);
        double r2 = 0.0;
        for (int a = 0; a < 3; ++a) r2 += (p[a] - x0[a]) * (p[a] - x0[a]);
        const double r = std::sqrt(r2);
        return std::exp(-s * std::sqrt(dc) * r) / (4.0 * std::numbers::pi * r);
    };
    std::vector<std::size_t> bnodes;
    std::array<int, 3> ijk;
    for (std::size_t idx = 0; idx < g.node_count(); ++idx) {
        g.unflatten(idx, ijk);
        if (g.on_g_boundary(ijk)) bnodes.push_back(idx);
    }

    // pure c == d matches the closed form
    {
        ScalarField c(g, d);
        std::unordered_map<std::size_t, double> bc;
        for (auto idx : bnodes) bc[idx] = fundamental(idx, d);
        const ScalarField w = solve_pseudofreq_field(c, s, bc, 1e-11);
        double rel = 0.0;
        for (std::size_t idx = 0; idx < g.node_count(); ++idx) {
            g.unflatten(idx, ijk);
            if (g.on_g_boundary(ijk)) continue;
            const double ref = fundamental(idx, d);
            rel = std::max(rel, std::abs(w[idx] - ref) / ref);
        }
        checks::add(rep, "pure c==d vs closed form (relative)", rel, 0.01);
    }

    // inclusion sandwich w_d < w <= w_1 at 100 sampled interior points
    {
        ScalarField c(g, 1.0);
        for (std::size_t idx = 0; idx < g.node_count(); ++idx) {
            const auto p = g.node_pos(idx);
            if (p[0] > 0.35 && p[0] < 0.65 && p[1] > 0.35 && p[1] < 0.65 &&
                p[2] > 0.35 && p[2] < 0.65)
                c[idx] = d;
        }
        std::unordered_map<std::size_t, double> bc;
        for (auto idx : bnodes) bc[idx] = fundamental(idx, 1.0);
        const ScalarField w = solve_pseudofreq_field(c, s, bc, 1e-11);
        std::mt19937_64 rng(11);
        std::uniform_int_distribution<int> ui(1, g.n[0] - 2);
        double worst = 0.0; // signed violation as a fraction of w_1
        for (int t = 0; t < 100; ++t) {
            const std::size_t idx = g.index(ui(rng), ui(rng), ui(rng));
            const double w1 = fundamental(idx, 1.0), wd = fundamental(idx, d);
            worst = std::max(worst, (w[idx] - w1) / w1);
            worst = std::max(worst, (wd - w[idx]) / w1);
        }
        checks::add(rep, "sandwich w_d < w <= w_1 (violation / w_1)", worst, 0.02);
    }
    return rep;
}

// --- Reconstruction-formula identity ----------------------------------------

inline Report verify_identity() {
    Report rep;
    const GridSpec g = scenario_test1_2d().grid();
    const double s = 2.5, a0 = g.hi[1];
    ScalarField v(g);
    for (std::size_t idx = 0; idx < g.node_count(); ++idx) {
        const auto p = g.node_pos(idx);
        v[idx] = -(a0 - p[1]) / s + std::log(2.0) / (s * s);
    }
    const auto lap = laplacian(v);
    const auto gr = gradient(v);
    double mx = 0.0;
    std::array<int, 3> ijk;
    for (std::size_t idx = 0; idx < g.node_count(); ++idx) {
        g.unflatten(idx, ijk);
        if (!g.in_omega_interior(ijk)) continue;
        const double c = lap[idx] + s * s * (gr[0][idx] * gr[0][idx] + gr[1][idx] * gr[1][idx]);
        mx = std::max(mx, std::abs(c - 1.0));
    }
    checks::add(rep, "plane-wave identity Lap v + s^2 (grad v)^2 = 1", mx, 1e-6);
    return rep;
}

// --- Null reconstruction -----------------------------------------------------

inline Report verify_null() {
    Report rep;
    for (FirstTail mode : {FirstTail::homogeneous_medium, FirstTail::harmonic,
                           FirstTail::exact_from_true_c}) {
        Scenario sc = scenario_test1_2d();
        sc.boxes.clear();
        sc.noise_sigma = 0.0;
        // record long enough that the truncated-transform error at depth,
        // ~e^{-s(T - depth)} relative, stays below the tail Assumption's
        // tolerance; the harmonic mode is sensitive to it
        sc.wave.T = 10.0;
        sc.algo.first_tail = mode;
        const GridSpec g = sc.grid();
        auto data = synthesize_data(sc, g);
        ReconEngine eng(g, sc.wave, data, sc.algo, sc.true_c(g));
        auto [c, st] = eng.run();
        double mx = 0.0;
        std::array<int, 3> ijk;
        for (std::size_t idx = 0; idx < c.values.size(); ++idx) {
            g.unflatten(idx, ijk);
            if (g.in_omega(ijk)) mx = std::max(mx, std::abs(c[idx] - 1.0));
        }
        const char* label = mode == FirstTail::harmonic ? "harmonic"
                            : mode == FirstTail::homogeneous_medium ? "homogeneous"
                                                                    : "exact";
        checks::add(rep, std::string("null reconstruction max |c-1| (") + label + ")", mx, 0.05);
    }
    return rep;
}

inline Report verify_all() {
    Report rep;
    for (const auto& part : {verify_cwf(), verify_transform(), verify_elliptic(),
                             verify_forward(), verify_identity(), verify_bounds(),
                             verify_null()})
        rep.insert(rep.end(), part.begin(), part.end());
    return rep;
}

inline Report verify_suite(const std::string& name) {
    if (name == "cwf") return verify_cwf();
    if (name == "transform") return verify_transform();
    if (name == "elliptic") return verify_elliptic();
    if (name == "forward") return verify_forward();
    if (name == "identity") return verify_identity();
    if (name == "bounds") return verify_bounds();
    if (name == "null") return verify_null();
    if (name == "all") return verify_all();
    throw config_error("unknown verify suite '" + name + "'");
}

} // namespace cip
