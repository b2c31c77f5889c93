#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "cip/grid.hpp"

namespace cip {

/// Dirichlet problem  Laplacian(q) + b . grad q - b0 q = f  on either the
/// interior of Omega (boundary = Omega boundary) or the interior of G
/// (boundary = G faces), centered differences throughout.
struct EllipticProblem {
    GridSpec grid;
    std::vector<ScalarField> drift;                   // empty -> b = 0
    ScalarField rhs;                                  // empty values -> f = 0
    ScalarField zeroth;                               // empty values -> b0 = 0, else b0 >= 0
    std::unordered_map<std::size_t, double> dirichlet; // boundary node -> value
    bool on_omega = true;
};

namespace detail {

struct StencilDomain {
    const GridSpec* g;
    std::vector<std::size_t> unknowns;              // flattened G indices
    std::vector<std::int64_t> local;                // G index -> local id or -1
    std::vector<double> bc;                         // G index -> Dirichlet value (0 elsewhere)
    std::vector<std::uint8_t> is_bc;

    StencilDomain(const EllipticProblem& p) : g(&p.grid) {
        const auto& gr = *g;
        local.assign(gr.node_count(), -1);
        bc.assign(gr.node_count(), 0.0);
        is_bc.assign(gr.node_count(), 0);
        std::array<int, 3> i0{}, i1{};
        for (int a = 0; a < 3; ++a) {
            i0[a] = p.on_omega ? gr.oi0[a] : 0;
            i1[a] = p.on_omega ? gr.oi1[a] : gr.n[a] - 1;
        }
        for (int i = i0[0]; i <= i1[0]; ++i)
            for (int j = i0[1]; j <= i1[1]; ++j)
                for (int k = i0[2]; k <= i1[2]; ++k) {
                    std::array<int, 3> ijk{i, j, k};
                    bool edge = false;
                    for (int a = 0; a < gr.dim; ++a)
                        if (ijk[a] == i0[a] || ijk[a] == i1[a]) edge = true;
                    const std::size_t idx = gr.index(i, j, k);
                    if (edge) {
                        is_bc[idx] = 1;
                        auto it = p.dirichlet.find(idx);
                        if (it == p.dirichlet.end())
                            throw config_error("elliptic: missing Dirichlet value at boundary node " +
                                               std::to_string(idx));
                        if (!std::isfinite(it->second))
                            throw config_error("elliptic: non-finite Dirichlet value");
                        bc[idx] = it->second;
                    } else {
                        local[idx] = (std::int64_t)unknowns.size();
                        unknowns.push_back(idx);
                    }
                }
    }
};

} // namespace detail

/// Iterative (BiCGStab, Jacobi-preconditioned) solve of the problem above
/// to relative residual <= tol.  The mesh Peclet number |b| h / 2 should
/// stay below 1; `strict` escalates the warning to an error, otherwise the
/// condition is reported through `warning` when provided.
inline ScalarField solve_drift_dirichlet(const EllipticProblem& p, double tol = 1e-10,
                                         bool strict = false, std::string* warning = nullptr,
                                         int max_iter = 50000) {
    const GridSpec& g = p.grid;
    detail::StencilDomain dom(p);
    const std::size_t m = dom.unknowns.size();
    if (m == 0) throw config_error("elliptic: no interior unknowns");
    const bool has_drift = !p.drift.empty();
    const bool has_zeroth = !p.zeroth.values.empty();
    if (has_drift && (int)p.drift.size() != g.dim)
        throw config_error("elliptic: drift must have one component per axis");

    // Peclet guard
    if (has_drift) {
        double peclet = 0.0;
        for (auto idx : dom.unknowns)
            for (int a = 0; a < g.dim; ++a)
                peclet = std::max(peclet, std::abs(p.drift[a][idx]) * g.h[a] / 2.0);
        if (peclet >= 1.0) {
            const std::string msg = "elliptic: mesh Peclet number " + std::to_string(peclet) +
                                    " >= 1, centered drift may oscillate";
            if (strict) throw config_error(msg);
            if (warning) *warning = msg;
        }
    }
    if (has_zeroth)
        for (auto idx : dom.unknowns)
            if (p.zeroth[idx] < 0.0)
                throw config_error("elliptic: zeroth-order coefficient must be >= 0");

    // y = A x with homogeneous boundary; x lives on the unknowns
    std::array<int, 3> strides{g.n[1] * g.n[2], g.n[2], 1};
    auto apply = [&](const std::vector<double>& x, std::vector<double>& y,
                     bool with_bc) {
        for (std::size_t ui = 0; ui < m; ++ui) {
            const std::size_t idx = dom.unknowns[ui];
            double acc = 0.0;
            const double self = x[ui];
            for (int a = 0; a < g.dim; ++a) {
                const std::size_t im = idx - strides[a], ip = idx + strides[a];
                const double vm = dom.local[im] >= 0 ? x[dom.local[im]] : (with_bc ? dom.bc[im] : 0.0);
                const double vp = dom.local[ip] >= 0 ? x[dom.local[ip]] : (with_bc ? dom.bc[ip] : 0.0);
                acc += (vp - 2.0 * self + vm) / (g.h[a] * g.h[a]);
                if (has_drift)
                    acc += p.drift[a][idx] * (vp - vm) / (2.0 * g.h[a]);
            }
            if (has_zeroth) acc -= p.zeroth[idx] * self;
            y[ui] = acc;
        }
    };

    // rhs' = f - A(0 with bc)
    std::vector<double> b(m, 0.0), tmp(m, 0.0);
    {
        std::vector<double> zero(m, 0.0);
        apply(zero, tmp, true);
        for (std::size_t ui = 0; ui < m; ++ui) {
            const double f = p.rhs.values.empty() ? 0.0 : p.rhs[dom.unknowns[ui]];
            b[ui] = f - tmp[ui];
        }
    }

    std::vector<double> diag(m);
    for (std::size_t ui = 0; ui < m; ++ui) {
        double d = 0.0;
        for (int a = 0; a < g.dim; ++a) d -= 2.0 / (g.h[a] * g.h[a]);
        if (has_zeroth) d -= p.zeroth[dom.unknowns[ui]];
        diag[ui] = d;
    }

    auto dot = [&](const std::vector<double>& a, const std::vector<double>& c) {
        double acc = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * c[i];
        return acc;
    };

    std::vector<double> x(m, 0.0), r(m), r0(m), pv(m, 0.0), v(m, 0.0), sres(m), t(m), phat(m), shat(m);
    apply(x, tmp, false);
    for (std::size_t i = 0; i < m; ++i) r[i] = b[i] - tmp[i];
    r0 = r;
    const double bnorm = std::sqrt(dot(b, b));
    if (bnorm == 0.0) {
        // homogeneous problem: solution is the zero extension of the bc
        ScalarField out(g);
        for (std::size_t idx = 0; idx < dom.is_bc.size(); ++idx)
            if (dom.is_bc[idx]) out[idx] = dom.bc[idx];
        return out;
    }

    double rho = 1.0, alpha = 1.0, omega = 1.0;
    double resid = std::sqrt(dot(r, r));
    int it = 0;
    for (; it < max_iter && resid / bnorm > tol; ++it) {
        const double rho1 = dot(r0, r);
        if (rho1 == 0.0) throw numeric_error("BiCGStab breakdown (rho = 0), residual " +
                                             std::to_string(resid / bnorm));
        if (it == 0) {
            pv = r;
        } else {
            const double beta = (rho1 / rho) * (alpha / omega);
            for (std::size_t i = 0; i < m; ++i) pv[i] = r[i] + beta * (pv[i] - omega * v[i]);
        }
        rho = rho1;
        for (std::size_t i = 0; i < m; ++i) phat[i] = pv[i] / diag[i];
        apply(phat, v, false);
        alpha = rho / dot(r0, v);
        for (std::size_t i = 0; i < m; ++i) sres[i] = r[i] - alpha * v[i];
        if (std::sqrt(dot(sres, sres)) / bnorm <= tol) {
            for (std::size_t i = 0; i < m; ++i) x[i] += alpha * phat[i];
            resid = std::sqrt(dot(sres, sres));
            break;
        }
        for (std::size_t i = 0; i < m; ++i) shat[i] = sres[i] / diag[i];
        apply(shat, t, false);
        omega = dot(t, sres) / dot(t, t);
        if (omega == 0.0) throw numeric_error("BiCGStab breakdown (omega = 0)");
        for (std::size_t i = 0; i < m; ++i) {
            x[i] += alpha * phat[i] + omega * shat[i];
            r[i] = sres[i] - omega * t[i];
        }
        resid = std::sqrt(dot(r, r));
    }
    if (resid / bnorm > tol)
        throw numeric_error("elliptic solver did not converge: relative residual " +
                            std::to_string(resid / bnorm) + " after " + std::to_string(it) +
                            " iterations");

    ScalarField out(g);
    for (std::size_t idx = 0; idx < dom.is_bc.size(); ++idx)
        if (dom.is_bc[idx]) out[idx] = dom.bc[idx];
    for (std::size_t ui = 0; ui < m; ++ui) out[dom.unknowns[ui]] = x[ui];
    return out;
}

/// First tail guess: p harmonic in Omega with p = -sbar^2 psi(., sbar) on
/// the boundary; V_{1,1} = p / sbar.
inline std::pair<ScalarField, ScalarField>
solve_first_tail(const GridSpec& g, const std::vector<std::size_t>& boundary_nodes,
                 const std::vector<double>& psi_sbar, double sbar, double tol = 1e-10) {
    if (boundary_nodes.size() != psi_sbar.size())
        throw config_error("solve_first_tail: node/value size mismatch");
    EllipticProblem p;
    p.grid = g;
    p.on_omega = true;
    for (std::size_t i = 0; i < boundary_nodes.size(); ++i)
        p.dirichlet[boundary_nodes[i]] = -sbar * sbar * psi_sbar[i];
    ScalarField ph = solve_drift_dirichlet(p, tol);
    ScalarField V = ph;
    for (auto& v : V.values) v /= sbar;
    return {std::move(ph), std::move(V)};
}

/// Pseudo-frequency field on G:  Laplacian(w) - s^2 c w = 0  with given
/// Dirichlet data on the G faces.  The solution inherits strict positivity
/// from strictly positive boundary data (checked at exit).
inline ScalarField solve_pseudofreq_field(const ScalarField& c, double s,
                                          const std::unordered_map<std::size_t, double>& boundary,
                                          double tol = 1e-10) {
    if (s <= 0.0) throw config_error("solve_pseudofreq_field: s must be > 0");
    for (double v : c.values)
        if (!(v >= 1.0)) throw config_error("solve_pseudofreq_field: c must be >= 1");
    EllipticProblem p;
    p.grid = c.grid;
    p.on_omega = false;
    p.dirichlet = boundary;
    p.zeroth = c;
    for (auto& v : p.zeroth.values) v *= s * s;
    ScalarField w = solve_drift_dirichlet(p, tol);
    bool bc_positive = true;
    for (const auto& [idx, val] : boundary)
        if (!(val > 0.0)) bc_positive = false;
    if (bc_positive)
        for (double v : w.values)
            if (!(v > 0.0))
                throw numeric_error("solve_pseudofreq_field: positivity lost in the interior");
    return w;
}

} // namespace cip
