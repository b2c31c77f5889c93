#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "cip/grid.hpp"

namespace cip {

/// Incident plane-wave pulse: (1/10)(sin(wt - pi/2) + 1) on (0, 2pi/w],
/// zero afterwards.  C^0 at both ends.
inline double waveform(double t, double omega_src) {
    if (t <= 0.0 || t > 2.0 * std::numbers::pi / omega_src) return 0.0;
    return 0.1 * (std::sin(omega_src * t - 0.5 * std::numbers::pi) + 1.0);
}

/// Time integral of waveform(): the displacement profile the Neumann flux
/// source launches into the domain (1D d'Alembert oracle).
inline double waveform_integral(double t, double omega_src) {
    const double t1 = 2.0 * std::numbers::pi / omega_src;
    if (t <= 0.0) return 0.0;
    if (t >= t1) return 0.1 * t1;
    return 0.1 * (t - std::cos(omega_src * t - 0.5 * std::numbers::pi) / omega_src);
}

struct WaveConfig {
    double omega_src = 7.0;
    double T = 6.0;
    double tau = 0.0;      // 0 -> 0.5 * min_h / sqrt(dim)
    int source_axis = -1;  // -1 -> last axis of the grid
    int source_side = +1;  // +1: wave enters through the hi face
    int snapshot_every = 0;

    int resolved_axis(const GridSpec& g) const {
        return source_axis >= 0 ? source_axis : g.dim - 1;
    }
    double resolved_tau(const GridSpec& g) const {
        if (tau > 0.0) return tau;
        double hmin = g.h[0];
        for (int a = 1; a < g.dim; ++a) hmin = std::min(hmin, g.h[a]);
        return 0.5 * hmin / std::sqrt((double)g.dim);
    }
    void validate(const GridSpec& g) const {
        const double tt = resolved_tau(g);
        double hmin = g.h[0];
        for (int a = 1; a < g.dim; ++a) hmin = std::min(hmin, g.h[a]);
        if (tt * std::sqrt((double)g.dim) / hmin > 1.0 + 1e-12)
            throw config_error("WaveConfig: CFL violated, tau*sqrt(dim)/h = " +
                               std::to_string(tt * std::sqrt((double)g.dim) / hmin));
        if (T < 2.0 * std::numbers::pi / omega_src)
            throw config_error("WaveConfig: T shorter than one source pulse");
        const int ax = resolved_axis(g);
        if (ax < 0 || ax >= g.dim) throw config_error("WaveConfig: bad source axis");
    }
};

/// Boundary samples of u(x,t): node-major matrix, uniform time axis.
struct TimeTrace {
    std::vector<std::size_t> nodes;        // flattened G-grid indices
    std::vector<std::array<double, 3>> coords;
    std::vector<double> samples;           // [node * nsteps + j], t_j = j*tau
    double tau = 0.0;
    double T = 0.0;
    int nsteps = 0;

    double sample(std::size_t node, int j) const { return samples[node * (std::size_t)nsteps + j]; }
    double& sample(std::size_t node, int j) { return samples[node * (std::size_t)nsteps + j]; }
};

namespace detail {

/// Explicit leapfrog stepper for c u_tt = Laplacian(u) on G.
/// Source face: Neumann flux d_n u = f(t) while the pulse lasts, then
/// first-order absorbing (Mur update).  Opposite face: absorbing for all t.
/// Remaining faces: zero Neumann (mirror).
class WaveStepper {
public:
    WaveStepper(const ScalarField& c, const WaveConfig& cfg)
        : c_(c), g_(c.grid), cfg_(cfg),
          u_prev_(g_), u_(g_), u_next_(g_),
          tau_(cfg.resolved_tau(g_)),
          ax_(cfg.resolved_axis(g_)) {
        cfg.validate(g_);
        nsteps_ = (int)std::lround(cfg.T / tau_) + 1;
        t1_ = 2.0 * std::numbers::pi / cfg.omega_src;
    }

    int nsteps() const { return nsteps_; }
    double tau() const { return tau_; }
    const ScalarField& u() const { return u_; }
    int step_index() const { return step_; }

    /// Advances one step; the field for time (step+1)*tau becomes current.
    void advance() {
        const double t = step_ * tau_; // time level of u_
        const bool source_on = t <= t1_ + 1e-14;
        const int src_face = cfg_.source_side > 0 ? g_.n[ax_] - 1 : 0;
        const int opp_face = cfg_.source_side > 0 ? 0 : g_.n[ax_] - 1;

        for (int i = 0; i < g_.n[0]; ++i)
            for (int j = 0; j < g_.n[1]; ++j)
                for (int k = 0; k < g_.n[2]; ++k) {
                    std::array<int, 3> p{i, j, k};
                    if (p[ax_] == opp_face) continue;           // Mur below
                    if (p[ax_] == src_face && !source_on) continue;
                    double lap = 0.0;
                    for (int a = 0; a < g_.dim; ++a) {
                        const double um = neighbor(p, a, -1, t, source_on);
                        const double up = neighbor(p, a, +1, t, source_on);
                        lap += (up - 2.0 * u_.at(i, j, k) + um) / (g_.h[a] * g_.h[a]);
                    }
                    const std::size_t idx = g_.index(i, j, k);
                    u_next_[idx] = 2.0 * u_[idx] - u_prev_[idx] + tau_ * tau_ / c_[idx] * lap;
                }

        mur_face(opp_face);
        if (!source_on) mur_face(src_face);

        std::swap(u_prev_.values, u_.values);
        std::swap(u_.values, u_next_.values);
        ++step_;

        if (step_ % 50 == 0) {
            for (double v : u_.values)
                if (!std::isfinite(v))
                    throw numeric_error("forward solve unstable at time step " + std::to_string(step_));
        }
    }

    /// Discrete energy sum c*u_t^2 + |grad u|^2 over G (times cell volume).
    double energy() const {
        double acc = 0.0;
        double vol = 1.0;
        for (int a = 0; a < g_.dim; ++a) vol *= g_.h[a];
        for (int i = 0; i < g_.n[0]; ++i)
            for (int j = 0; j < g_.n[1]; ++j)
                for (int k = 0; k < g_.n[2]; ++k) {
                    const std::size_t idx = g_.index(i, j, k);
                    const double ut = (u_[idx] - u_prev_[idx]) / tau_;
                    double gsq = 0.0;
                    std::array<int, 3> p{i, j, k};
                    for (int a = 0; a < g_.dim; ++a) {
                        if (p[a] + 1 >= g_.n[a]) continue;
                        auto q = p;
                        q[a] += 1;
                        const double d = (u_.at(q[0], q[1], q[2]) - u_.at(i, j, k)) / g_.h[a];
                        gsq += d * d;
                    }
                    acc += (c_[idx] * ut * ut + gsq) * vol;
                }
        return acc;
    }

private:
    double neighbor(const std::array<int, 3>& p, int a, int off, double t, bool source_on) const {
        auto q = p;
        q[a] += off;
        if (q[a] >= 0 && q[a] < g_.n[a]) return u_.at(q[0], q[1], q[2]);
        // ghost beyond a G face
        auto m = p;
        m[a] -= off; // mirror node
        const bool outward_src = (a == ax_) &&
            ((cfg_.source_side > 0 && off > 0) || (cfg_.source_side < 0 && off < 0));
        if (outward_src && source_on) {
            // central Neumann: (ghost - mirror) / 2h = f(t)
            return u_.at(m[0], m[1], m[2]) + 2.0 * g_.h[a] * waveform(t, cfg_.omega_src);
        }
        return u_.at(m[0], m[1], m[2]); // zero Neumann mirror
    }

    /// First-order Mur update on a face normal to the propagation axis.
    /// Exact for normal incidence at r = 1; c = 1 on the G faces.
    void mur_face(int face) {
        const int inner = face == 0 ? 1 : g_.n[ax_] - 2;
        std::array<int, 3> i0{0, 0, 0}, i1{g_.n[0] - 1, g_.n[1] - 1, g_.n[2] - 1};
        i0[ax_] = i1[ax_] = face;
        for (int i = i0[0]; i <= i1[0]; ++i)
            for (int j = i0[1]; j <= i1[1]; ++j)
                for (int k = i0[2]; k <= i1[2]; ++k) {
                    std::array<int, 3> p{i, j, k}, q{i, j, k};
                    q[ax_] = inner;
                    const std::size_t pb = g_.index(p[0], p[1], p[2]);
                    const std::size_t pi = g_.index(q[0], q[1], q[2]);
                    const double r = tau_ / (g_.h[ax_] * std::sqrt(c_[pb]));
                    u_next_[pb] = u_[pi] + (1.0 - r) / (1.0 + r) * (u_[pb] - u_next_[pi]);
                }
    }

    const ScalarField& c_;
    GridSpec g_;
    WaveConfig cfg_;
    ScalarField u_prev_, u_, u_next_;
    double tau_;
    int ax_;
    int nsteps_ = 0;
    int step_ = 0;
    double t1_ = 0.0;
};

} // namespace detail

/// Runs the forward problem and records u at `record_nodes`.  The optional
/// per-step hook sees the current field and its step index.
inline TimeTrace solve_forward(const ScalarField& c, const WaveConfig& cfg,
                               const std::vector<std::size_t>& record_nodes,
                               const std::function<void(const ScalarField&, int)>& hook = {}) {
    for (double v : c.values)
        if (!(v >= 1.0)) throw config_error("solve_forward: c must satisfy c >= 1 everywhere");
    detail::WaveStepper st(c, cfg);
    TimeTrace tr;
    tr.nodes = record_nodes;
    tr.tau = st.tau();
    tr.T = cfg.T;
    tr.nsteps = st.nsteps();
    tr.coords.reserve(record_nodes.size());
    for (auto idx : record_nodes) tr.coords.push_back(c.grid.node_pos(idx));
    tr.samples.assign(record_nodes.size() * (std::size_t)tr.nsteps, 0.0);

    for (int j = 0; j < tr.nsteps; ++j) {
        if (j > 0) st.advance();
        const ScalarField& u = st.u();
        for (std::size_t ni = 0; ni < record_nodes.size(); ++ni)
            tr.sample(ni, j) = u[record_nodes[ni]];
        if (hook) hook(u, j);
    }
    return tr;
}

/// Forward solve that accumulates the Laplace transform of u at the given
/// pseudo-frequencies over every G node (trapezoid in time).
inline std::vector<ScalarField> solve_forward_laplace(const ScalarField& c, const WaveConfig& cfg,
                                                      const std::vector<double>& svals) {
    for (double s : svals)
        if (s <= 0.0) throw config_error("solve_forward_laplace: s must be > 0");
    std::vector<ScalarField> w(svals.size(), ScalarField(c.grid));
    std::vector<std::size_t> no_nodes;
    solve_forward(c, cfg, no_nodes, [&](const ScalarField& u, int j) {
        const double t = j * cfg.resolved_tau(c.grid);
        const int last = (int)std::lround(cfg.T / cfg.resolved_tau(c.grid));
        for (std::size_t si = 0; si < svals.size(); ++si) {
            const double wt = (j == 0 || j == last) ? 0.5 : 1.0;
            const double ker = wt * std::exp(-svals[si] * t) * cfg.resolved_tau(c.grid);
            auto& acc = w[si].values;
            const auto& uv = u.values;
            for (std::size_t idx = 0; idx < uv.size(); ++idx) acc[idx] += ker * uv[idx];
        }
    });
    return w;
}

// ---------------------------------------------------------------------------
// TRC1 file format: `TRC1 nnodes nsteps tau` then a node coordinate table
// (dim columns per line) and samples as little-endian doubles, node-major.

inline void write_trc1(const TimeTrace& tr, int dim, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw config_error("cannot open for writing: " + path);
    os << "TRC1 " << tr.nodes.size() << ' ' << tr.nsteps << ' ';
    os.precision(17);
    os << tr.tau << ' ' << dim << '\n';
    for (const auto& c : tr.coords) {
        for (int a = 0; a < dim; ++a) os << (a ? " " : "") << c[a];
        os << '\n';
    }
    detail::write_doubles(os, tr.samples.data(), tr.samples.size());
    if (!os) throw config_error("write failed: " + path);
}

inline TimeTrace read_trc1(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw config_error("cannot open: " + path);
    std::string magic;
    std::size_t nnodes = 0;
    int nsteps = 0, dim = 0;
    double tau = 0.0;
    is >> magic >> nnodes >> nsteps >> tau >> dim;
    if (magic != "TRC1" || nnodes == 0 || nsteps < 2 || tau <= 0.0)
        throw config_error("not a TRC1 file: " + path);
    TimeTrace tr;
    tr.nodes.assign(nnodes, 0); // node ids are not portable across grids
    tr.coords.resize(nnodes);
    tr.nsteps = nsteps;
    tr.tau = tau;
    tr.T = tau * (nsteps - 1);
    for (auto& c : tr.coords) {
        c = {0, 0, 0};
        for (int a = 0; a < dim; ++a) is >> c[a];
    }
    if (!is) throw config_error("bad TRC1 coordinate table: " + path);
    is.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
    tr.samples.resize(nnodes * (std::size_t)nsteps);
    detail::read_doubles(is, tr.samples.data(), tr.samples.size());
    return tr;
}

} // namespace cip
