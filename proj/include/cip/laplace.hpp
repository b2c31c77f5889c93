#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "cip/grid.hpp"
#include "cip/wave.hpp"

namespace cip {

/// Decreasing pseudo-frequency partition s_0 = s_max > ... > s_N = s_min
/// with uniform step h.  Interval n = 1..N is (s_n, s_{n-1}).
struct PseudoFreqGrid {
    double s_min = 2.0;
    double s_max = 3.0;
    double h = 0.05;
    int N = 20;

    static PseudoFreqGrid make(double s_min, double s_max, double h) {
        if (s_min <= 0.0 || h <= 0.0 || s_max <= s_min)
            throw config_error("PseudoFreqGrid: need 0 < s_min < s_max and h > 0");
        const double ratio = (s_max - s_min) / h;
        const int N = (int)std::lround(ratio);
        if (N < 1 || std::abs(ratio - N) > 1e-9 * std::max(1.0, ratio))
            throw config_error("PseudoFreqGrid: (s_max - s_min)/h must be a positive integer");
        return {s_min, s_max, h, N};
    }

    double s(int k) const { return s_max - k * h; } // s_0 = s_max
};

/// Per-interval averaged Dirichlet data on the Omega boundary, plus the
/// psi(x, s_max) record the harmonic first tail needs.  `measured[i]` is 1
/// where the value came from the backscattering trace, 0 where it was
/// completed from the homogeneous-medium run.
struct PseudoFreqBoundaryData {
    PseudoFreqGrid sgrid;
    std::vector<std::size_t> nodes;
    std::vector<std::array<double, 3>> coords;
    int dim = 2;
    std::vector<std::uint8_t> measured;
    std::vector<double> psi_sbar;  // [node]
    std::vector<double> psi_bar;   // [(n-1) * nnodes + node]

    double bar(int n, std::size_t node) const {
        return psi_bar[(std::size_t)(n - 1) * nodes.size() + node];
    }
};

/// w(x,s) = int_0^T u e^{-st} dt by trapezoid on the trace's time grid.
/// The (T, inf) remainder is dropped.
inline std::vector<double> laplace_transform(const TimeTrace& tr, double s) {
    if (s <= 0.0) throw config_error("laplace_transform: s must be > 0");
    std::vector<double> out(tr.nodes.size(), 0.0);
    for (std::size_t ni = 0; ni < tr.nodes.size(); ++ni) {
        double acc = 0.0;
        for (int j = 0; j < tr.nsteps; ++j) {
            const double wt = (j == 0 || j == tr.nsteps - 1) ? 0.5 : 1.0;
            acc += wt * tr.sample(ni, j) * std::exp(-s * j * tr.tau);
        }
        out[ni] = acc * tr.tau;
    }
    return out;
}

/// d/ds of the transform: -int_0^T t u e^{-st} dt, same quadrature.
inline std::vector<double> laplace_transform_ds(const TimeTrace& tr, double s) {
    if (s <= 0.0) throw config_error("laplace_transform_ds: s must be > 0");
    std::vector<double> out(tr.nodes.size(), 0.0);
    for (std::size_t ni = 0; ni < tr.nodes.size(); ++ni) {
        double acc = 0.0;
        for (int j = 0; j < tr.nsteps; ++j) {
            const double t = j * tr.tau;
            const double wt = (j == 0 || j == tr.nsteps - 1) ? 0.5 : 1.0;
            acc -= wt * t * tr.sample(ni, j) * std::exp(-s * t);
        }
        out[ni] = acc * tr.tau;
    }
    return out;
}

/// psi = s^-2 (dw/w) - 2 s^-3 ln w, i.e. d/ds of (ln w / s^2).
/// Any w <= 0 violates the positivity the method relies on (s too small
/// or T too short) and is reported as an error.
inline std::vector<double> compute_psi(const std::vector<double>& w,
                                       const std::vector<double>& dw, double s) {
    if (w.size() != dw.size()) throw config_error("compute_psi: size mismatch");
    std::vector<double> out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!(w[i] > 0.0))
            throw numeric_error("compute_psi: w <= 0 at node " + std::to_string(i) +
                                " (w = " + std::to_string(w[i]) + ", s = " + std::to_string(s) + ")");
        out[i] = dw[i] / w[i] / (s * s) - 2.0 * std::log(w[i]) / (s * s * s);
    }
    return out;
}

/// Interval average (1/h) int_{s_n}^{s_{n-1}} psi ds by Simpson's rule
/// (three points per interval; exact on s-linear integrands).
inline std::vector<double> average_psi(const std::function<std::vector<double>(double)>& psi,
                                       int n, const PseudoFreqGrid& sg) {
    if (n < 1 || n > sg.N) throw config_error("average_psi: interval index out of range");
    const double sa = sg.s(n), sb = sg.s(n - 1);
    const auto lo = psi(sa);
    const auto mid = psi(0.5 * (sa + sb));
    const auto hi = psi(sb);
    std::vector<double> out(lo.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = (lo[i] + 4.0 * mid[i] + hi[i]) / 6.0;
    return out;
}

/// Multiplicative trace noise u (1 + alpha_j sigma (u_max - u_min)) with
/// alpha_j uniform on (-1,1); one alpha per time sample by default,
/// per-(node, sample) when `per_node` is set.  Deterministic in the seed.
inline TimeTrace add_noise(const TimeTrace& tr, double sigma, std::uint64_t seed,
                           bool per_node = false) {
    if (sigma < 0.0) throw config_error("add_noise: sigma must be >= 0");
    TimeTrace out = tr;
    if (sigma == 0.0 || tr.nodes.empty()) return out;
    double umax = tr.samples[0], umin = tr.samples[0];
    for (double v : tr.samples) { umax = std::max(umax, v); umin = std::min(umin, v); }
    const double amp = sigma * (umax - umin);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    if (per_node) {
        for (double& v : out.samples) v *= 1.0 + uni(rng) * amp;
    } else {
        std::vector<double> alpha(tr.nsteps);
        for (auto& a : alpha) a = uni(rng);
        for (std::size_t ni = 0; ni < tr.nodes.size(); ++ni)
            for (int j = 0; j < tr.nsteps; ++j)
                out.sample(ni, j) *= 1.0 + alpha[j] * amp;
    }
    return out;
}

namespace detail {

/// psi values for every boundary node at pseudo-frequency s, taking
/// measured data where the mask says so and homogeneous-run data elsewhere.
/// `meas_index[i]` maps a boundary node to its row in the measured trace
/// (or SIZE_MAX when completed).
inline std::vector<double> psi_completed(const TimeTrace& meas, const TimeTrace& unif,
                                         const std::vector<std::size_t>& meas_index, double s) {
    const auto wm = laplace_transform(meas, s);
    const auto dwm = laplace_transform_ds(meas, s);
    const auto wu = laplace_transform(unif, s);
    const auto dwu = laplace_transform_ds(unif, s);
    const auto pm = compute_psi(wm, dwm, s);
    const auto pu = compute_psi(wu, dwu, s);
    std::vector<double> out(meas_index.size());
    for (std::size_t i = 0; i < meas_index.size(); ++i)
        out[i] = meas_index[i] == SIZE_MAX ? pu[i] : pm[meas_index[i]];
    return out;
}

} // namespace detail

/// Builds the full boundary data record from a measured trace (on Gamma,
/// or on all of the Omega boundary) and the homogeneous-medium trace on
/// all of it.  Measured values win wherever the measured trace has the
/// node; the rest is completed from the c == 1 run.
inline PseudoFreqBoundaryData complete_boundary(const GridSpec& g,
                                                const TimeTrace& measured,
                                                const TimeTrace& homogeneous,
                                                const PseudoFreqGrid& sg) {
    PseudoFreqBoundaryData out;
    out.sgrid = sg;
    out.dim = g.dim;
    out.nodes = homogeneous.nodes;
    out.coords = homogeneous.coords;
    const std::size_t nn = out.nodes.size();
    if (nn == 0) throw config_error("complete_boundary: homogeneous trace has no nodes");

    std::vector<std::size_t> meas_index(nn, SIZE_MAX);
    for (std::size_t i = 0; i < nn; ++i)
        for (std::size_t mi = 0; mi < measured.nodes.size(); ++mi)
            if (measured.nodes[mi] == out.nodes[i]) { meas_index[i] = mi; break; }
    bool any = false;
    for (auto v : meas_index) any |= (v != SIZE_MAX);
    if (!any) throw config_error("complete_boundary: measured nodes not found on the Omega boundary");

    out.measured.resize(nn);
    for (std::size_t i = 0; i < nn; ++i) out.measured[i] = meas_index[i] != SIZE_MAX;

    auto psi_at = [&](double s) {
        return detail::psi_completed(measured, homogeneous, meas_index, s);
    };
    out.psi_sbar = psi_at(sg.s_max);
    out.psi_bar.resize((std::size_t)sg.N * nn);
    for (int n = 1; n <= sg.N; ++n) {
        const auto bar = average_psi(psi_at, n, sg);
        std::copy(bar.begin(), bar.end(), out.psi_bar.begin() + (std::size_t)(n - 1) * nn);
    }
    return out;
}

// ---------------------------------------------------------------------------
// PSI1 file format: text header `PSI1 dim nnodes N smin smax h`, coordinate
// table, provenance bitmask as a 0/1 line, then binary doubles: psi(s_max)
// followed by the N interval averages, node-major per interval.

inline void write_psi1(const PseudoFreqBoundaryData& d, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw config_error("cannot open for writing: " + path);
    os << "PSI1 " << d.dim << ' ' << d.nodes.size() << ' ' << d.sgrid.N << ' ';
    os.precision(17);
    os << d.sgrid.s_min << ' ' << d.sgrid.s_max << ' ' << d.sgrid.h << '\n';
    for (const auto& c : d.coords) {
        for (int a = 0; a < d.dim; ++a) os << (a ? " " : "") << c[a];
        os << '\n';
    }
    for (std::size_t i = 0; i < d.measured.size(); ++i) os << (d.measured[i] ? '1' : '0');
    os << '\n';
    detail::write_doubles(os, d.psi_sbar.data(), d.psi_sbar.size());
    detail::write_doubles(os, d.psi_bar.data(), d.psi_bar.size());
    if (!os) throw config_error("write failed: " + path);
}

inline PseudoFreqBoundaryData read_psi1(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw config_error("cannot open: " + path);
    std::string magic;
    std::size_t nnodes = 0;
    int dim = 0, N = 0;
    double smin = 0, smax = 0, h = 0;
    is >> magic >> dim >> nnodes >> N >> smin >> smax >> h;
    if (magic != "PSI1" || nnodes == 0 || N < 1) throw config_error("not a PSI1 file: " + path);
    PseudoFreqBoundaryData d;
    d.dim = dim;
    d.sgrid = PseudoFreqGrid::make(smin, smax, h);
    d.nodes.assign(nnodes, 0);
    d.coords.resize(nnodes);
    for (auto& c : d.coords) {
        c = {0, 0, 0};
        for (int a = 0; a < dim; ++a) is >> c[a];
    }
    std::string mask;
    is >> mask;
    if (mask.size() != nnodes) throw config_error("PSI1: provenance mask size mismatch");
    d.measured.resize(nnodes);
    for (std::size_t i = 0; i < nnodes; ++i) d.measured[i] = mask[i] == '1';
    is.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
    d.psi_sbar.resize(nnodes);
    d.psi_bar.resize((std::size_t)N * nnodes);
    detail::read_doubles(is, d.psi_sbar.data(), d.psi_sbar.size());
    detail::read_doubles(is, d.psi_bar.data(), d.psi_bar.size());
    return d;
}

/// Re-attaches grid node ids to a trace loaded from a TRC1 file by
/// matching coordinates against the Omega boundary of `g`.
inline void rebind_nodes(TimeTrace& tr, const GridSpec& g) {
    const auto bnodes = omega_boundary_nodes(g);
    double tol = 0.0;
    for (int a = 0; a < g.dim; ++a) tol = std::max(tol, 0.25 * g.h[a]);
    for (std::size_t i = 0; i < tr.coords.size(); ++i) {
        bool found = false;
        for (auto idx : bnodes) {
            const auto p = g.node_pos(idx);
            double dist = 0.0;
            for (int a = 0; a < g.dim; ++a) dist = std::max(dist, std::abs(p[a] - tr.coords[i][a]));
            if (dist < tol) { tr.nodes[i] = idx; found = true; break; }
        }
        if (!found) throw config_error("rebind_nodes: no boundary node matches a trace coordinate");
    }
}

/// Re-attaches grid node ids to data loaded from a PSI1 file by matching
/// coordinates against the Omega boundary of `g`.
inline void rebind_nodes(PseudoFreqBoundaryData& d, const GridSpec& g) {
    const auto bnodes = omega_boundary_nodes(g);
    if (bnodes.size() != d.nodes.size())
        throw config_error("rebind_nodes: boundary node count mismatch");
    double tol = 0.0;
    for (int a = 0; a < g.dim; ++a) tol = std::max(tol, 0.25 * g.h[a]);
    for (std::size_t i = 0; i < d.coords.size(); ++i) {
        bool found = false;
        for (auto idx : bnodes) {
            const auto p = g.node_pos(idx);
            double dist = 0.0;
            for (int a = 0; a < g.dim; ++a) dist = std::max(dist, std::abs(p[a] - d.coords[i][a]));
            if (dist < tol) { d.nodes[i] = idx; found = true; break; }
        }
        if (!found) throw config_error("rebind_nodes: no grid node matches a PSI1 coordinate");
    }
}

} // namespace cip
