#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "cip/errors.hpp"

namespace cip {

/// Rectangular node grid over the computational domain G with the
/// inverse-problem subdomain Omega strictly inside.  Node (i,j,k) sits at
/// lo + index*h per axis; Omega occupies the inclusive index box
/// [oi0, oi1].  Values are stored row-major, last axis fastest.
struct GridSpec {
    int dim = 2;
    std::array<double, 3> lo{};
    std::array<double, 3> hi{};
    std::array<double, 3> h{1, 1, 1};
    std::array<int, 3> n{1, 1, 1};
    std::array<int, 3> oi0{};
    std::array<int, 3> oi1{};

    /// Builds a grid for G = [lo,hi] with target spacing `mesh` and Omega
    /// snapped to the nearest nodes.  Node counts are rounded so the
    /// spacing divides each extent; the actual h per axis may differ
    /// slightly from `mesh` when the extent is not a multiple of it.
    static GridSpec make(int dim,
                         std::array<double, 3> lo, std::array<double, 3> hi,
                         double mesh,
                         std::array<double, 3> omega_lo,
                         std::array<double, 3> omega_hi) {
        if (dim != 2 && dim != 3) throw config_error("GridSpec: dim must be 2 or 3");
        if (mesh <= 0.0) throw config_error("GridSpec: mesh_size must be > 0");
        GridSpec g;
        g.dim = dim;
        g.lo = lo;
        g.hi = hi;
        for (int a = 0; a < dim; ++a) {
            const double ext = hi[a] - lo[a];
            if (ext <= 0.0) throw config_error("GridSpec: hi <= lo on axis " + std::to_string(a));
            int cells = std::max(2, (int)std::lround(ext / mesh));
            g.n[a] = cells + 1;
            g.h[a] = ext / cells;
            int i0 = (int)std::lround((omega_lo[a] - lo[a]) / g.h[a]);
            int i1 = (int)std::lround((omega_hi[a] - lo[a]) / g.h[a]);
            if (i0 < 1 || i1 > cells - 1 || i1 - i0 < 2)
                throw config_error("GridSpec: Omega must be strictly inside G with >= 3 nodes, axis " +
                                   std::to_string(a));
            g.oi0[a] = i0;
            g.oi1[a] = i1;
        }
        for (int a = dim; a < 3; ++a) { g.n[a] = 1; g.oi0[a] = 0; g.oi1[a] = 0; g.h[a] = 1.0; }
        return g;
    }

    std::size_t node_count() const {
        return (std::size_t)n[0] * n[1] * n[2];
    }
    std::size_t index(int i, int j, int k = 0) const {
        return ((std::size_t)i * n[1] + j) * n[2] + k;
    }
    void unflatten(std::size_t idx, std::array<int, 3>& ijk) const {
        ijk[2] = (int)(idx % n[2]); idx /= n[2];
        ijk[1] = (int)(idx % n[1]);
        ijk[0] = (int)(idx / n[1]);
    }
    double coord(int axis, int i) const { return lo[axis] + i * h[axis]; }

    std::array<double, 3> node_pos(std::size_t idx) const {
        std::array<int, 3> ijk;
        unflatten(idx, ijk);
        return {coord(0, ijk[0]), coord(1, ijk[1]), dim == 3 ? coord(2, ijk[2]) : 0.0};
    }

    double omega_lo(int axis) const { return coord(axis, oi0[axis]); }
    double omega_hi(int axis) const { return coord(axis, oi1[axis]); }

    /// True on the closed box Omega-bar.
    bool in_omega(const std::array<int, 3>& ijk) const {
        for (int a = 0; a < dim; ++a)
            if (ijk[a] < oi0[a] || ijk[a] > oi1[a]) return false;
        return true;
    }
    bool on_omega_boundary(const std::array<int, 3>& ijk) const {
        if (!in_omega(ijk)) return false;
        for (int a = 0; a < dim; ++a)
            if (ijk[a] == oi0[a] || ijk[a] == oi1[a]) return true;
        return false;
    }
    bool in_omega_interior(const std::array<int, 3>& ijk) const {
        for (int a = 0; a < dim; ++a)
            if (ijk[a] <= oi0[a] || ijk[a] >= oi1[a]) return false;
        return true;
    }
    bool on_g_boundary(const std::array<int, 3>& ijk) const {
        for (int a = 0; a < dim; ++a)
            if (ijk[a] == 0 || ijk[a] == n[a] - 1) return true;
        return false;
    }

    bool same_layout(const GridSpec& o) const {
        return dim == o.dim && n == o.n && lo == o.lo && hi == o.hi;
    }
};

/// One real value per grid node, row-major.
struct ScalarField {
    GridSpec grid;
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(const GridSpec& g, double fill = 0.0)
        : grid(g), values(g.node_count(), fill) {}

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    double& at(int i, int j, int k = 0) { return values[grid.index(i, j, k)]; }
    double at(int i, int j, int k = 0) const { return values[grid.index(i, j, k)]; }

    bool all_finite() const {
        for (double v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

enum class BoundaryTag : std::uint8_t {
    backscatter, // Gamma, the illuminated face of Omega
    lateral,
    bottom,
    top,
    back,
    front,
};

/// Plain node list with a side tag; regions returned by the enumerators
/// below partition the boundary they describe.
struct BoundaryRegion {
    BoundaryTag tag;
    std::vector<std::size_t> nodes; // flattened G-grid indices
};

/// All nodes of the closed boundary of Omega, in index order.
inline std::vector<std::size_t> omega_boundary_nodes(const GridSpec& g) {
    std::vector<std::size_t> out;
    std::array<int, 3> ijk;
    for (int i = g.oi0[0]; i <= g.oi1[0]; ++i)
        for (int j = g.oi0[1]; j <= g.oi1[1]; ++j)
            for (int k = g.oi0[2]; k <= g.oi1[2]; ++k) {
                ijk = {i, j, k};
                if (g.on_omega_boundary(ijk)) out.push_back(g.index(i, j, k));
            }
    return out;
}

/// The face of Omega nearest the illumination source: axis plus side
/// (+1 = the `hi` face).  Nodes strictly on that face, corners included.
inline std::vector<std::size_t> omega_face_nodes(const GridSpec& g, int axis, int side) {
    std::vector<std::size_t> out;
    const int fixed = side > 0 ? g.oi1[axis] : g.oi0[axis];
    std::array<int, 3> i0 = g.oi0, i1 = g.oi1;
    i0[axis] = i1[axis] = fixed;
    for (int i = i0[0]; i <= i1[0]; ++i)
        for (int j = i0[1]; j <= i1[1]; ++j)
            for (int k = i0[2]; k <= i1[2]; ++k)
                out.push_back(g.index(i, j, k));
    return out;
}

/// Partition of the Omega boundary into the backscattering face and the
/// rest, given the source face (axis, side).
inline std::vector<BoundaryRegion> omega_boundary_regions(const GridSpec& g, int src_axis, int src_side) {
    BoundaryRegion gamma{BoundaryTag::backscatter, omega_face_nodes(g, src_axis, src_side)};
    std::vector<std::size_t> rest;
    std::vector<bool> on_gamma(g.node_count(), false);
    for (auto idx : gamma.nodes) on_gamma[idx] = true;
    for (auto idx : omega_boundary_nodes(g))
        if (!on_gamma[idx]) rest.push_back(idx);
    BoundaryRegion other{BoundaryTag::lateral, std::move(rest)};
    return {std::move(gamma), std::move(other)};
}

namespace detail {

/// Second-order first derivative along `axis` at node position p.
/// Centered inside, one-sided three-point on the G faces.
inline double d1(const ScalarField& f, std::array<int, 3> p, int axis) {
    const GridSpec& g = f.grid;
    const double h = g.h[axis];
    auto v = [&](int off) {
        auto q = p;
        q[axis] += off;
        return f.at(q[0], q[1], q[2]);
    };
    const int i = p[axis], last = g.n[axis] - 1;
    if (i == 0) return (-3.0 * v(0) + 4.0 * v(1) - v(2)) / (2.0 * h);
    if (i == last) return (3.0 * v(0) - 4.0 * v(-1) + v(-2)) / (2.0 * h);
    return (v(1) - v(-1)) / (2.0 * h);
}

} // namespace detail

/// Componentwise second-order gradient; one field per axis.
inline std::vector<ScalarField> gradient(const ScalarField& f) {
    const GridSpec& g = f.grid;
    std::vector<ScalarField> out(g.dim, ScalarField(g));
    for (int i = 0; i < g.n[0]; ++i)
        for (int j = 0; j < g.n[1]; ++j)
            for (int k = 0; k < g.n[2]; ++k) {
                std::array<int, 3> p{i, j, k};
                const std::size_t idx = g.index(i, j, k);
                for (int a = 0; a < g.dim; ++a)
                    out[a][idx] = detail::d1(f, p, a);
            }
    return out;
}

/// 5-point (2D) / 7-point (3D) Laplacian at interior nodes.  G-boundary
/// nodes copy the nearest interior value; consumers only read inside
/// Omega, which never touches the G faces.
inline ScalarField laplacian(const ScalarField& f) {
    const GridSpec& g = f.grid;
    ScalarField out(g);
    for (int i = 0; i < g.n[0]; ++i)
        for (int j = 0; j < g.n[1]; ++j)
            for (int k = 0; k < g.n[2]; ++k) {
                std::array<int, 3> p{i, j, k};
                bool interior = true;
                for (int a = 0; a < g.dim; ++a)
                    if (p[a] == 0 || p[a] == g.n[a] - 1) interior = false;
                if (!interior) continue;
                double acc = 0.0;
                for (int a = 0; a < g.dim; ++a) {
                    auto q = p;
                    q[a] = p[a] - 1;
                    const double vm = f.at(q[0], q[1], q[2]);
                    q[a] = p[a] + 1;
                    const double vp = f.at(q[0], q[1], q[2]);
                    acc += (vp - 2.0 * f.at(p[0], p[1], p[2]) + vm) / (g.h[a] * g.h[a]);
                }
                out.at(i, j, k) = acc;
            }
    // faces copy the nearest interior value
    for (int i = 0; i < g.n[0]; ++i)
        for (int j = 0; j < g.n[1]; ++j)
            for (int k = 0; k < g.n[2]; ++k) {
                std::array<int, 3> p{i, j, k};
                auto q = p;
                for (int a = 0; a < g.dim; ++a)
                    q[a] = std::clamp(q[a], 1, g.n[a] - 2);
                if (q != p) out.at(i, j, k) = out.at(q[0], q[1], q[2]);
            }
    return out;
}

/// Trapezoidal quadrature weight of a node inside the closed Omega box
/// (1/2 per axis on an Omega face, product over axes, times cell volume).
inline double omega_quad_weight(const GridSpec& g, const std::array<int, 3>& ijk) {
    double w = 1.0;
    for (int a = 0; a < g.dim; ++a) {
        w *= g.h[a];
        if (ijk[a] == g.oi0[a] || ijk[a] == g.oi1[a]) w *= 0.5;
    }
    return w;
}

inline double l2_norm_omega(const ScalarField& f) {
    const GridSpec& g = f.grid;
    double acc = 0.0;
    for (int i = g.oi0[0]; i <= g.oi1[0]; ++i)
        for (int j = g.oi0[1]; j <= g.oi1[1]; ++j)
            for (int k = g.oi0[2]; k <= g.oi1[2]; ++k) {
                std::array<int, 3> p{i, j, k};
                const double v = f.at(i, j, k);
                acc += v * v * omega_quad_weight(g, p);
            }
    return std::sqrt(acc);
}

/// ||a-b||_{L2(Omega)} / ||a||_{L2(Omega)} by node quadrature.
inline double l2_relative_diff(const ScalarField& a, const ScalarField& b) {
    if (!a.grid.same_layout(b.grid)) throw config_error("l2_relative_diff: grid mismatch");
    const double na = l2_norm_omega(a);
    if (na == 0.0) throw numeric_error("l2_relative_diff: zero denominator");
    ScalarField d = a;
    for (std::size_t i = 0; i < d.values.size(); ++i) d.values[i] -= b.values[i];
    return l2_norm_omega(d) / na;
}

/// Local averaging: each node becomes the mean of itself and its existing
/// face neighbors, repeated `passes` times.  Preserves constants exactly.
inline ScalarField mollify(const ScalarField& f, int passes) {
    if (passes < 0) throw config_error("mollify: passes must be >= 0");
    const GridSpec& g = f.grid;
    ScalarField cur = f;
    for (int pass = 0; pass < passes; ++pass) {
        ScalarField next(g);
        for (int i = 0; i < g.n[0]; ++i)
            for (int j = 0; j < g.n[1]; ++j)
                for (int k = 0; k < g.n[2]; ++k) {
                    std::array<int, 3> p{i, j, k};
                    double acc = cur.at(i, j, k);
                    int cnt = 1;
                    for (int a = 0; a < g.dim; ++a)
                        for (int off : {-1, 1}) {
                            auto q = p;
                            q[a] += off;
                            if (q[a] < 0 || q[a] >= g.n[a]) continue;
                            acc += cur.at(q[0], q[1], q[2]);
                            ++cnt;
                        }
                    next.at(i, j, k) = acc / cnt;
                }
        cur = std::move(next);
    }
    return cur;
}

// ---------------------------------------------------------------------------
// FLD1 file format: text header `FLD1 dim n1 n2 [n3] lo... hi...` followed
// by node values as little-endian 64-bit floats, row-major.

namespace detail {

inline void write_doubles(std::ostream& os, const double* p, std::size_t count) {
    // assumes a little-endian host, as every supported target is
    os.write(reinterpret_cast<const char*>(p), (std::streamsize)(count * sizeof(double)));
}

inline void read_doubles(std::istream& is, double* p, std::size_t count) {
    is.read(reinterpret_cast<char*>(p), (std::streamsize)(count * sizeof(double)));
    if (!is) throw config_error("unexpected end of file while reading binary payload");
}

} // namespace detail

inline void write_fld1(const ScalarField& f, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw config_error("cannot open for writing: " + path);
    const GridSpec& g = f.grid;
    os << "FLD1 " << g.dim;
    for (int a = 0; a < g.dim; ++a) os << ' ' << g.n[a];
    os.precision(17);
    for (int a = 0; a < g.dim; ++a) os << ' ' << g.lo[a];
    for (int a = 0; a < g.dim; ++a) os << ' ' << g.hi[a];
    os << '\n';
    detail::write_doubles(os, f.values.data(), f.values.size());
    if (!os) throw config_error("write failed: " + path);
}

/// Reads an FLD1 file.  The header carries no Omega extents; the returned
/// grid gets a default one-cell inset, callers that care supply their own.
inline ScalarField read_fld1(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw config_error("cannot open: " + path);
    std::string magic;
    int dim = 0;
    is >> magic >> dim;
    if (magic != "FLD1" || (dim != 2 && dim != 3)) throw config_error("not an FLD1 file: " + path);
    std::array<int, 3> n{1, 1, 1};
    std::array<double, 3> lo{}, hi{};
    for (int a = 0; a < dim; ++a) is >> n[a];
    for (int a = 0; a < dim; ++a) is >> lo[a];
    for (int a = 0; a < dim; ++a) is >> hi[a];
    if (!is) throw config_error("bad FLD1 header: " + path);
    is.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
    GridSpec g;
    g.dim = dim;
    g.lo = lo;
    g.hi = hi;
    g.n = n;
    for (int a = 0; a < dim; ++a) {
        if (n[a] < 3) throw config_error("FLD1: node count < 3");
        g.h[a] = (hi[a] - lo[a]) / (n[a] - 1);
        g.oi0[a] = 1;
        g.oi1[a] = n[a] - 2;
    }
    ScalarField f(g);
    detail::read_doubles(is, f.values.data(), f.values.size());
    return f;
}

} // namespace cip
