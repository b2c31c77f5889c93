#pragma once

#include <fstream>
#include <string>

#include "cip/grid.hpp"

namespace cip {

/// Legacy VTK structured-points (ASCII) export; axis 0 maps to VTK x.
inline void export_vtk(const ScalarField& f, const std::string& path,
                       const std::string& field_name = "c") {
    std::ofstream os(path);
    if (!os) throw config_error("cannot open for writing: " + path);
    const GridSpec& g = f.grid;
    os << "# vtk DataFile Version 3.0\n";
    os << field_name << " on " << g.n[0] << "x" << g.n[1] << "x" << g.n[2] << " grid\n";
    os << "ASCII\nDATASET STRUCTURED_POINTS\n";
    os << "DIMENSIONS " << g.n[0] << ' ' << g.n[1] << ' ' << g.n[2] << '\n';
    os.precision(12);
    os << "ORIGIN " << g.lo[0] << ' ' << g.lo[1] << ' ' << (g.dim == 3 ? g.lo[2] : 0.0) << '\n';
    os << "SPACING " << g.h[0] << ' ' << g.h[1] << ' ' << (g.dim == 3 ? g.h[2] : 1.0) << '\n';
    os << "POINT_DATA " << g.node_count() << '\n';
    os << "SCALARS " << field_name << " double 1\nLOOKUP_TABLE default\n";
    // VTK wants x fastest
    for (int k = 0; k < g.n[2]; ++k)
        for (int j = 0; j < g.n[1]; ++j)
            for (int i = 0; i < g.n[0]; ++i)
                os << f.at(i, j, k) << '\n';
    if (!os) throw config_error("write failed: " + path);
}

} // namespace cip
