#pragma once

#include <array>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cip/grid.hpp"
#include "cip/laplace.hpp"
#include "cip/recon.hpp"
#include "cip/wave.hpp"

namespace cip {

/// Axis-aligned inclusion with a constant coefficient value.
struct TargetBox {
    std::array<double, 3> lo{};
    std::array<double, 3> hi{};
    double c = 1.0;
};

/// Complete description of one synthetic experiment: geometry, true
/// coefficient, source, pseudo-frequency grid, algorithm settings, noise.
struct Scenario {
    std::string name;
    int dim = 2;
    std::array<double, 3> g_lo{}, g_hi{};
    std::array<double, 3> omega_lo{}, omega_hi{};
    double mesh_size = 0.125;
    std::vector<TargetBox> boxes; // painted in order over background 1
    WaveConfig wave;
    PseudoFreqGrid sgrid;
    AlgoConfig algo;
    double noise_sigma = 0.0;
    std::uint64_t noise_seed = 0;

    GridSpec grid() const {
        return GridSpec::make(dim, g_lo, g_hi, mesh_size, omega_lo, omega_hi);
    }

    ScalarField true_c(const GridSpec& g) const {
        ScalarField c(g, 1.0);
        std::array<int, 3> p;
        for (std::size_t idx = 0; idx < c.values.size(); ++idx) {
            g.unflatten(idx, p);
            const auto pos = g.node_pos(idx);
            for (const auto& b : boxes) {
                bool inside = true;
                for (int a = 0; a < dim; ++a)
                    if (pos[a] < b.lo[a] - 1e-12 || pos[a] > b.hi[a] + 1e-12) inside = false;
                if (inside) c.values[idx] = b.c;
            }
        }
        return c;
    }

    void validate() const {
        GridSpec g = grid(); // throws on geometry problems
        for (std::size_t bi = 0; bi < boxes.size(); ++bi) {
            const auto& b = boxes[bi];
            if (b.c < 1.0)
                throw config_error("scenario " + name + ": box " + std::to_string(bi) +
                                   " has c < 1");
            for (int a = 0; a < dim; ++a)
                if (b.lo[a] < g.omega_lo(a) - 1e-9 || b.hi[a] > g.omega_hi(a) + 1e-9)
                    throw config_error("scenario " + name + ": box " + std::to_string(bi) +
                                       " extends outside Omega on axis " + std::to_string(a));
        }
        wave.validate(g);
        algo.validate();
        if (noise_sigma < 0.0) throw config_error("scenario: noise sigma must be >= 0");
    }
};

// --- JSON (de)serialization -------------------------------------------------

inline nlohmann::json to_json(const Scenario& sc) {
    nlohmann::json j;
    j["name"] = sc.name;
    j["dim"] = sc.dim;
    auto arr = [&](const std::array<double, 3>& a) {
        return std::vector<double>(a.begin(), a.begin() + sc.dim);
    };
    j["g_lo"] = arr(sc.g_lo);
    j["g_hi"] = arr(sc.g_hi);
    j["omega_lo"] = arr(sc.omega_lo);
    j["omega_hi"] = arr(sc.omega_hi);
    j["mesh_size"] = sc.mesh_size;
    for (const auto& b : sc.boxes)
        j["boxes"].push_back({{"lo", arr(b.lo)}, {"hi", arr(b.hi)}, {"c", b.c}});
    j["wave"] = {{"omega_src", sc.wave.omega_src}, {"T", sc.wave.T}, {"tau", sc.wave.tau},
                 {"source_axis", sc.wave.source_axis}, {"source_side", sc.wave.source_side}};
    j["sgrid"] = {{"s_min", sc.sgrid.s_min}, {"s_max", sc.sgrid.s_max}, {"h", sc.sgrid.h}};
    nlohmann::json a;
    a["lambda"] = sc.algo.lambda;
    a["m"] = sc.algo.m;
    a["eta"] = sc.algo.eta;
    if (sc.algo.c_max) a["c_max"] = *sc.algo.c_max;
    a["tail_mode"] = sc.algo.tail_mode == TailMode::fast ? "fast" : "time-domain";
    a["first_tail"] = sc.algo.first_tail == FirstTail::harmonic ? "harmonic"
                      : sc.algo.first_tail == FirstTail::exact_from_true_c ? "exact-from-true-c"
                                                                           : "homogeneous-medium";
    a["mollify_passes"] = sc.algo.mollify_passes;
    a["d"] = sc.algo.d;
    j["algo"] = a;
    j["noise"] = {{"sigma", sc.noise_sigma}, {"seed", sc.noise_seed}};
    return j;
}

inline Scenario scenario_from_json(const nlohmann::json& j) {
    Scenario sc;
    try {
        sc.name = j.at("name").get<std::string>();
        sc.dim = j.at("dim").get<int>();
        auto arr = [&](const nlohmann::json& v, const char* field) {
            if (!v.is_array() || (int)v.size() != sc.dim)
                throw config_error(std::string("scenario field '") + field +
                                   "' must be an array of length dim");
            std::array<double, 3> a{};
            for (int i = 0; i < sc.dim; ++i) a[i] = v[i].get<double>();
            return a;
        };
        sc.g_lo = arr(j.at("g_lo"), "g_lo");
        sc.g_hi = arr(j.at("g_hi"), "g_hi");
        sc.omega_lo = arr(j.at("omega_lo"), "omega_lo");
        sc.omega_hi = arr(j.at("omega_hi"), "omega_hi");
        sc.mesh_size = j.at("mesh_size").get<double>();
        if (j.contains("boxes"))
            for (const auto& b : j["boxes"])
                sc.boxes.push_back({arr(b.at("lo"), "boxes.lo"), arr(b.at("hi"), "boxes.hi"),
                                    b.at("c").get<double>()});
        const auto& w = j.at("wave");
        sc.wave.omega_src = w.at("omega_src").get<double>();
        sc.wave.T = w.at("T").get<double>();
        sc.wave.tau = w.value("tau", 0.0);
        sc.wave.source_axis = w.value("source_axis", -1);
        sc.wave.source_side = w.value("source_side", +1);
        const auto& s = j.at("sgrid");
        sc.sgrid = PseudoFreqGrid::make(s.at("s_min").get<double>(), s.at("s_max").get<double>(),
                                        s.at("h").get<double>());
        const auto& a = j.at("algo");
        sc.algo.sgrid = sc.sgrid;
        sc.algo.lambda = a.value("lambda", 0.0);
        sc.algo.m = a.value("m", 5);
        sc.algo.eta = a.value("eta", 0.01);
        if (a.contains("c_max")) sc.algo.c_max = a["c_max"].get<double>();
        const std::string tm = a.value("tail_mode", "time-domain");
        if (tm == "fast") sc.algo.tail_mode = TailMode::fast;
        else if (tm == "time-domain") sc.algo.tail_mode = TailMode::time_domain;
        else throw config_error("scenario: unknown tail_mode '" + tm + "'");
        const std::string ft = a.value("first_tail", "homogeneous-medium");
        if (ft == "harmonic") sc.algo.first_tail = FirstTail::harmonic;
        else if (ft == "homogeneous-medium") sc.algo.first_tail = FirstTail::homogeneous_medium;
        else if (ft == "exact-from-true-c") sc.algo.first_tail = FirstTail::exact_from_true_c;
        else throw config_error("scenario: unknown first_tail '" + ft + "'");
        sc.algo.mollify_passes = a.value("mollify_passes", 2);
        sc.algo.d = a.value("d", 10.0);
        if (j.contains("noise")) {
            sc.noise_sigma = j["noise"].value("sigma", 0.0);
            sc.noise_seed = j["noise"].value("seed", (std::uint64_t)0);
        }
    } catch (const nlohmann::json::exception& e) {
        throw config_error(std::string("scenario schema violation: ") + e.what());
    }
    sc.validate();
    return sc;
}

// --- Built-in scenarios -----------------------------------------------------

/// Two mine-like targets (c = 4) buried at depth x2 = 2.5 in a background
/// of 1; the paper does not pin the horizontal positions, ours sit at
/// x1 = -1 and +1.
inline Scenario scenario_test1_2d() {
    Scenario sc;
    sc.name = "test1_2d";
    sc.dim = 2;
    sc.g_lo = {-4.0, -1.0};
    sc.g_hi = {4.0, 4.0};
    sc.omega_lo = {-3.5, -0.5};
    sc.omega_hi = {3.5, 3.5};
    sc.mesh_size = 0.125;
    sc.boxes.push_back({{-1.5, 2.0}, {-0.5, 3.0}, 4.0});
    sc.boxes.push_back({{0.0, 2.0}, {2.0, 3.0}, 4.0});
    sc.wave.omega_src = 7.0;
    sc.wave.T = 6.0;
    sc.sgrid = PseudoFreqGrid::make(2.0, 3.0, 0.05);
    sc.algo.sgrid = sc.sgrid;
    sc.algo.m = 5;
    sc.algo.first_tail = FirstTail::homogeneous_medium;
    // Piecewise-constant box targets: the pointwise coefficient update is
    // sharper without smoothing, so the built-in scenarios disable it.
    sc.algo.mollify_passes = 0;
    sc.noise_sigma = 0.05;
    sc.noise_seed = 1337;
    return sc;
}

inline Scenario scenario_test2_2d() {
    Scenario sc = scenario_test1_2d();
    sc.name = "test2_2d";
    sc.algo.m = 6;
    sc.algo.first_tail = FirstTail::harmonic;
    return sc;
}

/// 3D belt (c = 3.2) inside the prism Omega; wave enters through the
/// front face z = min and the backscattering side is the front of Omega.
inline Scenario scenario_test3_3d() {
    Scenario sc;
    sc.name = "test3_3d";
    sc.dim = 3;
    sc.g_lo = {-0.5, -1.08, -0.32};
    sc.g_hi = {0.5, 1.08, 0.32};
    sc.omega_lo = {-0.3, -1.0, -0.08};
    sc.omega_hi = {0.3, 1.0, 0.08};
    sc.mesh_size = 0.04;
    sc.boxes.push_back({{-0.26, -0.15, -0.04}, {0.26, 0.15, 0.04}, 3.2});
    sc.wave.omega_src = 21.0;
    sc.wave.T = 1.0;
    sc.wave.tau = 0.001;
    sc.wave.source_axis = 2;
    sc.wave.source_side = -1;
    sc.sgrid = PseudoFreqGrid::make(4.0, 11.0, 1.0);
    sc.algo.sgrid = sc.sgrid;
    sc.algo.m = 2;
    sc.algo.first_tail = FirstTail::homogeneous_medium;
    sc.algo.mollify_passes = 0;
    sc.noise_sigma = 0.05;
    sc.noise_seed = 1337;
    return sc;
}

inline Scenario scenario_test4_3d() {
    Scenario sc = scenario_test3_3d();
    sc.name = "test4_3d";
    sc.sgrid = PseudoFreqGrid::make(8.0, 8.85, 0.05);
    sc.algo.sgrid = sc.sgrid;
    sc.algo.m = 2;
    sc.algo.first_tail = FirstTail::harmonic;
    return sc;
}

/// The heterogeneous case: body c = 80 filling Omega around the belt,
/// reconstruction truncated to [1, 10].
inline Scenario scenario_test5_3d() {
    Scenario sc = scenario_test3_3d();
    sc.name = "test5_3d";
    sc.boxes.clear();
    sc.boxes.push_back({{-0.3, -1.0, -0.08}, {0.3, 1.0, 0.08}, 80.0});
    sc.boxes.push_back({{-0.26, -0.15, -0.04}, {0.26, 0.15, 0.04}, 3.2});
    sc.sgrid = PseudoFreqGrid::make(8.0, 8.8, 0.05);
    sc.algo.sgrid = sc.sgrid;
    sc.algo.m = 3;
    sc.algo.first_tail = FirstTail::harmonic;
    sc.algo.c_max = 10.0;
    return sc;
}

inline std::optional<Scenario> builtin_scenario(const std::string& name) {
    if (name == "test1_2d") return scenario_test1_2d();
    if (name == "test2_2d") return scenario_test2_2d();
    if (name == "test3_3d") return scenario_test3_3d();
    if (name == "test4_3d") return scenario_test4_3d();
    if (name == "test5_3d") return scenario_test5_3d();
    return std::nullopt;
}

/// Loads a scenario: a built-in name or a path to a JSON file.
inline Scenario load_scenario(const std::string& name_or_path) {
    if (auto sc = builtin_scenario(name_or_path)) return *sc;
    std::ifstream is(name_or_path);
    if (!is) throw config_error("no built-in scenario and no file named '" + name_or_path + "'");
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw config_error("scenario parse error in " + name_or_path + ": " + e.what());
    }
    return scenario_from_json(j);
}

// --- Data generation pipeline ----------------------------------------------

/// Synthesizes boundary data for a scenario end to end: forward solve with
/// the true coefficient, noise on the backscattering trace, homogeneous
/// completion on the rest of the Omega boundary.  `full_boundary` keeps
/// measured data everywhere instead (verification setups).
inline PseudoFreqBoundaryData synthesize_data(const Scenario& sc, const GridSpec& g,
                                              bool full_boundary = false,
                                              bool noiseless = false) {
    const ScalarField ctrue = sc.true_c(g);
    const ScalarField ones(g, 1.0);
    const auto all_bnodes = omega_boundary_nodes(g);
    TimeTrace tr_true = solve_forward(ctrue, sc.wave, all_bnodes);
    TimeTrace tr_unif = solve_forward(ones, sc.wave, all_bnodes);

    TimeTrace measured;
    if (full_boundary) {
        measured = tr_true;
    } else {
        const auto gamma = omega_face_nodes(g, sc.wave.resolved_axis(g), sc.wave.source_side);
        measured.nodes = gamma;
        measured.tau = tr_true.tau;
        measured.T = tr_true.T;
        measured.nsteps = tr_true.nsteps;
        measured.samples.resize(gamma.size() * (std::size_t)tr_true.nsteps);
        for (std::size_t gi = 0; gi < gamma.size(); ++gi) {
            measured.coords.push_back(g.node_pos(gamma[gi]));
            std::size_t src = SIZE_MAX;
            for (std::size_t bi = 0; bi < all_bnodes.size(); ++bi)
                if (all_bnodes[bi] == gamma[gi]) { src = bi; break; }
            for (int j = 0; j < tr_true.nsteps; ++j)
                measured.sample(gi, j) = tr_true.sample(src, j);
        }
    }
    if (!noiseless && sc.noise_sigma > 0.0)
        measured = add_noise(measured, sc.noise_sigma, sc.noise_seed);
    return complete_boundary(g, measured, tr_unif, sc.sgrid);
}

} // namespace cip
