#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cip/manifest.hpp"
#include "cip/scenario.hpp"
#include "cip/vtk.hpp"

using namespace cip;

TEST_CASE("built-in scenarios validate and differ as documented") {
    for (const char* name : {"test1_2d", "test2_2d", "test3_3d", "test4_3d", "test5_3d"}) {
        auto sc = builtin_scenario(name);
        REQUIRE(sc.has_value());
        CHECK_NOTHROW(sc->validate());
        CHECK(sc->name == name);
    }
    CHECK(!builtin_scenario("nope").has_value());
    CHECK(scenario_test2_2d().algo.m == 6);
    CHECK(scenario_test2_2d().algo.first_tail == FirstTail::harmonic);
    CHECK(scenario_test5_3d().algo.c_max.value() == 10.0);
    CHECK(scenario_test5_3d().boxes.size() == 2);
}

TEST_CASE("scenario JSON serialization round-trips") {
    const Scenario sc = scenario_test5_3d();
    const Scenario rt = scenario_from_json(to_json(sc));
    CHECK(rt.name == sc.name);
    CHECK(rt.dim == sc.dim);
    CHECK(rt.mesh_size == sc.mesh_size);
    REQUIRE(rt.boxes.size() == sc.boxes.size());
    for (std::size_t i = 0; i < sc.boxes.size(); ++i) {
        CHECK(rt.boxes[i].c == sc.boxes[i].c);
        CHECK(rt.boxes[i].lo == sc.boxes[i].lo);
    }
    CHECK(rt.sgrid.N == sc.sgrid.N);
    CHECK(rt.algo.m == sc.algo.m);
    CHECK(rt.algo.first_tail == sc.algo.first_tail);
    CHECK(rt.algo.c_max == sc.algo.c_max);
    CHECK(rt.wave.source_axis == sc.wave.source_axis);
    CHECK(rt.noise_sigma == sc.noise_sigma);
    CHECK(to_json(rt) == to_json(sc)); // lossless
}

TEST_CASE("malformed scenarios fail with a pointed message") {
    nlohmann::json j = to_json(scenario_test1_2d());
    j["boxes"][0]["hi"][1] = 10.0; // leaves Omega
    try {
        scenario_from_json(j);
        FAIL("expected a validation error");
    } catch (const config_error& e) {
        CHECK(std::string(e.what()).find("box 0") != std::string::npos);
    }

    nlohmann::json missing = to_json(scenario_test1_2d());
    missing.erase("sgrid");
    CHECK_THROWS_AS(scenario_from_json(missing), config_error);

    nlohmann::json bad_c = to_json(scenario_test1_2d());
    bad_c["boxes"][0]["c"] = 0.5;
    CHECK_THROWS_AS(scenario_from_json(bad_c), config_error);
}

TEST_CASE("load_scenario resolves names and files") {
    CHECK(load_scenario("test3_3d").dim == 3);
    const auto path = (std::filesystem::temp_directory_path() / "cip_sc.json").string();
    {
        std::ofstream os(path);
        os << to_json(scenario_test1_2d()).dump();
    }
    CHECK(load_scenario(path).name == "test1_2d");
    std::filesystem::remove(path);
    CHECK_THROWS_AS(load_scenario("/no/such/file.json"), config_error);
}

TEST_CASE("VTK export header and scalar range") {
    const GridSpec g = GridSpec::make(2, {0, 0, 0}, {1, 2, 0}, 0.25,
                                      {0.25, 0.25, 0}, {0.75, 1.75, 0});
    ScalarField f(g, 7.0);
    const auto path = (std::filesystem::temp_directory_path() / "cip_io.vtk").string();
    export_vtk(f, path, "c");
    std::ifstream is(path);
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    CHECK(text.find("DATASET STRUCTURED_POINTS") != std::string::npos);
    std::ostringstream dims;
    dims << "DIMENSIONS " << g.n[0] << ' ' << g.n[1] << ' ' << g.n[2];
    CHECK(text.find(dims.str()) != std::string::npos);
    CHECK(text.find("POINT_DATA " + std::to_string(g.node_count())) != std::string::npos);
    // constant field: every scalar equals 7 (min == max)
    std::size_t count = 0, pos = 0;
    while ((pos = text.find("\n7\n", pos)) != std::string::npos) { ++count; ++pos; }
    CHECK(count >= g.node_count() - 1);
    std::filesystem::remove(path);
}

TEST_CASE("manifest pins the configuration") {
    const auto out = (std::filesystem::temp_directory_path() / "cip_io_out.fld1").string();
    nlohmann::json cfg = {{"alpha", 1}, {"beta", "two"}};
    write_manifest(out, cfg, 99);
    std::ifstream is(out + ".manifest.json");
    REQUIRE(is.good());
    nlohmann::json m;
    is >> m;
    CHECK(m["seed"] == 99);
    CHECK(m["config"] == cfg);
    CHECK(m["config_hash"] == config_hash(cfg.dump()));
    CHECK(m["version"] == kVersion);
    // the hash actually depends on the content
    CHECK(config_hash(cfg.dump()) != config_hash(cfg.dump() + " "));
    std::filesystem::remove(out + ".manifest.json");
}
