#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <set>
#include <sys/wait.h>

#include "uncrit/cases.hpp"
#include "uncrit/io.hpp"

using namespace uncrit;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int exit_code = 0;
    fs::path dir;
};

fs::path fresh_dir(const std::string& name) {
    const auto p = fs::temp_directory_path() / "uncrit_cli_tests" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(UNCRIT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

} // namespace

TEST_CASE("cli: extract on the built-in helicoid") {
    const auto dir = fresh_dir("extract_helicoid");
    const int rc = run_cli("extract --case helicoid --case-n 121 --out " + dir.string());
    REQUIRE(rc == 0);
    const json comps = parse_json_file(dir / "components.json");
    REQUIRE(comps["ucps"].size() == 2);
    std::set<std::string> types;
    for (const auto& u : comps["ucps"]) types.insert(u["type"].get<std::string>());
    CHECK(types == std::set<std::string>{"maximum", "minimum"});
    CHECK(fs::exists(dir / "patchgraph.json"));

    SECTION("rerun is byte-identical") {
        const std::string first = read_file(dir / "components.json");
        const std::string graph_first = read_file(dir / "patchgraph.json");
        REQUIRE(run_cli("extract --case helicoid --case-n 121 --out " + dir.string()) == 0);
        CHECK(read_file(dir / "components.json") == first);
        CHECK(read_file(dir / "patchgraph.json") == graph_first);
    }
}

TEST_CASE("cli: extract from files, exit code 3 on malformed input") {
    const auto dir = fresh_dir("extract_files");
    Grid g = build_line_grid(linspace(-1.0, 1.0, 21));
    LinearFamily fam;
    fam.g.assign(2, std::vector<double>(21));
    for (int v = 0; v < 21; ++v) {
        fam.g[0][v] = g.x(v) * g.x(v);
        fam.g[1][v] = g.x(v);
    }
    write_file(dir / "grid.json", dump_deterministic(grid_to_json(g)));
    write_file(dir / "family.json", dump_deterministic(family_to_json(fam)));
    REQUIRE(run_cli("extract --grid " + (dir / "grid.json").string() + " --family " +
                    (dir / "family.json").string() + " --out " + dir.string()) == 0);

    SECTION("empty family file") {
        write_file(dir / "empty.json", "{\"m\":1,\"g0\":[],\"modes\":[[]]}");
        CHECK(run_cli("extract --grid " + (dir / "grid.json").string() + " --family " +
                      (dir / "empty.json").string() + " --out " + dir.string()) == 3);
    }
    SECTION("missing inputs are a config error") {
        CHECK(run_cli("extract --out " + dir.string()) == 2);
    }
    SECTION("nonexistent file") {
        CHECK(run_cli("extract --grid /nonexistent.json --family " +
                      (dir / "family.json").string()) == 3);
    }
}

TEST_CASE("cli: probability with regions and joints") {
    const auto dir = fresh_dir("probability");
    const std::string regions =
        R"('[{"name":"p1","interval":[0,6.283185307179586]},{"name":"p2","interval":[6.283185307179586,12.566370614359172]}]')";
    const int rc = run_cli("probability --case helicoid --case-n 121 --samples 4000 --seed 9 "
                           "--regions " + regions + " --joints '[[\"p1\",\"p2\"]]' --out " +
                           dir.string());
    REQUIRE(rc == 0);
    const json est = parse_json_file(dir / "estimates.json");
    CHECK(est["samples"] == 4000);
    REQUIRE(est["ucps"].size() == 2);
    for (const auto& u : est["ucps"]) {
        CHECK(u["total"]["value"].get<double>() == 1.0);
        for (const auto& r : u["regions"]) CHECK(r["value"].get<double>() >= 0.99);
        for (const auto& jj : u["joints"]) {
            CHECK(jj["value"].get<double>() >= 0.99);
            CHECK(jj["residual"].get<double>() == 0.0);
        }
        CHECK(u["manifestations"]["fraction_multi"].get<double>() == 1.0);
    }

    SECTION("unknown ucp id is a config error") {
        CHECK(run_cli("probability --case helicoid --case-n 121 --samples 500 --ucp 99 --out " +
                      dir.string()) == 2);
    }
    SECTION("too few samples is a config error") {
        CHECK(run_cli("probability --case helicoid --case-n 121 --samples 50 --out " +
                      dir.string()) == 2);
    }
}

TEST_CASE("cli: density discrete and analytic") {
    const auto dir = fresh_dir("density");
    SECTION("analytic parabola-sine produces five branches and an SVG") {
        REQUIRE(run_cli("density --case parabola-sine --analytic --svg --out " + dir.string()) == 0);
        const json br = parse_json_file(dir / "branches.json");
        CHECK(br["branches"].size() == 5);
        CHECK(fs::exists(dir / "plot.svg"));
        CHECK(fs::exists(dir / "curve.csv"));
        const std::string svg = read_file(dir / "plot.svg");
        CHECK(svg.find("<svg") != std::string::npos);
    }
    SECTION("discrete densities per component") {
        REQUIRE(run_cli("density --case parabola-sine --case-n 61 --samples 2000 --svg --out " +
                        dir.string()) == 0);
        int csvs = 0;
        for (const auto& e : fs::directory_iterator(dir))
            csvs += e.path().filename().string().rfind("density_ucp", 0) == 0;
        CHECK(csvs == 5);
        CHECK(fs::exists(dir / "plot.svg"));
    }
}

TEST_CASE("cli: eof") {
    const auto dir = fresh_dir("eof");
    Grid g = make_unit_square_grid(7, 7);
    auto ens = make_synthetic_ensemble(g, 200, 2024, 1e-5);
    std::string csv;
    for (const auto& row : ens) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) csv += ',';
            csv += format_double(row[i]);
        }
        csv += '\n';
    }
    write_file(dir / "ens.csv", csv);

    REQUIRE(run_cli("eof --ensemble " + (dir / "ens.csv").string() + " --m 2 --out " +
                    dir.string()) == 0);
    const json fam = parse_json_file(dir / "family.json");
    CHECK(fam["m"] == 2);
    CHECK(fam["modes"].size() == 2);
    CHECK(fs::exists(dir / "qq.csv"));

    SECTION("m exceeding member count: exit 2") {
        CHECK(run_cli("eof --ensemble " + (dir / "ens.csv").string() + " --m 300 --out " +
                      dir.string()) == 2);
    }
    SECTION("identical members: exit 4") {
        std::string flat;
        for (int r = 0; r < 5; ++r) flat += "1.0,2.0,3.0\n";
        write_file(dir / "flat.csv", flat);
        CHECK(run_cli("eof --ensemble " + (dir / "flat.csv").string() + " --m 1 --out " +
                      dir.string()) == 4);
    }
    SECTION("extract runs on the produced family") {
        write_file(dir / "grid.json", dump_deterministic(grid_to_json(g)));
        REQUIRE(run_cli("extract --grid " + (dir / "grid.json").string() + " --family " +
                        (dir / "family.json").string() + " --out " + dir.string()) == 0);
        const std::string first = read_file(dir / "components.json");
        REQUIRE(run_cli("extract --grid " + (dir / "grid.json").string() + " --family " +
                        (dir / "family.json").string() + " --out " + dir.string()) == 0);
        CHECK(read_file(dir / "components.json") == first);
    }
}

TEST_CASE("cli: config file with flag overrides") {
    const auto dir = fresh_dir("config");
    json cfg;
    cfg["case"] = "helicoid";
    cfg["case_n"] = 121;
    cfg["samples"] = 600;
    cfg["seed"] = 4;
    cfg["out"] = dir.string();
    write_file(dir / "config.json", dump_deterministic(cfg));
    REQUIRE(run_cli("probability --config " + (dir / "config.json").string()) == 0);
    json est = parse_json_file(dir / "estimates.json");
    CHECK(est["samples"] == 600);
    // flags win over the file
    REQUIRE(run_cli("probability --config " + (dir / "config.json").string() + " --samples 800") ==
            0);
    est = parse_json_file(dir / "estimates.json");
    CHECK(est["samples"] == 800);
}

TEST_CASE("cli: verify scenarios") {
    // prop54-random carries one documented red check (saddle components can
    // fold onto overlapping parameter ranges), so the scenario exits 1.
    CHECK(run_cli("verify prop54-random --seed 555001") == 1);
    CHECK(run_cli("verify nonsense") == 2);
}
