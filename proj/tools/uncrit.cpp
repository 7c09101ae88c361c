// uncrit: extraction and probabilistic analysis of critical points of linear
// multiparameter families of piecewise-linear scalar fields.
//
// Subcommands:
//   extract      grid+family (or built-in case) -> components.json, patchgraph.json
//   probability  region / joint occurrence estimates -> estimates.json
//   density      normalized spatial densities -> density CSV + plot.svg
//   eof          ensemble -> family.json + qq.csv
//   verify       named end-to-end scenario checks

#include <CLI11.hpp>
#include <filesystem>
#include <optional>

#include "uncrit/cases.hpp"
#include "uncrit/io.hpp"
#include "uncrit/svg.hpp"
#include "uncrit/verify.hpp"

namespace fs = std::filesystem;
using namespace uncrit;

namespace {

struct RunConfig {
    std::string case_name;
    std::string grid_path, family_path, ensemble_path, weights_path;
    int m = -1;
    std::string dist_spec = "standard-normal";
    bool include_boundary = false;
    std::int64_t samples = 20000;
    std::uint64_t seed = 1;
    json regions = json::array();
    json joints = json::array();
    std::vector<int> ucp_ids; // empty = all
    std::string out_dir = ".";
    bool svg = false;
    bool analytic = false;
    bool interpolate_display = false;
    int case_n = 0;
    double case_range = 0.0;

    void load(const fs::path& path) {
        const json j = parse_json_file(path);
        try {
            if (j.contains("case")) case_name = j["case"].get<std::string>();
            if (j.contains("grid")) grid_path = j["grid"].get<std::string>();
            if (j.contains("family")) family_path = j["family"].get<std::string>();
            if (j.contains("ensemble")) ensemble_path = j["ensemble"].get<std::string>();
            if (j.contains("weights")) weights_path = j["weights"].get<std::string>();
            if (j.contains("m")) m = j["m"].get<int>();
            if (j.contains("dist") && j["dist"].is_string())
                dist_spec = j["dist"].get<std::string>();
            if (j.contains("include_boundary")) include_boundary = j["include_boundary"].get<bool>();
            if (j.contains("samples")) samples = j["samples"].get<std::int64_t>();
            if (j.contains("seed")) seed = j["seed"].get<std::uint64_t>();
            if (j.contains("regions")) regions = j["regions"];
            if (j.contains("joints")) joints = j["joints"];
            if (j.contains("ucps") && j["ucps"].is_array())
                ucp_ids = j["ucps"].get<std::vector<int>>();
            if (j.contains("out")) out_dir = j["out"].get<std::string>();
            if (j.contains("svg")) svg = j["svg"].get<bool>();
            if (j.contains("analytic")) analytic = j["analytic"].get<bool>();
            if (j.contains("interpolate_display"))
                interpolate_display = j["interpolate_display"].get<bool>();
            if (j.contains("case_n")) case_n = j["case_n"].get<int>();
            if (j.contains("case_range")) case_range = j["case_range"].get<double>();
        } catch (const json::exception& e) {
            throw config_error(std::string("config malformed: ") + e.what());
        }
    }
};

struct Inputs {
    Grid grid;
    LinearFamily family;
    ParameterDistribution dist = ParameterDistribution::standard_normal(1);
    std::optional<SmoothPair> pair;
};

ParameterDistribution dist_from_spec(const std::string& spec, int m) {
    if (spec.empty() || spec == "standard-normal" || spec == "std")
        return ParameterDistribution::standard_normal(m);
    const json j = parse_json_file(spec);
    try {
        return ParameterDistribution::gaussian(j.at("mean").get<std::vector<double>>(),
                                               j.at("L").get<std::vector<std::vector<double>>>());
    } catch (const json::exception& e) {
        throw parse_error(std::string("distribution JSON malformed: ") + e.what());
    }
}

Inputs load_inputs(const RunConfig& cfg) {
    Inputs in;
    if (!cfg.case_name.empty()) {
        BuiltinCase c =
            cfg.case_name == "helicoid"
                ? make_helicoid_case(cfg.case_n > 0 ? cfg.case_n : 601)
                : cfg.case_name == "parabola-sine"
                      ? make_parabola_sine_case(cfg.case_n > 0 ? cfg.case_n : 181,
                                                cfg.case_range > 0 ? cfg.case_range : 4.5)
                      : make_builtin_case(cfg.case_name);
        in.grid = std::move(c.grid);
        in.family = std::move(c.family);
        in.dist = c.dist;
        in.pair = c.pair;
        return in;
    }
    if (cfg.grid_path.empty() || cfg.family_path.empty())
        throw config_error("need either --case or both --grid and --family");
    in.grid = grid_from_json(parse_json_file(cfg.grid_path));
    in.family = family_from_json(parse_json_file(cfg.family_path));
    if (in.family.vertex_count() != in.grid.vertex_count())
        throw parse_error("family field length does not match the grid");
    if (cfg.m > 0 && cfg.m != in.family.mode_count())
        throw config_error("--m does not match the family's mode count");
    in.dist = dist_from_spec(cfg.dist_spec, in.family.mode_count());
    if (in.dist.dim() != in.family.mode_count())
        throw config_error("distribution dimension does not match the family");
    return in;
}

Extraction run_extraction(Inputs& in, const RunConfig& cfg) {
    ExtractOptions opt;
    opt.include_boundary = cfg.include_boundary;
    return Extraction::run(std::move(in.grid), std::move(in.family), opt);
}

std::vector<int> selected_components(const Extraction& ex, const RunConfig& cfg) {
    std::vector<int> idx;
    if (cfg.ucp_ids.empty()) {
        for (std::size_t c = 0; c < ex.components.size(); ++c) idx.push_back(static_cast<int>(c));
        return idx;
    }
    for (int id : cfg.ucp_ids) {
        const int c = ex.component_index_by_id(id);
        if (c < 0) throw config_error("unknown uncertain critical point id " + std::to_string(id));
        idx.push_back(c);
    }
    return idx;
}

void ensure_out_dir(const RunConfig& cfg) {
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    if (ec) throw config_error("cannot create output directory '" + cfg.out_dir + "'");
}

int cmd_extract(const RunConfig& cfg) {
    Inputs in = load_inputs(cfg);
    Extraction ex = run_extraction(in, cfg);
    ensure_out_dir(cfg);
    write_file(fs::path(cfg.out_dir) / "components.json", dump_deterministic(components_to_json(ex)));
    write_file(fs::path(cfg.out_dir) / "patchgraph.json", dump_deterministic(patch_graph_to_json(ex)));
    std::printf("extracted %zu uncertain critical points (%zu singular patches, %zu edges)\n",
                ex.components.size(), ex.graph.nodes.size(), ex.graph.edges.size());
    for (const auto& w : ex.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    return 0;
}

int cmd_probability(const RunConfig& cfg) {
    if (cfg.samples < 100) throw config_error("sample count must be >= 100");
    Inputs in = load_inputs(cfg);
    const ParameterDistribution dist = in.dist;
    Extraction ex = run_extraction(in, cfg);
    SampleBatch batch = SampleBatch::generate(dist, cfg.samples, cfg.seed);

    std::vector<Region> regions;
    for (const auto& rj : cfg.regions) regions.push_back(region_from_json(rj));
    for (std::size_t i = 0; i < regions.size(); ++i)
        if (regions[i].name.empty()) regions[i].name = "region" + std::to_string(i);
    auto region_by_name = [&](const std::string& name) -> const Region& {
        for (const auto& r : regions)
            if (r.name == name) return r;
        throw config_error("joint query references unknown region '" + name + "'");
    };

    json out;
    out["samples"] = cfg.samples;
    out["seed"] = cfg.seed;
    json jucps = json::array();
    for (int c : selected_components(ex, cfg)) {
        json jc;
        jc["id"] = ex.components[c].id;
        jc["type"] = to_string(ex.components[c].type);
        auto total = region_probability(ex, c, Region::all(), batch);
        jc["total"] = {{"value", total.value}, {"stderr", total.stderr_}};
        auto st = manifestation_stats(ex, c, batch);
        jc["manifestations"] = {{"fraction_multi", st.fraction_multi},
                                {"max", st.max_manifestations},
                                {"mean", st.mean_manifestations}};
        json jr = json::array();
        for (const auto& region : regions) {
            auto est = region_probability(ex, c, region, batch);
            json e{{"name", region.name}, {"value", est.value}, {"stderr", est.stderr_}};
            if (!est.note.empty()) e["note"] = est.note;
            jr.push_back(std::move(e));
        }
        jc["regions"] = std::move(jr);
        json jj = json::array();
        for (const auto& pair : cfg.joints) {
            const auto& r1 = region_by_name(pair.at(0).get<std::string>());
            const auto& r2 = region_by_name(pair.at(1).get<std::string>());
            auto joint = joint_probability(ex, c, r1, r2, batch);
            jj.push_back({{"first", r1.name},
                          {"second", r2.name},
                          {"value", joint.joint.value},
                          {"stderr", joint.joint.stderr_},
                          {"union", joint.either.value},
                          {"residual", joint.inclusion_exclusion_residual}});
        }
        jc["joints"] = std::move(jj);
        jucps.push_back(std::move(jc));
    }
    out["ucps"] = std::move(jucps);
    ensure_out_dir(cfg);
    write_file(fs::path(cfg.out_dir) / "estimates.json", dump_deterministic(out));
    std::printf("wrote estimates for %zu components\n", static_cast<std::size_t>(out["ucps"].size()));
    return 0;
}

int cmd_density(const RunConfig& cfg) {
    if (cfg.samples < 100) throw config_error("sample count must be >= 100");
    Inputs in = load_inputs(cfg);
    ensure_out_dir(cfg);

    if (cfg.analytic) {
        if (!in.pair) throw config_error("--analytic needs a built-in case with a smooth companion");
        auto dec = jacobi_branches(*in.pair);
        if (dec.degenerate_curve)
            throw numeric_error("the critical-point curve is degenerate everywhere (a' == 0)");
        write_file(fs::path(cfg.out_dir) / "branches.json",
                   dump_deterministic(branches_to_json(dec, in.dist)));
        write_file(fs::path(cfg.out_dir) / "curve.csv", branch_curve_csv(dec, in.dist));
        if (cfg.svg)
            write_file(fs::path(cfg.out_dir) / "plot.svg",
                       render_branches_svg(dec, in.dist, in.pair->x_lo, in.pair->x_hi));
        std::printf("wrote %zu analytic branches\n", dec.branches.size());
        for (const auto& w : dec.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
        return 0;
    }

    const ParameterDistribution dist = in.dist;
    Extraction ex = run_extraction(in, cfg);
    SampleBatch batch = SampleBatch::generate(dist, cfg.samples, cfg.seed);
    std::vector<DensityField> fields;
    for (int c : selected_components(ex, cfg)) {
        fields.push_back(density_field(ex, c, batch));
        write_file(fs::path(cfg.out_dir) /
                       ("density_ucp" + std::to_string(ex.components[c].id) + ".csv"),
                   density_to_csv(ex.grid, fields.back()));
    }
    if (cfg.svg)
        write_file(fs::path(cfg.out_dir) / "plot.svg",
                   render_density_svg(ex, fields, cfg.interpolate_display));
    std::printf("wrote %zu density fields\n", fields.size());
    return 0;
}

int cmd_eof(const RunConfig& cfg) {
    if (cfg.ensemble_path.empty()) throw config_error("eof needs --ensemble");
    if (cfg.m < 1) throw config_error("eof needs --m >= 1");
    auto ens = load_ensemble(cfg.ensemble_path);
    std::vector<double> weights;
    if (!cfg.weights_path.empty()) {
        for (const auto& v : parse_json_file(cfg.weights_path)) weights.push_back(v.get<double>());
    }
    auto res = eof_decompose(ens, cfg.m, weights.empty() ? nullptr : &weights);
    ensure_out_dir(cfg);
    write_file(fs::path(cfg.out_dir) / "family.json", dump_deterministic(family_to_json(res.family)));
    write_file(fs::path(cfg.out_dir) / "qq.csv", qq_csv(res));
    double explained = 0.0;
    for (double e : res.explained_variance) explained += e;
    std::printf("decomposed %zu members, m = %d, explained variance %.4f\n", ens.size(), cfg.m,
                explained);
    if (res.rank_deficient)
        std::fprintf(stderr, "note: centered ensemble is rank deficient (rank %d)\n",
                     res.positive_rank);
    return 0;
}

int cmd_verify(const std::string& scenario, const RunConfig& cfg) {
    auto reports = run_scenario(scenario, cfg.samples, cfg.seed);
    bool all = true;
    for (const auto& r : reports) {
        print_report(r);
        all &= r.pass();
    }
    std::printf("%s: %s\n", scenario.c_str(), all ? "PASS" : "FAIL");
    return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"uncertain critical points of linear multiparameter PL field families"};
    app.require_subcommand(1);

    // Flag values land here; a --config file is loaded first and explicitly
    // given flags override it afterwards.
    std::string config_path, scenario, regions_str, joints_str;
    RunConfig flags;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file; explicit flags override it");
        sub->add_option("--case", flags.case_name, "built-in case: helicoid, parabola-sine, bumps2d");
        sub->add_option("--grid", flags.grid_path, "grid JSON file");
        sub->add_option("--family", flags.family_path, "family JSON file");
        sub->add_option("--ensemble", flags.ensemble_path, "ensemble CSV or raw-header JSON");
        sub->add_option("--weights", flags.weights_path, "per-vertex weight JSON array (eof)");
        sub->add_option("--m", flags.m, "parameter-space dimension");
        sub->add_option("--dist", flags.dist_spec, "standard-normal or distribution JSON file");
        sub->add_option("--regions", regions_str,
                        "inline JSON: [{name, interval|polygon|vertices}...]");
        sub->add_option("--joints", joints_str, "inline JSON: [[regionA, regionB]...]");
        sub->add_option("--ucp", flags.ucp_ids, "restrict to these component ids");
        sub->add_option("--samples", flags.samples, "Monte-Carlo sample count");
        sub->add_option("--seed", flags.seed, "master seed");
        sub->add_flag("--include-boundary", flags.include_boundary,
                      "keep singular patches at domain-boundary vertices");
        sub->add_option("--out", flags.out_dir, "output directory");
        sub->add_flag("--svg", flags.svg, "also write plot.svg");
        sub->add_flag("--analytic", flags.analytic, "use the exact smooth companion (density)");
        sub->add_flag("--interpolate-display", flags.interpolate_display,
                      "interpolate densities across member vertices in the SVG");
        sub->add_option("--case-n", flags.case_n, "built-in case resolution (vertex count)");
        sub->add_option("--case-range", flags.case_range, "built-in case half-range");
    };

    auto* extract = app.add_subcommand("extract", "extract uncertain critical points");
    auto* probability = app.add_subcommand("probability", "region/joint occurrence probabilities");
    auto* density = app.add_subcommand("density", "normalized spatial densities and plots");
    auto* eof = app.add_subcommand("eof", "decompose an ensemble into a linear family");
    auto* verify = app.add_subcommand("verify", "run a named verification scenario");
    for (auto* sub : {extract, probability, density, eof, verify}) add_common(sub);
    verify->add_option("scenario", scenario, "helicoid | parabola-sine | prop54-random")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        CLI::App* sub = app.get_subcommands().front();
        RunConfig cfg;
        if (!config_path.empty()) cfg.load(config_path);
        auto given = [&](const std::string& name) { return sub->count(name) > 0; };
        if (given("--case")) cfg.case_name = flags.case_name;
        if (given("--grid")) cfg.grid_path = flags.grid_path;
        if (given("--family")) cfg.family_path = flags.family_path;
        if (given("--ensemble")) cfg.ensemble_path = flags.ensemble_path;
        if (given("--weights")) cfg.weights_path = flags.weights_path;
        if (given("--m")) cfg.m = flags.m;
        if (given("--dist")) cfg.dist_spec = flags.dist_spec;
        if (given("--ucp")) cfg.ucp_ids = flags.ucp_ids;
        if (given("--samples")) cfg.samples = flags.samples;
        if (given("--seed")) cfg.seed = flags.seed;
        if (given("--include-boundary")) cfg.include_boundary = true;
        if (given("--out")) cfg.out_dir = flags.out_dir;
        if (given("--svg")) cfg.svg = true;
        if (given("--analytic")) cfg.analytic = true;
        if (given("--interpolate-display")) cfg.interpolate_display = true;
        if (given("--case-n")) cfg.case_n = flags.case_n;
        if (given("--case-range")) cfg.case_range = flags.case_range;
        if (given("--regions")) {
            try {
                cfg.regions = json::parse(regions_str);
            } catch (const json::exception& e) {
                throw config_error(std::string("invalid --regions: ") + e.what());
            }
        }
        if (given("--joints")) {
            try {
                cfg.joints = json::parse(joints_str);
            } catch (const json::exception& e) {
                throw config_error(std::string("invalid --joints: ") + e.what());
            }
        }

        if (sub == extract) return cmd_extract(cfg);
        if (sub == probability) return cmd_probability(cfg);
        if (sub == density) return cmd_density(cfg);
        if (sub == eof) return cmd_eof(cfg);
        if (sub == verify) return cmd_verify(scenario, cfg);
    } catch (const config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_code_config;
    } catch (const parse_error& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return exit_code_parse;
    } catch (const numeric_error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return exit_code_numeric;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
