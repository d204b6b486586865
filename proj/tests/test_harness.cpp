#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pmelect/experiment.hpp"

using namespace pmelect;
namespace fs = std::filesystem;

namespace {

int count_of(const std::string& text, const std::string& needle) {
    int n = 0;
    for (std::size_t at = text.find(needle); at != std::string::npos; at = text.find(needle, at + 1)) ++n;
    return n;
}

int dark_blue_edges(const Configuration& c) {
    const Layout layout(c);
    int d = 0;
    for (const auto& u : c.nodes)
        for (PortId p : {0, 1, 2}) {
            const NodeCoord v = neighbor_of(u, p, Chirality::Standard);
            if (layout.occupied(v) && layout.classify(u, v) == EdgeClass::DarkBlue) ++d;
        }
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("pm_elect_harness_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST(Generators, FixedShapes) {
    EXPECT_EQ(gen_s1().size(), 6u);
    EXPECT_EQ(gen_fig1().size(), 25u);
    EXPECT_EQ(grey_components(gen_fig1()).size(), 2u);
    EXPECT_EQ(gen_path(9).size(), 9u);
    EXPECT_EQ(gen_random(1, 3).size(), 1u);
}

TEST(Generators, Fig5Shape) {
    const Configuration c = gen_fig5(16);
    EXPECT_EQ(c.size(), 16u);
    const auto comps = grey_components(c);
    EXPECT_EQ(comps.size(), 10u);
    int fours = 0, singles = 0;
    for (const auto& g : comps) {
        fours += g.size() == 4;
        singles += g.size() == 1;
    }
    EXPECT_EQ(fours, 2);
    EXPECT_EQ(singles, 8);
    EXPECT_EQ(dark_blue_edges(c), 9);
    EXPECT_THROW(gen_fig5(15), BadParams);
    EXPECT_THROW(gen_fig5(0), BadParams);
}

TEST(Generators, Fig6BlocksAddOneDarkBlueEdgeEach) {
    for (int r = 1; r <= 6; ++r) {
        const Configuration c = gen_fig6(r);
        EXPECT_EQ(c.size(), static_cast<std::size_t>(6 * r + 1));
        EXPECT_EQ(dark_blue_edges(c), r);
        EXPECT_EQ(grey_components(c).size(), 1u);
    }
}

TEST(Generators, AllFamiliesValidate) {
    for (const auto& f : family_names()) {
        const Configuration c = generate(f, {{"k", 8}, {"n", 24}, {"r", 3}, {"seed", 5}});
        EXPECT_TRUE(validate(c).ok()) << f;
    }
    for (std::uint64_t s = 0; s < 50; ++s) EXPECT_TRUE(validate(gen_random(40, s)).ok());
}

TEST(Generators, ParameterErrors) {
    EXPECT_THROW(generate("fig5", {}), BadParams);
    EXPECT_THROW(generate("hexagon", {}), BadParams);
    EXPECT_THROW(gen_path(0), BadParams);
    EXPECT_THROW(gen_random(0, 1), BadParams);
}

TEST(Generators, RandomIsSeeded) {
    EXPECT_EQ(gen_random(30, 9).nodes, gen_random(30, 9).nodes);
    EXPECT_NE(gen_random(30, 9).nodes, gen_random(30, 10).nodes);
}

TEST(Render, SvgShapes) {
    Snapshot one;
    one.config = detail::from_nodes({{0, 0}});
    EXPECT_EQ(count_of(render_svg(one), "<circle"), 1);

    Snapshot fig1;
    fig1.config = gen_fig1();
    const std::string svg = render_svg(fig1);
    EXPECT_EQ(svg, render_svg(fig1));
    EXPECT_EQ(count_of(svg, "<circle"), 25);
    EXPECT_EQ(count_of(svg, std::string("class=\"") + to_string(EdgeClass::DarkBlue) + "\""), 3);
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
}

TEST(Render, RunSnapshotMarksLeaderAndParents) {
    const RunRecord r = run_once(gen_s1(), "sync", 2);
    ASSERT_TRUE(r.ok());
    const std::string svg = render_svg(r.snapshot);
    EXPECT_EQ(count_of(svg, "class=\"leader\""), 1);
    EXPECT_EQ(count_of(svg, "class=\"parent\""), 5);
    const std::string ascii = render_ascii(r.snapshot);
    EXPECT_EQ(count_of(ascii, "L"), 1);
    EXPECT_EQ(count_of(ascii, "o"), 5);
}

TEST(Render, AsciiRows) {
    Snapshot s;
    s.config = detail::from_nodes({{0, 0}, {2, 0}, {1, 1}});
    s.leader = {false, false, true};
    EXPECT_EQ(render_ascii(s), " L\no o\n");
}

TEST(Experiment, SingleRunWritesArtifacts) {
    const fs::path out = scratch("single");
    ExperimentSpec spec;
    spec.family = "fig6";
    spec.params = {{"r", 2}};
    spec.modes = {"async"};
    spec.seeds = {4};
    spec.out_dir = out.string();
    spec.render_svg = true;
    EXPECT_EQ(run_experiment(spec), 0);
    for (const char* f : {"metrics.csv", "trace.log", "final.json", "render.svg"}) EXPECT_TRUE(fs::exists(out / f)) << f;
    const std::string csv = slurp(out / "metrics.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "n,mode,seed,ticks,activation_units,merges,comparisons");
    EXPECT_EQ(csv.substr(csv.find('\n') + 1, 11), "13,async,4,");
    const auto j = nlohmann::json::parse(slurp(out / "final.json"));
    EXPECT_EQ(j["leaders"].size(), 1u);
    EXPECT_EQ(j["particles"].size(), 13u);
    EXPECT_TRUE(j["checks"]["unique_leader"].get<bool>());
    fs::remove_all(out);
}

TEST(Experiment, SeveralRunsShareOneCsv) {
    const fs::path out = scratch("multi");
    ExperimentSpec spec;
    spec.family = "s1";
    spec.modes = {"sync", "seqrr"};
    spec.seeds = {1, 2};
    spec.out_dir = out.string();
    EXPECT_EQ(run_experiment(spec), 0);
    const std::string csv = slurp(out / "metrics.csv");
    EXPECT_EQ(count_of(csv, "\n"), 5);
    EXPECT_TRUE(fs::exists(out / "seqrr_seed2" / "trace.log"));
    fs::remove_all(out);
}

TEST(Experiment, ChiralityFollowsSeedUnlessFixed) {
    ExperimentSpec spec;
    spec.family = "random";
    spec.params = {{"n", 12}, {"seed", 1}};
    EXPECT_EQ(resolve_config(spec, 3).chirality, resolve_config(spec, 3).chirality);
    Configuration fixed = gen_s1();
    fixed.seed = 77;
    spec.config = fixed;
    spec.config_has_seed = true;
    EXPECT_EQ(resolve_config(spec, 1).chirality, resolve_config(spec, 2).chirality);
    EXPECT_EQ(resolve_config(spec, 1).seed, 77u);
}

TEST(Experiment, SweepParsing) {
    const auto j = nlohmann::json::parse(R"({"out": "o", "runs": [
        {"family": "fig5", "params": {"n": 8}, "modes": ["sync", "async"], "seeds": [1, 2, 3]},
        {"name": "ring", "family": "fig6", "params": {"r": 1}, "render": true}]})");
    const auto specs = sweep_from_json(j, ".");
    ASSERT_EQ(specs.size(), 2u);
    EXPECT_EQ(specs[0].modes.size(), 2u);
    EXPECT_EQ(specs[0].seeds.size(), 3u);
    EXPECT_EQ(fs::path(specs[0].out_dir), fs::path("o") / "fig5_0");
    EXPECT_EQ(fs::path(specs[1].out_dir), fs::path("o") / "ring");
    EXPECT_TRUE(specs[1].render_svg);

    EXPECT_THROW(sweep_from_json(nlohmann::json::parse(R"({"runs": [], "extra": 1})"), "."), SpecError);
    EXPECT_THROW(sweep_from_json(nlohmann::json::parse(R"({"runs": [{"family": "s1", "colour": 1}]})"), "."),
                 SpecError);
    EXPECT_THROW(sweep_from_json(nlohmann::json::parse(R"({"runs": [{"modes": ["sync"]}]})"), "."), SpecError);
    EXPECT_THROW(sweep_from_json(nlohmann::json::parse(R"({"runs": [{"family": "s1", "params": {"k": 1.5}}]})"), "."),
                 SpecError);
}

TEST(Experiment, SweepLoadsConfigRelativeToFile) {
    const fs::path dir = scratch("sweep");
    fs::create_directories(dir);
    std::ofstream(dir / "tri.json") << R"({"nodes": [[0,0],[2,0],[1,1]], "seed": 5})";
    const auto specs = sweep_from_json(nlohmann::json::parse(R"({"runs": [{"config": "tri.json"}]})"), dir);
    ASSERT_EQ(specs.size(), 1u);
    ASSERT_TRUE(specs[0].config.has_value());
    EXPECT_EQ(specs[0].config->size(), 3u);
    EXPECT_TRUE(specs[0].config_has_seed);
    fs::remove_all(dir);
}
