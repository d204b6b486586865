#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "pmelect/experiment.hpp"

namespace {

using namespace pmelect;

int cmd_validate(const std::string& path) {
    Configuration c;
    try {
        c = load_config(path);
    } catch (const ConfigParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    }
    const ValidationResult v = validate(c);
    if (!v.ok()) {
        std::cerr << "invalid: " << v.message() << "\n";
        return 1;
    }
    assign_chirality_from_seed(c);
    const Layout layout(c);
    int dark_blue = 0;
    for (const auto& u : c.nodes) {
        const NodeCoord v2 = neighbor_of(u, 0, Chirality::Standard);
        if (layout.occupied(v2) && layout.classify(u, v2) == EdgeClass::DarkBlue) ++dark_blue;
    }
    std::cout << "ok: " << c.size() << " particles, " << grey_components(layout).size() << " grey components, "
              << dark_blue << " dark-blue edges\n";
    return 0;
}

GeneratorParams parse_params(const std::vector<std::string>& kvs) {
    GeneratorParams p;
    for (const auto& kv : kvs) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) throw BadParams("expected k=v, got '" + kv + "'");
        try {
            p[kv.substr(0, eq)] = std::stoll(kv.substr(eq + 1));
        } catch (const std::exception&) {
            throw BadParams("parameter '" + kv + "' is not an integer");
        }
    }
    return p;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Leader election for programmable matter with common direction"};
    app.require_subcommand(1);

    std::string validate_path;
    auto* validate_cmd = app.add_subcommand("validate", "Check a configuration file");
    validate_cmd->add_option("file", validate_path, "Configuration JSON")->required();

    std::string config_path, family, mode = "sync", out_dir = ".", render;
    std::vector<std::string> params;
    std::uint64_t seed = 0;
    auto* run_cmd = app.add_subcommand("run", "Run the election to quiescence");
    auto* config_opt = run_cmd->add_option("--config", config_path, "Configuration JSON");
    auto* family_opt = run_cmd->add_option("--family", family, "Generator family")
                           ->check(CLI::IsMember(family_names()));
    config_opt->excludes(family_opt);
    run_cmd->add_option("--params", params, "Generator parameters k=v")->expected(0, -1);
    run_cmd->add_option("--mode", mode, "Scheduler mode")->check(CLI::IsMember({"sync", "seqrr", "seqrand", "async"}));
    run_cmd->add_option("--seed", seed, "Run seed");
    run_cmd->add_option("--out", out_dir, "Output directory");
    run_cmd->add_option("--render", render, "Render format")->check(CLI::IsMember({"svg"}));

    std::string spec_path;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run every entry of a sweep file");
    sweep_cmd->add_option("--spec", spec_path, "Sweep JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*validate_cmd) return cmd_validate(validate_path);

        if (*run_cmd) {
            if (config_path.empty() == family.empty()) {
                std::cerr << "run needs exactly one of --config or --family\n";
                return 2;
            }
            ExperimentSpec spec;
            if (!config_path.empty()) {
                std::ifstream in(config_path);
                if (!in) throw ConfigParseError("cannot open " + config_path);
                nlohmann::json j;
                try {
                    j = nlohmann::json::parse(in);
                } catch (const nlohmann::json::parse_error& e) {
                    throw ConfigParseError(e.what());
                }
                spec.config = config_from_json(j);
                spec.config_has_seed = j.contains("seed");
            } else {
                spec.family = family;
                spec.params = parse_params(params);
            }
            spec.modes = {mode};
            spec.seeds = {seed};
            spec.out_dir = out_dir;
            spec.render_svg = render == "svg";
            return run_experiment(spec, &std::cout) == 0 ? 0 : 1;
        }

        if (*sweep_cmd) {
            std::ifstream in(spec_path);
            if (!in) throw SpecError("cannot open " + spec_path);
            const auto j = nlohmann::json::parse(in);
            const auto specs = sweep_from_json(j, std::filesystem::path(spec_path).parent_path());
            int failed = 0;
            for (const auto& s : specs) failed += run_experiment(s, &std::cout);
            std::cout << (failed ? std::to_string(failed) + " run(s) failed\n" : std::string("all runs passed\n"));
            return failed ? 1 : 0;
        }
    } catch (const ConfigParseError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const InvalidConfiguration& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return 2;
    } catch (const BadParams& e) {
        std::cerr << "bad parameters: " << e.what() << "\n";
        return 2;
    } catch (const SpecError& e) {
        std::cerr << "sweep spec error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "json error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
