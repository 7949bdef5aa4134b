#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "pmc/cli/commands.hpp"

namespace {

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        const double v = std::stod(item, &used);
        if (used != item.size()) throw std::invalid_argument(item);
        out.push_back(v);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Prescribed mean curvature graphs on the flat torus"};
    app.require_subcommand(1);

    std::string config_path;
    bool force = false;
    std::string out_dir;
    std::string eps_text;

    auto* check = app.add_subcommand("check", "check the solvability hypotheses for a config");
    check->add_option("config", config_path, "run configuration")->required();

    auto* solve = app.add_subcommand("solve", "solve and write report, field and slices");
    solve->add_option("config", config_path, "run configuration")->required();
    solve->add_flag("--force", force, "solve even if the hypotheses fail");
    solve->add_option("--out", out_dir, "output directory (overrides output.dir)");

    auto* verify = app.add_subcommand("verify", "manufactured-solution and oracle checks");
    verify->add_option("config", config_path, "run configuration")->required();
    verify->add_flag("--force", force, "accept a manufactured field that fails the hypotheses");
    verify->add_option("--out", out_dir, "output directory (overrides output.dir)");

    auto* sweep = app.add_subcommand("sweep", "solve over a list of epsilon values, CSV output");
    sweep->add_option("config", config_path, "run configuration")->required();
    sweep->add_option("--eps", eps_text, "comma-separated epsilon values")->required();
    sweep->add_option("--out", out_dir, "output directory (overrides output.dir)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    pmc::cli::RunConfig config;
    try {
        config = pmc::cli::RunConfig::load(config_path);
    } catch (const pmc::ParseError& e) {
        std::cerr << "error: " << config_path << ": " << e.what() << '\n';
        return 2;
    }

    std::optional<std::string> out;
    if (!out_dir.empty()) out = out_dir;
    pmc::cli::SolveOptions so{force, out};

    if (check->parsed()) return pmc::cli::cmd_check(config, std::cout, std::cerr);
    if (solve->parsed()) return pmc::cli::cmd_solve(config, so, std::cout, std::cerr);
    if (verify->parsed()) return pmc::cli::cmd_verify(config, so, std::cout, std::cerr);

    std::vector<double> eps;
    try {
        eps = parse_list(eps_text);
    } catch (const std::exception&) {
        std::cerr << "error: --eps expects comma-separated numbers\n";
        return 2;
    }
    return pmc::cli::cmd_sweep(config, eps, out, std::cout, std::cerr);
}
