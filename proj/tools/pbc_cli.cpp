#include <iostream>

#include <CLI11.hpp>

#include "pbc/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Saturated passivity-based controller workbench"};
    app.require_subcommand(1);

    pbc::RunConfig cfg;
    std::string values_text;
    bool values_given = false;
    double dt = 0.0;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--scenario,-s", cfg.scenario, "built-in scenario name or JSON file")->required();
        sub->add_option("--out,-o", cfg.out_dir, "output directory (default: $PBC_OUT_DIR or .)");
        sub->add_option("--set", cfg.overrides, "override a scenario key, e.g. controller.beta_c=100");
        sub->add_option("--dt", dt, "time step override");
        sub->add_option("--seed", cfg.seed, "sampling seed");
    };
    auto* sim = app.add_subcommand("simulate", "run a scenario and export its trace");
    common(sim);
    auto* ver = app.add_subcommand("verify", "run the structural checks for a scenario");
    common(ver);
    auto* sweep = app.add_subcommand("sweep", "simulate a scenario over a list of parameter values");
    common(sweep);
    sweep->add_option("--param", cfg.param, "controller key to sweep (default: the scenario's own)");
    sweep->add_option("--values", values_text, "comma-separated values; empty for none")
        ->each([&](const std::string&) { values_given = true; });
    app.add_subcommand("list", "list built-in scenarios");

    CLI11_PARSE(app, argc, argv);

    cfg.command = app.get_subcommands().front()->get_name();
    if (dt > 0.0) cfg.dt = dt;
    if (values_given) {
        std::vector<double> vals;
        std::string item;
        for (char ch : values_text + ",") {
            if (ch == ',') {
                if (!item.empty()) {
                    try {
                        vals.push_back(std::stod(item));
                    } catch (const std::exception&) {
                        std::cerr << "error: bad sweep value '" << item << "'\n";
                        return pbc::kUnknownScenario;
                    }
                }
                item.clear();
            } else if (ch != ' ') {
                item += ch;
            }
        }
        cfg.values = vals;
    }
    return pbc::run_command(cfg, std::cout, std::cerr);
}
