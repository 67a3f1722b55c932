#include "mpcc/cli.hpp"

#include <iostream>
#include <system_error>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "mpcc/equilibrium.hpp"
#include "mpcc/expected_dynamics.hpp"
#include "mpcc/scenario.hpp"
#include "mpcc/stochastic_sim.hpp"
#include "mpcc/svg_chart.hpp"

#ifndef MPCC_CONFIG_DIR
#define MPCC_CONFIG_DIR "configs"
#endif

namespace mpcc {

namespace {

struct CommandName {
    Command command;
    const char* name;
    const char* help;
};

constexpr CommandName kCommands[] = {
    {Command::Simulate, "simulate", "Agent-level stochastic runs next to the expected dynamics"},
    {Command::Expected, "expected", "Expected (mean-field) dynamics from one or more starting splits"},
    {Command::Equilibrium, "equilibrium", "Closed-form agent and flow equilibria, bounds and class"},
    {Command::Axioms, "axioms", "Efficiency, loss, convergence and fairness ratings"},
    {Command::Compare, "compare", "Ratings against the single-path baseline"},
    {Command::Sweep, "sweep", "Delta metrics over an (m, r) grid with per-class ranges"},
    {Command::ConsistencyMap, "consistency-map", "Where P-step oscillation is self-consistent"},
};

}  // namespace

std::string to_string(Command c) {
    for (const auto& entry : kCommands) {
        if (entry.command == c) return entry.name;
    }
    return "unknown";
}

std::optional<Command> parse_command(std::string_view name) {
    for (const auto& entry : kCommands) {
        if (name == entry.name) return entry.command;
    }
    return std::nullopt;
}

const std::vector<Preset>& presets() {
    static const std::vector<Preset> table = {
        {"fig2", Command::Expected, "fig2.toml"},     {"fig3", Command::Expected, "fig3.toml"},
        {"fig4", Command::Expected, "fig4.toml"},     {"fig5", Command::Expected, "fig5.toml"},
        {"fig6a", Command::Sweep, "fig6.toml"},       {"fig6b", Command::Sweep, "fig6.toml"},
        {"fig7a", Command::Sweep, "fig6.toml"},       {"fig7b", Command::Sweep, "fig7b.toml"},
        {"fig10", Command::Simulate, "fig10a.toml"},  {"fig11", Command::Simulate, "fig11.toml"},
        {"fig13", Command::ConsistencyMap, "fig13.toml"}, {"fig16", Command::Axioms, "fig16.toml"},
    };
    return table;
}

const Preset* find_preset(std::string_view name) {
    for (const auto& p : presets()) {
        if (p.name == name) return &p;
    }
    return nullptr;
}

std::filesystem::path config_dir() {
    if (const char* env = std::getenv("MPCC_CONFIG_DIR"); env && *env) return env;
    return MPCC_CONFIG_DIR;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multi-path congestion control models: simulation, equilibria and axiom ratings", "mpcc"};
    app.require_subcommand(0, 1);

    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::vector<std::string> overrides;
    std::string preset_name;

    app.add_option("--config", config_path, "Experiment config file (TOML subset)");
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_option("--seed", seed, "Base seed for stochastic runs and fairness chains");
    app.add_option("--set", overrides, "Override a config key, section.key=value (repeatable, last wins)")
        ->take_all()
        ->allow_extra_args(false);
    app.add_option("--preset", preset_name, "Named preset: command and shipped config");

    std::vector<std::pair<Command, CLI::App*>> subs;
    for (const auto& entry : kCommands) {
        auto* sub = app.add_subcommand(entry.name, entry.help);
        sub->fallthrough();
        subs.emplace_back(entry.command, sub);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    std::optional<Command> command;
    for (const auto& [c, sub] : subs) {
        if (sub->parsed()) command = c;
    }

    try {
        ExperimentConfig cfg;
        if (!preset_name.empty()) {
            const Preset* preset = find_preset(preset_name);
            if (!preset) {
                std::string names;
                for (const auto& p : presets()) names += (names.empty() ? "" : ", ") + p.name;
                err << fmt::format("error: unknown preset '{}' (known: {})\n", preset_name, names);
                return 1;
            }
            if (command && *command != preset->command) {
                err << fmt::format("error: preset {} runs '{}', not '{}'\n", preset->name, to_string(preset->command),
                                   to_string(*command));
                return 1;
            }
            command = preset->command;
            if (config_path.empty()) cfg = load_config(config_dir() / preset->config_file);
        }
        if (!command) {
            err << "error: a command or --preset is required\n" << app.help();
            return 1;
        }
        if (!config_path.empty()) cfg = load_config(config_path);
        if (seed) {
            cfg.run.seed.base = *seed;
            cfg.fairness.seed.base = *seed;
        }
        for (const auto& o : overrides) apply_override(cfg, o);

        const std::filesystem::path dir(out_dir);
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        if (ec || !std::filesystem::is_directory(dir)) {
            err << fmt::format("error: cannot create output directory {}: {}\n", dir.string(), ec.message());
            return 1;
        }

        const auto files = run_command(*command, CommandContext{cfg, dir, out});
        for (const auto& f : files) out << "wrote " << f.string() << "\n";
        return 0;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return 1;
    } catch (const InvalidParameter& e) {
        err << "invalid parameter: " << e.what() << "\n";
        return 1;
    } catch (const InvalidGrid& e) {
        err << "invalid grid: " << e.what() << "\n";
        return 1;
    } catch (const InvalidAssignment& e) {
        err << "invalid assignment: " << e.what() << "\n";
        return 1;
    } catch (const DegenerateParameter& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const DegenerateDenominator& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const DegenerateState& e) {
        err << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

int run_cli(int argc, const char* const* argv) { return run_cli(argc, argv, std::cout, std::cerr); }

}  // namespace mpcc
