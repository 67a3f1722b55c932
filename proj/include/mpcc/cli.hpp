#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mpcc/config.hpp"

namespace mpcc {

enum class Command { Simulate, Expected, Equilibrium, Axioms, Compare, Sweep, ConsistencyMap };

std::string to_string(Command c);
std::optional<Command> parse_command(std::string_view name);

/// Named figure reproduction: a command plus a shipped config file.
struct Preset {
    std::string name;
    Command command;
    std::string config_file;
};

const std::vector<Preset>& presets();
const Preset* find_preset(std::string_view name);

/// Directory holding the shipped preset configs.
std::filesystem::path config_dir();

struct CommandContext {
    ExperimentConfig cfg;
    std::filesystem::path out_dir;
    std::ostream& log;
};

/// Runs one command and returns the files it wrote, in write order.
std::vector<std::filesystem::path> run_command(Command command, const CommandContext& ctx);

/// Exit codes: 0 success, 1 usage/config/parameter errors, 2 numerical failures.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv);

}  // namespace mpcc
