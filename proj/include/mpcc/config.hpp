#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mpcc/axioms.hpp"
#include "mpcc/core_model.hpp"

namespace mpcc {

/// Malformed config text, unknown key or a value of the wrong type. key() is
/// the dotted key at fault, or empty for syntax errors outside any key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& message);
    const std::string& key() const { return key_; }
    /// Message without the key prefix.
    const std::string& detail() const { return detail_; }

private:
    std::string key_;
    std::string detail_;
};

/// Value of the small TOML subset accepted in experiment files: booleans,
/// numbers, basic strings and (nested) arrays of those.
struct ConfigValue {
    enum class Kind { Boolean, Number, String, Array };
    Kind kind = Kind::Number;
    std::string text;  // literal text of numbers, contents of strings
    bool boolean = false;
    std::vector<ConfigValue> items;
};

/// Flat "section.key" -> value map.
using ConfigDocument = std::map<std::string, ConfigValue>;

ConfigDocument parse_config_document(std::string_view text);
ConfigValue parse_config_value(std::string_view text);

struct AlphaSpec {
    std::string kind = "constant";
    double value = 1.0;
    std::uint64_t threshold = 5;
    double base_after = 1.0;
    std::vector<double> values;
    double tail = 1.0;

    AlphaFunction build() const;
};

struct RunOptions {
    std::uint64_t horizon = 200;
    Seed seed{};
    /// Number of stochastic runs; run k uses stream seed.stream + k.
    std::size_t ensemble = 1;
    std::string assignment = "round_robin";
    /// Initial agent splits for the expected dynamics; empty means round-robin.
    std::vector<std::vector<double>> starts;
    /// Steps excluded from post-transient summaries.
    std::uint64_t transient = 20;
};

struct SweepOptions {
    double m_from = 0.02;
    double m_to = 0.98;
    double m_step = 0.02;
    double r_from = 0.0;
    double r_to = 1.0;
    double r_step = 0.05;
};

struct ConsistencyOptions {
    std::size_t m_points = 99;
    std::size_t r_points = 100;
    /// Path counts to map; empty means network.paths only.
    std::vector<std::size_t> paths;
    /// Alpha kinds to map ("constant", "slow_start"); empty means protocol.alpha only.
    std::vector<std::string> alphas;
};

struct ExperimentConfig {
    NetworkConfig net{3, 36'000.0, 1000};
    AlphaSpec alpha;
    double beta = 0.7;
    double m = 0.1;
    double r = 0.5;
    /// When set, the total capacity is path_capacity * paths.
    std::optional<double> path_capacity;
    RunOptions run;
    FairnessOptions fairness;
    /// Loss probabilities for the variance-over-time series of the axioms command.
    std::vector<double> p_loss_series;
    SweepOptions sweep;
    ConsistencyOptions consistency;

    NetworkConfig network() const;
    ProtocolParams protocol() const;
};

/// Applies every key of the document on top of cfg.
void apply_document(ExperimentConfig& cfg, const ConfigDocument& doc);

/// "section.key=value" in the same value syntax as the file.
void apply_override(ExperimentConfig& cfg, std::string_view assignment);

ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Every key accepted in a config file or by apply_override.
std::vector<std::string> known_config_keys();

}  // namespace mpcc
