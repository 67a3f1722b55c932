#include "mpcc/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include <fmt/core.h>

namespace mpcc {

ConfigError::ConfigError(std::string key, const std::string& message)
    : std::runtime_error(key.empty() ? message : fmt::format("{}: {}", key, message)),
      key_(std::move(key)),
      detail_(message) {}

namespace {

bool is_bare_key_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-'; }

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    ConfigDocument document() {
        ConfigDocument doc;
        std::string section;
        for (;;) {
            skip_blank_lines();
            if (eof()) break;
            if (peek() == '[') {
                section = header();
            } else {
                std::string key = bare_key();
                const std::string full = section.empty() ? key : section + "." + key;
                skip_spaces();
                expect('=');
                skip_spaces();
                ConfigValue v = value();
                if (!doc.emplace(full, std::move(v)).second) fail(full, "duplicate key");
            }
            end_of_line();
        }
        return doc;
    }

    ConfigValue single_value() {
        skip_spaces();
        ConfigValue v = value();
        skip_spaces();
        if (!eof()) fail("", fmt::format("unexpected '{}' after value", peek()));
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& key, const std::string& what) const {
        throw ConfigError(key, fmt::format("line {}: {}", line_, what));
    }

    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }

    char take() {
        const char c = text_[pos_++];
        if (c == '\n') ++line_;
        return c;
    }

    void expect(char c) {
        if (eof() || peek() != c) fail("", fmt::format("expected '{}'", c));
        take();
    }

    void skip_spaces() {
        while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) take();
    }

    void skip_comment() {
        if (!eof() && peek() == '#') {
            while (!eof() && peek() != '\n') take();
        }
    }

    void skip_blank_lines() {
        for (;;) {
            skip_spaces();
            skip_comment();
            if (eof() || peek() != '\n') return;
            take();
        }
    }

    /// Whitespace, newlines and comments inside arrays.
    void skip_layout() {
        for (;;) {
            skip_spaces();
            skip_comment();
            if (eof() || peek() != '\n') return;
            take();
        }
    }

    void end_of_line() {
        skip_spaces();
        skip_comment();
        if (eof()) return;
        if (peek() != '\n') fail("", fmt::format("unexpected '{}'", peek()));
        take();
    }

    std::string header() {
        expect('[');
        skip_spaces();
        std::string name;
        while (!eof() && (is_bare_key_char(peek()) || peek() == '.')) name += take();
        skip_spaces();
        expect(']');
        if (name.empty() || name.front() == '.' || name.back() == '.' || name.find("..") != std::string::npos) {
            fail("", fmt::format("malformed section name '{}'", name));
        }
        return name;
    }

    std::string bare_key() {
        std::string key;
        while (!eof() && is_bare_key_char(peek())) key += take();
        if (key.empty()) fail("", eof() ? "expected a key" : fmt::format("unexpected '{}'", peek()));
        return key;
    }

    ConfigValue value() {
        if (eof()) fail("", "missing value");
        const char c = peek();
        if (c == '"') return string_value();
        if (c == '[') return array_value();
        return scalar_value();
    }

    ConfigValue string_value() {
        expect('"');
        ConfigValue v;
        v.kind = ConfigValue::Kind::String;
        for (;;) {
            if (eof() || peek() == '\n') fail("", "unterminated string");
            const char c = take();
            if (c == '"') break;
            if (c != '\\') {
                v.text += c;
                continue;
            }
            if (eof()) fail("", "unterminated string");
            switch (take()) {
                case '"': v.text += '"'; break;
                case '\\': v.text += '\\'; break;
                case 'n': v.text += '\n'; break;
                case 't': v.text += '\t'; break;
                default: fail("", "unsupported escape sequence");
            }
        }
        return v;
    }

    ConfigValue array_value() {
        expect('[');
        ConfigValue v;
        v.kind = ConfigValue::Kind::Array;
        for (;;) {
            skip_layout();
            if (eof()) fail("", "unterminated array");
            if (peek() == ']') break;
            v.items.push_back(value());
            skip_layout();
            if (!eof() && peek() == ',') {
                take();
                continue;
            }
            skip_layout();
            if (eof() || peek() != ']') fail("", "expected ',' or ']' in array");
        }
        take();
        return v;
    }

    ConfigValue scalar_value() {
        std::string word;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '.' || peek() == '+' ||
                          peek() == '-' || peek() == '_')) {
            word += take();
        }
        ConfigValue v;
        if (word == "true" || word == "false") {
            v.kind = ConfigValue::Kind::Boolean;
            v.boolean = word == "true";
            return v;
        }
        word.erase(std::remove(word.begin(), word.end(), '_'), word.end());
        double probe = 0.0;
        const char* first = word.data() + (!word.empty() && word.front() == '+' ? 1 : 0);
        const auto [ptr, ec] = std::from_chars(first, word.data() + word.size(), probe);
        if (word.empty() || ec != std::errc() || ptr != word.data() + word.size()) {
            fail("", fmt::format("invalid value '{}'", word));
        }
        v.kind = ConfigValue::Kind::Number;
        v.text = word.front() == '+' ? word.substr(1) : word;
        return v;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
};

// ---- typed access -------------------------------------------------------

double as_double(const ConfigValue& v, const std::string& key) {
    if (v.kind != ConfigValue::Kind::Number) throw ConfigError(key, "expected a number");
    double out = 0.0;
    std::from_chars(v.text.data(), v.text.data() + v.text.size(), out);
    return out;
}

std::uint64_t as_u64(const ConfigValue& v, const std::string& key) {
    if (v.kind != ConfigValue::Kind::Number) throw ConfigError(key, "expected a non-negative integer");
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.text.data(), v.text.data() + v.text.size(), out);
    if (ec != std::errc() || ptr != v.text.data() + v.text.size()) {
        throw ConfigError(key, fmt::format("expected a non-negative integer, got {}", v.text));
    }
    return out;
}

bool as_bool(const ConfigValue& v, const std::string& key) {
    if (v.kind != ConfigValue::Kind::Boolean) throw ConfigError(key, "expected true or false");
    return v.boolean;
}

std::string as_string(const ConfigValue& v, const std::string& key) {
    if (v.kind != ConfigValue::Kind::String) throw ConfigError(key, "expected a quoted string");
    return v.text;
}

const std::vector<ConfigValue>& as_array(const ConfigValue& v, const std::string& key) {
    if (v.kind != ConfigValue::Kind::Array) throw ConfigError(key, "expected an array");
    return v.items;
}

template <class T, class Fn>
std::vector<T> list_of(const ConfigValue& v, const std::string& key, Fn&& each) {
    std::vector<T> out;
    for (const auto& item : as_array(v, key)) out.push_back(each(item, key));
    return out;
}

std::vector<double> as_doubles(const ConfigValue& v, const std::string& key) {
    return list_of<double>(v, key, as_double);
}

// ---- key table ----------------------------------------------------------

using Setter = std::function<void(ExperimentConfig&, const ConfigValue&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"network.paths", [](auto& c, auto& v, auto& k) { c.net.paths = as_u64(v, k); }},
        {"network.agents", [](auto& c, auto& v, auto& k) { c.net.agents = as_u64(v, k); }},
        {"network.capacity",
         [](auto& c, auto& v, auto& k) {
             c.net.capacity_total = as_double(v, k);
             c.path_capacity.reset();
         }},
        {"network.path_capacity", [](auto& c, auto& v, auto& k) { c.path_capacity = as_double(v, k); }},

        {"protocol.beta", [](auto& c, auto& v, auto& k) { c.beta = as_double(v, k); }},
        {"protocol.m", [](auto& c, auto& v, auto& k) { c.m = as_double(v, k); }},
        {"protocol.r", [](auto& c, auto& v, auto& k) { c.r = as_double(v, k); }},
        {"protocol.alpha.kind", [](auto& c, auto& v, auto& k) { c.alpha.kind = as_string(v, k); }},
        {"protocol.alpha.value", [](auto& c, auto& v, auto& k) { c.alpha.value = as_double(v, k); }},
        {"protocol.alpha.threshold", [](auto& c, auto& v, auto& k) { c.alpha.threshold = as_u64(v, k); }},
        {"protocol.alpha.base_after", [](auto& c, auto& v, auto& k) { c.alpha.base_after = as_double(v, k); }},
        {"protocol.alpha.values", [](auto& c, auto& v, auto& k) { c.alpha.values = as_doubles(v, k); }},
        {"protocol.alpha.tail", [](auto& c, auto& v, auto& k) { c.alpha.tail = as_double(v, k); }},

        {"run.horizon", [](auto& c, auto& v, auto& k) { c.run.horizon = as_u64(v, k); }},
        {"run.seed", [](auto& c, auto& v, auto& k) { c.run.seed.base = as_u64(v, k); }},
        {"run.stream", [](auto& c, auto& v, auto& k) { c.run.seed.stream = as_u64(v, k); }},
        {"run.ensemble", [](auto& c, auto& v, auto& k) { c.run.ensemble = as_u64(v, k); }},
        {"run.assignment", [](auto& c, auto& v, auto& k) { c.run.assignment = as_string(v, k); }},
        {"run.starts",
         [](auto& c, auto& v, auto& k) {
             c.run.starts = list_of<std::vector<double>>(v, k, as_doubles);
         }},
        {"run.transient", [](auto& c, auto& v, auto& k) { c.run.transient = as_u64(v, k); }},

        {"fairness.enabled", [](auto& c, auto& v, auto& k) { c.fairness.enabled = as_bool(v, k); }},
        {"fairness.samples", [](auto& c, auto& v, auto& k) { c.fairness.samples = as_u64(v, k); }},
        {"fairness.horizon", [](auto& c, auto& v, auto& k) { c.fairness.horizon = as_u64(v, k); }},
        {"fairness.p_loss", [](auto& c, auto& v, auto& k) { c.fairness.p_loss = as_double(v, k); }},
        {"fairness.seed", [](auto& c, auto& v, auto& k) { c.fairness.seed.base = as_u64(v, k); }},
        {"fairness.stream", [](auto& c, auto& v, auto& k) { c.fairness.seed.stream = as_u64(v, k); }},
        {"fairness.p_loss_series", [](auto& c, auto& v, auto& k) { c.p_loss_series = as_doubles(v, k); }},

        {"sweep.m_from", [](auto& c, auto& v, auto& k) { c.sweep.m_from = as_double(v, k); }},
        {"sweep.m_to", [](auto& c, auto& v, auto& k) { c.sweep.m_to = as_double(v, k); }},
        {"sweep.m_step", [](auto& c, auto& v, auto& k) { c.sweep.m_step = as_double(v, k); }},
        {"sweep.r_from", [](auto& c, auto& v, auto& k) { c.sweep.r_from = as_double(v, k); }},
        {"sweep.r_to", [](auto& c, auto& v, auto& k) { c.sweep.r_to = as_double(v, k); }},
        {"sweep.r_step", [](auto& c, auto& v, auto& k) { c.sweep.r_step = as_double(v, k); }},

        {"consistency.m_points", [](auto& c, auto& v, auto& k) { c.consistency.m_points = as_u64(v, k); }},
        {"consistency.r_points", [](auto& c, auto& v, auto& k) { c.consistency.r_points = as_u64(v, k); }},
        {"consistency.paths",
         [](auto& c, auto& v, auto& k) {
             c.consistency.paths = list_of<std::size_t>(v, k, as_u64);
         }},
        {"consistency.alphas",
         [](auto& c, auto& v, auto& k) {
             c.consistency.alphas = list_of<std::string>(v, k, as_string);
         }},
    };
    return table;
}

void apply_key(ExperimentConfig& cfg, const std::string& key, const ConfigValue& value) {
    const auto& table = setters();
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError(key, "unknown key");
    it->second(cfg, value, key);
}

}  // namespace

AlphaFunction AlphaSpec::build() const {
    if (kind == "constant") return alpha::Constant{value};
    if (kind == "slow_start") return alpha::SlowStart{threshold, base_after};
    if (kind == "table") return alpha::Table{values, tail};
    throw ConfigError("protocol.alpha.kind",
                      fmt::format("expected \"constant\", \"slow_start\" or \"table\", got \"{}\"", kind));
}

NetworkConfig ExperimentConfig::network() const {
    NetworkConfig out = net;
    if (path_capacity) out.capacity_total = *path_capacity * static_cast<double>(net.paths);
    return out;
}

ProtocolParams ExperimentConfig::protocol() const { return {alpha.build(), beta, m, r}; }

ConfigDocument parse_config_document(std::string_view text) { return Parser(text).document(); }

ConfigValue parse_config_value(std::string_view text) { return Parser(text).single_value(); }

void apply_document(ExperimentConfig& cfg, const ConfigDocument& doc) {
    // Explicit total capacity beats path capacity regardless of key order.
    for (const auto& [key, value] : doc) {
        if (key != "network.capacity") apply_key(cfg, key, value);
    }
    if (const auto it = doc.find("network.capacity"); it != doc.end()) {
        if (doc.count("network.path_capacity")) {
            throw ConfigError("network.capacity", "set either network.capacity or network.path_capacity, not both");
        }
        apply_key(cfg, it->first, it->second);
    }
}

void apply_override(ExperimentConfig& cfg, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw ConfigError(std::string(assignment), "override must have the form section.key=value");
    }
    auto trim = [](std::string_view s) {
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
        return s;
    };
    const std::string key(trim(assignment.substr(0, eq)));
    if (!setters().count(key)) throw ConfigError(key, "unknown key");
    ConfigValue value;
    try {
        value = parse_config_value(trim(assignment.substr(eq + 1)));
    } catch (const ConfigError& e) {
        throw ConfigError(key, e.detail());
    }
    apply_key(cfg, key, value);
}

ExperimentConfig parse_config(std::string_view text) {
    ExperimentConfig cfg;
    apply_document(cfg, parse_config_document(text));
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", fmt::format("cannot read config file {}", path.string()));
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_config(buf.str());
    } catch (const ConfigError& e) {
        throw ConfigError(e.key(), fmt::format("{}: {}", path.filename().string(), e.detail()));
    }
}

std::vector<std::string> known_config_keys() {
    std::vector<std::string> keys;
    for (const auto& [key, setter] : setters()) keys.push_back(key);
    return keys;
}

}  // namespace mpcc
