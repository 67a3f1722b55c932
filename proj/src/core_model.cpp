#include "mpcc/core_model.hpp"

#include <algorithm>
#include <cmath>

namespace mpcc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

std::string describe(const std::vector<ParameterViolation>& violations) {
    std::string out = "invalid parameter";
    for (const auto& v : violations) {
        out += "; " + v.name + " = " + std::to_string(v.value) + " violates " + v.constraint;
    }
    return out;
}

}  // namespace

double alpha_eval(const AlphaFunction& f, std::uint64_t tau) {
    return std::visit(
        overloaded{
            [](const alpha::Constant& c) { return c.value; },
            [tau](const alpha::SlowStart& s) {
                return tau < s.threshold ? std::ldexp(1.0, static_cast<int>(std::min<std::uint64_t>(tau, 4096)))
                                         : s.base_after;
            },
            [tau](const alpha::Table& t) {
                return tau < t.values.size() ? t.values[static_cast<std::size_t>(tau)] : t.tail;
            },
        },
        f);
}

double alpha_max(const AlphaFunction& f, std::uint64_t tau_cap) {
    return std::visit(
        overloaded{
            [](const alpha::Constant& c) { return c.value; },
            [](const alpha::SlowStart& s) {
                if (s.threshold == 0) return s.base_after;
                const double peak =
                    std::ldexp(1.0, static_cast<int>(std::min<std::uint64_t>(s.threshold - 1, 4096)));
                return std::max(peak, s.base_after);
            },
            [tau_cap](const alpha::Table& t) {
                double best = tau_cap >= t.values.size() ? t.tail : 0.0;
                const auto n = static_cast<std::size_t>(std::min<std::uint64_t>(tau_cap + 1, t.values.size()));
                for (std::size_t i = 0; i < n; ++i) best = std::max(best, t.values[i]);
                return best;
            },
        },
        f);
}

std::uint64_t alpha_prefix_length(const AlphaFunction& f) {
    return std::visit(overloaded{
                          [](const alpha::Constant&) -> std::uint64_t { return 0; },
                          [](const alpha::SlowStart& s) -> std::uint64_t { return s.threshold; },
                          [](const alpha::Table& t) -> std::uint64_t { return t.values.size(); },
                      },
                      f);
}

double alpha_tail(const AlphaFunction& f) {
    return std::visit(overloaded{
                          [](const alpha::Constant& c) { return c.value; },
                          [](const alpha::SlowStart& s) { return s.base_after; },
                          [](const alpha::Table& t) { return t.tail; },
                      },
                      f);
}

std::string alpha_kind(const AlphaFunction& f) {
    return std::visit(overloaded{
                          [](const alpha::Constant&) { return std::string("constant"); },
                          [](const alpha::SlowStart&) { return std::string("slow_start"); },
                          [](const alpha::Table&) { return std::string("table"); },
                      },
                      f);
}

InvalidParameter::InvalidParameter(std::vector<ParameterViolation> violations)
    : std::invalid_argument(describe(violations)), violations_(std::move(violations)) {}

std::vector<ParameterViolation> check_parameters(const NetworkConfig& net, const ProtocolParams& proto) {
    std::vector<ParameterViolation> out;
    auto require = [&out](bool ok, std::string name, double value, std::string constraint) {
        if (!ok) out.push_back({std::move(name), value, std::move(constraint)});
    };

    require(net.paths >= 1, "paths", static_cast<double>(net.paths), "P >= 1");
    require(net.agents >= 1, "agents", static_cast<double>(net.agents), "N >= 1");
    require(net.capacity_total > 0.0, "capacity_total", net.capacity_total, "C > 0");

    // Negated comparisons so that NaN is rejected too.
    require(proto.beta >= 0.0 && proto.beta <= 1.0, "beta", proto.beta, "beta in [0, 1]");
    require(proto.m > 0.0 && proto.m <= 1.0, "m", proto.m, "m in (0, 1]");
    require(proto.r >= 0.0 && proto.r <= 1.0, "r", proto.r, "r in [0, 1]");

    std::visit(overloaded{
                   [&](const alpha::Constant& c) {
                       require(c.value > 0.0 && std::isfinite(c.value), "alpha.value", c.value,
                               "alpha.value > 0");
                   },
                   [&](const alpha::SlowStart& s) {
                       require(s.base_after > 0.0 && std::isfinite(s.base_after), "alpha.base_after",
                               s.base_after, "alpha.base_after > 0");
                       require(s.threshold <= 1023, "alpha.threshold", static_cast<double>(s.threshold),
                               "alpha.threshold <= 1023");
                   },
                   [&](const alpha::Table& t) {
                       for (double v : t.values) {
                           require(v >= 0.0 && std::isfinite(v), "alpha.values", v, "alpha.values[i] >= 0");
                       }
                       require(t.tail > 0.0 && std::isfinite(t.tail), "alpha.tail", t.tail, "alpha.tail > 0");
                   },
               },
               proto.alpha);
    return out;
}

std::pair<NetworkConfig, ProtocolParams> validate(const NetworkConfig& net, const ProtocolParams& proto) {
    auto violations = check_parameters(net, proto);
    if (!violations.empty()) throw InvalidParameter(std::move(violations));
    return {net, proto};
}

}  // namespace mpcc
