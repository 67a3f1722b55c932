#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace mpcc {

/// Static network: P parallel disjoint paths sharing total capacity C equally,
/// used by N agents. Capacity is in MSS per RTT.
struct NetworkConfig {
    std::size_t paths = 1;
    double capacity_total = 1.0;
    std::size_t agents = 1;

    double path_capacity() const { return capacity_total / static_cast<double>(paths); }
};

namespace alpha {

struct Constant {
    double value = 1.0;
};

/// 2^tau while tau < threshold, base_after afterwards.
struct SlowStart {
    std::uint64_t threshold = 5;
    double base_after = 1.0;
};

/// values[tau] for tau < values.size(), tail afterwards.
struct Table {
    std::vector<double> values;
    double tail = 1.0;
};

}  // namespace alpha

/// Additive-increase function of the continuity time.
using AlphaFunction = std::variant<alpha::Constant, alpha::SlowStart, alpha::Table>;

inline constexpr std::uint64_t kDefaultAlphaTauCap = 10'000;

double alpha_eval(const AlphaFunction& f, std::uint64_t tau);

/// Maximum of alpha over [0, tau_cap]. Constant and SlowStart use their exact
/// closed-form maximum and ignore tau_cap.
double alpha_max(const AlphaFunction& f, std::uint64_t tau_cap = kDefaultAlphaTauCap);

/// Every alpha variant is a finite prefix followed by a constant tail:
/// alpha(tau) == alpha_tail(f) for all tau >= alpha_prefix_length(f).
std::uint64_t alpha_prefix_length(const AlphaFunction& f);
double alpha_tail(const AlphaFunction& f);

/// "constant", "slow_start" or "table".
std::string alpha_kind(const AlphaFunction& f);

struct ProtocolParams {
    AlphaFunction alpha = alpha::Constant{1.0};
    double beta = 0.5;
    double m = 0.1;
    double r = 0.0;
};

struct Seed {
    std::uint64_t base = 0;
    std::uint64_t stream = 0;

    friend bool operator==(const Seed&, const Seed&) = default;
};

struct ParameterViolation {
    std::string name;
    double value;
    std::string constraint;
};

class InvalidParameter : public std::invalid_argument {
public:
    explicit InvalidParameter(std::vector<ParameterViolation> violations);

    const std::string& name() const { return violations_.front().name; }
    double value() const { return violations_.front().value; }
    const std::string& constraint() const { return violations_.front().constraint; }
    const std::vector<ParameterViolation>& violations() const { return violations_; }

private:
    std::vector<ParameterViolation> violations_;
};

/// Raised when a closed form is evaluated at a parameter where it has no value
/// (for example the extrapolation factor at m = 1 with P > 1).
class DegenerateParameter : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

std::vector<ParameterViolation> check_parameters(const NetworkConfig& net, const ProtocolParams& proto);

/// Returns the pair unchanged or throws InvalidParameter listing every violation.
std::pair<NetworkConfig, ProtocolParams> validate(const NetworkConfig& net, const ProtocolParams& proto);

}  // namespace mpcc
