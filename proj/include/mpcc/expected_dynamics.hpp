#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mpcc/core_model.hpp"
#include "mpcc/trace.hpp"

namespace mpcc {

/// Expected agent counts and flows per path, plus the time since the most
/// recent loss on each path.
struct ExpectedState {
    std::uint64_t t = 0;
    std::vector<double> agents;
    std::vector<double> flow;
    std::vector<std::uint64_t> theta;
};

/// Continuity-time distribution of an agent on a rank-p path whose last loss
/// was theta steps ago.
struct ContinuityDistribution {
    std::map<std::uint64_t, double> support;

    double mass(std::uint64_t tau) const;
    double total() const;
};

class DegenerateState : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// (N - a) / a: scales the flow on one path to the flow on all other paths.
double extrapolation_factor_state(double a_pi, std::size_t n_agents);

/// The extrapolation factor at the agent equilibrium,
/// (1 - (1-m)^(P-1)) / (m (1-m)^(P-1)).
double extrapolation_factor_eq(double m, std::size_t paths);

/// Descending-utilization rank of each path. Equal flows are ordered so that
/// the lower path index counts as less utilized, which keeps rank P-1 on the
/// path returned by least_utilized_path().
std::vector<std::size_t> path_ranks(const std::vector<double>& flow);

ContinuityDistribution continuity_distribution(std::size_t rank, std::uint64_t theta, double m, std::size_t paths);

/// Expected additive increase on a rank-p path theta steps after its last loss.
double expected_alpha_theta(const AlphaFunction& alpha, std::size_t rank, std::uint64_t theta, double m,
                            std::size_t paths);

/// Limit of expected_alpha_theta as theta grows, by truncating the
/// geometric-weighted series once the remaining tail is below tol.
double expected_alpha_limit(const AlphaFunction& alpha, std::size_t rank, double m, std::size_t paths,
                            double tol = 1e-12);

/// Initial state with the given agent split, zero flow and theta = 0.
ExpectedState make_expected_state(const NetworkConfig& net, std::vector<double> agents,
                                  std::vector<double> flow = {});

/// Agent split matching a round-robin assignment of N agents.
std::vector<double> round_robin_split(const NetworkConfig& net);

ExpectedState step_expected(const ExpectedState& state, const NetworkConfig& net, const ProtocolParams& proto);

std::vector<ExpectedState> run_expected(const NetworkConfig& net, const ProtocolParams& proto,
                                        std::uint64_t horizon, const ExpectedState& initial);

/// Smallest L <= max_period such that the last `window` flow vectors repeat
/// with period L to within rel_tol, or nullopt when no such L exists.
std::optional<std::uint64_t> detect_period(const std::vector<ExpectedState>& states, std::uint64_t max_period,
                                           std::uint64_t window, double rel_tol = 1e-6);

Trace to_trace(const std::vector<ExpectedState>& states, const NetworkConfig& net);

}  // namespace mpcc
