#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <variant>
#include <vector>

#include "mpcc/core_model.hpp"
#include "mpcc/random.hpp"
#include "mpcc/trace.hpp"

namespace mpcc {

struct AgentState {
    double cwnd = 0.0;
    std::uint64_t continuity_time = 0;
    std::size_t path = 0;
};

struct SimState {
    std::uint64_t t = 0;
    std::vector<AgentState> agents;
    std::vector<std::size_t> agent_count;  // a_pi(t)
    std::vector<double> flow;              // f_pi(t)
    std::vector<bool> loss;                // f_pi(t) > C/P
};

namespace assignment {
struct Uniform {};
struct RoundRobin {};
struct Explicit {
    std::vector<std::size_t> paths;
};
}  // namespace assignment

using Assignment = std::variant<assignment::Uniform, assignment::RoundRobin, assignment::Explicit>;

class InvalidAssignment : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Path with the lowest utilization; ties go to the lowest index. Paths have
/// equal capacity, so this is the argmin of the flow.
std::size_t least_utilized_path(const std::vector<double>& flow);

/// All windows and continuity times start at zero. Uniform draws from rng.
SimState init_state(const NetworkConfig& net, const Assignment& assign, Rng& rng);

/// Recomputes per-path counts, flows and loss flags from the agent list.
void refresh_aggregates(SimState& state, const NetworkConfig& net);

/// Per-step migration bookkeeping, exposed for statistical tests.
struct StepStats {
    std::size_t off_min_agents = 0;
    std::size_t migrations = 0;
};

/// One synchronous step of the agent-level dynamics. Migration decisions and
/// window updates both read the time-t aggregates.
SimState step_stochastic(const SimState& state, const NetworkConfig& net, const ProtocolParams& proto, Rng& rng,
                         StepStats* stats = nullptr);

/// Full trace of horizon + 1 records including the initial state.
Trace run_stochastic(const NetworkConfig& net, const ProtocolParams& proto, std::uint64_t horizon, Seed seed,
                     const Assignment& assign);

TraceStep snapshot(const SimState& state);

}  // namespace mpcc
