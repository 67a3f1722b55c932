#include "mpcc/stochastic_sim.hpp"

#include <string>

namespace mpcc {

std::size_t least_utilized_path(const std::vector<double>& flow) {
    std::size_t best = 0;
    for (std::size_t p = 1; p < flow.size(); ++p) {
        if (flow[p] < flow[best]) best = p;
    }
    return best;
}

SimState init_state(const NetworkConfig& net, const Assignment& assign, Rng& rng) {
    SimState state;
    state.agents.resize(net.agents);

    if (const auto* expl = std::get_if<assignment::Explicit>(&assign)) {
        if (expl->paths.size() != net.agents) {
            throw InvalidAssignment("explicit assignment has " + std::to_string(expl->paths.size()) +
                                    " entries, expected " + std::to_string(net.agents));
        }
        for (std::size_t i = 0; i < net.agents; ++i) {
            if (expl->paths[i] >= net.paths) {
                throw InvalidAssignment("explicit assignment entry " + std::to_string(i) + " = " +
                                        std::to_string(expl->paths[i]) + " is not a path index below " +
                                        std::to_string(net.paths));
            }
            state.agents[i].path = expl->paths[i];
        }
    } else if (std::holds_alternative<assignment::RoundRobin>(assign)) {
        for (std::size_t i = 0; i < net.agents; ++i) state.agents[i].path = i % net.paths;
    } else {
        for (auto& agent : state.agents) agent.path = static_cast<std::size_t>(rng.index(net.paths));
    }

    refresh_aggregates(state, net);
    return state;
}

void refresh_aggregates(SimState& state, const NetworkConfig& net) {
    state.agent_count.assign(net.paths, 0);
    state.flow.assign(net.paths, 0.0);
    for (const auto& agent : state.agents) {
        ++state.agent_count[agent.path];
        state.flow[agent.path] += agent.cwnd;
    }
    const double cap = net.path_capacity();
    state.loss.assign(net.paths, false);
    for (std::size_t p = 0; p < net.paths; ++p) state.loss[p] = state.flow[p] > cap;
}

SimState step_stochastic(const SimState& state, const NetworkConfig& net, const ProtocolParams& proto, Rng& rng,
                         StepStats* stats) {
    const std::size_t target = least_utilized_path(state.flow);

    SimState next;
    next.t = state.t + 1;
    next.agents = state.agents;

    std::size_t off_min = 0;
    std::size_t migrated = 0;
    for (auto& agent : next.agents) {
        if (agent.path != target) {
            ++off_min;
            if (rng.bernoulli(proto.m)) {
                ++migrated;
                agent.path = target;
                agent.cwnd *= proto.r;
                agent.continuity_time = 0;
                continue;
            }
        }
        if (!state.loss[agent.path]) {
            agent.cwnd += alpha_eval(proto.alpha, agent.continuity_time);
            ++agent.continuity_time;
        } else {
            agent.cwnd *= proto.beta;
            agent.continuity_time = 0;
        }
    }

    if (stats != nullptr) {
        stats->off_min_agents = off_min;
        stats->migrations = migrated;
    }
    refresh_aggregates(next, net);
    return next;
}

TraceStep snapshot(const SimState& state) {
    TraceStep step;
    step.t = state.t;
    step.agents.assign(state.agent_count.begin(), state.agent_count.end());
    step.flow = state.flow;
    step.loss = state.loss;
    return step;
}

Trace run_stochastic(const NetworkConfig& net, const ProtocolParams& proto, std::uint64_t horizon, Seed seed,
                     const Assignment& assign) {
    validate(net, proto);
    Rng rng(seed);
    SimState state = init_state(net, assign, rng);

    Trace trace;
    trace.paths = net.paths;
    trace.steps.reserve(static_cast<std::size_t>(horizon) + 1);
    trace.steps.push_back(snapshot(state));
    for (std::uint64_t t = 0; t < horizon; ++t) {
        state = step_stochastic(state, net, proto, rng);
        trace.steps.push_back(snapshot(state));
    }
    return trace;
}

}  // namespace mpcc
