#include "mpcc/expected_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "mpcc/stochastic_sim.hpp"

namespace mpcc {

namespace {

/// Number of k >= 0 with P*k + rank < bound.
std::uint64_t count_below(std::uint64_t bound, std::size_t rank, std::size_t paths) {
    if (bound <= rank) return 0;
    return (bound - rank + paths - 1) / paths;
}

double stay_weight(double m, std::size_t paths) { return std::pow(1.0 - m, static_cast<double>(paths - 1)); }

}  // namespace

double ContinuityDistribution::mass(std::uint64_t tau) const {
    auto it = support.find(tau);
    return it == support.end() ? 0.0 : it->second;
}

double ContinuityDistribution::total() const {
    double sum = 0.0;
    for (const auto& [tau, p] : support) sum += p;
    return sum;
}

double extrapolation_factor_state(double a_pi, std::size_t n_agents) {
    if (!(a_pi > 0.0)) throw DegenerateState("extrapolation factor needs a_pi > 0, got " + std::to_string(a_pi));
    return (static_cast<double>(n_agents) - a_pi) / a_pi;
}

double extrapolation_factor_eq(double m, std::size_t paths) {
    if (paths <= 1) return 0.0;
    if (m >= 1.0) throw DegenerateParameter("extrapolation factor is undefined for m = 1 with P > 1");
    const double x = stay_weight(m, paths);
    return (1.0 - x) / (m * x);
}

std::vector<std::size_t> path_ranks(const std::vector<double>& flow) {
    const std::size_t n = flow.size();
    std::vector<std::size_t> rank(n, 0);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            if (b == a) continue;
            if (flow[b] > flow[a] || (flow[b] == flow[a] && b > a)) ++rank[a];
        }
    }
    return rank;
}

ContinuityDistribution continuity_distribution(std::size_t rank, std::uint64_t theta, double m, std::size_t paths) {
    const double x = stay_weight(m, paths);
    const std::uint64_t k_end = count_below(theta, rank, paths);

    ContinuityDistribution dist;
    for (std::uint64_t k = 0; k < k_end; ++k) {
        dist.support[paths * k + rank] = (1.0 - x) * std::pow(x, static_cast<double>(k));
    }
    dist.support[theta] = std::pow(x, static_cast<double>(k_end));
    return dist;
}

double expected_alpha_theta(const AlphaFunction& alpha, std::size_t rank, std::uint64_t theta, double m,
                            std::size_t paths) {
    const double x = stay_weight(m, paths);
    const std::uint64_t k_end = count_below(theta, rank, paths);
    // Beyond the prefix alpha is constant, so the remaining geometric terms
    // collapse to tail * (x^k_prefix - x^k_end).
    const std::uint64_t k_prefix = std::min(k_end, count_below(alpha_prefix_length(alpha), rank, paths));

    double sum = 0.0;
    double weight = 1.0 - x;
    for (std::uint64_t k = 0; k < k_prefix; ++k) {
        sum += weight * alpha_eval(alpha, paths * k + rank);
        weight *= x;
    }
    const double x_end = std::pow(x, static_cast<double>(k_end));
    if (k_end > k_prefix) sum += alpha_tail(alpha) * (std::pow(x, static_cast<double>(k_prefix)) - x_end);
    return sum + x_end * alpha_eval(alpha, theta);
}

double expected_alpha_limit(const AlphaFunction& alpha, std::size_t rank, double m, std::size_t paths, double tol) {
    if (paths <= 1) return alpha_tail(alpha);
    const double x = stay_weight(m, paths);
    const double bound = alpha_max(alpha);

    double sum = 0.0;
    double x_k = 1.0;
    for (std::uint64_t k = 0;; ++k) {
        sum += (1.0 - x) * x_k * alpha_eval(alpha, paths * k + rank);
        x_k *= x;
        if (bound * x_k < tol) break;
    }
    return sum;
}

ExpectedState make_expected_state(const NetworkConfig& net, std::vector<double> agents, std::vector<double> flow) {
    if (agents.size() != net.paths) {
        throw DegenerateState("expected state needs " + std::to_string(net.paths) + " agent levels, got " +
                              std::to_string(agents.size()));
    }
    const double total = std::accumulate(agents.begin(), agents.end(), 0.0);
    const double n = static_cast<double>(net.agents);
    if (std::abs(total - n) > 1e-9 * n) {
        throw DegenerateState("expected agent levels sum to " + std::to_string(total) + ", not N = " +
                              std::to_string(net.agents));
    }
    if (flow.empty()) flow.assign(net.paths, 0.0);
    if (flow.size() != net.paths) throw DegenerateState("expected state flow vector has the wrong length");

    ExpectedState state;
    state.agents = std::move(agents);
    state.flow = std::move(flow);
    state.theta.assign(net.paths, 0);
    return state;
}

std::vector<double> round_robin_split(const NetworkConfig& net) {
    std::vector<double> split(net.paths, 0.0);
    for (std::size_t i = 0; i < net.agents; ++i) split[i % net.paths] += 1.0;
    return split;
}

ExpectedState step_expected(const ExpectedState& state, const NetworkConfig& net, const ProtocolParams& proto) {
    const std::size_t paths = net.paths;
    const double m = proto.m;
    const double n = static_cast<double>(net.agents);
    const double cap = net.path_capacity();
    const std::size_t target = least_utilized_path(state.flow);
    const auto rank = path_ranks(state.flow);

    ExpectedState next;
    next.t = state.t + 1;
    next.agents.resize(paths);
    next.flow.resize(paths);
    next.theta.resize(paths);

    for (std::size_t p = 0; p < paths; ++p) {
        const double a = state.agents[p];
        const double f = state.flow[p];
        const bool lossy = f > cap;

        if (p != target) {
            next.agents[p] = (1.0 - m) * a;
            if (!lossy) {
                const double inc = expected_alpha_theta(proto.alpha, rank[p], state.theta[p], m, paths);
                next.flow[p] = (1.0 - m) * f + inc * (1.0 - m) * a;
            } else {
                next.flow[p] = proto.beta * (1.0 - m) * f;
            }
        } else {
            next.agents[p] = (1.0 - m) * a + m * n;
            // Expected in-migrating window volume, m r sum_{other} f. The
            // extrapolation z(a, N) f stands in for the other-path sum; an
            // empty path has no z, so the exact sum is used there.
            double inflow = 0.0;
            if (a > 0.0) {
                inflow = m * proto.r * extrapolation_factor_state(a, net.agents) * f;
            } else {
                for (std::size_t o = 0; o < paths; ++o) {
                    if (o != p) inflow += m * proto.r * state.flow[o];
                }
            }
            if (!lossy) {
                const double inc = expected_alpha_theta(proto.alpha, rank[p], state.theta[p], m, paths);
                next.flow[p] = f + inflow + inc * a;
            } else {
                next.flow[p] = proto.beta * f + inflow;
            }
        }
        next.theta[p] = lossy ? 0 : state.theta[p] + 1;
    }
    return next;
}

std::vector<ExpectedState> run_expected(const NetworkConfig& net, const ProtocolParams& proto,
                                        std::uint64_t horizon, const ExpectedState& initial) {
    validate(net, proto);
    std::vector<ExpectedState> states;
    states.reserve(static_cast<std::size_t>(horizon) + 1);
    states.push_back(initial);
    for (std::uint64_t t = 0; t < horizon; ++t) states.push_back(step_expected(states.back(), net, proto));
    return states;
}

std::optional<std::uint64_t> detect_period(const std::vector<ExpectedState>& states, std::uint64_t max_period,
                                           std::uint64_t window, double rel_tol) {
    const std::size_t n = states.size();
    for (std::uint64_t period = 1; period <= max_period; ++period) {
        if (window + period > n) break;
        bool repeats = true;
        for (std::size_t k = n - window; k < n && repeats; ++k) {
            const auto& now = states[k].flow;
            const auto& before = states[k - period].flow;
            for (std::size_t p = 0; p < now.size(); ++p) {
                const double scale = std::max({std::abs(now[p]), std::abs(before[p]), 1.0});
                if (std::abs(now[p] - before[p]) > rel_tol * scale) {
                    repeats = false;
                    break;
                }
            }
        }
        if (repeats) return period;
    }
    return std::nullopt;
}

Trace to_trace(const std::vector<ExpectedState>& states, const NetworkConfig& net) {
    Trace trace;
    trace.paths = net.paths;
    const double cap = net.path_capacity();
    for (const auto& s : states) {
        TraceStep step;
        step.t = s.t;
        step.agents = s.agents;
        step.flow = s.flow;
        step.loss.resize(net.paths);
        for (std::size_t p = 0; p < net.paths; ++p) step.loss[p] = s.flow[p] > cap;
        trace.steps.push_back(std::move(step));
    }
    return trace;
}

}  // namespace mpcc
