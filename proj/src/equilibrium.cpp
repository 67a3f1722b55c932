#include "mpcc/equilibrium.hpp"

#include <cmath>

#include "mpcc/expected_dynamics.hpp"

namespace mpcc {

namespace {

double pow_int(double base, std::size_t e) { return std::pow(base, static_cast<double>(e)); }

void require_defined(const ProtocolParams& proto, std::size_t paths) {
    if (paths > 1 && proto.m >= 1.0) {
        throw DegenerateParameter("flow equilibrium is undefined for m = 1 with P > 1");
    }
}

std::vector<double> alpha_hat_levels(const ProtocolParams& proto, std::size_t paths) {
    std::vector<double> out(paths);
    for (std::size_t p = 0; p < paths; ++p) out[p] = expected_alpha_limit(proto.alpha, p, proto.m, paths);
    return out;
}

/// General rank-p fixed point given the per-rank increase terms
/// alpha_hat^(p) * a^(p) and the denominator 1 - q (1-m)^(P-1).
std::vector<double> rank_levels(const std::vector<double>& growth, double m, double q, std::size_t paths) {
    const double denom = 1.0 - q * pow_int(1.0 - m, paths - 1);
    std::vector<double> levels(paths);
    for (std::size_t p = 0; p < paths; ++p) {
        double before = pow_int(1.0 - m, p) * growth[paths - 1];
        for (std::size_t k = 0; k < p; ++k) before += pow_int(1.0 - m, p - k) * growth[k];
        double after = 0.0;
        for (std::size_t k = p; k + 1 < paths; ++k) after += pow_int(1.0 - m, paths - 1 + p - k) * growth[k];
        levels[p] = (before + q * after) / denom;
    }
    return levels;
}

}  // namespace

std::string to_string(Classification c) {
    switch (c) {
        case Classification::Lossless:
            return "lossless";
        case Classification::Lossy:
            return "lossy";
        case Classification::DivergentR1:
            return "divergent_r1";
        case Classification::InconsistentWithPStep:
            return "inconsistent";
    }
    return "unknown";
}

AgentEquilibrium agent_equilibrium(double m, std::size_t n_agents, std::size_t paths) {
    AgentEquilibrium eq;
    eq.levels.resize(paths);
    const double scale = m * static_cast<double>(n_agents) / (1.0 - pow_int(1.0 - m, paths));
    for (std::size_t p = 0; p < paths; ++p) eq.levels[p] = pow_int(1.0 - m, p) * scale;
    return eq;
}

double agent_trajectory(double a_start, std::size_t rank, double m, std::size_t n_agents, std::size_t paths,
                        std::uint64_t t_offset) {
    const double level = agent_equilibrium(m, n_agents, paths).levels.at(rank);
    return (a_start - level) * std::pow(1.0 - m, static_cast<double>(t_offset)) + level;
}

std::vector<double> flow_levels_per_agent(const ProtocolParams& proto, std::size_t paths) {
    require_defined(proto, paths);
    const double q = 1.0 + proto.m * proto.r * extrapolation_factor_eq(proto.m, paths);
    const double denom = 1.0 - q * pow_int(1.0 - proto.m, paths - 1);
    if (!(denom > 0.0)) {
        throw DegenerateDenominator("flow equilibrium does not converge: 1 - q (1-m)^(P-1) = " +
                                    std::to_string(denom));
    }
    const auto agents = agent_equilibrium(proto.m, 1, paths);
    const auto alpha_hat = alpha_hat_levels(proto, paths);
    std::vector<double> growth(paths);
    for (std::size_t p = 0; p < paths; ++p) growth[p] = alpha_hat[p] * agents.levels[p];
    return rank_levels(growth, proto.m, q, paths);
}

FlowEquilibrium flow_equilibrium(const NetworkConfig& net, const ProtocolParams& proto) {
    validate(net, proto);
    require_defined(proto, net.paths);

    FlowEquilibrium eq;
    eq.agents = agent_equilibrium(proto.m, net.agents, net.paths);
    eq.alpha_hat = alpha_hat_levels(proto, net.paths);
    eq.q = 1.0 + proto.m * proto.r * extrapolation_factor_eq(proto.m, net.paths);
    eq.round_factor = eq.q * pow_int(1.0 - proto.m, net.paths - 1);

    if (proto.r >= 1.0) {
        eq.classification = Classification::DivergentR1;
        return eq;
    }

    const double n = static_cast<double>(net.agents);
    eq.levels = flow_levels_per_agent(proto, net.paths);
    for (double& level : eq.levels) level *= n;

    for (std::size_t p = 0; p + 1 < net.paths; ++p) {
        if (eq.levels[p] < eq.levels[p + 1]) {
            eq.classification = Classification::InconsistentWithPStep;
            return eq;
        }
    }
    eq.classification = eq.levels.front() <= net.path_capacity() ? Classification::Lossless : Classification::Lossy;
    return eq;
}

double flow_trajectory(double f_start, std::size_t rank, const NetworkConfig& net, const ProtocolParams& proto,
                       std::uint64_t t_offset) {
    if (t_offset % net.paths != 0) {
        throw std::invalid_argument("flow trajectory offset " + std::to_string(t_offset) +
                                    " is not a multiple of P = " + std::to_string(net.paths));
    }
    if (rank >= net.paths) throw UnsupportedRank("rank " + std::to_string(rank) + " is not below P");
    const auto eq = flow_equilibrium(net, proto);
    const double rounds = static_cast<double>(t_offset / net.paths);

    if (eq.classification != Classification::DivergentR1) {
        return (f_start - eq.levels[rank]) * std::pow(eq.round_factor, rounds) + eq.levels[rank];
    }
    if (rank != 0) throw UnsupportedRank("r = 1 trajectories are only defined for rank 0");

    const std::size_t last = net.paths - 1;
    double earlier = 0.0;
    for (std::size_t p = 0; p < last; ++p) earlier += eq.alpha_hat[p];
    const double per_round =
        (std::pow(1.0 - proto.m, 1.0 - static_cast<double>(net.paths)) * earlier + eq.alpha_hat[last]) *
        eq.agents.levels[last];
    return f_start + per_round * rounds;
}

LossyBounds lossy_bounds(const NetworkConfig& net, const ProtocolParams& proto) {
    const auto eq = flow_equilibrium(net, proto);
    const double cap = net.path_capacity();
    const bool lossy = eq.classification == Classification::DivergentR1 ||
                       (!eq.levels.empty() && !(eq.levels.front() <= cap));
    if (!lossy) throw NotLossy("equilibrium is lossless (f^(0) <= C/P)");

    LossyBounds b;
    b.upper = flow_trajectory(cap, 0, net, proto, net.paths);
    b.lower_type1 = proto.beta * pow_int(1.0 - proto.m, net.paths - 1) * cap;
    b.lower_type2 = proto.beta * (1.0 - proto.m) * cap;
    return b;
}

Consistency check_p_step_consistency(const NetworkConfig& net, const ProtocolParams& proto) {
    validate(net, proto);
    if (proto.r >= 1.0) throw std::invalid_argument("consistency check needs r < 1");
    // N is a positive linear factor of every level, so it drops out.
    const auto levels = flow_levels_per_agent(proto, net.paths);
    Consistency out;
    for (std::size_t p = 0; p + 1 < net.paths; ++p) {
        if (levels[p] < levels[p + 1]) out.violated_ranks.push_back(p);
    }
    out.consistent = out.violated_ranks.empty();
    return out;
}

std::vector<double> open_unit_grid(std::size_t points) {
    std::vector<double> g(points);
    for (std::size_t i = 0; i < points; ++i) g[i] = static_cast<double>(i + 1) / static_cast<double>(points + 1);
    return g;
}

std::vector<double> half_open_unit_grid(std::size_t points) {
    std::vector<double> g(points);
    for (std::size_t i = 0; i < points; ++i) g[i] = static_cast<double>(i) / static_cast<double>(points);
    return g;
}

std::vector<ConsistencyPoint> consistency_map(const ProtocolParams& base, std::size_t paths,
                                              const std::vector<double>& m_grid, const std::vector<double>& r_grid) {
    NetworkConfig net{paths, 1.0, 1};
    std::vector<ConsistencyPoint> out;
    out.reserve(m_grid.size() * r_grid.size());
    for (double m : m_grid) {
        for (double r : r_grid) {
            ProtocolParams proto = base;
            proto.m = m;
            proto.r = r;
            out.push_back({m, r, check_p_step_consistency(net, proto).consistent});
        }
    }
    return out;
}

}  // namespace mpcc
