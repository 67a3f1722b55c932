#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mpcc/core_model.hpp"

namespace mpcc {

class DegenerateDenominator : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class UnsupportedRank : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NotLossy : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Equilibrium agent count carried by the rank-p path, for p in [0, P).
struct AgentEquilibrium {
    std::vector<double> levels;
};

enum class Classification { Lossless, Lossy, DivergentR1, InconsistentWithPStep };

std::string to_string(Classification c);

struct FlowEquilibrium {
    /// Rank-p equilibrium flow; empty for DivergentR1.
    std::vector<double> levels;
    /// 1 + m r z(m, P).
    double q = 1.0;
    /// q (1-m)^(P-1): per-round contraction of the trajectory functions.
    double round_factor = 1.0;
    Classification classification = Classification::Lossless;

    /// Inputs of the closed forms, kept for the axiom ratings.
    AgentEquilibrium agents;
    std::vector<double> alpha_hat;
};

AgentEquilibrium agent_equilibrium(double m, std::size_t n_agents, std::size_t paths);

/// Rank-p agent trajectory, t_offset steps after the anchor time.
double agent_trajectory(double a_start, std::size_t rank, double m, std::size_t n_agents, std::size_t paths,
                        std::uint64_t t_offset);

/// Rank-p fixed points of the capacity-free round recursion, with N factored
/// out. Multiply by N for absolute flows. Requires r < 1 and P > 1.
std::vector<double> flow_levels_per_agent(const ProtocolParams& proto, std::size_t paths);

FlowEquilibrium flow_equilibrium(const NetworkConfig& net, const ProtocolParams& proto);

/// Flow of a path anchored at f_start while at rank p, t_offset steps later.
/// t_offset must be a multiple of P.
double flow_trajectory(double f_start, std::size_t rank, const NetworkConfig& net, const ProtocolParams& proto,
                       std::uint64_t t_offset);

struct LossyBounds {
    double upper = 0.0;
    double lower_type1 = 0.0;
    double lower_type2 = 0.0;
};

LossyBounds lossy_bounds(const NetworkConfig& net, const ProtocolParams& proto);

struct Consistency {
    bool consistent = true;
    /// Ranks p with f^(p) < f^(p+1).
    std::vector<std::size_t> violated_ranks;
};

Consistency check_p_step_consistency(const NetworkConfig& net, const ProtocolParams& proto);

/// Uniform grid of `points` values strictly inside (0, 1): 1/(points+1), ...
std::vector<double> open_unit_grid(std::size_t points);
/// Uniform grid of `points` values in [0, 1): 0, 1/points, ...
std::vector<double> half_open_unit_grid(std::size_t points);

struct ConsistencyPoint {
    double m;
    double r;
    bool consistent;
};

/// Consistency verdicts over m_grid x r_grid (r < 1 only).
std::vector<ConsistencyPoint> consistency_map(const ProtocolParams& base, std::size_t paths,
                                              const std::vector<double>& m_grid, const std::vector<double>& r_grid);

}  // namespace mpcc
