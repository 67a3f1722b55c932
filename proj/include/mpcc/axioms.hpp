#pragma once

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "mpcc/core_model.hpp"
#include "mpcc/equilibrium.hpp"
#include "mpcc/random.hpp"

namespace mpcc {

struct AxiomRating {
    double epsilon = 0.0;
    double lambda = 0.0;
    double gamma = 0.0;
    double eta = 0.0;
    double eta_stderr = 0.0;
    Classification classification = Classification::Lossless;
};

/// True when the ratings take the lossless branch: a finite equilibrium with
/// f^(0) <= C/P. Only f^(0) decides the branch, so inconsistent equilibria
/// are rated by the same rule.
bool rated_lossless(const FlowEquilibrium& eq, const NetworkConfig& net);

/// Efficiency lower bound: P f^(P-1) / C when lossless, beta (1-m)^(P-1) otherwise.
double efficiency_mpcc(const FlowEquilibrium& eq, const NetworkConfig& net, const ProtocolParams& proto);

/// Loss-rate upper bound: 0 when lossless, otherwise the overshoot of one
/// round of the rank-0 trajectory started at capacity.
double loss_mpcc(const FlowEquilibrium& eq, const NetworkConfig& net, const ProtocolParams& proto);

/// Convergence lower bound: f^(P-1) / f^(0) when lossless, otherwise
/// beta (1-m)^(P-1) / (lambda + 1).
double convergence_mpcc(const FlowEquilibrium& eq, const NetworkConfig& net, const ProtocolParams& proto);

/// State of one agent in the window-size Markov chains.
struct MarkovAgent {
    std::uint64_t tau = 0;
    double cwnd = 0.0;
    /// The previous transition was a loss-induced decrease.
    bool after_loss = false;
};

/// Migration is possible unless tau mod P == P-1.
bool migration_gate_open(std::uint64_t tau, std::size_t paths);

MarkovAgent markov_step_lossless(const MarkovAgent& s, const ProtocolParams& proto, std::size_t paths, Rng& rng);

/// Lossy chain: loss hits with probability p_loss unless the previous step
/// was a loss. One uniform draw per step; the chain consumes randomness
/// exactly like the lossless chain, so p_loss = 0 reproduces it draw for draw.
MarkovAgent markov_step_lossy(const MarkovAgent& s, const ProtocolParams& proto, std::size_t paths, double p_loss,
                              Rng& rng);

namespace chain {
struct Lossless {};
struct Lossy {
    double p_loss = 0.0;
};
}  // namespace chain

using ChainKind = std::variant<chain::Lossless, chain::Lossy>;

struct FairnessEstimate {
    double eta = 0.0;
    double std_error = 0.0;
};

inline constexpr std::size_t kDefaultFairnessSamples = 10'000;
inline constexpr std::uint64_t kDefaultFairnessHorizon = 500;

/// Variance of the final window over `samples` independent chains run for
/// `horizon` steps. Chain i draws from Rng(seed, i). The standard error comes
/// from 10 batch means. Throws std::invalid_argument for fewer than 100
/// samples or a horizon shorter than P.
FairnessEstimate fairness_eta(const ProtocolParams& proto, std::size_t paths, const ChainKind& kind,
                              std::size_t samples = kDefaultFairnessSamples,
                              std::uint64_t horizon = kDefaultFairnessHorizon, Seed seed = {});

/// Ensemble window variance after every step 0..horizon.
std::vector<double> fairness_variance_series(const ProtocolParams& proto, std::size_t paths, const ChainKind& kind,
                                             std::size_t samples, std::uint64_t horizon, Seed seed);

struct FairnessOptions {
    bool enabled = true;
    std::size_t samples = kDefaultFairnessSamples;
    std::uint64_t horizon = kDefaultFairnessHorizon;
    /// Loss probability for the lossy chain; 0 reproduces the lossless chain.
    double p_loss = 0.0;
    Seed seed{};
};

/// All four ratings. Fairness runs the lossless chain for lossless
/// equilibria and the lossy chain at options.p_loss otherwise; eta is NaN
/// when fairness is disabled.
AxiomRating rate_protocol(const NetworkConfig& net, const ProtocolParams& proto, const FairnessOptions& options);

}  // namespace mpcc
