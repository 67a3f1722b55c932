#include "mpcc/axioms.hpp"

#include <cmath>
#include <limits>

#include "mpcc/parallel.hpp"

namespace mpcc {

namespace {

double stay_weight(double m, std::size_t paths) { return std::pow(1.0 - m, static_cast<double>(paths - 1)); }

double sum_before_last(const std::vector<double>& alpha_hat) {
    double s = 0.0;
    for (std::size_t p = 0; p + 1 < alpha_hat.size(); ++p) s += alpha_hat[p];
    return s;
}

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

/// Two-pass sample variance over values[begin, end).
Moments sample_moments(const std::vector<double>& values, std::size_t begin, std::size_t end) {
    const auto n = static_cast<double>(end - begin);
    double mean = 0.0;
    for (std::size_t i = begin; i < end; ++i) mean += values[i];
    mean /= n;
    double ss = 0.0;
    for (std::size_t i = begin; i < end; ++i) ss += (values[i] - mean) * (values[i] - mean);
    return {mean, n > 1.0 ? ss / (n - 1.0) : 0.0};
}

MarkovAgent step_chain(const MarkovAgent& s, const ProtocolParams& proto, std::size_t paths, const ChainKind& kind,
                       Rng& rng) {
    if (const auto* lossy = std::get_if<chain::Lossy>(&kind)) {
        return markov_step_lossy(s, proto, paths, lossy->p_loss, rng);
    }
    return markov_step_lossless(s, proto, paths, rng);
}

MarkovAgent increase(const MarkovAgent& s, const ProtocolParams& proto) {
    return {s.tau + 1, s.cwnd + alpha_eval(proto.alpha, s.tau), false};
}

MarkovAgent migrate(const MarkovAgent& s, const ProtocolParams& proto) { return {0, proto.r * s.cwnd, false}; }

MarkovAgent decrease(const MarkovAgent& s, const ProtocolParams& proto) { return {0, proto.beta * s.cwnd, true}; }

}  // namespace

bool rated_lossless(const FlowEquilibrium& eq, const NetworkConfig& net) {
    return eq.classification != Classification::DivergentR1 && !eq.levels.empty() &&
           eq.levels.front() <= net.path_capacity();
}

double efficiency_mpcc(const FlowEquilibrium& eq, const NetworkConfig& net, const ProtocolParams& proto) {
    if (rated_lossless(eq, net)) {
        return static_cast<double>(net.paths) * eq.levels.back() / net.capacity_total;
    }
    return proto.beta * stay_weight(proto.m, net.paths);
}

double loss_mpcc(const FlowEquilibrium& eq, const NetworkConfig& net, const ProtocolParams& proto) {
    if (rated_lossless(eq, net)) return 0.0;
    const double cap = net.path_capacity();
    const double earlier = sum_before_last(eq.alpha_hat);
    const double last_alpha = eq.alpha_hat.back();
    const double last_agents = eq.agents.levels.back();
    if (eq.classification == Classification::DivergentR1) {
        return (std::pow(1.0 - proto.m, 1.0 - static_cast<double>(net.paths)) * earlier + last_alpha) *
               last_agents / cap;
    }
    return eq.q * stay_weight(proto.m, net.paths) - 1.0 + (eq.q * earlier + last_alpha) * last_agents / cap;
}

double convergence_mpcc(const FlowEquilibrium& eq, const NetworkConfig& net, const ProtocolParams& proto) {
    if (rated_lossless(eq, net)) return eq.levels.back() / eq.levels.front();
    return proto.beta * stay_weight(proto.m, net.paths) / (loss_mpcc(eq, net, proto) + 1.0);
}

bool migration_gate_open(std::uint64_t tau, std::size_t paths) { return tau % paths != paths - 1; }

MarkovAgent markov_step_lossless(const MarkovAgent& s, const ProtocolParams& proto, std::size_t paths, Rng& rng) {
    const double u = rng.uniform01();
    if (migration_gate_open(s.tau, paths) && u < proto.m) return migrate(s, proto);
    return increase(s, proto);
}

MarkovAgent markov_step_lossy(const MarkovAgent& s, const ProtocolParams& proto, std::size_t paths, double p_loss,
                              Rng& rng) {
    const double u = rng.uniform01();
    const double p_migrate = migration_gate_open(s.tau, paths) ? proto.m : 0.0;
    if (u < p_migrate) return migrate(s, proto);
    const double p_decrease = s.after_loss ? 0.0 : p_loss * (1.0 - p_migrate);
    if (u < p_migrate + p_decrease) return decrease(s, proto);
    return increase(s, proto);
}

FairnessEstimate fairness_eta(const ProtocolParams& proto, std::size_t paths, const ChainKind& kind,
                              std::size_t samples, std::uint64_t horizon, Seed seed) {
    if (samples < 100) throw std::invalid_argument("fairness estimation needs at least 100 samples");
    if (horizon < paths) throw std::invalid_argument("fairness horizon must cover at least one round of P steps");
    std::vector<double> finals(samples);
    parallel_for(samples, [&](std::size_t i) {
        Rng rng(seed, i);
        MarkovAgent s;
        for (std::uint64_t t = 0; t < horizon; ++t) s = step_chain(s, proto, paths, kind, rng);
        finals[i] = s.cwnd;
    });

    FairnessEstimate out;
    out.eta = sample_moments(finals, 0, samples).variance;

    constexpr std::size_t kBatches = 10;
    std::vector<double> batch_var(kBatches);
    for (std::size_t b = 0; b < kBatches; ++b) {
        batch_var[b] = sample_moments(finals, b * samples / kBatches, (b + 1) * samples / kBatches).variance;
    }
    out.std_error = std::sqrt(sample_moments(batch_var, 0, kBatches).variance / static_cast<double>(kBatches));
    return out;
}

std::vector<double> fairness_variance_series(const ProtocolParams& proto, std::size_t paths, const ChainKind& kind,
                                             std::size_t samples, std::uint64_t horizon, Seed seed) {
    const auto steps = static_cast<std::size_t>(horizon) + 1;
    // Welford accumulators per time step, fed chain by chain.
    std::vector<double> mean(steps, 0.0);
    std::vector<double> m2(steps, 0.0);
    for (std::size_t i = 0; i < samples; ++i) {
        Rng rng(seed, i);
        MarkovAgent s;
        const auto n = static_cast<double>(i + 1);
        for (std::size_t t = 0; t < steps; ++t) {
            if (t > 0) s = step_chain(s, proto, paths, kind, rng);
            const double delta = s.cwnd - mean[t];
            mean[t] += delta / n;
            m2[t] += delta * (s.cwnd - mean[t]);
        }
    }
    std::vector<double> var(steps, 0.0);
    if (samples > 1) {
        for (std::size_t t = 0; t < steps; ++t) var[t] = m2[t] / static_cast<double>(samples - 1);
    }
    return var;
}

AxiomRating rate_protocol(const NetworkConfig& net, const ProtocolParams& proto, const FairnessOptions& options) {
    const auto eq = flow_equilibrium(net, proto);
    AxiomRating rating;
    rating.classification = eq.classification;
    rating.epsilon = efficiency_mpcc(eq, net, proto);
    rating.lambda = loss_mpcc(eq, net, proto);
    rating.gamma = convergence_mpcc(eq, net, proto);
    if (options.enabled) {
        const ChainKind kind =
            rated_lossless(eq, net) ? ChainKind{chain::Lossless{}} : ChainKind{chain::Lossy{options.p_loss}};
        const auto est = fairness_eta(proto, net.paths, kind, options.samples, options.horizon, options.seed);
        rating.eta = est.eta;
        rating.eta_stderr = est.std_error;
    } else {
        rating.eta = std::numeric_limits<double>::quiet_NaN();
        rating.eta_stderr = std::numeric_limits<double>::quiet_NaN();
    }
    return rating;
}

}  // namespace mpcc
