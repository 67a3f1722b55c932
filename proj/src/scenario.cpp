#include "mpcc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "mpcc/parallel.hpp"

namespace mpcc {

BaselineRating baseline(const NetworkConfig& net, const AlphaFunction& alpha, double beta) {
    const double a_max = alpha_max(alpha);
    const double n = static_cast<double>(net.agents);
    const double c = net.capacity_total;
    BaselineRating b;
    b.epsilon = beta;
    b.lambda = a_max * n / c;
    b.gamma = beta * c / (c + a_max * n);
    b.eta = 0.0;
    return b;
}

DeltaMetrics delta_metrics(const NetworkConfig& net, const ProtocolParams& proto, const FairnessOptions& fairness) {
    const auto base = baseline(net, proto.alpha, proto.beta);
    DeltaMetrics d;
    d.rating = rate_protocol(net, proto, fairness);
    d.classification = d.rating.classification;
    d.d_epsilon = d.rating.epsilon - base.epsilon;
    d.d_lambda = d.rating.lambda - base.lambda;
    d.d_gamma = d.rating.gamma - base.gamma;
    d.d_eta = d.rating.eta - base.eta;
    d.eta_stderr = d.rating.eta_stderr;
    return d;
}

std::string to_string(SweepClass c) {
    switch (c) {
        case SweepClass::Lossless:
            return "lossless";
        case SweepClass::Lossy:
            return "lossy";
        case SweepClass::Inconsistent:
            return "inconsistent";
    }
    return "unknown";
}

SweepClass sweep_class(Classification c) {
    switch (c) {
        case Classification::Lossless:
            return SweepClass::Lossless;
        case Classification::Lossy:
        case Classification::DivergentR1:
            return SweepClass::Lossy;
        case Classification::InconsistentWithPStep:
            return SweepClass::Inconsistent;
    }
    return SweepClass::Inconsistent;
}

std::string to_string(Metric metric) {
    switch (metric) {
        case Metric::Epsilon:
            return "epsilon";
        case Metric::Lambda:
            return "lambda";
        case Metric::Gamma:
            return "gamma";
        case Metric::Eta:
            return "eta";
    }
    return "unknown";
}

double metric_value(const DeltaMetrics& d, Metric metric) {
    switch (metric) {
        case Metric::Epsilon:
            return d.d_epsilon;
        case Metric::Lambda:
            return d.d_lambda;
        case Metric::Gamma:
            return d.d_gamma;
        case Metric::Eta:
            return d.d_eta;
    }
    return 0.0;
}

std::vector<MetricRange> SweepResult::ranges(Metric metric) const {
    std::vector<MetricRange> out;
    for (SweepClass cls : {SweepClass::Lossless, SweepClass::Lossy}) {
        std::map<double, MetricRange> by_m;
        for (const auto& pt : points) {
            if (pt.cls != cls) continue;
            const double v = metric_value(pt.delta, metric);
            if (std::isnan(v)) continue;
            auto [it, fresh] = by_m.try_emplace(pt.m, MetricRange{pt.m, cls, v, v});
            if (!fresh) {
                it->second.min = std::min(it->second.min, v);
                it->second.max = std::max(it->second.max, v);
            }
        }
        for (const auto& [m, range] : by_m) out.push_back(range);
    }
    return out;
}

std::vector<double> linear_grid(double from, double to, double step) {
    if (!(step > 0.0) || to < from) throw InvalidGrid("grid needs step > 0 and from <= to");
    std::vector<double> g;
    const auto count = static_cast<std::size_t>(std::floor((to - from) / step + 0.5));
    for (std::size_t i = 0; i <= count; ++i) {
        const double v = from + static_cast<double>(i) * step;
        g.push_back(i == count && std::abs(v - to) < 1e-9 ? to : v);
    }
    return g;
}

std::vector<double> default_m_grid() { return linear_grid(0.02, 0.98, 0.02); }

std::vector<double> default_r_grid() { return linear_grid(0.0, 1.0, 0.05); }

SweepResult sweep(const NetworkConfig& net, const AlphaFunction& alpha, double beta, const std::vector<double>& m_grid,
                  const std::vector<double>& r_grid, const FairnessOptions& fairness) {
    if (m_grid.empty()) throw InvalidGrid("m grid is empty");
    if (r_grid.empty()) throw InvalidGrid("r grid is empty");

    SweepResult result;
    result.base = baseline(net, alpha, beta);
    result.points.resize(m_grid.size() * r_grid.size());

    parallel_for(result.points.size(), [&](std::size_t i) {
        ProtocolParams proto{alpha, beta, m_grid[i / r_grid.size()], r_grid[i % r_grid.size()]};
        FairnessOptions opts = fairness;
        opts.seed.stream = fairness.seed.stream + i;
        SweepPoint& pt = result.points[i];
        pt.m = proto.m;
        pt.r = proto.r;
        pt.delta = delta_metrics(net, proto, opts);
        pt.cls = sweep_class(pt.delta.classification);
    });
    return result;
}

}  // namespace mpcc
