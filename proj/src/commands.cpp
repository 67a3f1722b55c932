#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>

#include <fmt/core.h>

#include "mpcc/axioms.hpp"
#include "mpcc/cli.hpp"
#include "mpcc/equilibrium.hpp"
#include "mpcc/expected_dynamics.hpp"
#include "mpcc/scenario.hpp"
#include "mpcc/stochastic_sim.hpp"
#include "mpcc/svg_chart.hpp"
#include "mpcc/trace.hpp"

namespace mpcc {

namespace {

namespace fs = std::filesystem;

std::string g(double v) { return fmt::format("{:.10g}", v); }

class Artifacts {
public:
    explicit Artifacts(const fs::path& dir) : dir_(dir) {}

    void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
        const fs::path path = dir_ / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        body(out);
        if (!out) throw std::runtime_error("write failed for " + path.string());
        written_.push_back(path);
    }

    void write_text(const std::string& name, const std::string& text) {
        write(name, [&](std::ostream& out) { out << text; });
    }

    std::vector<fs::path> files() const { return written_; }

private:
    fs::path dir_;
    std::vector<fs::path> written_;
};

Assignment parse_assignment(const std::string& name) {
    if (name == "round_robin") return assignment::RoundRobin{};
    if (name == "uniform") return assignment::Uniform{};
    throw ConfigError("run.assignment", fmt::format("expected \"round_robin\" or \"uniform\", got \"{}\"", name));
}

std::vector<double> sorted_desc(std::vector<double> v) {
    std::sort(v.begin(), v.end(), std::greater<>());
    return v;
}

/// Per-path series of one quantity from a trace.
std::vector<Series> path_series(const Trace& tr, bool agents, const std::string& prefix, bool dashed,
                                const std::string& color) {
    std::vector<Series> out(tr.paths);
    for (std::size_t p = 0; p < tr.paths; ++p) {
        out[p].label = prefix.empty() ? "" : fmt::format("{} path {}", prefix, p);
        out[p].dashed = dashed;
        out[p].color = color;
        for (const auto& s : tr.steps) {
            out[p].x.push_back(static_cast<double>(s.t));
            out[p].y.push_back(agents ? s.agents[p] : s.flow[p]);
        }
    }
    return out;
}

void append(std::vector<Series>& dst, std::vector<Series> src) {
    for (auto& s : src) dst.push_back(std::move(s));
}

std::string rating_header() { return "m,r,P,alpha_kind,beta,classification,epsilon,lambda,gamma,eta,eta_stderr\n"; }

std::string rating_row(const NetworkConfig& net, const ProtocolParams& proto, const AxiomRating& rating) {
    return fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", g(proto.m), g(proto.r), net.paths,
                       alpha_kind(proto.alpha), g(proto.beta), to_string(rating.classification), g(rating.epsilon),
                       g(rating.lambda), g(rating.gamma), g(rating.eta), g(rating.eta_stderr));
}

// ---- simulate -----------------------------------------------------------

void simulate(const CommandContext& ctx, Artifacts& files) {
    const auto& cfg = ctx.cfg;
    const auto [net, proto] = validate(cfg.network(), cfg.protocol());
    if (cfg.run.ensemble == 0) throw ConfigError("run.ensemble", "must be at least 1");
    const Assignment assign = parse_assignment(cfg.run.assignment);

    std::vector<Trace> runs;
    for (std::size_t k = 0; k < cfg.run.ensemble; ++k) {
        runs.push_back(run_stochastic(net, proto, cfg.run.horizon, Seed{cfg.run.seed.base, cfg.run.seed.stream + k},
                                      assign));
    }
    const auto expected = to_trace(
        run_expected(net, proto, cfg.run.horizon, make_expected_state(net, round_robin_split(net))), net);

    files.write("trace.csv", [&](std::ostream& out) { write_trace_csv(out, runs.front()); });
    files.write("expected.csv", [&](std::ostream& out) { write_trace_csv(out, expected); });

    if (runs.size() > 1) {
        // Stochastic runs settle into the same rotation with a random phase, so
        // paths are aligned by rank before averaging.
        files.write("ensemble.csv", [&](std::ostream& out) {
            out << "t,rank,mean_flow,expected_flow\n";
            for (std::size_t t = 0; t < expected.steps.size(); ++t) {
                std::vector<double> mean(net.paths, 0.0);
                for (const auto& run : runs) {
                    const auto f = sorted_desc(run.steps[t].flow);
                    for (std::size_t p = 0; p < net.paths; ++p) mean[p] += f[p] / static_cast<double>(runs.size());
                }
                const auto e = sorted_desc(expected.steps[t].flow);
                for (std::size_t p = 0; p < net.paths; ++p) {
                    out << fmt::format("{},{},{},{}\n", t, p, g(mean[p]), g(e[p]));
                }
            }
        });
    }

    const auto eq = flow_equilibrium(net, proto);
    const bool lossy = !rated_lossless(eq, net);
    std::optional<LossyBounds> bounds;
    if (lossy && eq.classification != Classification::InconsistentWithPStep) bounds = lossy_bounds(net, proto);

    files.write("summary.csv", [&](std::ostream& out) {
        out << "run,seed_stream,min_flow,max_flow,lower_type1,lower_type2,upper\n";
        const double nan = std::numeric_limits<double>::quiet_NaN();
        for (std::size_t k = 0; k < runs.size(); ++k) {
            double lo = std::numeric_limits<double>::infinity();
            double hi = -lo;
            for (const auto& s : runs[k].steps) {
                if (s.t < cfg.run.transient) continue;
                for (double f : s.flow) {
                    lo = std::min(lo, f);
                    hi = std::max(hi, f);
                }
            }
            if (!std::isfinite(lo)) lo = hi = nan;
            out << fmt::format("{},{},{},{},{},{},{}\n", k, cfg.run.seed.stream + k, g(lo), g(hi),
                               g(bounds ? bounds->lower_type1 : nan), g(bounds ? bounds->lower_type2 : nan),
                               g(bounds ? bounds->upper : nan));
        }
    });

    ChartData flow_chart;
    append(flow_chart.series, path_series(runs.front(), false, "", true, "#9a9a9a"));
    append(flow_chart.series, path_series(expected, false, "expected", false, ""));
    flow_chart.series.front().label = "simulated";
    flow_chart.guides.push_back({net.path_capacity(), "C/P"});
    if (bounds) flow_chart.guides.push_back({bounds->lower_type1, "lower bound"});
    files.write_text("flows.svg",
                     render_chart(flow_chart, {fmt::format("Flow per path, P={} m={} r={}", net.paths, g(proto.m),
                                                           g(proto.r)),
                                               "t", "flow"}));

    ChartData agent_chart;
    append(agent_chart.series, path_series(runs.front(), true, "", true, "#9a9a9a"));
    append(agent_chart.series, path_series(expected, true, "expected", false, ""));
    agent_chart.series.front().label = "simulated";
    files.write_text("agents.svg", render_chart(agent_chart, {"Agents per path", "t", "agents"}));

    ctx.log << fmt::format("simulated {} run(s) of {} steps; equilibrium class {}\n", runs.size(), cfg.run.horizon,
                           to_string(eq.classification));
}

// ---- expected -----------------------------------------------------------

void expected(const CommandContext& ctx, Artifacts& files) {
    const auto& cfg = ctx.cfg;
    const auto [net, proto] = validate(cfg.network(), cfg.protocol());
    auto starts = cfg.run.starts;
    if (starts.empty()) starts.push_back(round_robin_split(net));

    ChartData agent_chart, flow_chart;
    for (std::size_t k = 0; k < starts.size(); ++k) {
        if (starts[k].size() != net.paths) {
            throw ConfigError("run.starts", fmt::format("start {} has {} entries, expected P = {}", k,
                                                        starts[k].size(), net.paths));
        }
        ExpectedState init;
        try {
            init = make_expected_state(net, starts[k]);
        } catch (const DegenerateState& e) {
            throw ConfigError("run.starts", e.what());
        }
        const auto tr = to_trace(run_expected(net, proto, cfg.run.horizon, init), net);
        const std::string name = starts.size() == 1 ? "expected.csv" : fmt::format("expected_{}.csv", k);
        files.write(name, [&](std::ostream& out) { write_trace_csv(out, tr); });
        const std::string prefix = starts.size() == 1 ? "" : fmt::format("start {}", k);
        auto a = path_series(tr, true, prefix, false, "");
        auto f = path_series(tr, false, prefix, false, "");
        if (starts.size() == 1) {
            for (std::size_t p = 0; p < a.size(); ++p) a[p].label = f[p].label = fmt::format("path {}", p);
        }
        append(agent_chart.series, std::move(a));
        append(flow_chart.series, std::move(f));
    }

    const auto agents_eq = agent_equilibrium(proto.m, net.agents, net.paths);
    for (std::size_t p = 0; p < net.paths; ++p) {
        agent_chart.guides.push_back({agents_eq.levels[p], fmt::format("a^({})", p)});
    }
    const auto eq = flow_equilibrium(net, proto);
    for (std::size_t p = 0; p < eq.levels.size(); ++p) {
        flow_chart.guides.push_back({eq.levels[p], fmt::format("f^({})", p)});
    }
    flow_chart.guides.push_back({net.path_capacity(), "C/P"});

    files.write_text("agents.svg", render_chart(agent_chart, {fmt::format("Expected agents, P={} m={}", net.paths,
                                                                          g(proto.m)),
                                                              "t", "agents"}));
    files.write_text("flows.svg",
                     render_chart(flow_chart, {fmt::format("Expected flow, P={} m={} r={}", net.paths, g(proto.m),
                                                           g(proto.r)),
                                               "t", "flow"}));
    ctx.log << fmt::format("expected dynamics from {} start(s); equilibrium class {}\n", starts.size(),
                           to_string(eq.classification));
}

// ---- equilibrium --------------------------------------------------------

void equilibrium(const CommandContext& ctx, Artifacts& files) {
    const auto& cfg = ctx.cfg;
    const auto [net, proto] = validate(cfg.network(), cfg.protocol());
    const auto eq = flow_equilibrium(net, proto);
    const double nan = std::numeric_limits<double>::quiet_NaN();

    files.write("equilibrium.csv", [&](std::ostream& out) {
        out << "rank,agents,alpha_hat,flow\n";
        for (std::size_t p = 0; p < net.paths; ++p) {
            out << fmt::format("{},{},{},{}\n", p, g(eq.agents.levels[p]), g(eq.alpha_hat[p]),
                               g(eq.levels.empty() ? nan : eq.levels[p]));
        }
    });

    std::vector<std::pair<std::string, std::string>> summary = {
        {"classification", to_string(eq.classification)},
        {"q", g(eq.q)},
        {"round_factor", g(eq.round_factor)},
        {"path_capacity", g(net.path_capacity())},
    };
    if (!rated_lossless(eq, net) && eq.classification != Classification::InconsistentWithPStep) {
        const auto b = lossy_bounds(net, proto);
        summary.push_back({"upper", g(b.upper)});
        summary.push_back({"lower_type1", g(b.lower_type1)});
        summary.push_back({"lower_type2", g(b.lower_type2)});
    }
    if (proto.r < 1.0 && net.paths > 1) {
        summary.push_back({"p_step_consistent", check_p_step_consistency(net, proto).consistent ? "true" : "false"});
    }
    files.write("equilibrium_summary.csv", [&](std::ostream& out) {
        out << "quantity,value\n";
        for (const auto& [k, v] : summary) out << k << ',' << v << '\n';
    });

    for (const auto& [k, v] : summary) ctx.log << fmt::format("{:<18} {}\n", k, v);
    for (std::size_t p = 0; p < eq.levels.size(); ++p) {
        ctx.log << fmt::format("f^({})              {}\n", p, g(eq.levels[p]));
    }
}

// ---- axioms / compare ---------------------------------------------------

void axioms(const CommandContext& ctx, Artifacts& files) {
    const auto& cfg = ctx.cfg;
    const auto [net, proto] = validate(cfg.network(), cfg.protocol());
    const auto rating = rate_protocol(net, proto, cfg.fairness);
    files.write_text("rating.csv", rating_header() + rating_row(net, proto, rating));

    if (!cfg.p_loss_series.empty()) {
        ChartData chart;
        std::vector<std::vector<double>> series;
        for (double p_loss : cfg.p_loss_series) {
            if (!(p_loss >= 0.0 && p_loss <= 1.0)) {
                throw ConfigError("fairness.p_loss_series", fmt::format("{} is outside [0, 1]", g(p_loss)));
            }
            series.push_back(fairness_variance_series(proto, net.paths, chain::Lossy{p_loss}, cfg.fairness.samples,
                                                      cfg.fairness.horizon, cfg.fairness.seed));
            Series s;
            s.label = fmt::format("p_loss = {}", g(p_loss));
            for (std::size_t t = 0; t < series.back().size(); ++t) {
                s.x.push_back(static_cast<double>(t));
                s.y.push_back(series.back()[t]);
            }
            chart.series.push_back(std::move(s));
        }
        files.write("fairness_series.csv", [&](std::ostream& out) {
            out << "t,p_loss,variance\n";
            for (std::size_t i = 0; i < series.size(); ++i) {
                for (std::size_t t = 0; t < series[i].size(); ++t) {
                    out << fmt::format("{},{},{}\n", t, g(cfg.p_loss_series[i]), g(series[i][t]));
                }
            }
        });
        files.write_text("fairness.svg",
                         render_chart(chart, {fmt::format("Window variance, m={} r={}", g(proto.m), g(proto.r)), "t",
                                              "variance of cwnd"}));
    }

    ctx.log << fmt::format("{} epsilon={} lambda={} gamma={} eta={} (+/- {})\n", to_string(rating.classification),
                           g(rating.epsilon), g(rating.lambda), g(rating.gamma), g(rating.eta),
                           g(rating.eta_stderr));
}

void compare(const CommandContext& ctx, Artifacts& files) {
    const auto& cfg = ctx.cfg;
    const auto [net, proto] = validate(cfg.network(), cfg.protocol());
    const auto d = delta_metrics(net, proto, cfg.fairness);
    const auto base = baseline(net, proto.alpha, proto.beta);
    files.write_text("rating.csv", rating_header() + rating_row(net, proto, d.rating));
    files.write("compare.csv", [&](std::ostream& out) {
        out << "metric,mpcc,baseline,delta\n";
        out << fmt::format("epsilon,{},{},{}\n", g(d.rating.epsilon), g(base.epsilon), g(d.d_epsilon));
        out << fmt::format("lambda,{},{},{}\n", g(d.rating.lambda), g(base.lambda), g(d.d_lambda));
        out << fmt::format("gamma,{},{},{}\n", g(d.rating.gamma), g(base.gamma), g(d.d_gamma));
        out << fmt::format("eta,{},{},{}\n", g(d.rating.eta), g(base.eta), g(d.d_eta));
    });
    ctx.log << fmt::format("{}: d_epsilon={} d_lambda={} d_gamma={} d_eta={}\n", to_string(d.classification),
                           g(d.d_epsilon), g(d.d_lambda), g(d.d_gamma), g(d.d_eta));
}

// ---- sweep --------------------------------------------------------------

void sweep_command(const CommandContext& ctx, Artifacts& files) {
    const auto& cfg = ctx.cfg;
    const auto [net, proto] = validate(cfg.network(), cfg.protocol());
    const auto& sw = cfg.sweep;
    const auto m_grid = linear_grid(sw.m_from, sw.m_to, sw.m_step);
    const auto r_grid = linear_grid(sw.r_from, sw.r_to, sw.r_step);
    for (double m : m_grid) validate(net, {proto.alpha, proto.beta, m, proto.r});
    for (double r : r_grid) validate(net, {proto.alpha, proto.beta, proto.m, r});

    const auto result = sweep(net, proto.alpha, proto.beta, m_grid, r_grid, cfg.fairness);

    files.write("sweep.csv", [&](std::ostream& out) {
        out << "m,r,class,delta_eps,delta_lambda,delta_gamma,delta_eta,eta_stderr\n";
        for (const auto& pt : result.points) {
            out << fmt::format("{},{},{},{},{},{},{},{}\n", g(pt.m), g(pt.r), to_string(pt.cls), g(pt.delta.d_epsilon),
                               g(pt.delta.d_lambda), g(pt.delta.d_gamma), g(pt.delta.d_eta),
                               g(pt.delta.eta_stderr));
        }
    });

    const std::pair<Metric, const char*> metrics[] = {{Metric::Epsilon, "Δε (efficiency)"},
                                                      {Metric::Lambda, "Δλ (loss)"},
                                                      {Metric::Gamma, "Δγ (convergence)"},
                                                      {Metric::Eta, "Δη (fairness)"}};
    for (const auto& [metric, title] : metrics) {
        const auto ranges = result.ranges(metric);
        const std::string name = to_string(metric);
        files.write("ranges_" + name + ".csv", [&](std::ostream& out) {
            out << "m,class,delta_min,delta_max\n";
            for (const auto& r : ranges) {
                out << fmt::format("{},{},{},{}\n", g(r.m), to_string(r.cls), g(r.min), g(r.max));
            }
        });
        ChartData chart;
        for (SweepClass cls : {SweepClass::Lossless, SweepClass::Lossy}) {
            Band b;
            b.label = to_string(cls);
            b.color = cls == SweepClass::Lossless ? "#2ca02c" : "#d62728";
            for (const auto& r : ranges) {
                if (r.cls != cls) continue;
                b.x.push_back(r.m);
                b.lo.push_back(r.min);
                b.hi.push_back(r.max);
            }
            if (!b.x.empty()) chart.bands.push_back(std::move(b));
        }
        if (chart.bands.empty()) continue;
        chart.guides.push_back({0.0, ""});
        files.write_text("band_" + name + ".svg",
                         render_chart(chart, {fmt::format("{}, P={} beta={}", title, net.paths, g(proto.beta)),
                                              "migration rate m", "delta"}));
    }

    std::size_t counts[3] = {0, 0, 0};
    for (const auto& pt : result.points) ++counts[static_cast<int>(pt.cls)];
    ctx.log << fmt::format("swept {} points: {} lossless, {} lossy, {} inconsistent\n", result.points.size(),
                           counts[0], counts[1], counts[2]);
    ctx.log << fmt::format("baseline epsilon={} lambda={} gamma={} eta={}\n", g(result.base.epsilon),
                           g(result.base.lambda), g(result.base.gamma), g(result.base.eta));
}

// ---- consistency map ----------------------------------------------------

void consistency(const CommandContext& ctx, Artifacts& files) {
    const auto& cfg = ctx.cfg;
    const auto& opts = cfg.consistency;
    if (opts.m_points == 0) throw ConfigError("consistency.m_points", "must be at least 1");
    if (opts.r_points == 0) throw ConfigError("consistency.r_points", "must be at least 1");
    auto paths = opts.paths;
    if (paths.empty()) paths.push_back(cfg.net.paths);
    auto alphas = opts.alphas;
    if (alphas.empty()) alphas.push_back(cfg.alpha.kind);

    const auto m_grid = open_unit_grid(opts.m_points);
    const auto r_grid = half_open_unit_grid(opts.r_points);

    ChartData chart;
    std::string csv = "m,r,P,alpha_kind,consistent\n";
    for (const auto& kind : alphas) {
        AlphaSpec spec = cfg.alpha;
        spec.kind = kind;
        ProtocolParams base = cfg.protocol();
        try {
            base.alpha = spec.build();
        } catch (const ConfigError& e) {
            throw ConfigError("consistency.alphas", e.detail());
        }
        for (std::size_t p : paths) {
            if (p < 2) throw ConfigError("consistency.paths", "every path count must be at least 2");
            NetworkConfig net = cfg.network();
            net.paths = p;
            validate(net, base);
            const auto map = consistency_map(base, p, m_grid, r_grid);
            Series s;
            s.label = fmt::format("inconsistent, P={} {}", p, kind);
            s.markers = true;
            std::size_t bad = 0;
            for (const auto& pt : map) {
                csv += fmt::format("{},{},{},{},{}\n", g(pt.m), g(pt.r), p, kind, pt.consistent ? "true" : "false");
                if (!pt.consistent) {
                    ++bad;
                    s.x.push_back(pt.m);
                    s.y.push_back(pt.r);
                }
            }
            if (!s.x.empty()) chart.series.push_back(std::move(s));
            ctx.log << fmt::format("P={} alpha={}: {} of {} points inconsistent\n", p, kind, bad, map.size());
        }
    }
    files.write_text("consistency.csv", csv);
    if (chart.series.empty()) {
        // Nothing inconsistent: draw the empty grid frame so the chart still exists.
        Series frame;
        frame.x = {0.0, 1.0};
        frame.y = {0.0, 1.0};
        frame.markers = true;
        frame.color = "white";
        chart.series.push_back(std::move(frame));
    }
    files.write_text("consistency.svg",
                     render_chart(chart, {"Parameters inconsistent with P-step oscillation", "migration rate m",
                                          "reset softness r"}));
}

}  // namespace

std::vector<std::filesystem::path> run_command(Command command, const CommandContext& ctx) {
    Artifacts files(ctx.out_dir);
    switch (command) {
        case Command::Simulate: simulate(ctx, files); break;
        case Command::Expected: expected(ctx, files); break;
        case Command::Equilibrium: equilibrium(ctx, files); break;
        case Command::Axioms: axioms(ctx, files); break;
        case Command::Compare: compare(ctx, files); break;
        case Command::Sweep: sweep_command(ctx, files); break;
        case Command::ConsistencyMap: consistency(ctx, files); break;
    }
    return files.files();
}

}  // namespace mpcc
