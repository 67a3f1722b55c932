#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace mpcc {

/// Per-path aggregates at one time step. For expected dynamics the agent
/// counts are real-valued expectations.
struct TraceStep {
    std::uint64_t t = 0;
    std::vector<double> agents;
    std::vector<double> flow;
    std::vector<bool> loss;
};

struct Trace {
    std::size_t paths = 0;
    std::vector<TraceStep> steps;

    std::size_t size() const { return steps.size(); }
};

/// CSV with header `t,path,agents,flow,loss`, one row per (t, path).
void write_trace_csv(std::ostream& out, const Trace& trace);

}  // namespace mpcc
