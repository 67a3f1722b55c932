#include "mpcc/trace.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <ostream>

namespace mpcc {

void write_trace_csv(std::ostream& out, const Trace& trace) {
    out << "t,path,agents,flow,loss\n";
    for (const auto& step : trace.steps) {
        for (std::size_t p = 0; p < trace.paths; ++p) {
            fmt::print(out, "{},{},{:.10g},{:.10g},{}\n", step.t, p, step.agents[p], step.flow[p],
                       step.loss[p] ? 1 : 0);
        }
    }
}

}  // namespace mpcc
