#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "mpcc/axioms.hpp"
#include "mpcc/core_model.hpp"

namespace mpcc {

/// Ratings of the same network without path selection: every agent runs the
/// single-path protocol on a static, evenly split assignment.
struct BaselineRating {
    double epsilon = 0.0;
    double lambda = 0.0;
    double gamma = 0.0;
    double eta = 0.0;
};

BaselineRating baseline(const NetworkConfig& net, const AlphaFunction& alpha, double beta);

struct DeltaMetrics {
    double d_epsilon = 0.0;
    double d_lambda = 0.0;
    double d_gamma = 0.0;
    double d_eta = 0.0;
    double eta_stderr = 0.0;
    Classification classification = Classification::Lossless;
    AxiomRating rating;
};

DeltaMetrics delta_metrics(const NetworkConfig& net, const ProtocolParams& proto, const FairnessOptions& fairness);

/// Sweep class of a grid point. DivergentR1 points count as lossy;
/// inconsistent points belong to neither class.
enum class SweepClass { Lossless, Lossy, Inconsistent };

std::string to_string(SweepClass c);
SweepClass sweep_class(Classification c);

class InvalidGrid : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct SweepPoint {
    double m = 0.0;
    double r = 0.0;
    SweepClass cls = SweepClass::Lossless;
    DeltaMetrics delta;
};

enum class Metric { Epsilon, Lambda, Gamma, Eta };

std::string to_string(Metric metric);
double metric_value(const DeltaMetrics& d, Metric metric);

struct MetricRange {
    double m = 0.0;
    SweepClass cls = SweepClass::Lossless;
    double min = 0.0;
    double max = 0.0;
};

struct SweepResult {
    BaselineRating base;
    std::vector<SweepPoint> points;  // m-major, r-minor

    /// [min, max] of one metric over R(m) for every m where R(m) of the class
    /// is non-empty. Lossless ranges come first, then lossy.
    std::vector<MetricRange> ranges(Metric metric) const;
};

/// Evenly spaced grid from..to inclusive (within half a step).
std::vector<double> linear_grid(double from, double to, double step);

/// m in {0.02, ..., 0.98}.
std::vector<double> default_m_grid();
/// r in {0, 0.05, ..., 1}.
std::vector<double> default_r_grid();

/// Grid points are evaluated independently; fairness at point i uses the
/// seed (fairness.seed.base, fairness.seed.stream + i).
SweepResult sweep(const NetworkConfig& net, const AlphaFunction& alpha, double beta, const std::vector<double>& m_grid,
                  const std::vector<double>& r_grid, const FairnessOptions& fairness);

}  // namespace mpcc
