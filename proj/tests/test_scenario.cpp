#include <doctest.h>

#include <cmath>
#include <map>

#include "mpcc/scenario.hpp"

using namespace mpcc;

namespace {

const NetworkConfig kNet{3, 36'000.0, 1000};

FairnessOptions no_fairness() {
    FairnessOptions f;
    f.enabled = false;
    return f;
}

}  // namespace

TEST_CASE("baseline ratings") {
    const auto b = baseline(kNet, alpha::Constant{1.0}, 0.7);
    CHECK(b.epsilon == 0.7);
    CHECK(b.lambda == doctest::Approx(1000.0 / 36'000.0));
    CHECK(b.lambda == doctest::Approx(0.0278).epsilon(1e-3));
    CHECK(b.gamma == doctest::Approx(0.7 * 36'000.0 / 37'000.0));
    CHECK(b.eta == 0.0);

    // The loss term scales with the largest increase, not the first.
    const auto slow = baseline(kNet, alpha::SlowStart{3, 1.0}, 0.5);
    const double amax = alpha_max(alpha::SlowStart{3, 1.0});
    CHECK(slow.lambda == doctest::Approx(amax * 1000.0 / 36'000.0));
    CHECK(slow.gamma == doctest::Approx(0.5 * 36'000.0 / (36'000.0 + amax * 1000.0)));
}

TEST_CASE("delta metrics") {
    const auto base = baseline(kNet, alpha::Constant{1.0}, 0.7);

    const auto lossless = delta_metrics(kNet, {alpha::Constant{1.0}, 0.7, 0.1, 0.5}, no_fairness());
    CHECK(lossless.classification == Classification::Lossless);
    CHECK(lossless.d_epsilon == doctest::Approx(3.0 * 8840.9 / 36'000.0 - 0.7).epsilon(1e-4));
    CHECK(lossless.d_epsilon == doctest::Approx(0.037).epsilon(0.03));
    CHECK(lossless.d_lambda == -base.lambda);
    CHECK(lossless.d_gamma == doctest::Approx(lossless.rating.gamma - base.gamma));

    const auto lossy = delta_metrics(kNet, {alpha::Constant{1.0}, 0.7, 0.1, 0.8}, no_fairness());
    CHECK(lossy.classification == Classification::Lossy);
    CHECK(lossy.d_epsilon == doctest::Approx(0.7 * (0.81 - 1.0)));

    FairnessOptions f;
    f.samples = 1000;
    f.horizon = 200;
    f.seed = Seed{2, 0};
    const auto with_eta = delta_metrics(kNet, {alpha::Constant{1.0}, 0.7, 0.1, 0.5}, f);
    CHECK(with_eta.d_eta == doctest::Approx(with_eta.rating.eta));
    CHECK(with_eta.eta_stderr > 0.0);

    CHECK_THROWS_AS(delta_metrics(kNet, {alpha::Constant{1.0}, 0.7, 1.0, 0.5}, no_fairness()), DegenerateParameter);
}

TEST_CASE("sweep classes") {
    CHECK(sweep_class(Classification::Lossless) == SweepClass::Lossless);
    CHECK(sweep_class(Classification::Lossy) == SweepClass::Lossy);
    CHECK(sweep_class(Classification::DivergentR1) == SweepClass::Lossy);
    CHECK(sweep_class(Classification::InconsistentWithPStep) == SweepClass::Inconsistent);
    CHECK(to_string(SweepClass::Lossless) == "lossless");
    CHECK(to_string(Metric::Gamma) == "gamma");
}

TEST_CASE("grids") {
    const auto g = linear_grid(0.0, 1.0, 0.05);
    CHECK(g.size() == 21);
    CHECK(g.back() == doctest::Approx(1.0));
    CHECK(default_m_grid().size() == 49);
    CHECK(default_m_grid().front() == doctest::Approx(0.02));
    CHECK(default_m_grid().back() == doctest::Approx(0.98));
    CHECK(default_r_grid().size() == 21);
    CHECK_THROWS_AS(sweep(kNet, alpha::Constant{1.0}, 0.7, {}, {0.5}, no_fairness()), InvalidGrid);
    CHECK_THROWS_AS(sweep(kNet, alpha::Constant{1.0}, 0.7, {0.5}, {}, no_fairness()), InvalidGrid);
}

TEST_CASE("full default sweep identities") {
    const auto result = sweep(kNet, alpha::Constant{1.0}, 0.7, default_m_grid(), default_r_grid(), no_fairness());
    REQUIRE(result.points.size() == 49 * 21);

    double m_low = 1.0;
    for (const auto& pt : result.points) {
        if (pt.cls == SweepClass::Lossless) {
            m_low = std::min(m_low, pt.m);
            CHECK(pt.delta.d_lambda == -result.base.lambda);
        } else if (pt.cls == SweepClass::Lossy) {
            CHECK(pt.delta.d_epsilon == doctest::Approx(0.7 * (std::pow(1.0 - pt.m, 2.0) - 1.0)));
            CHECK(pt.delta.d_epsilon < 0.0);
        }
    }
    // No lossless equilibrium exists for small m.
    CHECK(m_low > 0.02);
    for (const auto& pt : result.points) {
        if (pt.m < m_low) CHECK(pt.cls != SweepClass::Lossless);
    }

    // Positive efficiency gain somewhere in the lossless class.
    bool positive = false;
    for (const auto& pt : result.points) positive |= pt.cls == SweepClass::Lossless && pt.delta.d_epsilon > 0.0;
    CHECK(positive);

    // Ranges match a direct recomputation and exist only where R(m) is non-empty.
    for (Metric metric : {Metric::Epsilon, Metric::Lambda, Metric::Gamma}) {
        std::map<std::pair<double, int>, std::pair<double, double>> direct;
        for (const auto& pt : result.points) {
            if (pt.cls == SweepClass::Inconsistent) continue;
            const double v = metric_value(pt.delta, metric);
            auto key = std::make_pair(pt.m, static_cast<int>(pt.cls));
            auto [it, fresh] = direct.try_emplace(key, v, v);
            if (!fresh) {
                it->second.first = std::min(it->second.first, v);
                it->second.second = std::max(it->second.second, v);
            }
        }
        const auto ranges = result.ranges(metric);
        CHECK(ranges.size() == direct.size());
        bool lossy_seen = false;
        for (const auto& rg : ranges) {
            if (rg.cls == SweepClass::Lossy) lossy_seen = true;
            CHECK_FALSE((lossy_seen && rg.cls == SweepClass::Lossless));
            const auto& want = direct.at({rg.m, static_cast<int>(rg.cls)});
            CHECK(rg.min == want.first);
            CHECK(rg.max == want.second);
        }
    }
}

TEST_CASE("lossless efficiency and convergence favour low migration") {
    const auto m_grid = linear_grid(0.02, 0.98, 0.02);
    for (double r : {0.0, 0.3, 0.6}) {
        const auto result = sweep(kNet, alpha::Constant{1.0}, 0.7, m_grid, {r}, no_fairness());
        double prev_eps = INFINITY;
        double prev_gamma = INFINITY;
        for (const auto& pt : result.points) {
            if (pt.cls != SweepClass::Lossless) continue;
            CHECK(pt.delta.d_epsilon <= prev_eps + 1e-12);
            if (r == 0.0) CHECK(pt.delta.d_gamma <= prev_gamma + 1e-12);
            prev_eps = pt.delta.d_epsilon;
            prev_gamma = pt.delta.d_gamma;
        }
    }
}

TEST_CASE("fairness is better at high migration rates") {
    FairnessOptions f;
    f.samples = 10'000;
    f.horizon = 300;
    f.seed = Seed{31, 0};
    const NetworkConfig wide{3, 3e6, 1000};
    const auto low = delta_metrics(wide, {alpha::Constant{1.0}, 0.7, 0.1, 0.5}, f);
    const auto high = delta_metrics(wide, {alpha::Constant{1.0}, 0.7, 0.98, 0.5}, f);
    REQUIRE(low.classification == Classification::Lossless);
    REQUIRE(high.classification == Classification::Lossless);
    CHECK(high.d_eta + 3.0 * std::hypot(high.eta_stderr, low.eta_stderr) < low.d_eta);
}

TEST_CASE("sweep is a pure function of its inputs") {
    FairnessOptions f;
    f.samples = 200;
    f.horizon = 60;
    f.seed = Seed{5, 3};
    const auto m_grid = linear_grid(0.1, 0.9, 0.2);
    const auto r_grid = linear_grid(0.0, 1.0, 0.25);
    const auto a = sweep(kNet, alpha::SlowStart{5, 1.0}, 0.7, m_grid, r_grid, f);
    const auto b = sweep(kNet, alpha::SlowStart{5, 1.0}, 0.7, m_grid, r_grid, f);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        CHECK(a.points[i].m == b.points[i].m);
        CHECK(a.points[i].r == b.points[i].r);
        CHECK(a.points[i].delta.d_eta == b.points[i].delta.d_eta);
        CHECK(a.points[i].delta.d_gamma == b.points[i].delta.d_gamma);
    }
    // Each point draws from its own stream.
    CHECK(a.points[0].delta.d_eta != a.points[1].delta.d_eta);
}
