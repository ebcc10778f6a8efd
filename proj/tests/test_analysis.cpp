#include <doctest.h>

#include <cmath>

#include "forge/analysis.hpp"
#include "forge/rng.hpp"

using namespace forge;

namespace {

// Synthetic logical-error data drawn from an exact scaling form.
std::vector<RatePoint> synthetic_points(double p_th, double nu, const std::vector<int>& sizes,
                                        const std::vector<double>& ps, double noise, Rng& rng,
                                        bool linear_f = false) {
    std::vector<RatePoint> rows;
    for (int l : sizes)
        for (double p : ps) {
            double x = (p - p_th) * std::pow(l, 1.0 / nu);
            double y = linear_f ? 0.12 + 0.05 * x : 0.12 + 0.1 * std::tanh(60.0 * x);
            y += noise * (rng.uniform() - 0.5);
            RatePoint r;
            r.l = l;
            r.p = p;
            r.p_loss = 0;
            r.n = 1;
            r.p_logic = std::max(0.0, y);
            rows.push_back(r);
        }
    return rows;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(a + (b - a) * i / (n - 1));
    return v;
}

}  // namespace

TEST_CASE("collapse cost") {
    Rng rng(1);
    auto ps = linspace(0.003, 0.008, 11);
    SUBCASE("perfectly collapsed linear data has zero cost at the true parameters") {
        auto rows = synthetic_points(0.0053, 1.0, {6, 8, 10}, ps, 0.0, rng, /*linear_f=*/true);
        CollapseData data = CollapseData::from_points(rows);
        CHECK(collapse_cost(0.0053, 1.0, data) < 1e-18);
    }
    SUBCASE("wrong parameters cost more than the truth") {
        auto rows = synthetic_points(0.0053, 1.0, {6, 8, 10, 12}, ps, 0.0, rng);
        CollapseData data = CollapseData::from_points(rows);
        double at_truth = collapse_cost(0.0053, 1.0, data);
        CHECK(collapse_cost(0.0045, 1.0, data) > at_truth);
        CHECK(collapse_cost(0.0053, 1.7, data) > at_truth);
        CHECK(collapse_cost(0.0061, 0.7, data) > at_truth);
    }
    SUBCASE("shuffled data costs more than collapsed data") {
        auto rows = synthetic_points(0.0053, 1.0, {6, 8, 10}, ps, 0.0, rng);
        CollapseData data = CollapseData::from_points(rows);
        double good = collapse_cost(0.0053, 1.0, data);
        // shuffle y-values within each curve
        CollapseData bad = data;
        Rng shuffle_rng(5);
        for (auto& c : bad.curves)
            for (size_t i = c.size(); i > 1; --i)
                std::swap(c[i - 1].second, c[shuffle_rng.below(i)].second);
        CHECK(collapse_cost(0.0053, 1.0, bad) > good + 1e-6);
    }
    SUBCASE("cost is invariant under size relabeling") {
        auto rows = synthetic_points(0.005, 1.1, {6, 8, 10}, ps, 0.002, rng);
        CollapseData data = CollapseData::from_points(rows);
        CollapseData rev = data;
        std::reverse(rev.sizes.begin(), rev.sizes.end());
        std::reverse(rev.curves.begin(), rev.curves.end());
        CHECK(collapse_cost(0.005, 1.1, data) == doctest::Approx(collapse_cost(0.005, 1.1, rev)));
    }
}

TEST_CASE("threshold fitting") {
    Rng rng(2);
    auto ps = linspace(0.003, 0.008, 11);
    SUBCASE("recovers synthetic parameters within their uncertainty") {
        int good = 0;
        for (int rep = 0; rep < 10; ++rep) {
            auto rows = synthetic_points(0.005, 1.0, {6, 8, 10, 12}, ps, 0.01, rng);
            CollapseFit fit = fit_threshold(CollapseData::from_points(rows));
            REQUIRE(fit.ok);
            if (std::abs(fit.p_th - 0.005) < std::max(2e-4, 2 * fit.sigma_pth) &&
                std::abs(fit.nu - 1.0) < std::max(0.15, 2 * fit.sigma_nu))
                ++good;
        }
        CHECK(good >= 8);
    }
    SUBCASE("two sizes fit but report no uncertainty") {
        auto rows = synthetic_points(0.005, 1.0, {6, 12}, ps, 0.005, rng);
        CollapseFit fit = fit_threshold(CollapseData::from_points(rows));
        REQUIRE(fit.ok);
        CHECK(fit.sigma_pth == -1);
    }
    SUBCASE("non-bracketing data reports a fit failure") {
        // all curves on the same side: monotone in L everywhere
        std::vector<RatePoint> rows;
        for (int l : {6, 8, 10})
            for (double p : ps) {
                RatePoint r;
                r.l = l;
                r.p = p;
                r.p_logic = 0.01 * l + p;  // no crossing anywhere
                rows.push_back(r);
            }
        CollapseFit fit = fit_threshold(CollapseData::from_points(rows));
        CHECK(!fit.ok);
        CHECK(fit.message.find("cross") != std::string::npos);
    }
}

TEST_CASE("phase boundary fit") {
    SUBCASE("zero-loss point plus midpoint interpolates exactly") {
        std::vector<std::pair<double, double>> pts{{0.0, 0.0053}, {0.12, 0.0027}};
        QuadraticBoundary q = fit_phase_boundary(pts, 0.249);
        CHECK(q.at(0.0) == doctest::Approx(0.0053).epsilon(1e-9));
        CHECK(q.at(0.12) == doctest::Approx(0.0027).epsilon(1e-9));
        CHECK(q.at(0.249) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(q.max_residual < 1e-12);
        CHECK(q.beta == doctest::Approx(0.0053));
        CHECK(q.alpha < 0);
    }
    SUBCASE("synthetic quadratic with noise is recovered") {
        Rng rng(3);
        // truth: passes through (0.249, 0)
        double a = -0.021, b = 0.0015;  // p(x) = a(x-x0) + b(x-x0)^2
        std::vector<std::pair<double, double>> pts;
        for (double x : {0.0, 0.05, 0.10, 0.15, 0.20}) {
            double u = x - 0.249;
            pts.push_back({x, a * u + b * u * u + 1e-5 * (rng.uniform() - 0.5)});
        }
        QuadraticBoundary q = fit_phase_boundary(pts, 0.249);
        for (auto [x, y] : pts) CHECK(std::abs(q.at(x) - y) < 5e-5);
    }
}

TEST_CASE("optimal lattice size from the saddle point") {
    const double alpha = -0.02, beta = 0.0053;
    SUBCASE("x0 is independent of eta to high precision") {
        OptimalL a = optimal_l(1e-4, 1e-3, alpha, beta);
        OptimalL b = optimal_l(3e-3, 1e-3, alpha, beta);
        REQUIRE(a.correctable);
        REQUIRE(b.correctable);
        CHECK(std::abs(a.x0 - b.x0) < 1e-10);
        // L_opt scales as eta^{-1/2}
        CHECK(a.l_opt / b.l_opt == doctest::Approx(std::sqrt(3e-3 / 1e-4)).epsilon(1e-9));
    }
    SUBCASE("the saddle point is a stationary point of f") {
        OptimalL r = optimal_l(5e-4, 1e-3, alpha, beta);
        REQUIRE(r.correctable);
        auto f = [&](double l) {
            return l / 2.0 * (std::log(1e-3) - std::log(alpha * 5e-4 * l * l + beta));
        };
        double h = 1e-6 * r.l_opt;
        double deriv = (f(r.l_opt + h) - f(r.l_opt - h)) / (2 * h);
        CHECK(std::abs(deriv) < 1e-10 * std::abs(f(r.l_opt)) + 1e-10);
    }
    SUBCASE("closed form matches integer grid minimization within one step") {
        Rng rng(4);
        for (int rep = 0; rep < 10; ++rep) {
            double eta = std::pow(10.0, -4.5 + 2.0 * rng.uniform());
            double p = beta * (0.05 + 0.5 * rng.uniform());
            OptimalL r = optimal_l(eta, p, alpha, beta);
            REQUIRE(r.correctable);
            int best_l = 1;
            double best = 1e300;
            for (int l = 1; l <= 2000; ++l) {
                double v = ansatz_logical_rate(eta, l, p, alpha, beta);
                if (v < best) {
                    best = v;
                    best_l = l;
                }
            }
            CHECK(std::abs(best_l - r.l_opt) <= 1.0);
        }
    }
    SUBCASE("p near the zero-loss threshold plateaus near 1") {
        OptimalL r = optimal_l(1e-3, 0.999 * beta, alpha, beta);
        REQUIRE(r.correctable);
        CHECK(r.x0 > -1e-3);
        CHECK(r.p_opt > 0.9);
    }
    SUBCASE("p above the threshold is uncorrectable") {
        OptimalL r = optimal_l(1e-3, 2 * beta, alpha, beta);
        CHECK(!r.correctable);
    }
}

TEST_CASE("ansatz curves") {
    const double alpha = -0.02, beta = 0.0053;
    std::vector<int> sizes{4, 8, 12, 16, 20};
    auto etas = linspace(1e-5, 3e-3, 40);
    auto rows = ansatz_curves(etas, sizes, 1e-3, alpha, beta);
    CHECK(rows.size() == sizes.size() * etas.size());
    SUBCASE("at vanishing loss bigger lattices always win") {
        for (size_t k = 1; k < sizes.size(); ++k) {
            double small_l = ansatz_logical_rate(1e-9, sizes[k - 1], 1e-3, alpha, beta);
            double big_l = ansatz_logical_rate(1e-9, sizes[k], 1e-3, alpha, beta);
            CHECK(big_l < small_l);
        }
    }
    SUBCASE("the curve fan crosses: large L wins at small eta, loses at large eta") {
        double lo_small = ansatz_logical_rate(1e-5, 4, 1e-3, alpha, beta);
        double lo_big = ansatz_logical_rate(1e-5, 20, 1e-3, alpha, beta);
        double hi_small = ansatz_logical_rate(2.5e-3, 4, 1e-3, alpha, beta);
        double hi_big = ansatz_logical_rate(2.5e-3, 20, 1e-3, alpha, beta);
        CHECK(lo_big < lo_small);
        CHECK(hi_big > hi_small);
    }
    SUBCASE("the envelope minimum agrees with the saddle point") {
        double eta = 4e-4;
        OptimalL r = optimal_l(eta, 1e-3, alpha, beta);
        REQUIRE(r.correctable);
        double best = 1e300;
        int best_l = 0;
        for (int l = 2; l <= 200; ++l) {
            double v = ansatz_logical_rate(eta, l, 1e-3, alpha, beta);
            if (v < best) {
                best = v;
                best_l = l;
            }
        }
        CHECK(std::abs(best_l - r.l_opt) <= 1.0);
        CHECK(best == doctest::Approx(r.p_opt).epsilon(0.05));
    }
}
