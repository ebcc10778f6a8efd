#pragma once

#include <string>
#include <utility>
#include <vector>

#include "forge/montecarlo.hpp"

namespace forge {

// Logical-error curves grouped by size, ready for scaling collapse.
struct CollapseData {
    std::vector<int> sizes;
    // curves[k]: (p, p_logic) samples for sizes[k], sorted by p
    std::vector<std::vector<std::pair<double, double>>> curves;

    static CollapseData from_points(const std::vector<RatePoint>& rows, double p_loss = 0.0);
};

// Deviation from a single-curve collapse: the summed variance across sizes of
// y_L(x) = p_logic(p, L) - p_logic(p_th, L) sampled on the union of all
// x = (p - p_th) L^(1/nu) values, with out-of-range points omitted per size.
double collapse_cost(double p_th, double nu, const CollapseData& data);

struct CollapseFit {
    bool ok = false;
    std::string message;
    double p_th = 0, nu = 0;
    double p_logic_c = 0;  // mean p_logic at the fitted threshold
    double r_min = 0;
    double sigma_pth = -1, sigma_nu = -1;  // pairwise-subset spread; -1 = unavailable
};

CollapseFit fit_threshold(const CollapseData& data);

struct QuadraticBoundary {
    // p_th(x) = c2 x^2 + c1 x + c0, constrained through (x_zero, 0)
    double c2 = 0, c1 = 0, c0 = 0;
    double alpha = 0, beta = 0;  // linear approximation p_th ~ alpha p_loss + beta
    double max_residual = 0;
    double x_zero = 0;
    double at(double x) const { return c2 * x * x + c1 * x + c0; }
};

// Least-squares quadratic through the measured (p_loss, p_th) points,
// constrained to vanish at x_zero (the percolation bound).
QuadraticBoundary fit_phase_boundary(const std::vector<std::pair<double, double>>& points,
                                     double x_zero = 0.249);

struct OptimalL {
    bool correctable = false;
    double x0 = 0;     // root of the saddle equation; independent of eta
    double l_opt = 0;  // sqrt(x0 / (eta alpha))
    double p_opt = 0;  // (p / (x0 + beta))^(l_opt / 2)
};

// Saddle point of the exponential-decay ansatz p_logic = (p / (alpha eta L^2
// + beta))^(L/2). alpha < 0, beta > 0 from the phase boundary; eta is the
// loss per qubit in natural-log units.
OptimalL optimal_l(double eta, double p, double alpha, double beta);

// The ansatz itself (clamped to 1 outside the correctable region).
double ansatz_logical_rate(double eta, int l, double p, double alpha, double beta);

struct AnsatzRow {
    double eta;
    int l;
    double p_logic;
};
std::vector<AnsatzRow> ansatz_curves(const std::vector<double>& eta_grid, const std::vector<int>& sizes,
                                     double p, double alpha, double beta);

}  // namespace forge
