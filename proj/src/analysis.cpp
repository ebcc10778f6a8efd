#include "forge/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace forge {

CollapseData CollapseData::from_points(const std::vector<RatePoint>& rows, double p_loss) {
    CollapseData d;
    for (const auto& r : rows) {
        if (std::abs(r.p_loss - p_loss) > 1e-12) continue;
        size_t k = 0;
        for (; k < d.sizes.size(); ++k)
            if (d.sizes[k] == r.l) break;
        if (k == d.sizes.size()) {
            d.sizes.push_back(r.l);
            d.curves.emplace_back();
        }
        d.curves[k].push_back({r.p, r.p_logic});
    }
    for (auto& c : d.curves) std::sort(c.begin(), c.end());
    return d;
}

namespace {

// Piecewise-linear interpolation; NaN outside the sample range.
double interp(const std::vector<std::pair<double, double>>& xy, double x) {
    if (xy.empty() || x < xy.front().first || x > xy.back().first)
        return std::numeric_limits<double>::quiet_NaN();
    auto it = std::lower_bound(xy.begin(), xy.end(), std::pair<double, double>(x, -1e300));
    if (it == xy.begin()) return it->second;
    auto lo = std::prev(it);
    if (it == xy.end()) return lo->second;
    double t = (x - lo->first) / (it->first - lo->first);
    return lo->second + t * (it->second - lo->second);
}

}  // namespace

double collapse_cost(double p_th, double nu, const CollapseData& data) {
    const size_t n_sizes = data.sizes.size();
    if (n_sizes < 2) throw std::invalid_argument("collapse needs at least two sizes");
    if (nu <= 0) return std::numeric_limits<double>::infinity();

    // y-curves in the scaled variable, shifted by the interpolated value at
    // the candidate threshold.
    std::vector<std::vector<std::pair<double, double>>> scaled(n_sizes);
    std::vector<double> xs;
    for (size_t k = 0; k < n_sizes; ++k) {
        double yc = interp(data.curves[k], p_th);
        if (std::isnan(yc)) return std::numeric_limits<double>::infinity();
        double scale = std::pow(static_cast<double>(data.sizes[k]), 1.0 / nu);
        for (auto [p, y] : data.curves[k]) {
            double x = (p - p_th) * scale;
            scaled[k].push_back({x, y - yc});
            xs.push_back(x);
        }
        std::sort(scaled[k].begin(), scaled[k].end());
    }
    std::sort(xs.begin(), xs.end());

    double r = 0;
    for (double x : xs) {
        double sum = 0, sum2 = 0;
        int cnt = 0;
        for (size_t k = 0; k < n_sizes; ++k) {
            double y = interp(scaled[k], x);
            if (std::isnan(y)) continue;  // outside this size's range: omit
            sum += y;
            sum2 += y * y;
            ++cnt;
        }
        if (cnt < 2) continue;
        r += sum2 - sum * sum / cnt;  // sum of squared deviations from the mean
    }
    return r;
}

namespace {

struct SimplexResult {
    double x = 0, y = 0, f = 0;
};

// Nelder-Mead on a 2d objective; good enough for the piecewise-smooth R.
template <typename F>
SimplexResult nelder_mead(F&& f, double x0, double y0, double dx, double dy, int iters) {
    struct P {
        double x, y, f;
    };
    std::array<P, 3> s{{{x0, y0, 0}, {x0 + dx, y0, 0}, {x0, y0 + dy, 0}}};
    for (auto& p : s) p.f = f(p.x, p.y);
    for (int it = 0; it < iters; ++it) {
        std::sort(s.begin(), s.end(), [](const P& a, const P& b) { return a.f < b.f; });
        double cx = (s[0].x + s[1].x) / 2, cy = (s[0].y + s[1].y) / 2;
        P refl{cx + (cx - s[2].x), cy + (cy - s[2].y), 0};
        refl.f = f(refl.x, refl.y);
        if (refl.f < s[0].f) {
            P exp_{cx + 2 * (cx - s[2].x), cy + 2 * (cy - s[2].y), 0};
            exp_.f = f(exp_.x, exp_.y);
            s[2] = exp_.f < refl.f ? exp_ : refl;
        } else if (refl.f < s[1].f) {
            s[2] = refl;
        } else {
            P con{cx + 0.5 * (s[2].x - cx), cy + 0.5 * (s[2].y - cy), 0};
            con.f = f(con.x, con.y);
            if (con.f < s[2].f) {
                s[2] = con;
            } else {
                for (int k = 1; k < 3; ++k) {
                    s[k].x = s[0].x + 0.5 * (s[k].x - s[0].x);
                    s[k].y = s[0].y + 0.5 * (s[k].y - s[0].y);
                    s[k].f = f(s[k].x, s[k].y);
                }
            }
        }
    }
    std::sort(s.begin(), s.end(), [](const P& a, const P& b) { return a.f < b.f; });
    return {s[0].x, s[0].y, s[0].f};
}

CollapseFit fit_threshold_impl(const CollapseData& data) {
    CollapseFit fit;
    if (data.sizes.size() < 2) {
        fit.message = "need at least two sizes";
        return fit;
    }
    // Bracketing check: some pair of size curves must cross inside the grid.
    bool crossing = false;
    for (size_t a = 0; a < data.sizes.size() && !crossing; ++a)
        for (size_t b = a + 1; b < data.sizes.size() && !crossing; ++b) {
            double lo = std::max(data.curves[a].front().first, data.curves[b].front().first);
            double hi = std::min(data.curves[a].back().first, data.curves[b].back().first);
            if (lo >= hi) continue;
            double d_lo = interp(data.curves[a], lo) - interp(data.curves[b], lo);
            double d_hi = interp(data.curves[a], hi) - interp(data.curves[b], hi);
            if (d_lo == 0 || d_hi == 0 || (d_lo < 0) != (d_hi < 0)) crossing = true;
        }
    if (!crossing) {
        fit.message = "curves do not cross: threshold not bracketed by the grid";
        return fit;
    }

    // Interpolation at the candidate threshold needs every curve to contain
    // it; search inside the intersection of the size ranges.
    double p_lo = -1e300, p_hi = 1e300;
    for (const auto& c : data.curves) {
        p_lo = std::max(p_lo, c.front().first);
        p_hi = std::min(p_hi, c.back().first);
    }
    if (p_lo >= p_hi) {
        fit.message = "size grids do not overlap";
        return fit;
    }
    const double nu_lo = 0.5, nu_hi = 2.0;
    // Normalized coordinates keep the simplex steps meaningful in both
    // directions; out-of-bounds evaluations get a continuous penalty.
    auto objective = [&](double u, double v) {
        double cu = std::clamp(u, 0.0, 1.0), cv = std::clamp(v, 0.0, 1.0);
        double penalty = 1e3 * ((u - cu) * (u - cu) + (v - cv) * (v - cv));
        double p_th = p_lo + cu * (p_hi - p_lo);
        double nu = nu_lo + cv * (nu_hi - nu_lo);
        double r = collapse_cost(p_th, nu, data);
        return r * (1.0 + penalty) + penalty * 1e-6;
    };
    // Coarse grid, then a local simplex refinement from the best cell.
    double best_u = 0.5, best_v = 0.33, best_f = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 40; ++i)
        for (int j = 0; j <= 15; ++j) {
            double u = i / 40.0, v = j / 15.0;
            double f = objective(u, v);
            if (f < best_f) {
                best_f = f;
                best_u = u;
                best_v = v;
            }
        }
    SimplexResult best{best_u, best_v, best_f};
    for (double step : {0.05, 0.01}) {
        SimplexResult r = nelder_mead(objective, best.x, best.y, step, step, 200);
        if (r.f < best.f) best = r;
    }
    if (!std::isfinite(best.f)) {
        fit.message = "minimization failed";
        return fit;
    }
    fit.ok = true;
    fit.p_th = p_lo + std::clamp(best.x, 0.0, 1.0) * (p_hi - p_lo);
    fit.nu = nu_lo + std::clamp(best.y, 0.0, 1.0) * (nu_hi - nu_lo);
    fit.r_min = collapse_cost(fit.p_th, fit.nu, data);
    double acc = 0;
    int cnt = 0;
    for (const auto& c : data.curves) {
        double y = interp(c, fit.p_th);
        if (!std::isnan(y)) {
            acc += y;
            ++cnt;
        }
    }
    fit.p_logic_c = cnt ? acc / cnt : 0;
    return fit;
}

}  // namespace

CollapseFit fit_threshold(const CollapseData& data) {
    CollapseFit fit = fit_threshold_impl(data);
    if (!fit.ok) return fit;
    // Pairwise-subset spread as the uncertainty proxy.
    if (data.sizes.size() >= 3) {
        std::vector<double> pths, nus;
        for (size_t a = 0; a < data.sizes.size(); ++a)
            for (size_t b = a + 1; b < data.sizes.size(); ++b) {
                CollapseData pair;
                pair.sizes = {data.sizes[a], data.sizes[b]};
                pair.curves = {data.curves[a], data.curves[b]};
                CollapseFit pf = fit_threshold_impl(pair);
                if (pf.ok) {
                    pths.push_back(pf.p_th);
                    nus.push_back(pf.nu);
                }
            }
        if (pths.size() >= 2) {
            auto spread = [](std::vector<double>& v) {
                auto [mn, mx] = std::minmax_element(v.begin(), v.end());
                return (*mx - *mn) / 2.0;
            };
            fit.sigma_pth = spread(pths);
            fit.sigma_nu = spread(nus);
        }
    }
    return fit;
}

QuadraticBoundary fit_phase_boundary(const std::vector<std::pair<double, double>>& points,
                                     double x_zero) {
    if (points.size() < 2) throw std::invalid_argument("phase boundary fit needs at least two points");
    // Model p(x) = a (x - x0) + b (x - x0)^2, exactly zero at x0.
    double s_uu = 0, s_uv = 0, s_vv = 0, s_uy = 0, s_vy = 0;
    for (auto [x, y] : points) {
        double u = x - x_zero, v = u * u;
        s_uu += u * u;
        s_uv += u * v;
        s_vv += v * v;
        s_uy += u * y;
        s_vy += v * y;
    }
    double det = s_uu * s_vv - s_uv * s_uv;
    if (std::abs(det) < 1e-30) throw std::invalid_argument("degenerate phase-boundary system");
    double a = (s_uy * s_vv - s_vy * s_uv) / det;
    double b = (s_vy * s_uu - s_uy * s_uv) / det;

    QuadraticBoundary q;
    q.x_zero = x_zero;
    q.c2 = b;
    q.c1 = a - 2 * b * x_zero;
    q.c0 = b * x_zero * x_zero - a * x_zero;
    q.beta = q.c0;
    q.alpha = q.c1;
    for (auto [x, y] : points) q.max_residual = std::max(q.max_residual, std::abs(q.at(x) - y));
    return q;
}

OptimalL optimal_l(double eta, double p, double alpha, double beta) {
    if (eta <= 0 || p <= 0) throw std::invalid_argument("eta and p must be positive");
    if (alpha >= 0 || beta <= 0) throw std::invalid_argument("expected alpha < 0 < beta from the boundary fit");
    OptimalL out;
    if (p >= beta) return out;  // above the zero-loss threshold: uncorrectable
    // g(x) = ln p - ln(x + beta) - 2x/(x + beta) on x in (-beta, 0); the root
    // does not involve eta.
    auto g = [&](double x) { return std::log(p) - std::log(x + beta) - 2 * x / (x + beta); };
    double lo = -beta * (1.0 - 1e-14), hi = 0.0;
    if (g(hi) >= 0) return out;  // no interior root
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (g(mid) > 0 ? lo : hi) = mid;
    }
    out.correctable = true;
    out.x0 = 0.5 * (lo + hi);
    out.l_opt = std::sqrt(out.x0 / (eta * alpha));
    out.p_opt = std::pow(p / (out.x0 + beta), out.l_opt / 2.0);
    return out;
}

double ansatz_logical_rate(double eta, int l, double p, double alpha, double beta) {
    double pth = alpha * eta * static_cast<double>(l) * l + beta;
    if (pth <= p) return 1.0;  // outside the correctable region
    return std::pow(p / pth, l / 2.0);
}

std::vector<AnsatzRow> ansatz_curves(const std::vector<double>& eta_grid, const std::vector<int>& sizes,
                                     double p, double alpha, double beta) {
    std::vector<AnsatzRow> rows;
    for (int l : sizes)
        for (double eta : eta_grid) rows.push_back({eta, l, ansatz_logical_rate(eta, l, p, alpha, beta)});
    return rows;
}

}  // namespace forge
