#include "hmlab/structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "hmlab/errors.hpp"
#include "hmlab/functionals.hpp"
#include "hmlab/metric.hpp"
#include "hmlab/stats.hpp"

namespace hmlab {

namespace {

double ball_mass(const BoundarySet& gamma, const std::vector<double>& omega, const Point& q, double r) {
    double s = 0;
    for (auto i : gamma.samples_in_ball(q, r)) s += omega[i];
    return s;
}

AxisBox ball_box(const Point& q, double r, int n) {
    AxisBox b{q, q};
    for (int i = 0; i < n; ++i) {
        b.lo[i] -= r;
        b.hi[i] += r;
    }
    return b;
}

double value_at(const Grid& grid, const std::vector<double>& g, const Point& x) {
    long idx = grid.locate(x);
    if (idx < 0) throw ArgumentError("point outside the grid box");
    return g[std::size_t(idx)];
}

}  // namespace

std::vector<Point> default_ball_centers(const Scenario& scenario, std::size_t count) {
    const Grid& grid = scenario.grid();
    double lo = grid.box().lo[0] + 0.25 * grid.box().side(0);
    double hi = grid.box().hi[0] - 0.25 * grid.box().side(0);
    std::vector<std::size_t> pool;
    for (auto s : scenario.active_samples()) {
        const Point& p = scenario.gamma().samples()[s];
        if (p[0] >= lo && p[0] <= hi) pool.push_back(s);
    }
    std::vector<Point> out;
    if (pool.empty()) return out;
    count = std::min(count, pool.size());
    for (std::size_t k = 0; k < count; ++k) {
        std::size_t pick = count == 1 ? pool.size() / 2 : k * (pool.size() - 1) / (count - 1);
        out.push_back(scenario.gamma().samples()[pool[pick]]);
    }
    return out;
}

StructureReport structure_checks(const Scenario& scenario, const StructureOptions& options) {
    const BoundarySet& gamma = scenario.gamma();
    const Grid& grid = scenario.grid();
    const int n = gamma.ambient_dim(), d = gamma.boundary_dim();
    const double vol = grid.cell_volume();
    auto centers = options.centers.empty() ? default_ball_centers(scenario, options.default_centers) : options.centers;
    if (centers.empty()) throw ScenarioError("no boundary samples available for structure checks");

    StructureReport rep;
    rep.h = grid.h();
    GreenField g0 = scenario.green(options.far_pole);
    auto omega0 = scenario.omega(g0);
    FieldView field(grid, g0.g);

    for (const Point& q : centers) {
        for (double r : options.radii) {
            BallMeasurement b;
            b.q = q;
            b.r = r;
            b.corkscrew = corkscrew_point(gamma, q, r);
            b.omega_far = ball_mass(gamma, omega0, q, r);
            b.omega_far_half = ball_mass(gamma, omega0, q, r / 2);
            double far = dist(options.far_pole, q);
            if (far >= 4 * r && b.omega_far > 0) b.doubling = ball_mass(gamma, omega0, q, 2 * r) / b.omega_far;

            GreenField ga = scenario.green(b.corkscrew);
            auto omega_a = scenario.omega(ga);
            double g_x0_a = value_at(grid, g0.g, b.corkscrew);
            double g_a_x0 = value_at(grid, ga.g, options.far_pole);
            if (g_x0_a > 0) b.green_asymmetry = std::fabs(g_x0_a - g_a_x0) / g_x0_a;
            if (far >= 2 * r && b.omega_far > 0) b.cfms = std::pow(r, d - 1) * g_x0_a / b.omega_far;
            b.nondegeneracy = ball_mass(gamma, omega_a, q, r);
            double wa_half = ball_mass(gamma, omega_a, q, r / 2);
            if (far >= 2 * r && b.omega_far > 0 && wa_half > 0)
                b.change_of_pole = (b.omega_far_half / b.omega_far) / wa_half;

            // Boundary Caccioppoli and Moser for G(., X0), which vanishes on Gamma near q.
            if (far > 3 * r) {
                double grad_b = 0, sq_2b = 0, pw_2b = 0, m_2b = 0, sup_b = 0;
                field.for_cells_in_box(ball_box(q, 2 * r, n), [&](std::size_t idx, const Point& x) {
                    double rr = dist(x, q);
                    if (!(rr < 2 * r)) return;
                    double u = field.value(idx), w = field.weight(idx) * vol;
                    sq_2b += u * u * w;
                    pw_2b += std::pow(std::fabs(u), options.moser_p) * w;
                    m_2b += w;
                    if (rr < r) {
                        grad_b += field.grad2(idx) * w;
                        sup_b = std::max(sup_b, u);
                    }
                });
                if (sq_2b > 0) b.caccioppoli = grad_b / (sq_2b / (r * r));
                if (pw_2b > 0) b.moser = sup_b / std::pow(pw_2b / m_2b, 1.0 / options.moser_p);
            }
            rep.balls.push_back(b);
        }
    }

    rep.cfms_min = rep.change_of_pole_min = rep.nondegeneracy = std::numeric_limits<double>::infinity();
    for (const auto& b : rep.balls) {
        rep.doubling = std::max(rep.doubling, b.doubling);
        if (b.cfms > 0) {
            rep.cfms_min = std::min(rep.cfms_min, b.cfms);
            rep.cfms_max = std::max(rep.cfms_max, b.cfms);
        }
        if (b.change_of_pole > 0) {
            rep.change_of_pole_min = std::min(rep.change_of_pole_min, b.change_of_pole);
            rep.change_of_pole_max = std::max(rep.change_of_pole_max, b.change_of_pole);
        }
        rep.nondegeneracy = std::min(rep.nondegeneracy, b.nondegeneracy);
        rep.caccioppoli = std::max(rep.caccioppoli, b.caccioppoli);
        rep.moser = std::max(rep.moser, b.moser);
        rep.green_asymmetry = std::max(rep.green_asymmetry, b.green_asymmetry);
    }
    if (std::isinf(rep.cfms_min)) rep.cfms_min = 0;
    if (std::isinf(rep.change_of_pole_min)) rep.change_of_pole_min = 0;
    rep.cfms_spread = rep.cfms_min > 0 ? rep.cfms_max / rep.cfms_min : 0;
    rep.change_of_pole_spread = rep.change_of_pole_min > 0 ? rep.change_of_pole_max / rep.change_of_pole_min : 0;

    // Boundary Hoelder decay of G(., X0): oscillation over B(q, s) against s,
    // with G = 0 on the absorbing cells. The smallest fitted exponent is kept.
    const double r0 = *std::max_element(options.radii.begin(), options.radii.end());
    rep.holder_beta = std::numeric_limits<double>::infinity();
    for (const Point& q : centers) {
        if (dist(options.far_pole, q) <= 3 * r0) continue;
        std::vector<double> ss, osc;
        for (double s = r0 / 2; s >= 4 * grid.h(); s /= 2) {
            double hi = 0;
            field.for_cells_in_box(ball_box(q, s, n), [&](std::size_t idx, const Point& x) {
                if (dist(x, q) < s) hi = std::max(hi, field.value(idx));
            });
            ss.push_back(s);
            osc.push_back(hi);
        }
        if (ss.size() >= 2) rep.holder_beta = std::min(rep.holder_beta, fit_loglog(ss, osc).slope);
    }
    if (std::isinf(rep.holder_beta)) rep.holder_beta = 0;

    // Interior Harnack on random balls B with 3B inside the domain and away from the pole.
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    int accepted = 0;
    for (int tries = 0; tries < 100000 && accepted < options.harnack_balls; ++tries) {
        Point x{0, 0, 0};
        for (int i = 0; i < n; ++i) x[i] = grid.box().lo[i] + grid.box().side(i) * unif(rng);
        double rho = gamma.distance(x) / 4;
        if (rho < 2 * grid.h()) continue;
        AxisBox b3 = ball_box(x, 3 * rho, n);
        bool inside = true;
        for (int i = 0; i < n; ++i) inside &= b3.lo[i] >= grid.box().lo[i] && b3.hi[i] <= grid.box().hi[i];
        if (!inside || dist(x, options.far_pole) < 3 * rho + 2 * grid.h()) continue;
        double hi = 0, lo = std::numeric_limits<double>::infinity();
        field.for_cells_in_box(ball_box(x, rho, n), [&](std::size_t idx, const Point& c) {
            if (!(dist(c, x) < rho)) return;
            hi = std::max(hi, field.value(idx));
            lo = std::min(lo, field.value(idx));
        });
        if (!(lo > 0) || std::isinf(lo)) continue;
        rep.harnack = std::max(rep.harnack, hi / lo);
        ++accepted;
    }
    return rep;
}

}  // namespace hmlab
