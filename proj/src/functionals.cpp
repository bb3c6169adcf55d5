#include "hmlab/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>

#include "hmlab/errors.hpp"
#include "hmlab/parallel.hpp"

namespace hmlab {

namespace {

AxisBox ball_box(const Point& q, double r, int n) {
    AxisBox b{q, q};
    for (int i = 0; i < n; ++i) {
        b.lo[i] -= r;
        b.hi[i] += r;
    }
    return b;
}

double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

// Samples of a flat line are sorted along x, so a ball centred on the line
// meets a contiguous run [lo, hi) with the same strict test as samples_in_ball.
struct LineRuns {
    explicit LineRuns(const BoundarySet& gamma)
        : gamma(gamma), active(gamma.kind() == GammaKind::Flat && gamma.boundary_dim() == 1) {}

    bool usable(const Point& q) const { return active && q[1] == 0 && q[2] == 0; }

    std::pair<std::size_t, std::size_t> run(const Point& q, double r) const {
        const auto& s = gamma.samples();
        auto first = std::partition_point(s.begin(), s.end(), [&](const Point& p) {
            return p[0] < q[0] && !(std::fabs(p[0] - q[0]) < r);
        });
        auto last = std::partition_point(first, s.end(), [&](const Point& p) {
            return p[0] < q[0] || std::fabs(p[0] - q[0]) < r;
        });
        return {std::size_t(first - s.begin()), std::size_t(last - s.begin())};
    }

    const BoundarySet& gamma;
    bool active;
};

// Prefix sums of sigma-weighted powers of f for O(1) ball averages on a line.
struct PrefixMoments {
    PrefixMoments(const BoundarySet& gamma, const std::vector<double>& f, double p) {
        const auto& w = gamma.sigma_weights();
        m0.assign(f.size() + 1, 0.0L);
        m1 = m0;
        m2 = m0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            long double v = p == 1 ? std::fabs(f[i]) : std::pow(std::fabs(f[i]), p);
            m0[i + 1] = m0[i] + w[i];
            m1[i + 1] = m1[i] + w[i] * (long double)f[i];
            m2[i + 1] = m2[i] + w[i] * (long double)f[i] * f[i];
            mp.push_back(i == 0 ? w[i] * v : mp.back() + w[i] * v);
        }
        mp.insert(mp.begin(), 0.0L);
    }
    std::vector<long double> m0, m1, m2, mp;
};

// Range chmax with point queries.
class MaxTree {
public:
    explicit MaxTree(std::size_t n) : n_(n), t_(2 * n, 0.0) {}
    void update(std::size_t lo, std::size_t hi, double v) {
        for (lo += n_, hi += n_; lo < hi; lo >>= 1, hi >>= 1) {
            if (lo & 1) t_[lo] = std::max(t_[lo], v), ++lo;
            if (hi & 1) --hi, t_[hi] = std::max(t_[hi], v);
        }
    }
    double query(std::size_t i) const {
        double v = 0;
        for (i += n_; i > 0; i >>= 1) v = std::max(v, t_[i]);
        return v;
    }

private:
    std::size_t n_;
    std::vector<double> t_;
};

}  // namespace

Point grid_gradient(const Grid& grid, const std::vector<double>& u, std::size_t idx) {
    Point g{0, 0, 0};
    auto c = grid.coords(idx);
    const auto& dims = grid.dims();
    for (int ax = 0; ax < grid.dim(); ++ax) {
        auto up = c, down = c;
        ++up[ax];
        --down[ax];
        bool has_up = up[ax] < dims[ax] && !grid.absorbing(grid.index(up[0], up[1], up[2]));
        bool has_down = down[ax] >= 0 && !grid.absorbing(grid.index(down[0], down[1], down[2]));
        double v = u[idx];
        if (has_up && has_down)
            g[ax] = (u[grid.index(up[0], up[1], up[2])] - u[grid.index(down[0], down[1], down[2])]) / (2 * grid.h());
        else if (has_up)
            g[ax] = (u[grid.index(up[0], up[1], up[2])] - v) / grid.h();
        else if (has_down)
            g[ax] = (v - u[grid.index(down[0], down[1], down[2])]) / grid.h();
    }
    return g;
}

FieldView::FieldView(const Grid& grid, const std::vector<double>& u) : grid_(&grid), u_(&u) {
    if (u.size() != grid.size()) throw ArgumentError("field size does not match the grid");
    grad2_.assign(grid.size(), 0.0);
    weight_.assign(grid.size(), 0.0);
    counted_.assign(grid.size(), 0);
    const double expo = grid.boundary().weight_exponent();
    parallel_chunks(grid.size(), 4096, [&](std::size_t s, std::size_t e) {
        for (std::size_t idx = s; idx < e; ++idx) {
            if (grid.absorbing(idx) || grid.delta(idx) < grid.h()) continue;
            counted_[idx] = 1;
            Point g = grid_gradient(grid, u, idx);
            grad2_[idx] = dot(g, g);
            weight_[idx] = std::pow(grid.delta(idx), expo);
        }
    });
}

bool cone_contains(const ConeSpec& cone, const Point& x, double delta) {
    double r = dist(x, cone.q);
    if (cone.truncation > 0 && !(r < cone.truncation)) return false;
    return r < (1 + cone.aperture) * delta;
}

std::vector<double> square_functions(const FieldView& field, const Point& q, const std::vector<double>& apertures,
                                     double truncation) {
    const Grid& g = field.grid();
    const int d = g.boundary().boundary_dim();
    const double vol = g.cell_volume();
    AxisBox box = truncation > 0 ? ball_box(q, truncation, g.dim()) : g.box();
    std::vector<double> sums(apertures.size(), 0.0);
    field.for_cells_in_box(box, [&](std::size_t idx, const Point& x) {
        double r = dist(x, q);
        if (truncation > 0 && !(r < truncation)) return;
        double delta = g.delta(idx);
        double term = field.grad2(idx) * std::pow(delta, 1 - d) * field.weight(idx) * vol;
        for (std::size_t a = 0; a < apertures.size(); ++a)
            if (r < (1 + apertures[a]) * delta) sums[a] += term;
    });
    for (auto& s : sums) s = std::sqrt(s);
    return sums;
}

double square_function(const FieldView& field, const ConeSpec& cone) {
    return square_functions(field, cone.q, {cone.aperture}, cone.truncation)[0];
}

double nontangential_max(const FieldView& field, const ConeSpec& cone) {
    const Grid& g = field.grid();
    AxisBox box = cone.truncation > 0 ? ball_box(cone.q, cone.truncation, g.dim()) : g.box();
    double best = 0;
    field.for_cells_in_box(box, [&](std::size_t idx, const Point& x) {
        if (cone_contains(cone, x, g.delta(idx))) best = std::max(best, std::fabs(field.value(idx)));
    });
    return best;
}

Census make_census(const BoundarySet& gamma, const AxisBox& region, int k_lo, int k_hi, std::size_t stride) {
    if (k_lo > k_hi) throw ArgumentError("census radius range is empty");
    Census c;
    std::size_t seen = 0;
    for (std::size_t s = 0; s < gamma.size(); ++s) {
        if (!region.contains(gamma.samples()[s], gamma.ambient_dim())) continue;
        if (seen++ % std::max<std::size_t>(stride, 1) == 0) c.centers.push_back(s);
    }
    for (int k = k_lo; k <= k_hi; ++k) c.radii.push_back(std::ldexp(1.0, -k));
    return c;
}

double bmo_norm(const BoundarySet& gamma, const std::vector<double>& f, const Census& census) {
    const auto& w = gamma.sigma_weights();
    LineRuns runs(gamma);
    std::unique_ptr<PrefixMoments> pm;
    if (runs.active) pm = std::make_unique<PrefixMoments>(gamma, f, 1.0);
    std::vector<double> best(census.centers.size(), 0.0);
    parallel_for(census.centers.size(), [&](std::size_t i) {
        const Point& y = gamma.samples()[census.centers[i]];
        for (double r : census.radii) {
            if (pm && runs.usable(y)) {
                auto [lo, hi] = runs.run(y, r);
                long double mass = pm->m0[hi] - pm->m0[lo];
                if (!(mass > 0)) continue;
                long double mean = (pm->m1[hi] - pm->m1[lo]) / mass;
                long double var = (pm->m2[hi] - pm->m2[lo]) / mass - mean * mean;
                best[i] = std::max(best[i], double(std::sqrt(std::max(var, 0.0L))));
                continue;
            }
            auto ids = gamma.samples_in_ball(y, r);
            double mass = 0, mean = 0;
            for (auto s : ids) {
                mass += w[s];
                mean += w[s] * f[s];
            }
            if (!(mass > 0)) continue;
            mean /= mass;
            double var = 0;
            for (auto s : ids) var += w[s] * (f[s] - mean) * (f[s] - mean);
            best[i] = std::max(best[i], std::sqrt(var / mass));
        }
    });
    return max_of(best);
}

double maximal_function(const BoundarySet& gamma, const std::vector<double>& f, const Point& q, const Census& census,
                        double p) {
    const auto& w = gamma.sigma_weights();
    double best = 0;
    for (std::size_t c : census.centers) {
        const Point& y = gamma.samples()[c];
        for (double r : census.radii) {
            if (!(dist(q, y) < r)) continue;
            double mass = 0, acc = 0;
            for (auto s : gamma.samples_in_ball(y, r)) {
                mass += w[s];
                acc += w[s] * std::pow(std::fabs(f[s]), p);
            }
            if (mass > 0) best = std::max(best, acc / mass);
        }
    }
    return std::pow(best, 1.0 / p);
}

std::vector<double> maximal_function_samples(const BoundarySet& gamma, const std::vector<double>& f,
                                             const Census& census, double p) {
    const auto& w = gamma.sigma_weights();
    const std::size_t nr = census.radii.size();
    LineRuns runs(gamma);
    std::vector<double> out(gamma.size(), 0.0);
    if (runs.active) {
        PrefixMoments pm(gamma, f, p);
        std::vector<std::pair<std::size_t, std::size_t>> span(census.size());
        std::vector<double> avg(census.size(), 0.0);
        parallel_for(census.size(), [&](std::size_t b) {
            span[b] = runs.run(gamma.samples()[census.centers[b / nr]], census.radii[b % nr]);
            long double mass = pm.m0[span[b].second] - pm.m0[span[b].first];
            avg[b] = mass > 0 ? double((pm.mp[span[b].second] - pm.mp[span[b].first]) / mass) : 0.0;
        });
        MaxTree tree(gamma.size());
        for (std::size_t b = 0; b < census.size(); ++b) tree.update(span[b].first, span[b].second, avg[b]);
        for (std::size_t s = 0; s < gamma.size(); ++s) out[s] = std::pow(tree.query(s), 1.0 / p);
        return out;
    }
    std::vector<std::vector<std::size_t>> members(census.size());
    std::vector<double> avg(census.size(), 0.0);
    parallel_for(census.size(), [&](std::size_t b) {
        const Point& y = gamma.samples()[census.centers[b / nr]];
        members[b] = gamma.samples_in_ball(y, census.radii[b % nr]);
        double mass = 0, acc = 0;
        for (auto s : members[b]) {
            mass += w[s];
            acc += w[s] * std::pow(std::fabs(f[s]), p);
        }
        avg[b] = mass > 0 ? acc / mass : 0.0;
    });
    for (std::size_t b = 0; b < census.size(); ++b)
        for (auto s : members[b]) out[s] = std::max(out[s], avg[b]);
    for (auto& v : out) v = std::pow(v, 1.0 / p);
    return out;
}

double carleson_integral(const FieldView& field, const Point& q, double r) {
    const Grid& g = field.grid();
    const BoundarySet& gamma = g.boundary();
    const double expo = gamma.boundary_dim() - gamma.ambient_dim() + 2;
    double sum = 0;
    field.for_cells_in_box(ball_box(q, r, g.dim()), [&](std::size_t idx, const Point& x) {
        if (dist(x, q) < r) sum += field.grad2(idx) * std::pow(g.delta(idx), expo);
    });
    return sum * g.cell_volume();
}

double carleson_norm(const FieldView& field, const Census& census) {
    const Grid& g = field.grid();
    const BoundarySet& gamma = g.boundary();
    std::vector<double> best(census.centers.size(), 0.0);
    parallel_for(census.centers.size(), [&](std::size_t i) {
        const Point& y = gamma.samples()[census.centers[i]];
        for (double r : census.radii) {
            AxisBox b = ball_box(y, r, g.dim());
            bool inside = true;
            for (int ax = 0; ax < g.dim(); ++ax) inside &= b.lo[ax] >= g.box().lo[ax] && b.hi[ax] <= g.box().hi[ax];
            if (!inside) continue;
            double sigma = gamma.sigma_ball(y, r);
            if (sigma > 0) best[i] = std::max(best[i], carleson_integral(field, y, r) / sigma);
        }
    });
    return max_of(best);
}

CarlesonBall carleson_square_bracket(const FieldView& field, const Point& q, double r, double alpha) {
    const Grid& g = field.grid();
    const BoundarySet& gamma = g.boundary();
    const int d = gamma.boundary_dim();
    const double vol = g.cell_volume();
    CarlesonBall out;
    out.q = q;
    out.r = r;
    out.sigma = gamma.sigma_ball(q, r);
    out.carleson = carleson_integral(field, q, r);
    field.for_cells_in_box(ball_box(q, r, g.dim()), [&](std::size_t idx, const Point& x) {
        if (!(dist(x, q) < r)) return;
        double delta = g.delta(idx);
        double sx = gamma.sigma_ball(x, (1 + alpha) * delta);
        out.middle += field.grad2(idx) * std::pow(delta, 1 - d) * field.weight(idx) * vol * sx;
    });
    const auto& w = gamma.sigma_weights();
    for (auto s : gamma.samples_in_ball(q, r / 2)) {
        double sq = square_functions(field, gamma.samples()[s], {alpha}, r / 2)[0];
        out.lower += w[s] * sq * sq;
    }
    for (auto s : gamma.samples_in_ball(q, (alpha + 2) * r)) {
        double sq = square_functions(field, gamma.samples()[s], {alpha}, (alpha + 1) * r)[0];
        out.upper += w[s] * sq * sq;
    }
    return out;
}

BoundaryFunction log_maximal_data(const BoundarySet& gamma, const std::vector<char>& in_set, double gl_delta,
                                  const Census& census) {
    if (!(gl_delta > 0 && gl_delta < 1)) throw ArgumentError("gl_delta must lie in (0, 1)");
    std::vector<double> chi(gamma.size(), 0.0);
    double mass = 0;
    for (std::size_t s = 0; s < gamma.size(); ++s)
        if (in_set[s]) {
            chi[s] = 1;
            mass += gamma.sigma_weights()[s];
        }
    if (!(mass > 0)) throw ArgumentError("sigma(E) = 0: degenerate input set");
    auto m = maximal_function_samples(gamma, chi, census);
    BoundaryFunction f;
    f.descriptor = "log-maximal gl_delta=" + std::to_string(gl_delta);
    f.values.resize(gamma.size());
    for (std::size_t s = 0; s < gamma.size(); ++s)
        f.values[s] = m[s] > 0 ? std::max(0.0, 1 + gl_delta * std::log(m[s])) : 0.0;
    return f;
}

BoundaryFunction mollify(const BoundarySet& gamma, const BoundaryFunction& f, double eps) {
    if (!(eps > 0)) throw ArgumentError("mollifier width must be positive");
    BoundaryFunction out;
    out.descriptor = f.descriptor + " mollified eps=" + std::to_string(eps);
    out.values.assign(gamma.size(), 0.0);
    const auto& w = gamma.sigma_weights();
    parallel_chunks(gamma.size(), 64, [&](std::size_t b, std::size_t e) {
        for (std::size_t s = b; s < e; ++s) {
            const Point& x = gamma.samples()[s];
            double num = 0, den = 0;
            for (auto y : gamma.samples_in_ball(x, eps)) {
                double t = dist(x, gamma.samples()[y]) / eps;
                double k = std::exp(-1.0 / (1.0 - t * t));
                num += k * w[y] * f.values[y];
                den += k * w[y];
            }
            out.values[s] = den > 0 ? num / den : f.values[s];
        }
    });
    return out;
}

StripeResult poincare_stripe(const FieldView& field, const Point& q, double r, int j, double alpha, int m1, int m2,
                             double alpha_bar) {
    const Grid& g = field.grid();
    double outer = std::ldexp(r, -j), inner = outer / 2;
    if (outer < 4 * g.h()) throw ResolutionError("stripe below grid resolution");
    double big_outer = std::ldexp(r, m1 - j), big_inner = std::ldexp(r, -(j + m2) - 1);
    const double vol = g.cell_volume();
    StripeResult out;
    field.for_cells_in_box(ball_box(q, std::max(outer, big_outer), g.dim()), [&](std::size_t idx, const Point& x) {
        double rr = dist(x, q);
        double delta = g.delta(idx);
        if (rr >= inner && rr < outer && rr < (1 + alpha) * delta)
            out.lhs += field.value(idx) * field.value(idx) * field.weight(idx) * vol;
        if (rr >= big_inner && rr < big_outer && rr < (1 + alpha_bar) * delta)
            out.rhs += field.grad2(idx) * field.weight(idx) * vol;
    });
    out.rhs *= outer * outer;
    out.ratio = out.rhs > 0 ? out.lhs / out.rhs : 0.0;
    return out;
}

}  // namespace hmlab
