#include "hmlab/metric.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hmlab/errors.hpp"

namespace hmlab {

namespace {

std::vector<Point> candidate_directions(int n) {
    std::vector<Point> dirs;
    auto push = [&](Point p) {
        double l = norm(p);
        if (l == 0) return;
        p = (1.0 / l) * p;
        for (const auto& q : dirs)
            if (dist(p, q) < 1e-12) return;
        dirs.push_back(p);
    };
    if (n == 2) {
        push({0, 1, 0});
        push({0, -1, 0});
        push({1, 0, 0});
        push({-1, 0, 0});
        for (int k = 0; k < 64; ++k) {
            double a = 2 * std::numbers::pi * k / 64.0;
            push({std::cos(a), std::sin(a), 0});
        }
        return dirs;
    }
    push({0, 1, 0});
    push({0, 0, 1});
    push({0, -1, 0});
    push({0, 0, -1});
    push({1, 0, 0});
    push({-1, 0, 0});
    for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j)
            for (int k = -1; k <= 1; ++k) push({double(i), double(j), double(k)});
    const int m = 200;
    const double golden = std::numbers::pi * (3 - std::sqrt(5.0));
    for (int k = 0; k < m; ++k) {
        double z = 1 - 2 * (k + 0.5) / m;
        double rho = std::sqrt(1 - z * z);
        double a = golden * k;
        push({rho * std::cos(a), rho * std::sin(a), z});
    }
    return dirs;
}

}  // namespace

Point corkscrew_point(const BoundarySet& gamma, const Point& q, double r) {
    if (!(r > 0)) throw ArgumentError("corkscrew radius must be positive");
    if (!gamma.on_boundary(q)) throw ArgumentError("corkscrew centre must lie on the boundary");
    static const std::vector<Point> dirs2 = candidate_directions(2);
    static const std::vector<Point> dirs3 = candidate_directions(3);
    const auto& dirs = gamma.ambient_dim() == 2 ? dirs2 : dirs3;
    std::vector<Point> cands;
    std::vector<double> deltas;
    for (double f : {1.0, 0.75, 0.5})
        for (const auto& u : dirs) {
            Point x = q + (0.5 * f * r) * u;
            cands.push_back(x);
            deltas.push_back(gamma.distance(x));
        }
    double best = *std::max_element(deltas.begin(), deltas.end());
    for (std::size_t i = 0; i < cands.size(); ++i)
        if (deltas[i] >= best * (1 - 1e-12)) return cands[i];
    return cands.front();
}

bool segment_clearance_at_least(const BoundarySet& gamma, const Point& a, const Point& b, double tau) {
    struct Piece {
        Point a, b;
        double da, db;
    };
    std::vector<Piece> stack{{a, b, gamma.distance(a), gamma.distance(b)}};
    double min_len = tau / 64;
    while (!stack.empty()) {
        Piece p = stack.back();
        stack.pop_back();
        if (p.da < tau || p.db < tau) return false;
        double len = dist(p.a, p.b);
        // delta is 1-Lipschitz: on the piece it stays above (da + db - len) / 2.
        if (0.5 * (p.da + p.db - len) >= tau) continue;
        if (len < min_len) return false;
        Point m = 0.5 * (p.a + p.b);
        double dm = gamma.distance(m);
        stack.push_back({p.a, m, p.da, dm});
        stack.push_back({m, p.b, dm, p.db});
    }
    return true;
}

Ball HarnackChain::ball(std::size_t j) const {
    if (degenerate) return {x1, 0.5 * s};
    if (j == 0) return {x1, 0.5 * s};
    if (j == interior + 1) return {x2, 0.5 * s};
    double len = dist(y1, y2);
    double t = interior > 1 ? double(j - 1) / double(interior - 1) : 0.0;
    Point c = len > 0 ? y1 + t * (y2 - y1) : y1;
    return {c, 0.25 * tau};
}

std::vector<Ball> HarnackChain::balls(std::size_t limit) const {
    if (size() > limit) throw ArgumentError("Harnack chain too long to enumerate");
    std::vector<Ball> out;
    out.reserve(size());
    for (std::size_t j = 0; j < size(); ++j) out.push_back(ball(j));
    return out;
}

bool HarnackChain::meets_box(const AxisBox& box, int n) const {
    if (point_box_distance(x1, box, n) < 0.5 * s) return true;
    if (degenerate) return false;
    if (point_box_distance(x2, box, n) < 0.5 * s) return true;
    if (interior == 0) return false;
    double rho = 0.25 * tau;
    if (interior == 1) return point_box_distance(y1, box, n) < rho;
    // Distance to the box is convex along the segment, so the closest centre
    // sits next to the continuous minimizer.
    auto f = [&](double t) { return point_box_distance(y1 + t * (y2 - y1), box, n); };
    double lo = 0, hi = 1;
    for (int it = 0; it < 100; ++it) {
        double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
        if (f(m1) <= f(m2))
            hi = m2;
        else
            lo = m1;
    }
    double tstar = 0.5 * (lo + hi) * double(interior - 1);
    std::size_t j0 = std::size_t(std::floor(tstar));
    for (std::size_t j : {j0, j0 + 1}) {
        if (j >= interior) continue;
        if (point_box_distance(ball(j + 1).center, box, n) < rho) return true;
    }
    return false;
}

double HarnackChain::count_bound(int n, int d) const {
    return (6.0 / c) * std::pow(lambda, double(n - 1) / double(n - 1 - d)) + 2;
}

HarnackChain harnack_chain(const BoundarySet& gamma, const Point& x1, const Point& x2, double s, double lambda,
                           const HarnackOptions& options) {
    const int n = gamma.ambient_dim(), d = gamma.boundary_dim();
    if (!(s > 0)) throw ArgumentError("Harnack chain scale must be positive");
    if (!(lambda >= 1)) throw ArgumentError("Harnack chain needs Lambda >= 1");
    double slack = 1e-12 * std::max(1.0, s);
    if (gamma.distance(x1) < s - slack || gamma.distance(x2) < s - slack)
        throw ArgumentError("Harnack chain endpoints must satisfy delta(X_i) >= s");
    if (dist(x1, x2) > lambda * s * (1 + 1e-12)) throw ArgumentError("Harnack chain endpoints farther than Lambda * s");

    HarnackChain chain;
    chain.x1 = x1;
    chain.x2 = x2;
    chain.s = s;
    chain.lambda = lambda;
    chain.c = options.c;
    chain.tau = options.c * std::pow(lambda, -double(d) / double(n - 1 - d)) * s;
    if (dist(x1, x2) == 0) {
        chain.degenerate = true;
        chain.y1 = chain.y2 = x1;
        return chain;
    }

    auto finish = [&](const Point& y1, const Point& y2) {
        chain.y1 = y1;
        chain.y2 = y2;
        double len = dist(y1, y2);
        std::size_t gaps = std::max<std::size_t>(1, std::size_t(std::ceil(len / (chain.tau / 3) - 1e-12)));
        chain.interior = gaps + 1;
        chain.step = len / double(gaps);
        return chain;
    };

    if (segment_clearance_at_least(gamma, x1, x2, chain.tau)) return finish(x1, x2);

    // Perturb both endpoints over a small lattice in B(X_i, s/2) and keep the
    // deepest candidates.
    auto candidates = [&](const Point& x) {
        std::vector<std::pair<double, Point>> pts{{gamma.distance(x), x}};
        std::vector<Point> dirs;
        for (int i = -1; i <= 1; ++i)
            for (int j = -1; j <= 1; ++j)
                for (int k = (n == 3 ? -1 : 0); k <= (n == 3 ? 1 : 0); ++k)
                    if (i || j || k) dirs.push_back((1.0 / std::sqrt(double(i * i + j * j + k * k))) * Point{double(i), double(j), double(k)});
        for (double f : {0.3, 0.6, 0.9})
            for (const auto& u : dirs) {
                Point y = x + (0.5 * f * s) * u;
                pts.push_back({gamma.distance(y), y});
            }
        std::stable_sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
        if (pts.size() > std::size_t(options.candidates_per_end)) pts.resize(options.candidates_per_end);
        return pts;
    };
    auto c1 = candidates(x1), c2 = candidates(x2);
    std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < c1.size(); ++i)
        for (std::size_t j = 0; j < c2.size(); ++j) pairs.emplace_back(std::min(c1[i].first, c2[j].first), i, j);
    std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });
    for (const auto& [score, i, j] : pairs)
        if (segment_clearance_at_least(gamma, c1[i].second, c2[j].second, chain.tau)) return finish(c1[i].second, c2[j].second);
    throw GeometryResolutionError("no Harnack chain segment with the required clearance was found");
}

}  // namespace hmlab
