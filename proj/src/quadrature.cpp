#include "hmlab/quadrature.hpp"

#include <cmath>
#include <vector>

#include "hmlab/errors.hpp"
#include "hmlab/parallel.hpp"

namespace hmlab {

Region Region::make_box(const AxisBox& b) {
    Region r;
    r.kind = Kind::Box;
    r.box = b;
    return r;
}

Region Region::make_ball(const Point& c, double radius) {
    if (!(radius > 0)) throw ArgumentError("ball radius must be positive");
    Region r;
    r.kind = Kind::Ball;
    r.center = c;
    r.radius = radius;
    return r;
}

AxisBox Region::bounds(int n) const {
    if (kind == Kind::Box) return box;
    AxisBox b;
    for (int i = 0; i < n; ++i) {
        b.lo[i] = center[i] - radius;
        b.hi[i] = center[i] + radius;
    }
    return b;
}

bool Region::contains(const Point& x, int n) const {
    if (kind == Kind::Box) return box.contains(x, n);
    double s = 0;
    for (int i = 0; i < n; ++i) s += (x[i] - center[i]) * (x[i] - center[i]);
    return s < radius * radius;
}

namespace {

struct Integrator {
    const BoundarySet& gamma;
    const Region& region;
    double exponent;
    int n;
    int levels;

    double cell(const Point& c, double side, int level) const {
        if (!region.contains(c, n)) return 0;
        double delta = gamma.distance(c);
        double diam = side * std::sqrt(double(n));
        if (delta < diam && level < levels) {
            double s = 0;
            double q = 0.25 * side;
            int corners = 1 << n;
            for (int m = 0; m < corners; ++m) {
                Point cc = c;
                for (int i = 0; i < n; ++i) cc[i] += (m >> i & 1) ? q : -q;
                s += cell(cc, 0.5 * side, level + 1);
            }
            return s;
        }
        if (!(delta > 0)) return 0;
        return std::pow(delta, exponent) * std::pow(side, n);
    }
};

}  // namespace

double measure_m(const BoundarySet& gamma, const Region& region, double a, const QuadratureOptions& options) {
    const int n = gamma.ambient_dim();
    AxisBox b = region.bounds(n);
    bool touches = region.kind == Region::Kind::Box ? gamma.box_distance(b) == 0 : gamma.distance(region.center) < region.radius;
    if (touches && a <= -1) throw DivergentIntegralError("delta^a dm diverges near the boundary for a <= -1");
    int m = options.cells_per_axis;
    // Cells are cubes: use the largest side and a per-axis count that covers it.
    double side = 0;
    for (int i = 0; i < n; ++i) side = std::max(side, b.side(i));
    side /= m;
    std::array<int, 3> counts{1, 1, 1};
    for (int i = 0; i < n; ++i) counts[i] = std::max(1, int(std::ceil(b.side(i) / side - 1e-9)));
    Integrator integ{gamma, region, a + gamma.weight_exponent(), n, options.refine_levels};
    std::size_t rows = std::size_t(counts[0]);
    std::vector<double> partial(rows, 0.0);
    parallel_for(rows, [&](std::size_t i) {
        double s = 0;
        for (int j = 0; j < counts[1]; ++j)
            for (int k = 0; k < counts[2]; ++k) {
                Point c{b.lo[0] + (i + 0.5) * side, b.lo[1] + (j + 0.5) * side, n == 3 ? b.lo[2] + (k + 0.5) * side : 0.0};
                if (region.kind == Region::Kind::Box && !b.contains(c, n)) continue;
                s += integ.cell(c, side, 0);
            }
        partial[i] = s;
    });
    double total = 0;
    for (double p : partial) total += p;
    return total;
}

}  // namespace hmlab
