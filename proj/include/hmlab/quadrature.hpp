#pragma once

#include "hmlab/boundary.hpp"

namespace hmlab {

struct Region {
    enum class Kind { Box, Ball } kind = Kind::Box;
    AxisBox box;
    Point center{};
    double radius = 0;

    static Region make_box(const AxisBox& b);
    static Region make_ball(const Point& c, double r);
    // Tent T(Delta(q, r)) = B(q, r) minus the boundary; same integral as the ball.
    static Region make_tent(const Point& q, double r) { return make_ball(q, r); }

    AxisBox bounds(int n) const;
    bool contains(const Point& x, int n) const;
};

struct QuadratureOptions {
    int cells_per_axis = 32;
    int refine_levels = 4;
};

// Integral of delta^a dm = delta^a w dX over the region by the midpoint rule,
// refining dyadically cells whose distance to the boundary is below their diameter.
double measure_m(const BoundarySet& gamma, const Region& region, double a, const QuadratureOptions& options = {});

}  // namespace hmlab
