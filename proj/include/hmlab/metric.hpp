#pragma once

#include <cstddef>
#include <vector>

#include "hmlab/boundary.hpp"

namespace hmlab {

// Corkscrew point A_r(q): a point of B(q, r/2) maximizing the distance to the
// boundary over a fixed lattice of candidates. Deterministic.
Point corkscrew_point(const BoundarySet& gamma, const Point& q, double r);

struct HarnackOptions {
    double c = 0.125;  // clearance constant in tau = c * Lambda^(-d/(n-1-d)) * s
    int candidates_per_end = 8;
};

// Chain of balls joining X1 to X2: B(X1, s/2), then balls of radius tau/4
// centred on [Y1, Y2] at spacing <= tau/3, then B(X2, s/2). The interior balls
// are implicit so very long chains can be queried without being enumerated.
struct HarnackChain {
    Point x1{}, x2{};
    Point y1{}, y2{};
    double s = 0;
    double lambda = 1;
    double c = 0.125;
    double tau = 0;
    double step = 0;              // spacing of interior centres
    std::size_t interior = 0;     // number of interior balls
    bool degenerate = false;      // X1 == X2: a single ball

    std::size_t size() const { return degenerate ? 1 : interior + 2; }
    Ball ball(std::size_t j) const;
    std::vector<Ball> balls(std::size_t limit = std::size_t(1) << 22) const;
    bool meets_box(const AxisBox& box, int n) const;
    // Count bound (6/c) Lambda^((n-1)/(n-1-d)) + 2.
    double count_bound(int n, int d) const;
};

HarnackChain harnack_chain(const BoundarySet& gamma, const Point& x1, const Point& x2, double s, double lambda,
                           const HarnackOptions& options = {});

// Certified check that dist([a, b], Gamma) >= tau.
bool segment_clearance_at_least(const BoundarySet& gamma, const Point& a, const Point& b, double tau);

}  // namespace hmlab
