#pragma once

#include <cstdint>
#include <vector>

#include "hmlab/scenario.hpp"

namespace hmlab {

struct StructureOptions {
    Point far_pole{0, 0.75, 0.75};
    std::vector<Point> centers;             // boundary points; empty: spread over the middle of the box
    std::size_t default_centers = 8;
    std::vector<double> radii{0.25, 0.125};
    double moser_p = 2;
    int harnack_balls = 20;
    std::uint64_t seed = 1;
};

// Per surface ball measurements with X0 the far pole and A = A_r(q).
struct BallMeasurement {
    Point q{0, 0, 0};
    double r = 0;
    Point corkscrew{0, 0, 0};
    double omega_far = 0;        // omega^X0(Delta)
    double omega_far_half = 0;   // omega^X0(Delta/2)
    double doubling = 0;         // omega^X0(2 Delta) / omega^X0(Delta), 0 when X0 is inside 4B
    double cfms = 0;             // r^(d-1) G(X0, A) / omega^X0(Delta)
    double nondegeneracy = 0;    // omega^A(Delta)
    double change_of_pole = 0;   // [omega^X0(Delta/2) / omega^X0(Delta)] / omega^A(Delta/2)
    double caccioppoli = 0;      // int_B |grad G|^2 dm / (r^-2 int_2B G^2 dm)
    double moser = 0;            // sup_B G / (avg_2B G^p dm)^(1/p)
    double green_asymmetry = 0;  // |G(X0, A) - G(A, X0)| / G(X0, A)
};

struct StructureReport {
    double h = 0;
    std::vector<BallMeasurement> balls;
    double doubling = 0;          // max
    double cfms_min = 0, cfms_max = 0;
    double cfms_spread = 0;       // max / min
    double nondegeneracy = 0;     // min
    double change_of_pole_min = 0, change_of_pole_max = 0;
    double change_of_pole_spread = 0;
    double caccioppoli = 0;       // max
    double moser = 0;             // max
    double holder_beta = 0;       // fitted oscillation decay exponent
    double harnack = 0;           // max sup_B / inf_B over random interior balls
    double green_asymmetry = 0;   // max
};

// Default ball centres: evenly spaced coupled samples whose first coordinate
// lies in the middle half of the grid box.
std::vector<Point> default_ball_centers(const Scenario& scenario, std::size_t count);

StructureReport structure_checks(const Scenario& scenario, const StructureOptions& options = {});

}  // namespace hmlab
