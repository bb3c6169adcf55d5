#pragma once

#include <string>
#include <vector>

#include "hmlab/boundary.hpp"

namespace hmlab {

struct DyadicCube {
    int id = -1;
    int k = 0;
    double length = 1;          // l(Q) = 2^-k
    Point center{};             // x_Q, a point of Q
    double inner_radius = 0;    // Delta(x_Q, r_Q) is contained in Q at sample level
    double outer_radius = 0;    // Q is contained in Delta(x_Q, R_Q)
    double arc_lo = 0, arc_hi = 0;  // arc interval for curves
    std::vector<std::size_t> samples;
    int parent = -1;
    std::vector<int> children;
    double sigma_mass = 0;
    bool edge = false;          // near the footprint boundary; excluded from statistics
};

struct LatticeReport {
    double a0 = 0;
    double A1 = 0;
    double C2 = 0;
    double gamma = 0;                       // small-boundary exponent, min over rho
    std::vector<double> rho;
    std::vector<double> gamma_per_rho;
    int cubes = 0;
    int edge_cubes = 0;
    int cover_violations = 0;               // (i)
    int nesting_violations = 0;             // (ii), (iii)
    int diameter_violations = 0;            // (iv)
    int inner_ball_violations = 0;          // (v) and the outer containment
    bool properties_hold() const {
        return cover_violations == 0 && nesting_violations == 0 && diameter_violations == 0 && inner_ball_violations == 0;
    }
};

// Christ-David style cube hierarchy on the boundary samples for generations
// k_min..k_max. Curves use dyadic arc-length intervals; point sets use nested
// greedy nets refined top-down inside each parent.
class DyadicLattice {
public:
    DyadicLattice(const BoundarySet& gamma, int k_min, int k_max);

    const BoundarySet& boundary() const { return *gamma_; }
    int k_min() const { return k_min_; }
    int k_max() const { return k_max_; }
    const std::vector<DyadicCube>& cubes() const { return cubes_; }
    const DyadicCube& cube(int id) const { return cubes_.at(id); }
    const std::vector<int>& generation(int k) const;

    int containing_cube(const Point& q, int k) const;
    int cube_of_sample(std::size_t sample, int k) const;
    bool is_ancestor_or_self(int ancestor, int cube) const;
    std::vector<int> descendants(int id, bool include_self) const;

    double cube_box_distance(int id, const AxisBox& box) const;
    double cube_point_distance(int id, const Point& x) const;

    const LatticeReport& report() const { return report_; }

private:
    void build_curve();
    void build_points();
    void finish();
    void verify();
    int add_cube(int k, std::vector<std::size_t> samples, int parent);

    const BoundarySet* gamma_;
    int k_min_, k_max_;
    std::vector<DyadicCube> cubes_;
    std::vector<std::vector<int>> generations_;
    std::vector<std::vector<int>> sample_cube_;  // [k - k_min][sample]
    LatticeReport report_;
};

struct CubeFamily {
    int root = -1;
    std::vector<int> members;
    std::string predicate;
};

// Maximal strict descendants of root whose samples all satisfy the predicate.
CubeFamily stopping_time(const DyadicLattice& lattice, int root, const std::vector<bool>& predicate,
                         const std::string& descriptor = "");

}  // namespace hmlab
