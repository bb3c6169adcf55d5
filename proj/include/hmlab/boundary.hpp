#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hmlab/geometry.hpp"

namespace hmlab {

enum class GammaKind { Flat, LipschitzGraph, Polyline, PointCloud };

std::string to_string(GammaKind kind);
GammaKind gamma_kind_from_string(const std::string& name);

struct GammaSpec {
    GammaKind kind = GammaKind::Flat;
    // Lipschitz graph {(t, amplitude * sin(frequency * t), 0)}.
    double amplitude = 0.1;
    double frequency = 1.0;
    std::vector<Point> vertices;  // polyline
    std::vector<Point> points;    // point cloud, ordered along the curve when d = 1
    std::vector<double> weights;  // optional point-cloud weights

    double lipschitz_constant() const;
};

struct AhlforsFit {
    double slope = 0;
    double constant = 0;  // C_0 with C_0^-1 r^d <= sigma(B(q,r)) <= C_0 r^d on the tested balls
    int balls = 0;
};

// Discrete model of the lower-dimensional boundary: exact geometry where a
// parametrization is available, samples with surface-measure weights for
// every kind. Immutable after construction.
class BoundarySet {
public:
    // footprint: region whose part of the boundary is sampled. spacing: target
    // parameter step for curves (ignored for point sets).
    BoundarySet(int n, int d, GammaSpec spec, const AxisBox& footprint, double spacing);
    ~BoundarySet();
    BoundarySet(BoundarySet&&) noexcept;
    BoundarySet& operator=(BoundarySet&&) noexcept;

    int ambient_dim() const { return n_; }
    int boundary_dim() const { return d_; }
    const GammaSpec& spec() const { return spec_; }
    GammaKind kind() const { return spec_.kind; }
    bool is_curve() const { return d_ == 1; }
    bool has_exact_distance() const { return spec_.kind != GammaKind::PointCloud || d_ == 0; }
    const AxisBox& footprint() const { return footprint_; }

    std::size_t size() const { return samples_.size(); }
    const std::vector<Point>& samples() const { return samples_; }
    const std::vector<double>& sigma_weights() const { return weights_; }
    // Arc-length coordinate of each sample (curves only; zero at parameter 0).
    const std::vector<double>& arc() const { return arc_; }
    double arc_begin() const { return arc_lo_; }
    double arc_end() const { return arc_hi_; }
    // Largest sample cell (arc length for curves, minimal separation scale for point sets).
    double spacing() const { return spacing_; }
    double total_mass() const;

    double distance(const Point& x) const;
    Point nearest_point(const Point& x) const;
    bool on_boundary(const Point& x) const;
    double on_boundary_tolerance() const;

    // w(X) = delta^(d-n+1); throws SingularPointError on the boundary.
    double weight(const Point& x) const;
    double clamped_weight(const Point& x, double floor) const;
    double weight_exponent() const { return double(d_ - n_ + 1); }

    // D(X) = (int |X-y|^(-d-alpha) dsigma)^(-1/alpha).
    double regularized_distance(const Point& x, double alpha) const;

    double box_distance(const AxisBox& box) const;
    // Distance from a box to the arc {arc coordinate in [s0, s1]} (curves only).
    double arc_box_distance(double s0, double s1, const AxisBox& box) const;
    Point arc_point(double s) const;

    std::size_t nearest_sample(const Point& x) const;
    std::vector<std::size_t> samples_in_ball(const Point& q, double r) const;
    std::vector<std::size_t> samples_in_box(const AxisBox& box) const;
    double sigma_ball(const Point& q, double r) const;

    // Least-squares slope of log sigma(B(q,r)) against log r at the given centers.
    AhlforsFit ahlfors_fit(const std::vector<std::size_t>& centers, const std::vector<double>& radii) const;

private:
    double curve_param_distance(const Point& x, double t_lo, double t_hi) const;
    double graph_box_distance(const AxisBox& box, double t_lo, double t_hi) const;
    double param_of_arc(double s) const;
    Point curve(double t) const;
    double speed(double t) const;

    int n_;
    int d_;
    GammaSpec spec_;
    AxisBox footprint_;
    double spacing_ = 0;
    std::vector<Point> samples_;
    std::vector<double> weights_;
    std::vector<double> arc_;
    std::vector<double> params_;
    // Cell boundaries of the curve sampling: parameter and arc coordinate.
    std::vector<double> cell_t_;
    std::vector<double> cell_s_;
    double arc_lo_ = 0;
    double arc_hi_ = 0;
    std::vector<double> poly_arc_;  // cumulative arc length at polyline vertices

    struct Index;
    std::unique_ptr<Index> index_;
};

}  // namespace hmlab
