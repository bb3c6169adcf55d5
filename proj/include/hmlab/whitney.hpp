#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "hmlab/boundary.hpp"

namespace hmlab {

struct WhitneyBox {
    int id = -1;
    int k = 0;             // side = 2^-k
    AxisBox box;
    double side = 0;
    double dist = 0;       // dist(I, Gamma)
    Point center() const { return box.center(); }
};

struct WhitneyOptions {
    int k_max = 6;
    double theta = 1.0 / 16;
    int max_theta_halvings = 8;
    bool census = true;     // run the theta census and touching-pair checks
};

struct WhitneyReport {
    std::size_t boxes = 0;
    double uncovered_volume = 0;
    double domain_volume = 0;
    bool resolution_warning = false;
    double theta = 0;
    int theta_halvings = 0;
    bool theta_ok = false;
    int wbox_violations = 0;
    std::size_t touching_pairs = 0;
    int ratio_violations = 0;
    double min_touch_ratio = 1, max_touch_ratio = 1;
};

// Maximal dyadic sub-boxes I of the domain with 4 diam I <= dist(4I, Gamma),
// recursion capped at generation k_max. The domain must be a cube whose side is
// a power of two.
class WhitneyDecomposition {
public:
    WhitneyDecomposition(const BoundarySet& gamma, const AxisBox& domain, const WhitneyOptions& options = {});
    ~WhitneyDecomposition();
    WhitneyDecomposition(WhitneyDecomposition&&) noexcept;

    const BoundarySet& boundary() const { return *gamma_; }
    int dim() const { return gamma_->ambient_dim(); }
    const AxisBox& domain() const { return domain_; }
    const std::vector<WhitneyBox>& boxes() const { return boxes_; }
    const WhitneyBox& box(int id) const { return boxes_.at(id); }
    double theta() const { return report_.theta; }
    const WhitneyReport& report() const { return report_; }

    // level 0: I, 1: I* = (1+theta)I, 2: I** = (1+2theta)I, 3: I*** = (1+4theta)I.
    double dilation_factor(int level) const;
    AxisBox dilated(int id, int level) const { return boxes_.at(id).box.dilated(dilation_factor(level)); }

    bool satisfies_wbox(int id) const;
    int locate(const Point& x) const;
    std::vector<int> query(const AxisBox& region) const;
    // Boxes whose open dilation at `level` contains x.
    std::vector<int> covering(const Point& x, int level) const;
    const std::vector<std::pair<int, int>>& touching_pairs() const { return touching_; }
    const std::vector<int>& neighbors(int id) const { return neighbors_.at(id); }
    bool on_domain_boundary(int id) const;
    bool touching(int a, int b) const;

private:
    bool theta_census(double theta) const;

    const BoundarySet* gamma_;
    AxisBox domain_;
    std::vector<WhitneyBox> boxes_;
    std::vector<std::pair<int, int>> touching_;
    std::vector<std::vector<int>> neighbors_;
    WhitneyReport report_;
    struct Index;
    std::unique_ptr<Index> index_;
};

}  // namespace hmlab
