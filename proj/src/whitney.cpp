#include "hmlab/whitney.hpp"

#include <algorithm>
#include <cmath>

#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>

#include "hmlab/errors.hpp"
#include "hmlab/parallel.hpp"

namespace hmlab {

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;

namespace {

using RPoint = bg::model::point<double, 3, bg::cs::cartesian>;
using RBox = bg::model::box<RPoint>;
using RValue = std::pair<RBox, int>;
using Tree = bgi::rtree<RValue, bgi::rstar<16>>;

RBox to_rbox(const AxisBox& b) { return RBox(RPoint(b.lo[0], b.lo[1], b.lo[2]), RPoint(b.hi[0], b.hi[1], b.hi[2])); }

Tree build_tree(const std::vector<WhitneyBox>& boxes, double factor) {
    std::vector<RValue> values;
    values.reserve(boxes.size());
    for (const auto& b : boxes) values.emplace_back(to_rbox(b.box.dilated(factor)), b.id);
    return Tree(values.begin(), values.end());
}

std::vector<int> query_tree(const Tree& tree, const AxisBox& region) {
    std::vector<RValue> out;
    tree.query(bgi::intersects(to_rbox(region)), std::back_inserter(out));
    std::vector<int> ids;
    ids.reserve(out.size());
    for (auto& v : out) ids.push_back(v.second);
    std::sort(ids.begin(), ids.end());
    return ids;
}

}  // namespace

struct WhitneyDecomposition::Index {
    Tree plain;
    Tree triple;  // I*** for the chosen theta
};

WhitneyDecomposition::WhitneyDecomposition(const BoundarySet& gamma, const AxisBox& domain, const WhitneyOptions& options)
    : gamma_(&gamma), domain_(domain), index_(std::make_unique<Index>()) {
    const int n = gamma.ambient_dim();
    for (int i = n; i < 3; ++i) domain_.lo[i] = domain_.hi[i] = 0;
    double side = domain_.side(0);
    for (int i = 1; i < n; ++i)
        if (domain_.side(i) != side) throw ArgumentError("Whitney domain must be a cube");
    double k_root_d = -std::log2(side);
    if (!(side > 0) || std::fabs(k_root_d - std::round(k_root_d)) > 1e-12)
        throw ArgumentError("Whitney domain side must be a power of two");
    int k_root = int(std::round(k_root_d));
    if (options.k_max < k_root) throw ArgumentError("Whitney k_max below the domain generation");
    report_.domain_volume = domain_.volume(n);

    struct Cand {
        int k;
        AxisBox box;
    };
    std::vector<Cand> level{{k_root, domain_}};
    while (!level.empty()) {
        std::vector<char> accept(level.size(), 0);
        std::vector<double> dists(level.size(), 0);
        parallel_for(level.size(), [&](std::size_t i) {
            const AxisBox& b = level[i].box;
            double diam = b.diameter(n);
            accept[i] = 4 * diam <= gamma.box_distance(b.dilated(4.0));
            if (accept[i]) dists[i] = gamma.box_distance(b);
        });
        std::vector<Cand> next;
        for (std::size_t i = 0; i < level.size(); ++i) {
            const Cand& c = level[i];
            if (accept[i]) {
                WhitneyBox w;
                w.id = int(boxes_.size());
                w.k = c.k;
                w.box = c.box;
                w.side = c.box.side(0);
                w.dist = dists[i];
                boxes_.push_back(w);
                continue;
            }
            if (c.k >= options.k_max) {
                report_.uncovered_volume += c.box.volume(n);
                continue;
            }
            double h = 0.5 * c.box.side(0);
            int corners = 1 << n;
            for (int m = 0; m < corners; ++m) {
                AxisBox child = c.box;
                for (int ax = 0; ax < n; ++ax) {
                    child.lo[ax] = c.box.lo[ax] + ((m >> ax & 1) ? h : 0.0);
                    child.hi[ax] = child.lo[ax] + h;
                }
                next.push_back({c.k + 1, child});
            }
        }
        level.swap(next);
    }
    report_.boxes = boxes_.size();
    report_.resolution_warning = report_.uncovered_volume > 0.01 * report_.domain_volume;
    index_->plain = build_tree(boxes_, 1.0);

    for (const auto& b : boxes_)
        if (!satisfies_wbox(b.id)) ++report_.wbox_violations;

    neighbors_.assign(boxes_.size(), {});
    if (options.census) {
        for (const auto& b : boxes_) {
            for (int j : query_tree(index_->plain, b.box)) {
                if (j <= b.id) continue;
                const auto& o = boxes_[j];
                if (!boxes_meet(b.box, o.box, n) || boxes_overlap(b.box, o.box, n)) continue;
                touching_.emplace_back(b.id, j);
                neighbors_[b.id].push_back(j);
                neighbors_[j].push_back(b.id);
                double ratio = o.side / b.side;
                report_.min_touch_ratio = std::min({report_.min_touch_ratio, ratio, 1 / ratio});
                report_.max_touch_ratio = std::max({report_.max_touch_ratio, ratio, 1 / ratio});
                if (ratio < 0.25 || ratio > 4) ++report_.ratio_violations;
            }
        }
        for (auto& nb : neighbors_) std::sort(nb.begin(), nb.end());
        report_.touching_pairs = touching_.size();
    }

    double theta = options.theta;
    report_.theta_ok = !options.census || theta_census(theta);
    while (!report_.theta_ok && report_.theta_halvings < options.max_theta_halvings) {
        theta *= 0.5;
        ++report_.theta_halvings;
        report_.theta_ok = theta_census(theta);
    }
    report_.theta = theta;
    index_->triple = build_tree(boxes_, dilation_factor(3));
}

WhitneyDecomposition::~WhitneyDecomposition() = default;
WhitneyDecomposition::WhitneyDecomposition(WhitneyDecomposition&&) noexcept = default;

double WhitneyDecomposition::dilation_factor(int level) const {
    switch (level) {
        case 0: return 1.0;
        case 1: return 1 + report_.theta;
        case 2: return 1 + 2 * report_.theta;
        case 3: return 1 + 4 * report_.theta;
    }
    throw ArgumentError("dilation level must be 0..3");
}

bool WhitneyDecomposition::theta_census(double theta) const {
    const int n = dim();
    Tree triple = build_tree(boxes_, 1 + 4 * theta);
    std::vector<char> ok(boxes_.size(), 1);
    parallel_for(boxes_.size(), [&](std::size_t i) {
        const auto& b = boxes_[i];
        AxisBox t3 = b.box.dilated(1 + 4 * theta);
        // I*** meets J*** only for touching boxes.
        for (int j : query_tree(triple, t3)) {
            if (j == b.id) continue;
            if (!boxes_meet(t3, boxes_[j].box.dilated(1 + 4 * theta), n)) continue;
            if (!touching(b.id, j)) {
                ok[i] = 0;
                return;
            }
        }
        // I* stays clear of the half-box of every other box.
        AxisBox t1 = b.box.dilated(1 + theta);
        for (int j : query_tree(index_->plain, t1)) {
            if (j == b.id) continue;
            if (boxes_overlap(t1, boxes_[j].box.dilated(0.5), n)) {
                ok[i] = 0;
                return;
            }
        }
        if (!(gamma_->box_distance(t3) > 0)) ok[i] = 0;
    });
    return std::all_of(ok.begin(), ok.end(), [](char c) { return c != 0; });
}

bool WhitneyDecomposition::touching(int a, int b) const {
    const auto& nb = neighbors_.at(a);
    return std::binary_search(nb.begin(), nb.end(), b);
}

bool WhitneyDecomposition::satisfies_wbox(int id) const {
    const auto& b = boxes_.at(id);
    const int n = dim();
    double diam = b.box.diameter(n);
    double d4 = gamma_->box_distance(b.box.dilated(4.0));
    double tol = gamma_->has_exact_distance() ? 0.0 : 1e-9;
    return 4 * diam <= d4 + tol && d4 <= b.dist + tol && b.dist <= 40 * diam + tol;
}

bool WhitneyDecomposition::on_domain_boundary(int id) const {
    const auto& b = boxes_.at(id).box;
    for (int i = 0; i < dim(); ++i)
        if (b.lo[i] <= domain_.lo[i] || b.hi[i] >= domain_.hi[i]) return true;
    return false;
}

int WhitneyDecomposition::locate(const Point& x) const {
    AxisBox p{x, x};
    for (int i = dim(); i < 3; ++i) p.lo[i] = p.hi[i] = 0;
    auto ids = query_tree(index_->plain, p);
    for (int id : ids)
        if (boxes_[id].box.contains(x, dim())) return id;
    return -1;
}

std::vector<int> WhitneyDecomposition::query(const AxisBox& region) const { return query_tree(index_->plain, region); }

std::vector<int> WhitneyDecomposition::covering(const Point& x, int level) const {
    AxisBox p{x, x};
    for (int i = dim(); i < 3; ++i) p.lo[i] = p.hi[i] = 0;
    std::vector<int> out;
    for (int id : query_tree(level == 0 ? index_->plain : index_->triple, p))
        if (dilated(id, level).contains_open(x, dim())) out.push_back(id);
    return out;
}

}  // namespace hmlab
