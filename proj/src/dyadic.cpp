#include "hmlab/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hmlab/errors.hpp"

namespace hmlab {

namespace {

double half_cell(const BoundarySet& g, std::size_t i) { return g.is_curve() ? 0.5 * g.sigma_weights()[i] : 0.0; }

}  // namespace

DyadicLattice::DyadicLattice(const BoundarySet& gamma, int k_min, int k_max)
    : gamma_(&gamma), k_min_(k_min), k_max_(k_max) {
    if (!(k_min < k_max)) throw ArgumentError("lattice needs k_min < k_max");
    if (gamma.is_curve() && gamma.spacing() > std::ldexp(1.0, -k_max) * (1 + 1e-9))
        throw ResolutionError("boundary sampling is too coarse for generation k_max");
    generations_.resize(k_max - k_min + 1);
    sample_cube_.assign(k_max - k_min + 1, std::vector<int>(gamma.size(), -1));
    if (gamma.is_curve())
        build_curve();
    else
        build_points();
    finish();
    verify();
}

int DyadicLattice::add_cube(int k, std::vector<std::size_t> samples, int parent) {
    DyadicCube c;
    c.id = int(cubes_.size());
    c.k = k;
    c.length = std::ldexp(1.0, -k);
    c.samples = std::move(samples);
    c.parent = parent;
    for (std::size_t s : c.samples) sample_cube_[k - k_min_][s] = c.id;
    if (parent >= 0) cubes_[parent].children.push_back(c.id);
    generations_[k - k_min_].push_back(c.id);
    cubes_.push_back(std::move(c));
    return cubes_.back().id;
}

void DyadicLattice::build_curve() {
    const auto& arc = gamma_->arc();
    const double lo = gamma_->arc_begin(), hi = gamma_->arc_end();
    for (int k = k_min_; k <= k_max_; ++k) {
        double len = std::ldexp(1.0, -k);
        std::size_t i = 0;
        while (i < arc.size()) {
            double j = std::floor(arc[i] / len);
            std::vector<std::size_t> members;
            while (i < arc.size() && std::floor(arc[i] / len) == j) members.push_back(i++);
            int parent = k > k_min_ ? sample_cube_[k - 1 - k_min_][members.front()] : -1;
            int id = add_cube(k, std::move(members), parent);
            DyadicCube& c = cubes_[id];
            c.arc_lo = std::max(j * len, lo);
            c.arc_hi = std::min((j + 1) * len, hi);
            c.center = gamma_->arc_point(0.5 * (c.arc_lo + c.arc_hi));
            c.edge = j * len < lo + 2 * len || (j + 1) * len > hi - 2 * len;
        }
    }
}

void DyadicLattice::build_points() {
    const auto& pts = gamma_->samples();
    // Greedy net of separation `sep` over `members`, seeded with `seed`; members
    // go to their nearest centre, ties to the earliest centre.
    auto net = [&](const std::vector<std::size_t>& members, std::size_t seed, double sep) {
        std::vector<std::size_t> centers{seed};
        std::vector<double> dmin(members.size());
        for (std::size_t m = 0; m < members.size(); ++m) dmin[m] = dist(pts[members[m]], pts[seed]);
        while (true) {
            std::size_t far = 0;
            for (std::size_t m = 1; m < members.size(); ++m)
                if (dmin[m] > dmin[far]) far = m;
            if (members.empty() || dmin[far] < sep) break;
            centers.push_back(members[far]);
            for (std::size_t m = 0; m < members.size(); ++m) dmin[m] = std::min(dmin[m], dist(pts[members[m]], pts[members[far]]));
        }
        std::vector<std::vector<std::size_t>> groups(centers.size());
        for (std::size_t s : members) {
            std::size_t best = 0;
            double bd = dist(pts[s], pts[centers[0]]);
            for (std::size_t c = 1; c < centers.size(); ++c) {
                double dd = dist(pts[s], pts[centers[c]]);
                if (dd < bd) {
                    bd = dd;
                    best = c;
                }
            }
            groups[best].push_back(s);
        }
        return std::make_pair(centers, groups);
    };
    std::vector<std::size_t> all(pts.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    auto [c0, g0] = net(all, 0, std::ldexp(1.0, -k_min_));
    for (std::size_t c = 0; c < c0.size(); ++c) {
        int id = add_cube(k_min_, g0[c], -1);
        cubes_[id].center = pts[c0[c]];
    }
    for (int k = k_min_ + 1; k <= k_max_; ++k) {
        std::vector<int> parents = generations_[k - 1 - k_min_];
        for (int p : parents) {
            std::size_t seed = gamma_->nearest_sample(cubes_[p].center);
            auto [cs, gs] = net(cubes_[p].samples, seed, std::ldexp(1.0, -k));
            for (std::size_t c = 0; c < cs.size(); ++c) {
                int id = add_cube(k, gs[c], p);
                cubes_[id].center = pts[cs[c]];
            }
        }
    }
}

void DyadicLattice::finish() {
    const auto& pts = gamma_->samples();
    const auto& w = gamma_->sigma_weights();
    for (auto& c : cubes_) {
        std::sort(c.samples.begin(), c.samples.end());
        c.sigma_mass = 0;
        c.outer_radius = 0;
        for (std::size_t s : c.samples) {
            c.sigma_mass += w[s];
            c.outer_radius = std::max(c.outer_radius, dist(pts[s], c.center) + half_cell(*gamma_, s));
        }
        double r = c.length;
        for (std::size_t s : gamma_->samples_in_ball(c.center, c.length)) {
            if (sample_cube_[c.k - k_min_][s] == c.id) continue;
            r = std::min(r, dist(pts[s], c.center) - half_cell(*gamma_, s));
        }
        c.inner_radius = std::max(0.0, r);
    }
    double a0 = std::numeric_limits<double>::infinity(), A1 = 0;
    bool any_interior = std::any_of(cubes_.begin(), cubes_.end(), [](const DyadicCube& c) { return !c.edge; });
    for (const auto& c : cubes_) {
        if (c.edge && any_interior) continue;
        a0 = std::min(a0, c.inner_radius / c.length);
        A1 = std::max(A1, 2 * c.outer_radius / c.length);
    }
    report_.a0 = a0;
    report_.A1 = std::max(A1, 1e-300);
    report_.C2 = a0 > 0 ? report_.A1 / a0 : std::numeric_limits<double>::infinity();
    report_.cubes = int(cubes_.size());
    report_.edge_cubes = int(std::count_if(cubes_.begin(), cubes_.end(), [](const DyadicCube& c) { return c.edge; }));
}

void DyadicLattice::verify() {
    const auto& pts = gamma_->samples();
    const auto& w = gamma_->sigma_weights();
    auto& r = report_;
    bool any_interior = r.edge_cubes < r.cubes;
    for (int k = k_min_; k <= k_max_; ++k)
        for (int owner : sample_cube_[k - k_min_])
            if (owner < 0) ++r.cover_violations;
    for (const auto& c : cubes_) {
        if (c.k < k_max_) {
            std::vector<std::size_t> merged;
            for (int ch : c.children) {
                const auto& cc = cubes_[ch];
                if (cc.k != c.k + 1 || cc.parent != c.id) ++r.nesting_violations;
                merged.insert(merged.end(), cc.samples.begin(), cc.samples.end());
            }
            std::sort(merged.begin(), merged.end());
            if (merged != c.samples) ++r.nesting_violations;
        }
        if (c.edge && any_interior) continue;
        if (2 * c.outer_radius > r.A1 * c.length * (1 + 1e-12)) ++r.diameter_violations;
        for (std::size_t s : gamma_->samples_in_ball(c.center, r.a0 * c.length))
            if (sample_cube_[c.k - k_min_][s] != c.id) ++r.inner_ball_violations;
        if (c.outer_radius > r.C2 * c.inner_radius * (1 + 1e-12)) ++r.inner_ball_violations;
    }
    // Small-boundary property: sigma-mass of the layer of Q within rho * l(Q)
    // of the rest of the boundary, against A1 * rho^gamma * sigma(Q).
    r.rho = {r.a0 / 2, r.a0 / 4, r.a0 / 8};
    r.gamma_per_rho.clear();
    const double cap = 8.0;
    for (double rho : r.rho) {
        double g = cap;
        int tested = 0;
        for (const auto& c : cubes_) {
            if (c.edge && any_interior) continue;
            double band = rho * c.length;
            // Layers thinner than a few sample cells are not resolved.
            if (gamma_->is_curve() && band < 4 * gamma_->spacing()) continue;
            ++tested;
            double layer = 0;
            for (std::size_t s : c.samples) {
                double reach = band + (gamma_->is_curve() ? gamma_->spacing() : 0.0);
                for (std::size_t t : gamma_->samples_in_ball(pts[s], reach)) {
                    if (sample_cube_[c.k - k_min_][t] == c.id) continue;
                    if (dist(pts[s], pts[t]) - half_cell(*gamma_, t) <= band) {
                        layer += w[s];
                        break;
                    }
                }
            }
            double ratio = layer / c.sigma_mass;
            if (ratio > 0 && rho > 0) g = std::min(g, std::log(ratio / r.A1) / std::log(rho));
        }
        r.gamma_per_rho.push_back(tested > 0 ? g : std::numeric_limits<double>::quiet_NaN());
    }
    r.gamma = cap;
    for (double g : r.gamma_per_rho) r.gamma = std::isnan(g) || std::isnan(r.gamma) ? std::numeric_limits<double>::quiet_NaN() : std::min(r.gamma, g);
}

const std::vector<int>& DyadicLattice::generation(int k) const {
    if (k < k_min_ || k > k_max_) throw DomainError("generation outside the lattice range");
    return generations_[k - k_min_];
}

int DyadicLattice::cube_of_sample(std::size_t sample, int k) const {
    if (k < k_min_ || k > k_max_) throw DomainError("generation outside the lattice range");
    return sample_cube_[k - k_min_].at(sample);
}

int DyadicLattice::containing_cube(const Point& q, int k) const {
    if (k < k_min_ || k > k_max_) throw DomainError("generation outside the lattice range");
    std::size_t s = gamma_->nearest_sample(q);
    double tol = std::max(gamma_->spacing(), gamma_->on_boundary_tolerance() * std::max(1.0, norm(q)));
    if (!gamma_->is_curve()) tol = gamma_->on_boundary_tolerance() * std::max(1.0, norm(q));
    if (dist(q, gamma_->samples()[s]) > tol) throw DomainError("point outside the lattice footprint");
    return sample_cube_[k - k_min_][s];
}

bool DyadicLattice::is_ancestor_or_self(int ancestor, int cube) const {
    const auto& a = cubes_.at(ancestor);
    int c = cube;
    while (c >= 0 && cubes_[c].k > a.k) c = cubes_[c].parent;
    return c == ancestor;
}

std::vector<int> DyadicLattice::descendants(int id, bool include_self) const {
    std::vector<int> out;
    std::vector<int> stack{id};
    while (!stack.empty()) {
        int c = stack.back();
        stack.pop_back();
        if (c != id || include_self) out.push_back(c);
        for (auto it = cubes_[c].children.rbegin(); it != cubes_[c].children.rend(); ++it) stack.push_back(*it);
    }
    std::sort(out.begin(), out.end());
    return out;
}

double DyadicLattice::cube_box_distance(int id, const AxisBox& box) const {
    const auto& c = cubes_.at(id);
    if (gamma_->is_curve()) return gamma_->arc_box_distance(c.arc_lo, c.arc_hi, box);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s : c.samples) best = std::min(best, point_box_distance(gamma_->samples()[s], box, gamma_->ambient_dim()));
    return best;
}

double DyadicLattice::cube_point_distance(int id, const Point& x) const {
    AxisBox b{x, x};
    return cube_box_distance(id, b);
}

CubeFamily stopping_time(const DyadicLattice& lattice, int root, const std::vector<bool>& predicate,
                         const std::string& descriptor) {
    if (predicate.size() != lattice.boundary().size()) throw ArgumentError("predicate must have one value per sample");
    CubeFamily fam;
    fam.root = root;
    fam.predicate = descriptor;
    std::vector<int> stack(lattice.cube(root).children.rbegin(), lattice.cube(root).children.rend());
    while (!stack.empty()) {
        int c = stack.back();
        stack.pop_back();
        const auto& cube = lattice.cube(c);
        bool all = std::all_of(cube.samples.begin(), cube.samples.end(), [&](std::size_t s) { return bool(predicate[s]); });
        if (all) {
            fam.members.push_back(c);
            continue;
        }
        bool any = std::any_of(cube.samples.begin(), cube.samples.end(), [&](std::size_t s) { return bool(predicate[s]); });
        if (!any) continue;
        for (auto it = cube.children.rbegin(); it != cube.children.rend(); ++it) stack.push_back(*it);
    }
    std::sort(fam.members.begin(), fam.members.end());
    return fam;
}

}  // namespace hmlab
