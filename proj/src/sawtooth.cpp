#include "hmlab/sawtooth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hmlab/errors.hpp"
#include "hmlab/parallel.hpp"

namespace hmlab {

std::vector<int> wq0_filter(const DyadicLattice& lattice, const WhitneyDecomposition& whitney, int cube, double eta,
                            double K) {
    const auto& c = lattice.cube(cube);
    const int n = whitney.dim();
    double lo = std::pow(eta, 0.25) * c.length, hi = std::sqrt(K) * c.length;
    double reach = hi + c.outer_radius;
    AxisBox region;
    for (int i = 0; i < n; ++i) {
        region.lo[i] = c.center[i] - reach;
        region.hi[i] = c.center[i] + reach;
    }
    std::vector<int> out;
    for (int id : whitney.query(region)) {
        const auto& b = whitney.box(id);
        if (b.side < lo || b.side > hi) continue;
        if (lattice.cube_box_distance(cube, b.box) <= hi) out.push_back(id);
    }
    return out;
}

WhitneyRegions::WhitneyRegions(const DyadicLattice& lattice, const WhitneyDecomposition& whitney, const WqParams& params,
                               std::vector<int> cubes)
    : lattice_(&lattice), whitney_(&whitney), params_(params), cubes_(std::move(cubes)) {
    if (cubes_.empty())
        for (const auto& c : lattice.cubes()) cubes_.push_back(c.id);
    std::sort(cubes_.begin(), cubes_.end());
    cubes_.erase(std::unique(cubes_.begin(), cubes_.end()), cubes_.end());
    slot_.assign(lattice.cubes().size(), -1);
    for (std::size_t i = 0; i < cubes_.size(); ++i) slot_[cubes_[i]] = int(i);
    double eta = params.eta, K = params.K;
    for (int attempt = 0;; ++attempt) {
        if (build(eta, K)) {
            report_.escalations = attempt;
            break;
        }
        if (attempt >= params.max_escalations)
            throw ParameterError("corkscrew X_Q is not inside a W_Q^0 box: choose a smaller eta or a larger K");
        eta /= 16;
        K *= 4;
    }
}

bool WhitneyRegions::build(double eta, double K) {
    const auto& gamma = lattice_->boundary();
    const int n = gamma.ambient_dim();
    std::size_t m = cubes_.size();
    wq0_.assign(m, {});
    wq_.assign(m, {});
    xq_.assign(m, Point{});
    std::vector<char> ok(m, 1);
    parallel_for(m, [&](std::size_t i) {
        int id = cubes_[i];
        const auto& c = lattice_->cube(id);
        wq0_[i] = wq0_filter(*lattice_, *whitney_, id, eta, K);
        double r = c.inner_radius > 0 ? c.inner_radius : lattice_->report().a0 * c.length;
        xq_[i] = corkscrew_point(gamma, c.center, 0.5 * r);
        int home = whitney_->locate(xq_[i]);
        if (home < 0 || !std::binary_search(wq0_[i].begin(), wq0_[i].end(), home)) {
            ok[i] = 0;
            return;
        }
        std::vector<int> boxes = wq0_[i];
        const Point& xq = xq_[i];
        double dq = gamma.distance(xq);
        for (int bid : wq0_[i]) {
            Point xi = whitney_->box(bid).center();
            double s = std::min(gamma.distance(xi), dq);
            double lambda = std::max(1.0, dist(xi, xq) / s);
            HarnackChain chain = harnack_chain(gamma, xi, xq, s, lambda, params_.harnack);
            auto collect = [&](const AxisBox& region) {
                for (int cand : whitney_->query(region))
                    if (chain.meets_box(whitney_->box(cand).box, n)) boxes.push_back(cand);
            };
            auto ball_box = [&](const Point& p, double rad) {
                AxisBox b;
                for (int k = 0; k < n; ++k) {
                    b.lo[k] = p[k] - rad;
                    b.hi[k] = p[k] + rad;
                }
                return b;
            };
            collect(ball_box(xi, 0.5 * s));
            collect(ball_box(xq, 0.5 * s));
            if (chain.degenerate) continue;
            // Walk the segment in pieces proportional to the local distance to the
            // boundary so each box query stays small.
            double len = dist(chain.y1, chain.y2);
            Point u = len > 0 ? (1.0 / len) * (chain.y2 - chain.y1) : Point{0, 0, 0};
            double t = 0;
            while (true) {
                Point p = chain.y1 + t * u;
                double piece = std::max(0.5 * chain.tau, 0.25 * gamma.distance(p));
                double t1 = std::min(len, t + piece);
                Point p1 = chain.y1 + t1 * u;
                AxisBox b;
                for (int k = 0; k < n; ++k) {
                    b.lo[k] = std::min(p[k], p1[k]) - 0.25 * chain.tau;
                    b.hi[k] = std::max(p[k], p1[k]) + 0.25 * chain.tau;
                }
                collect(b);
                if (t1 >= len) break;
                t = t1;
            }
        }
        std::sort(boxes.begin(), boxes.end());
        boxes.erase(std::unique(boxes.begin(), boxes.end()), boxes.end());
        wq_[i] = std::move(boxes);
    });
    if (std::any_of(ok.begin(), ok.end(), [](char c) { return c == 0; })) return false;
    report_.eta = eta;
    report_.K = K;
    report_.max_wq = 0;
    report_.min_size_ratio = std::numeric_limits<double>::infinity();
    report_.max_dist_ratio = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const auto& c = lattice_->cube(cubes_[i]);
        report_.max_wq = std::max(report_.max_wq, wq_[i].size());
        for (int bid : wq_[i]) {
            report_.min_size_ratio = std::min(report_.min_size_ratio, whitney_->box(bid).side / c.length);
            report_.max_dist_ratio = std::max(report_.max_dist_ratio, lattice_->cube_box_distance(c.id, whitney_->box(bid).box) / c.length);
        }
    }
    return true;
}

bool WhitneyRegions::has(int cube) const { return cube >= 0 && std::size_t(cube) < slot_.size() && slot_[cube] >= 0; }

const std::vector<int>& WhitneyRegions::wq0(int cube) const {
    if (!has(cube)) throw ArgumentError("cube not prepared in these Whitney regions");
    return wq0_[slot_[cube]];
}

const std::vector<int>& WhitneyRegions::wq(int cube) const {
    if (!has(cube)) throw ArgumentError("cube not prepared in these Whitney regions");
    return wq_[slot_[cube]];
}

Point WhitneyRegions::xq(int cube) const {
    if (!has(cube)) throw ArgumentError("cube not prepared in these Whitney regions");
    return xq_[slot_[cube]];
}

bool SawtoothDomain::has_box(int id) const { return std::binary_search(boxes.begin(), boxes.end(), id); }

bool SawtoothDomain::contains_at(const WhitneyRegions& regions, const Point& x, int lvl) const {
    for (int id : regions.whitney().covering(x, lvl))
        if (has_box(id)) return true;
    return false;
}

bool SawtoothDomain::contains(const WhitneyRegions& regions, const Point& x) const { return contains_at(regions, x, level); }

SawtoothDomain build_sawtooth(const WhitneyRegions& regions, int root, const CubeFamily& family, int level,
                              std::optional<int> truncation) {
    const auto& lattice = regions.lattice();
    if (level < 1 || level > 3) throw ArgumentError("sawtooth dilation level must be 1, 2 or 3");
    for (int f : family.members)
        if (f == root || !lattice.is_ancestor_or_self(root, f)) throw ArgumentError("family must consist of strict descendants of the root");
    SawtoothDomain dom;
    dom.root = root;
    dom.family = family;
    dom.truncation = truncation;
    dom.level = level;
    const auto& q = lattice.cube(root);
    for (int c : lattice.descendants(root, true)) {
        const auto& cube = lattice.cube(c);
        if (truncation && !(cube.length > std::ldexp(q.length, -*truncation))) continue;
        bool stopped = std::any_of(family.members.begin(), family.members.end(), [&](int f) { return lattice.is_ancestor_or_self(f, c); });
        if (stopped) continue;
        dom.cubes.push_back(c);
        const auto& w = regions.wq(c);
        dom.boxes.insert(dom.boxes.end(), w.begin(), w.end());
    }
    std::sort(dom.boxes.begin(), dom.boxes.end());
    dom.boxes.erase(std::unique(dom.boxes.begin(), dom.boxes.end()), dom.boxes.end());
    const auto& wt = regions.whitney();
    const int n = wt.dim();
    dom.min_distance_ratio = std::numeric_limits<double>::infinity();
    for (int id : dom.boxes) {
        AxisBox b = wt.dilated(id, level);
        for (int corner = 0; corner < (1 << n); ++corner) {
            Point p = b.lo;
            for (int i = 0; i < n; ++i)
                if (corner >> i & 1) p[i] = b.hi[i];
            dom.c3 = std::max(dom.c3, dist(p, q.center) / q.length);
        }
        if (truncation) dom.min_distance_ratio = std::min(dom.min_distance_ratio, regions.boundary().box_distance(b) / std::ldexp(q.length, -*truncation));
    }
    if (!truncation || dom.boxes.empty()) dom.min_distance_ratio = 0;
    return dom;
}

std::vector<std::size_t> family_complement(const DyadicLattice& lattice, const CubeFamily& family) {
    std::vector<char> covered(lattice.boundary().size(), 0);
    for (int f : family.members)
        for (std::size_t s : lattice.cube(f).samples) covered[s] = 1;
    std::vector<std::size_t> out;
    for (std::size_t s : lattice.cube(family.root).samples)
        if (!covered[s]) out.push_back(s);
    return out;
}

CutoffField::CutoffField(const WhitneyRegions& regions, const SawtoothDomain& truncated)
    : regions_(&regions), domain_(truncated) {
    if (!truncated.truncation) throw ArgumentError("the cutoff needs a truncated sawtooth");
    const auto& wt = regions.whitney();
    for (int id : domain_.boxes) {
        bool edge = wt.on_domain_boundary(id);
        for (int nb : wt.neighbors(id))
            if (!domain_.has_box(nb)) edge = true;
        if (edge) sigma_.push_back(id);
    }
}

double CutoffField::bump(int id, const Point& x, Point* grad) const {
    const auto& wt = regions_->whitney();
    const auto& b = wt.box(id);
    const int n = wt.dim();
    const double theta = wt.theta();
    const double a = 0.5 * (1 + theta), c = 0.5 * (1 + 2 * theta);
    Point xc = b.center();
    double vals[3] = {1, 1, 1}, ders[3] = {0, 0, 0};
    for (int i = 0; i < n; ++i) {
        double t = (x[i] - xc[i]) / b.side;
        double at = std::fabs(t);
        if (at <= a) continue;
        if (at >= c) return 0;
        double u = (at - a) / (c - a);
        double smooth = u * u * u * (10 - 15 * u + 6 * u * u);
        vals[i] = 1 - smooth;
        double dsmooth = 30 * u * u * (1 - u) * (1 - u) / (c - a);
        ders[i] = -dsmooth * (t < 0 ? -1 : 1) / b.side;
    }
    double v = vals[0] * vals[1] * vals[2];
    if (grad) {
        for (int i = 0; i < 3; ++i) {
            double g = ders[i];
            for (int j = 0; j < 3; ++j)
                if (j != i) g *= vals[j];
            (*grad)[i] = i < n ? g : 0.0;
        }
    }
    return v;
}

CutoffValue CutoffField::evaluate(const Point& x) const {
    CutoffValue out;
    double num = 0, den = 0;
    Point gnum{0, 0, 0}, gden{0, 0, 0};
    for (int id : regions_->whitney().covering(x, 2)) {
        Point g{0, 0, 0};
        double phi = bump(id, x, &g);
        if (phi == 0 && g[0] == 0 && g[1] == 0 && g[2] == 0) continue;
        ++out.overlap;
        den += phi;
        gden = gden + g;
        if (domain_.has_box(id)) {
            num += phi;
            gnum = gnum + g;
        }
    }
    if (den > 0) {
        out.psi = num / den;
        out.grad = (1.0 / (den * den)) * (den * gnum - num * gden);
    }
    return out;
}

int CutoffField::associated_cube(int box, bool alternative) const {
    int best = -1;
    for (int c : domain_.cubes) {
        const auto& w = regions_->wq(c);
        if (!std::binary_search(w.begin(), w.end(), box)) continue;
        if (best < 0) {
            best = c;
            continue;
        }
        double lc = regions_->lattice().cube(c).length, lb = regions_->lattice().cube(best).length;
        if (alternative ? lc > lb : lc < lb) best = c;
    }
    return best;
}

double CutoffField::gradient_bound(int overlap) const {
    const int n = regions_->whitney().dim();
    const double theta = regions_->whitney().theta();
    double slope = std::sqrt(double(n)) * 15.0 / (4.0 * theta);
    double reach = (17.0 + 2 * theta) * std::sqrt(double(n));
    return 2.0 * overlap * slope * reach;
}

double sigma_boundary_mass(const CutoffField& cutoff, const std::function<double(int)>& omega, bool alternative) {
    double s = 0;
    for (int id : cutoff.wn_sigma()) {
        int c = cutoff.associated_cube(id, alternative);
        if (c >= 0) s += omega(c);
    }
    return s;
}

Cone::Cone(const WhitneyRegions& regions, const Point& q, ConeVariant variant, const ConeOptions& options)
    : gamma_(&regions.boundary()), regions_(&regions), q_(q), variant_(variant), options_(options) {
    const auto& lattice = regions.lattice();
    auto add = [&](int c) {
        if (!regions.has(c)) return;
        const auto& w = regions.wq(c);
        boxes_.insert(boxes_.end(), w.begin(), w.end());
    };
    switch (variant) {
        case ConeVariant::Standard: break;
        case ConeVariant::Dyadic:
        case ConeVariant::Fattened:
            level_ = variant == ConeVariant::Fattened ? 3 : 1;
            for (int k = lattice.k_min(); k <= lattice.k_max(); ++k) add(lattice.containing_cube(q, k));
            break;
        case ConeVariant::Local: {
            if (options.local_root < 0) throw ArgumentError("local cone needs a root cube");
            const auto& root = lattice.cube(options.local_root);
            for (int k = root.k; k <= lattice.k_max(); ++k) {
                int c = lattice.containing_cube(q, k);
                if (lattice.is_ancestor_or_self(options.local_root, c)) add(c);
            }
            break;
        }
        case ConeVariant::KappaTruncated:
            if (!(options.kappa > 0 && options.kappa <= 1)) throw ArgumentError("kappa must lie in (0, 1]");
            level_ = options.fattened ? 3 : 1;
            for (int c : regions.cubes()) {
                double l = lattice.cube(c).length;
                if (l >= options.kappa && l <= 1 / options.kappa) add(c);
            }
            break;
    }
    std::sort(boxes_.begin(), boxes_.end());
    boxes_.erase(std::unique(boxes_.begin(), boxes_.end()), boxes_.end());
}

Cone::Cone(const BoundarySet& gamma, const Point& q, const ConeOptions& options)
    : gamma_(&gamma), q_(q), variant_(ConeVariant::Standard), options_(options) {}

bool Cone::contains(const Point& x) const {
    auto standard = [&] {
        double r = dist(x, q_);
        if (options_.truncation > 0 && !(r < options_.truncation)) return false;
        return r < (1 + options_.aperture) * gamma_->distance(x);
    };
    auto in_boxes = [&] {
        for (int id : regions_->whitney().covering(x, level_))
            if (std::binary_search(boxes_.begin(), boxes_.end(), id)) return true;
        return false;
    };
    switch (variant_) {
        case ConeVariant::Standard: return standard();
        case ConeVariant::KappaTruncated: return standard() && in_boxes();
        default: return in_boxes();
    }
}

ConeInclusionReport check_cone_inclusion(const WhitneyRegions& regions, const Point& q, double alpha,
                                         const std::vector<Point>& points, double delta_lo, double delta_hi) {
    Cone dyadic(regions, q, ConeVariant::Dyadic);
    Cone fat(regions, q, ConeVariant::Fattened);
    const auto& gamma = regions.boundary();
    ConeInclusionReport rep;
    rep.tested = points.size();
    for (const auto& x : points) {
        double delta = gamma.distance(x);
        if (!(delta > 0)) continue;
        double ratio = dist(x, q) / delta;
        bool in_d = dyadic.contains(x);
        if (in_d) {
            ++rep.in_dyadic;
            rep.alpha1 = std::max(rep.alpha1, ratio - 1);
        }
        if (fat.contains(x)) rep.beta = std::max(rep.beta, ratio - 1);
        if (ratio < 1 + alpha && delta >= delta_lo && delta <= delta_hi) {
            ++rep.in_standard;
            if (!in_d) ++rep.standard_outside_dyadic;
        }
    }
    return rep;
}

}  // namespace hmlab
