#include "hmlab/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/geometry.hpp>
#include <boost/geometry/index/rtree.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

#include "hmlab/errors.hpp"
#include "hmlab/stats.hpp"

namespace hmlab {

namespace bg = boost::geometry;
namespace bgi = boost::geometry::index;

using RPoint = bg::model::point<double, 3, bg::cs::cartesian>;
using RBox = bg::model::box<RPoint>;
using RValue = std::pair<RPoint, std::size_t>;

struct BoundarySet::Index {
    bgi::rtree<RValue, bgi::rstar<16>> tree;
};

namespace {

RPoint to_rpoint(const Point& p) { return RPoint(p[0], p[1], p[2]); }

RBox to_rbox(const AxisBox& b) { return RBox(to_rpoint(b.lo), to_rpoint(b.hi)); }

double segment_point_param(const Point& a, const Point& b, const Point& x) {
    Point ab = b - a;
    double l2 = dot(ab, ab);
    if (l2 == 0) return 0;
    return std::clamp(dot(x - a, ab) / l2, 0.0, 1.0);
}

// Minimum of a convex function on [lo, hi] by ternary search.
template <class F>
double convex_min(F f, double lo, double hi) {
    for (int it = 0; it < 100 && hi - lo > 0; ++it) {
        double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
        if (f(m1) <= f(m2))
            hi = m2;
        else
            lo = m1;
    }
    return f(0.5 * (lo + hi));
}

double segment_box_distance(const Point& a, const Point& b, const AxisBox& box, int n) {
    auto f = [&](double t) { return point_box_distance(a + t * (b - a), box, n); };
    return std::min({convex_min(f, 0.0, 1.0), f(0.0), f(1.0)});
}

// Global minimum of an L-Lipschitz function on [lo, hi]: branch and bound to a
// coarse tolerance, then Brent polishing on each surviving cluster.
template <class F>
double lipschitz_min(F f, double lo, double hi, double lip, double* argmin = nullptr) {
    struct Interval {
        double a, b, mid_value;
    };
    double width = hi - lo;
    if (!(width > 0)) {
        if (argmin) *argmin = lo;
        return f(lo);
    }
    double best = std::numeric_limits<double>::infinity();
    double best_t = lo;
    auto consider = [&](double t, double v) {
        if (v < best) {
            best = v;
            best_t = t;
        }
    };
    consider(lo, f(lo));
    consider(hi, f(hi));
    int pieces = 16;
    std::vector<Interval> live;
    for (int i = 0; i < pieces; ++i) {
        double a = lo + width * i / pieces, b = lo + width * (i + 1) / pieces;
        double m = 0.5 * (a + b);
        double v = f(m);
        consider(m, v);
        live.push_back({a, b, v});
    }
    double stop = 1e-5 * width;
    double slack = 1e-12;
    while (!live.empty() && live.front().b - live.front().a > stop) {
        std::vector<Interval> next;
        for (const auto& iv : live) {
            double lb = iv.mid_value - lip * 0.5 * (iv.b - iv.a);
            if (lb > best + slack) continue;
            double m = 0.5 * (iv.a + iv.b);
            for (auto [a, b] : {std::pair{iv.a, m}, std::pair{m, iv.b}}) {
                double c = 0.5 * (a + b);
                double v = f(c);
                consider(c, v);
                next.push_back({a, b, v});
            }
        }
        live.swap(next);
        if (live.size() > 4096) {
            std::sort(live.begin(), live.end(), [](const Interval& x, const Interval& y) { return x.mid_value < y.mid_value; });
            live.resize(4096);
        }
    }
    std::vector<Interval> keep;
    for (const auto& iv : live)
        if (iv.mid_value - lip * 0.5 * (iv.b - iv.a) <= best + slack) keep.push_back(iv);
    std::sort(keep.begin(), keep.end(), [](const Interval& x, const Interval& y) { return x.a < y.a; });
    std::vector<std::pair<double, double>> clusters;
    for (const auto& iv : keep) {
        if (!clusters.empty() && iv.a <= clusters.back().second)
            clusters.back().second = iv.b;
        else
            clusters.push_back({iv.a, iv.b});
    }
    for (auto [a, b] : clusters) {
        double h = b - a;
        a = std::max(lo, a - h);
        b = std::min(hi, b + h);
        auto r = boost::math::tools::brent_find_minima(f, a, b, std::numeric_limits<double>::digits / 2 + 4);
        consider(r.first, r.second);
    }
    if (argmin) *argmin = best_t;
    return best;
}

}  // namespace

std::string to_string(GammaKind kind) {
    switch (kind) {
        case GammaKind::Flat: return "flat";
        case GammaKind::LipschitzGraph: return "lipschitz_graph";
        case GammaKind::Polyline: return "polyline";
        case GammaKind::PointCloud: return "point_cloud";
    }
    return "unknown";
}

GammaKind gamma_kind_from_string(const std::string& name) {
    if (name == "flat") return GammaKind::Flat;
    if (name == "lipschitz_graph") return GammaKind::LipschitzGraph;
    if (name == "polyline") return GammaKind::Polyline;
    if (name == "point_cloud") return GammaKind::PointCloud;
    throw ConfigError("unknown gamma kind '" + name + "'");
}

double GammaSpec::lipschitz_constant() const {
    switch (kind) {
        case GammaKind::Flat: return 0;
        case GammaKind::LipschitzGraph: return std::fabs(amplitude * frequency);
        case GammaKind::Polyline: {
            double l = 0;
            for (std::size_t i = 1; i < vertices.size(); ++i) {
                Point v = vertices[i] - vertices[i - 1];
                if (v[0] != 0) l = std::max(l, std::hypot(v[1], v[2]) / std::fabs(v[0]));
                else l = std::numeric_limits<double>::infinity();
            }
            return l;
        }
        case GammaKind::PointCloud: return std::numeric_limits<double>::quiet_NaN();
    }
    return 0;
}

BoundarySet::BoundarySet(int n, int d, GammaSpec spec, const AxisBox& footprint, double spacing)
    : n_(n), d_(d), spec_(std::move(spec)), footprint_(footprint), index_(std::make_unique<Index>()) {
    if (n < 2 || n > 3) throw ArgumentError("ambient dimension must be 2 or 3");
    if (d < 0 || d >= n - 1) throw ArgumentError("codimension >= 2 required (need 0 <= d < n-1)");
    for (int i = n; i < 3; ++i) {
        footprint_.lo[i] = 0;
        footprint_.hi[i] = 0;
    }
    auto curve_kind = spec_.kind == GammaKind::LipschitzGraph || spec_.kind == GammaKind::Polyline ||
                      (spec_.kind == GammaKind::Flat && d == 1);
    if (curve_kind) {
        if (d != 1) throw ArgumentError("curve boundaries have dimension 1");
        if (!(spacing > 0)) throw ArgumentError("sample spacing must be positive");
        double t0, t1;
        if (spec_.kind == GammaKind::Polyline) {
            if (spec_.vertices.size() < 2) throw ArgumentError("polyline needs at least two vertices");
            poly_arc_.assign(1, 0.0);
            for (std::size_t i = 1; i < spec_.vertices.size(); ++i)
                poly_arc_.push_back(poly_arc_.back() + dist(spec_.vertices[i], spec_.vertices[i - 1]));
            t0 = 0;
            t1 = poly_arc_.back();
        } else {
            t0 = footprint_.lo[0];
            t1 = footprint_.hi[0];
        }
        if (!(t1 > t0)) throw ArgumentError("empty boundary footprint");
        std::size_t cells = std::max<std::size_t>(1, std::size_t(std::ceil((t1 - t0) / spacing - 1e-9)));
        double dt = (t1 - t0) / double(cells);
        double s0 = 0;
        if (spec_.kind == GammaKind::LipschitzGraph && t0 != 0) {
            s0 = boost::math::quadrature::gauss_kronrod<double, 31>::integrate([this](double t) { return speed(t); }, 0.0, t0, 15, 1e-13);
        } else if (spec_.kind != GammaKind::LipschitzGraph) {
            s0 = t0;
        }
        cell_t_.resize(cells + 1);
        cell_s_.resize(cells + 1);
        cell_t_[0] = t0;
        cell_s_[0] = s0;
        for (std::size_t i = 0; i < cells; ++i) {
            double a = t0 + dt * double(i), b = (i + 1 == cells) ? t1 : t0 + dt * double(i + 1);
            double m = 0.5 * (a + b);
            double len = (b - a) * (speed(a) + 4 * speed(m) + speed(b)) / 6.0;
            cell_t_[i + 1] = b;
            cell_s_[i + 1] = cell_s_[i] + len;
            samples_.push_back(curve(m));
            params_.push_back(m);
            weights_.push_back(len);
            arc_.push_back(cell_s_[i] + 0.5 * len);
            spacing_ = std::max(spacing_, len);
        }
        arc_lo_ = cell_s_.front();
        arc_hi_ = cell_s_.back();
    } else if (spec_.kind == GammaKind::Flat) {
        samples_.push_back({0, 0, 0});
        weights_.push_back(1.0);
        spacing_ = 0;
    } else {
        if (spec_.points.empty()) throw ArgumentError("point cloud is empty");
        samples_ = spec_.points;
        for (auto& p : samples_)
            for (int i = n; i < 3; ++i) p[i] = 0;
        if (d == 1) {
            if (samples_.size() < 2) throw ArgumentError("a one-dimensional point cloud needs at least two points");
            std::vector<double> gap(samples_.size() - 1);
            for (std::size_t i = 0; i + 1 < samples_.size(); ++i) gap[i] = dist(samples_[i], samples_[i + 1]);
            double s = 0;
            for (std::size_t i = 0; i < samples_.size(); ++i) {
                double left = i > 0 ? gap[i - 1] : 0.0, right = i + 1 < samples_.size() ? gap[i] : 0.0;
                double w = 0.5 * (left + right);
                if (i == 0) w = right;
                if (i + 1 == samples_.size()) w = left;
                if (i > 0) s += gap[i - 1];
                weights_.push_back(w);
                arc_.push_back(s);
                spacing_ = std::max(spacing_, std::max(left, right));
            }
            arc_lo_ = arc_.front() - 0.5 * weights_.front();
            arc_hi_ = arc_.back() + 0.5 * weights_.back();
        } else {
            if (!spec_.weights.empty() && spec_.weights.size() != samples_.size())
                throw ArgumentError("point cloud weights must match the points");
            weights_ = spec_.weights.empty() ? std::vector<double>(samples_.size(), 1.0) : spec_.weights;
            double sep = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < samples_.size(); ++i)
                for (std::size_t j = i + 1; j < samples_.size(); ++j) sep = std::min(sep, dist(samples_[i], samples_[j]));
            spacing_ = std::isfinite(sep) ? sep : 0.0;
        }
        for (double w : weights_)
            if (!(w > 0)) throw ArgumentError("sigma weights must be strictly positive");
    }
    std::vector<RValue> values;
    values.reserve(samples_.size());
    for (std::size_t i = 0; i < samples_.size(); ++i) values.emplace_back(to_rpoint(samples_[i]), i);
    index_->tree = bgi::rtree<RValue, bgi::rstar<16>>(values.begin(), values.end());
}

BoundarySet::~BoundarySet() = default;
BoundarySet::BoundarySet(BoundarySet&&) noexcept = default;
BoundarySet& BoundarySet::operator=(BoundarySet&&) noexcept = default;

double BoundarySet::total_mass() const {
    double s = 0;
    for (double w : weights_) s += w;
    return s;
}

Point BoundarySet::curve(double t) const {
    switch (spec_.kind) {
        case GammaKind::LipschitzGraph: return {t, spec_.amplitude * std::sin(spec_.frequency * t), 0.0};
        case GammaKind::Polyline: {
            std::size_t i = std::upper_bound(poly_arc_.begin(), poly_arc_.end(), t) - poly_arc_.begin();
            i = std::clamp<std::size_t>(i, 1, poly_arc_.size() - 1);
            double len = poly_arc_[i] - poly_arc_[i - 1];
            double u = len > 0 ? std::clamp((t - poly_arc_[i - 1]) / len, 0.0, 1.0) : 0.0;
            const Point& a = spec_.vertices[i - 1];
            const Point& b = spec_.vertices[i];
            return a + u * (b - a);
        }
        default: return {t, 0.0, 0.0};
    }
}

double BoundarySet::speed(double t) const {
    if (spec_.kind == GammaKind::LipschitzGraph) {
        double s = spec_.amplitude * spec_.frequency * std::cos(spec_.frequency * t);
        return std::sqrt(1 + s * s);
    }
    return 1.0;
}

double BoundarySet::param_of_arc(double s) const {
    if (spec_.kind != GammaKind::LipschitzGraph) return s;
    if (cell_s_.empty()) return s;
    if (s <= cell_s_.front()) return cell_t_.front() + (s - cell_s_.front()) / speed(cell_t_.front());
    if (s >= cell_s_.back()) return cell_t_.back() + (s - cell_s_.back()) / speed(cell_t_.back());
    std::size_t i = std::upper_bound(cell_s_.begin(), cell_s_.end(), s) - cell_s_.begin();
    double u = (s - cell_s_[i - 1]) / (cell_s_[i] - cell_s_[i - 1]);
    return cell_t_[i - 1] + u * (cell_t_[i] - cell_t_[i - 1]);
}

Point BoundarySet::arc_point(double s) const {
    if (!is_curve()) throw ArgumentError("arc_point is defined for curves only");
    if (spec_.kind == GammaKind::PointCloud) {
        std::size_t i = std::lower_bound(arc_.begin(), arc_.end(), s) - arc_.begin();
        if (i == 0) return samples_.front();
        if (i >= arc_.size()) return samples_.back();
        double u = (s - arc_[i - 1]) / (arc_[i] - arc_[i - 1]);
        return samples_[i - 1] + u * (samples_[i] - samples_[i - 1]);
    }
    return curve(param_of_arc(s));
}

Point BoundarySet::nearest_point(const Point& xin) const {
    Point x = xin;
    for (int i = n_; i < 3; ++i) x[i] = 0;
    switch (spec_.kind) {
        case GammaKind::Flat:
            if (d_ == 1) return {x[0], 0.0, 0.0};
            return {0.0, 0.0, 0.0};
        case GammaKind::LipschitzGraph: {
            double r = dist(x, curve(x[0]));
            double t = x[0];
            double lip = std::sqrt(1 + std::pow(spec_.amplitude * spec_.frequency, 2));
            lipschitz_min([&](double u) { return dist(x, curve(u)); }, x[0] - r, x[0] + r, lip, &t);
            return curve(t);
        }
        case GammaKind::Polyline: {
            Point best = spec_.vertices.front();
            double bd = std::numeric_limits<double>::infinity();
            for (std::size_t i = 1; i < spec_.vertices.size(); ++i) {
                const Point& a = spec_.vertices[i - 1];
                const Point& b = spec_.vertices[i];
                Point p = a + segment_point_param(a, b, x) * (b - a);
                double dd = dist(p, x);
                if (dd < bd) {
                    bd = dd;
                    best = p;
                }
            }
            return best;
        }
        case GammaKind::PointCloud: return samples_[nearest_sample(x)];
    }
    return x;
}

double BoundarySet::distance(const Point& xin) const {
    Point x = xin;
    for (int i = n_; i < 3; ++i) x[i] = 0;
    if (spec_.kind == GammaKind::Flat) return d_ == 1 ? std::hypot(x[1], x[2]) : norm(x);
    if (spec_.kind == GammaKind::LipschitzGraph) {
        double r = dist(x, curve(x[0]));
        if (r == 0) return 0;
        double lip = std::sqrt(1 + std::pow(spec_.amplitude * spec_.frequency, 2));
        return lipschitz_min([&](double u) { return dist(x, curve(u)); }, x[0] - r, x[0] + r, lip);
    }
    return dist(x, nearest_point(x));
}

double BoundarySet::on_boundary_tolerance() const {
    if (spec_.kind == GammaKind::PointCloud && d_ == 1) return spacing_;
    return 1e-9;
}

bool BoundarySet::on_boundary(const Point& x) const {
    return distance(x) <= on_boundary_tolerance() * std::max(1.0, norm(x));
}

double BoundarySet::weight(const Point& x) const {
    double delta = distance(x);
    if (!(delta > 0)) throw SingularPointError("weight evaluated on the boundary");
    return std::pow(delta, weight_exponent());
}

double BoundarySet::clamped_weight(const Point& x, double floor) const {
    return std::pow(std::max(distance(x), floor), weight_exponent());
}

double BoundarySet::regularized_distance(const Point& xin, double alpha) const {
    if (!(alpha > 0)) throw ArgumentError("regularized distance needs alpha > 0");
    Point x = xin;
    for (int i = n_; i < 3; ++i) x[i] = 0;
    double delta = distance(x);
    if (!(delta > 0)) throw SingularPointError("regularized distance evaluated on the boundary");
    double power = -(double(d_) + alpha);
    if (!is_curve() || spec_.kind == GammaKind::PointCloud) {
        if (spec_.kind == GammaKind::PointCloud && d_ == 1 && delta < 2 * spacing_)
            throw ResolutionError("boundary sampling too coarse for the regularized distance at this point");
        long double s = 0;
        for (std::size_t i = 0; i < samples_.size(); ++i) s += weights_[i] * std::pow(dist(x, samples_[i]), power);
        return std::pow(double(s), -1.0 / alpha);
    }
    auto integrand = [&](double t) { return std::pow(dist(x, curve(t)), power) * speed(t); };
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    double total = 0, err_total = 0;
    auto add = [&](double a, double b) {
        double err = 0;
        double v = GK::integrate(integrand, a, b, 20, 1e-12, &err);
        total += v;
        err_total += err;
    };
    if (spec_.kind == GammaKind::Polyline) {
        for (std::size_t i = 1; i < poly_arc_.size(); ++i) {
            const Point& a = spec_.vertices[i - 1];
            const Point& b = spec_.vertices[i];
            double u = segment_point_param(a, b, x);
            double tm = poly_arc_[i - 1] + u * (poly_arc_[i] - poly_arc_[i - 1]);
            if (tm > poly_arc_[i - 1]) add(poly_arc_[i - 1], tm);
            if (tm < poly_arc_[i]) add(tm, poly_arc_[i]);
        }
    } else {
        double tc = spec_.kind == GammaKind::Flat ? x[0] : 0;
        if (spec_.kind == GammaKind::LipschitzGraph) {
            double r = dist(x, curve(x[0]));
            double lip = std::sqrt(1 + std::pow(spec_.amplitude * spec_.frequency, 2));
            lipschitz_min([&](double u) { return dist(x, curve(u)); }, x[0] - r, x[0] + r, lip, &tc);
        }
        // Resolve the peak of width ~delta around the nearest parameter, then
        // integrate the algebraic tails on half-lines.
        double w = std::max(1.0, 8 * delta);
        std::vector<double> cuts = {tc - w, tc - delta, tc, tc + delta, tc + w};
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) add(cuts[i], cuts[i + 1]);
        boost::math::quadrature::exp_sinh<double> tail;
        double err = 0;
        total += tail.integrate([&](double u) { return integrand(tc + w + u); }, 0.0, std::numeric_limits<double>::infinity(), 1e-12, &err);
        err_total += err;
        total += tail.integrate([&](double u) { return integrand(tc - w - u); }, 0.0, std::numeric_limits<double>::infinity(), 1e-12, &err);
        err_total += err;
    }
    if (!(total > 0) || !std::isfinite(total) || err_total > 1e-6 * total)
        throw ResolutionError("regularized distance quadrature did not converge");
    return std::pow(total, -1.0 / alpha);
}

double BoundarySet::graph_box_distance(const AxisBox& box, double t_lo, double t_hi) const {
    double lip = std::sqrt(1 + std::pow(spec_.amplitude * spec_.frequency, 2));
    double tc = std::clamp(box.center()[0], t_lo, t_hi);
    double upper = point_box_distance(curve(tc), box, n_);
    if (upper == 0) return 0;
    double a = std::max(t_lo, box.lo[0] - upper), b = std::min(t_hi, box.hi[0] + upper);
    if (!(b > a)) return upper;
    return std::min(upper, lipschitz_min([&](double u) { return point_box_distance(curve(u), box, n_); }, a, b, lip));
}

double BoundarySet::box_distance(const AxisBox& box) const {
    switch (spec_.kind) {
        case GammaKind::Flat: {
            if (d_ == 0) return point_box_distance({0, 0, 0}, box, n_);
            double gy = std::max({0.0, box.lo[1], -box.hi[1]});
            double gz = std::max({0.0, box.lo[2], -box.hi[2]});
            return std::hypot(gy, gz);
        }
        case GammaKind::LipschitzGraph: {
            const double inf = std::numeric_limits<double>::infinity();
            return graph_box_distance(box, -inf, inf);
        }
        case GammaKind::Polyline: {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 1; i < spec_.vertices.size(); ++i)
                best = std::min(best, segment_box_distance(spec_.vertices[i - 1], spec_.vertices[i], box, n_));
            return best;
        }
        case GammaKind::PointCloud: {
            std::vector<RValue> out;
            index_->tree.query(bgi::nearest(to_rbox(box), 1), std::back_inserter(out));
            return point_box_distance(samples_[out.front().second], box, n_);
        }
    }
    return 0;
}

double BoundarySet::arc_box_distance(double s0, double s1, const AxisBox& box) const {
    if (!is_curve()) throw ArgumentError("arc_box_distance is defined for curves only");
    switch (spec_.kind) {
        case GammaKind::Flat: {
            double gx = std::max({0.0, box.lo[0] - s1, s0 - box.hi[0]});
            double gy = std::max({0.0, box.lo[1], -box.hi[1]});
            double gz = std::max({0.0, box.lo[2], -box.hi[2]});
            return std::sqrt(gx * gx + gy * gy + gz * gz);
        }
        case GammaKind::LipschitzGraph: return graph_box_distance(box, param_of_arc(s0), param_of_arc(s1));
        case GammaKind::Polyline: {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 1; i < poly_arc_.size(); ++i) {
                double a = std::max(s0, poly_arc_[i - 1]), b = std::min(s1, poly_arc_[i]);
                if (b < a) continue;
                best = std::min(best, segment_box_distance(curve(a), curve(b), box, n_));
            }
            return best;
        }
        case GammaKind::PointCloud: {
            double best = std::numeric_limits<double>::infinity();
            auto lo = std::lower_bound(arc_.begin(), arc_.end(), s0) - arc_.begin();
            for (std::size_t i = lo; i < arc_.size() && arc_[i] <= s1; ++i)
                best = std::min(best, point_box_distance(samples_[i], box, n_));
            return best;
        }
    }
    return 0;
}

std::size_t BoundarySet::nearest_sample(const Point& x) const {
    std::vector<RValue> out;
    index_->tree.query(bgi::nearest(to_rpoint(x), 1), std::back_inserter(out));
    return out.front().second;
}

std::vector<std::size_t> BoundarySet::samples_in_box(const AxisBox& box) const {
    std::vector<RValue> out;
    index_->tree.query(bgi::intersects(to_rbox(box)), std::back_inserter(out));
    std::vector<std::size_t> ids;
    ids.reserve(out.size());
    for (auto& v : out) ids.push_back(v.second);
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::vector<std::size_t> BoundarySet::samples_in_ball(const Point& q, double r) const {
    AxisBox box{{q[0] - r, q[1] - r, q[2] - r}, {q[0] + r, q[1] + r, q[2] + r}};
    std::vector<std::size_t> ids;
    for (std::size_t i : samples_in_box(box))
        if (dist(samples_[i], q) < r) ids.push_back(i);
    return ids;
}

double BoundarySet::sigma_ball(const Point& q, double r) const {
    double s = 0;
    for (std::size_t i : samples_in_ball(q, r)) s += weights_[i];
    return s;
}

AhlforsFit BoundarySet::ahlfors_fit(const std::vector<std::size_t>& centers, const std::vector<double>& radii) const {
    std::vector<double> xs, ys;
    AhlforsFit fit;
    for (std::size_t c : centers) {
        for (double r : radii) {
            double s = sigma_ball(samples_[c], r);
            if (!(s > 0)) continue;
            xs.push_back(r);
            ys.push_back(s);
            double rd = std::pow(r, d_);
            fit.constant = std::max({fit.constant, s / rd, rd / s});
            ++fit.balls;
        }
    }
    fit.slope = fit_loglog(xs, ys).slope;
    return fit;
}

}  // namespace hmlab
