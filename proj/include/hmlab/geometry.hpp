#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace hmlab {

// Points live in R^3; two-dimensional scenarios keep the last coordinate at 0.
using Point = std::array<double, 3>;

inline Point operator+(const Point& a, const Point& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Point operator-(const Point& a, const Point& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Point operator*(double s, const Point& a) { return {s * a[0], s * a[1], s * a[2]}; }

inline double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Point& a) { return std::sqrt(dot(a, a)); }
inline double dist(const Point& a, const Point& b) { return norm(a - b); }

struct AxisBox {
    Point lo{0, 0, 0};
    Point hi{0, 0, 0};

    Point center() const { return 0.5 * (lo + hi); }
    double side(int i) const { return hi[i] - lo[i]; }

    double diameter(int n) const {
        double s = 0;
        for (int i = 0; i < n; ++i) s += side(i) * side(i);
        return std::sqrt(s);
    }

    double volume(int n) const {
        double v = 1;
        for (int i = 0; i < n; ++i) v *= side(i);
        return v;
    }

    // Concentric dilation by factor f.
    AxisBox dilated(double f) const {
        AxisBox b;
        Point c = center();
        for (int i = 0; i < 3; ++i) {
            double h = 0.5 * f * side(i);
            b.lo[i] = c[i] - h;
            b.hi[i] = c[i] + h;
        }
        return b;
    }

    bool contains(const Point& x, int n) const {
        for (int i = 0; i < n; ++i)
            if (x[i] < lo[i] || x[i] > hi[i]) return false;
        return true;
    }

    bool contains_open(const Point& x, int n) const {
        for (int i = 0; i < n; ++i)
            if (x[i] <= lo[i] || x[i] >= hi[i]) return false;
        return true;
    }
};

inline double point_box_distance(const Point& x, const AxisBox& b, int n) {
    double s = 0;
    for (int i = 0; i < n; ++i) {
        double g = std::max({0.0, b.lo[i] - x[i], x[i] - b.hi[i]});
        s += g * g;
    }
    return std::sqrt(s);
}

inline Point clamp_to_box(const Point& x, const AxisBox& b, int n) {
    Point c = x;
    for (int i = 0; i < n; ++i) c[i] = std::clamp(x[i], b.lo[i], b.hi[i]);
    return c;
}

// Closed boxes share at least one point.
inline bool boxes_meet(const AxisBox& a, const AxisBox& b, int n) {
    for (int i = 0; i < n; ++i)
        if (a.hi[i] < b.lo[i] || b.hi[i] < a.lo[i]) return false;
    return true;
}

// Open interiors overlap.
inline bool boxes_overlap(const AxisBox& a, const AxisBox& b, int n) {
    for (int i = 0; i < n; ++i)
        if (a.hi[i] <= b.lo[i] || b.hi[i] <= a.lo[i]) return false;
    return true;
}

inline double box_box_distance(const AxisBox& a, const AxisBox& b, int n) {
    double s = 0;
    for (int i = 0; i < n; ++i) {
        double g = std::max({0.0, a.lo[i] - b.hi[i], b.lo[i] - a.hi[i]});
        s += g * g;
    }
    return std::sqrt(s);
}

struct Ball {
    Point center{0, 0, 0};
    double radius = 0;
};

}  // namespace hmlab
