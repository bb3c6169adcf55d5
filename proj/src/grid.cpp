#include "hmlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "hmlab/errors.hpp"
#include "hmlab/parallel.hpp"

namespace hmlab {

Grid::Grid(const BoundarySet& gamma, const AxisBox& box, double h, double r_abs_factor)
    : gamma_(&gamma), n_(gamma.ambient_dim()), box_(box), h_(h), r_abs_(r_abs_factor * h) {
    if (!(h > 0)) throw ArgumentError("grid spacing must be positive");
    if (!(r_abs_factor > 0)) throw ArgumentError("r_abs factor must be positive");
    for (int i = 0; i < 3; ++i) {
        if (i >= n_) {
            box_.lo[i] = box_.hi[i] = 0;
            dims_[i] = 1;
            continue;
        }
        double cells = box_.side(i) / h;
        int m = int(std::lround(cells));
        if (m < 2 || std::fabs(cells - m) > 1e-9 * std::max(1.0, cells))
            throw ArgumentError("grid box sides must be multiples of h with at least two cells");
        dims_[i] = m;
    }
    std::size_t total = std::size_t(dims_[0]) * dims_[1] * dims_[2];
    delta_.assign(total, 0);
    absorbing_.assign(total, 0);
    parallel_chunks(total, 4096, [&](std::size_t b, std::size_t e) {
        for (std::size_t idx = b; idx < e; ++idx) {
            delta_[idx] = gamma.distance(center(idx));
            absorbing_[idx] = delta_[idx] <= r_abs_;
        }
    });
    absorbing_slot_.assign(total, -1);
    for (std::size_t idx = 0; idx < total; ++idx)
        if (absorbing_[idx]) {
            absorbing_slot_[idx] = long(absorbing_list_.size());
            absorbing_list_.push_back(idx);
        }
}

std::array<int, 3> Grid::coords(std::size_t idx) const {
    int i = int(idx % dims_[0]);
    idx /= dims_[0];
    int j = int(idx % dims_[1]);
    int k = int(idx / dims_[1]);
    return {i, j, k};
}

Point Grid::center(std::size_t idx) const {
    auto c = coords(idx);
    Point p{0, 0, 0};
    for (int i = 0; i < n_; ++i) p[i] = box_.lo[i] + (c[i] + 0.5) * h_;
    return p;
}

bool Grid::wall(std::size_t idx) const {
    auto c = coords(idx);
    for (int i = 0; i < n_; ++i)
        if (c[i] == 0 || c[i] == dims_[i] - 1) return true;
    return false;
}

long Grid::locate(const Point& x) const {
    std::array<int, 3> c{0, 0, 0};
    for (int i = 0; i < n_; ++i) {
        double t = (x[i] - box_.lo[i]) / h_;
        if (!(t >= 0) || t > dims_[i]) return -1;
        c[i] = std::min(dims_[i] - 1, int(std::floor(t)));
    }
    return long(index(c[0], c[1], c[2]));
}

double Grid::cell_volume() const { return std::pow(h_, n_); }

int Grid::absorbing_components() const {
    std::vector<char> seen(size(), 0);
    int components = 0;
    std::vector<std::size_t> stack;
    for (std::size_t start : absorbing_list_) {
        if (seen[start]) continue;
        ++components;
        seen[start] = 1;
        stack.push_back(start);
        while (!stack.empty()) {
            std::size_t idx = stack.back();
            stack.pop_back();
            auto c = coords(idx);
            for (int ax = 0; ax < n_; ++ax)
                for (int s : {-1, 1}) {
                    auto o = c;
                    o[ax] += s;
                    if (o[ax] < 0 || o[ax] >= dims_[ax]) continue;
                    std::size_t nb = index(o[0], o[1], o[2]);
                    if (absorbing_[nb] && !seen[nb]) {
                        seen[nb] = 1;
                        stack.push_back(nb);
                    }
                }
        }
    }
    return components;
}

std::string to_string(OperatorPreset p) {
    switch (p) {
        case OperatorPreset::PureWeight: return "pure_weight";
        case OperatorPreset::Regularized: return "regularized";
        case OperatorPreset::Anisotropic: return "anisotropic";
        case OperatorPreset::Identity: return "identity";
        case OperatorPreset::Custom: return "custom";
    }
    return "?";
}

OperatorPreset operator_preset_from_string(const std::string& name) {
    for (auto p : {OperatorPreset::PureWeight, OperatorPreset::Regularized, OperatorPreset::Anisotropic,
                   OperatorPreset::Identity})
        if (to_string(p) == name) return p;
    throw ConfigError("unknown operator preset '" + name + "'");
}

Mat3 OperatorField::matrix(const BoundarySet& gamma, const Point& x, double floor) const {
    Mat3 a{};
    const int n = gamma.ambient_dim();
    auto weight = [&](double dist) { return std::pow(std::max(dist, floor), gamma.weight_exponent()); };
    switch (preset) {
        case OperatorPreset::PureWeight: {
            double w = weight(gamma.distance(x));
            for (int i = 0; i < n; ++i) a[i][i] = w;
            break;
        }
        case OperatorPreset::Regularized: {
            double w = weight(gamma.regularized_distance(x, regularization_alpha));
            for (int i = 0; i < n; ++i) a[i][i] = w;
            break;
        }
        case OperatorPreset::Anisotropic: {
            double w = weight(gamma.distance(x));
            for (int i = 0; i < n; ++i) a[i][i] = w * aniso[i];
            break;
        }
        case OperatorPreset::Identity:
            for (int i = 0; i < n; ++i) a[i][i] = 1;
            break;
        case OperatorPreset::Custom:
            if (!custom) throw ValidationError("custom operator preset without a coefficient field");
            a = custom(x);
            break;
    }
    return a;
}

EllipticityReport OperatorField::validate(const BoundarySet& gamma, const AxisBox& box, std::size_t samples) const {
    const int n = gamma.ambient_dim();
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<Point> pts(samples, Point{0, 0, 0});
    for (auto& p : pts)
        for (int i = 0; i < n; ++i) p[i] = box.lo[i] + unit(rng) * box.side(i);

    std::vector<double> ratio(samples, 1.0);
    std::vector<int> failure(samples, 0);
    parallel_chunks(samples, 256, [&](std::size_t b, std::size_t e) {
        for (std::size_t s = b; s < e; ++s) {
            double dist = gamma.distance(pts[s]);
            if (!(dist > 0)) continue;
            Mat3 a = matrix(gamma, pts[s], 0.0);
            double scale = 0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) scale = std::max(scale, std::fabs(a[i][j]));
            for (int i = 0; i < n && !failure[s]; ++i)
                for (int j = 0; j < n; ++j) {
                    if (!std::isfinite(a[i][j])) failure[s] = 3;
                    else if (std::fabs(a[i][j] - a[j][i]) > 1e-12 * scale) failure[s] = 1;
                    else if (i != j && a[i][j] != 0) failure[s] = 2;
                }
            if (failure[s]) continue;
            double w = std::pow(dist, gamma.weight_exponent());
            double lo = a[0][0], hi = a[0][0];
            for (int i = 1; i < n; ++i) {
                lo = std::min(lo, a[i][i]);
                hi = std::max(hi, a[i][i]);
            }
            if (!(lo > 0)) {
                failure[s] = 4;
                continue;
            }
            ratio[s] = std::max(hi / w, w / lo);
        }
    });
    for (int f : failure) {
        if (f == 1) throw ValidationError("coefficient matrix is not symmetric");
        if (f == 2) throw ValidationError("off-diagonal coefficients are not supported by the 2n+1 stencil");
        if (f == 3) throw ValidationError("coefficient matrix has non-finite entries");
        if (f == 4) throw ValidationError("coefficient matrix is not positive definite");
    }
    EllipticityReport rep;
    rep.samples = samples;
    rep.c1 = *std::max_element(ratio.begin(), ratio.end());
    if (preset != OperatorPreset::Identity && declared_c1 > 0 && rep.c1 > declared_c1 * (1 + 1e-9))
        throw ValidationError("ellipticity constant " + std::to_string(rep.c1) + " exceeds the declared " +
                              std::to_string(declared_c1));
    return rep;
}

}  // namespace hmlab
