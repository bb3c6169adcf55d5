#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "hmlab/boundary.hpp"

namespace hmlab {

// Uniform cell-centred lattice over an axis box. Cells whose centre lies within
// r_abs = r_abs_factor * h of the boundary are absorbing; the outer layer of
// cells is flagged as wall.
class Grid {
public:
    Grid(const BoundarySet& gamma, const AxisBox& box, double h, double r_abs_factor = 1.0);

    const BoundarySet& boundary() const { return *gamma_; }
    int dim() const { return n_; }
    const std::array<int, 3>& dims() const { return dims_; }
    double h() const { return h_; }
    const Point& origin() const { return box_.lo; }
    const AxisBox& box() const { return box_; }
    double r_abs() const { return r_abs_; }
    std::size_t size() const { return delta_.size(); }

    std::size_t index(int i, int j, int k) const { return std::size_t(i) + std::size_t(dims_[0]) * (std::size_t(j) + std::size_t(dims_[1]) * std::size_t(k)); }
    std::array<int, 3> coords(std::size_t idx) const;
    Point center(std::size_t idx) const;
    double delta(std::size_t idx) const { return delta_[idx]; }
    const std::vector<double>& deltas() const { return delta_; }
    bool absorbing(std::size_t idx) const { return absorbing_[idx] != 0; }
    bool wall(std::size_t idx) const;
    const std::vector<std::size_t>& absorbing_cells() const { return absorbing_list_; }
    // Position of a cell in absorbing_cells(), or -1.
    long absorbing_slot(std::size_t idx) const { return absorbing_slot_[idx]; }

    // Cell containing x, or -1 outside the box.
    long locate(const Point& x) const;
    double cell_volume() const;

    // Number of face-connected components of the absorbing cells.
    int absorbing_components() const;

private:
    const BoundarySet* gamma_;
    int n_;
    AxisBox box_;
    double h_;
    double r_abs_;
    std::array<int, 3> dims_{1, 1, 1};
    std::vector<double> delta_;
    std::vector<std::uint8_t> absorbing_;
    std::vector<std::size_t> absorbing_list_;
    std::vector<long> absorbing_slot_;
};

using Mat3 = std::array<std::array<double, 3>, 3>;

enum class OperatorPreset { PureWeight, Regularized, Anisotropic, Identity, Custom };

std::string to_string(OperatorPreset p);
OperatorPreset operator_preset_from_string(const std::string& name);

struct EllipticityReport {
    double c1 = 1;          // measured ellipticity constant against delta^(d-n+1)
    std::size_t samples = 0;
};

// Coefficient field A(X). Presets: delta^(d-n+1) Id, D(X)^(d-n+1) Id,
// delta^(d-n+1) diag(aniso), the identity (weight off, debugging), or a
// user-supplied symmetric matrix field.
struct OperatorField {
    OperatorPreset preset = OperatorPreset::PureWeight;
    double regularization_alpha = 1.0;
    std::array<double, 3> aniso{1.0, 2.0, 0.5};
    std::function<Mat3(const Point&)> custom;
    double declared_c1 = 0;  // 0: report only

    // A(X) with delta clamped below by `floor`.
    Mat3 matrix(const BoundarySet& gamma, const Point& x, double floor) const;

    // Symmetry, stencil compatibility (diagonal A) and ellipticity on a
    // deterministic sweep of the box; throws ValidationError on failure.
    EllipticityReport validate(const BoundarySet& gamma, const AxisBox& box, std::size_t samples = 10000) const;
};

}  // namespace hmlab
