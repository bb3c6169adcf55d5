#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "hmlab/grid.hpp"

namespace hmlab {

enum class WallMode { Reflecting, Dirichlet };

enum class Preconditioner { Jacobi, Multigrid };

struct SolverOptions {
    Preconditioner preconditioner = Preconditioner::Multigrid;
    double tolerance = 1e-10;     // relative residual
    int max_iterations = 100000;
    int stagnation_window = 500;  // iterations without a new best residual
    int refinement_steps = 6;     // extended-precision refinement for measure rows
};

// Finite-volume system for L = -div(A grad) on a grid. Absorbing cells (and
// the outer layer with Dirichlet walls) carry prescribed values; the unknowns
// are the remaining cells.
class System {
public:
    System(const Grid& grid, const OperatorField& op, WallMode walls = WallMode::Reflecting);

    const Grid& grid() const { return *grid_; }
    WallMode walls() const { return walls_; }
    const EllipticityReport& ellipticity() const { return ellipticity_; }
    bool fixed(std::size_t idx) const { return fixed_[idx] != 0; }
    std::size_t unknowns() const { return unknowns_; }

    // Conductivity of the face between idx and idx + e_axis (0 past the box).
    double face(int axis, std::size_t idx) const { return face_[axis][idx]; }
    double diagonal(std::size_t idx) const { return diag_[idx]; }
    // Full operator row of a cell: (column, coefficient) pairs, diagonal first.
    std::vector<std::pair<std::size_t, double>> row(std::size_t idx) const;

    // y = A_II x over the unknowns; x must vanish on fixed cells.
    void apply(const std::vector<double>& x, std::vector<double>& y) const;
    // r = b - A_II x in extended precision.
    void residual(const std::vector<double>& b, const std::vector<double>& x, std::vector<long double>& r) const;
    // Right-hand side contributed by prescribed values on fixed cells.
    std::vector<double> boundary_rhs(const std::vector<double>& fixed_values) const;

    template <class F>
    void for_each_neighbor(std::size_t idx, F&& f) const;

    // Aggregation multigrid hierarchy, built on first use.
    struct Hierarchy;
    const Hierarchy& hierarchy() const;
    ~System();
    System(System&&) noexcept;

private:
    const Grid* grid_;
    WallMode walls_;
    EllipticityReport ellipticity_;
    std::array<std::vector<double>, 3> face_;
    std::vector<double> diag_;
    std::vector<std::uint8_t> fixed_;
    std::array<std::size_t, 3> stride_{1, 1, 1};
    std::size_t unknowns_ = 0;
    mutable std::unique_ptr<Hierarchy> hierarchy_;
    mutable std::unique_ptr<std::once_flag> hierarchy_once_ = std::make_unique<std::once_flag>();
};

template <class F>
void System::for_each_neighbor(std::size_t idx, F&& f) const {
    auto c = grid_->coords(idx);
    const auto& dims = grid_->dims();
    for (int ax = 0; ax < grid_->dim(); ++ax) {
        if (c[ax] + 1 < dims[ax]) f(idx + stride_[ax], face_[ax][idx]);
        if (c[ax] > 0) f(idx - stride_[ax], face_[ax][idx - stride_[ax]]);
    }
}

struct SolveStats {
    double residual = 0;   // final relative residual
    int iterations = 0;
};

// Preconditioned conjugate gradient on A_II x = b.
// Throws SolverError on stagnation.
SolveStats conjugate_gradient(const System& system, const std::vector<double>& b, std::vector<double>& x,
                              const SolverOptions& options = {});

// CG followed by extended-precision iterative refinement.
SolveStats refined_solve(const System& system, const std::vector<double>& b, std::vector<double>& x,
                         const SolverOptions& options = {});

struct DirichletData {
    std::vector<double> absorbing;                  // per absorbing slot
    std::function<double(const Point&)> wall;        // Dirichlet walls only
    std::string descriptor;
};

struct SolutionField {
    std::vector<double> u;          // per cell, fixed cells carry their data
    std::string descriptor;
    double data_min = 0;
    double data_max = 0;
    double residual = 0;
    int iterations = 0;

    double at(std::size_t idx) const { return u[idx]; }
    // Largest excursion outside [data_min, data_max] over the unknowns.
    double max_principle_violation(const System& system) const;
};

SolutionField solve_dirichlet(const System& system, const DirichletData& data, const SolverOptions& options = {});

struct GreenField {
    Point pole{0, 0, 0};
    std::size_t pole_cell = 0;
    std::vector<double> g;     // per cell, zero on fixed cells
    double residual = 0;
    int iterations = 0;
    double at(std::size_t idx) const { return g[idx]; }
};

// G(., Y) with unit discrete mass at Y's cell; throws ArgumentError when Y is
// outside the grid or in a fixed cell.
GreenField green_function(const System& system, const Point& pole, const SolverOptions& options = {});

struct HarmonicMeasureRow {
    Point pole{0, 0, 0};
    std::vector<double> p;     // per absorbing slot
    double total() const;
    double min() const;
    // Mass of the absorbing slots with flag set.
    double mass(const std::vector<char>& in_set) const;
};

// Full row from one adjoint solve: p(c) = sum over unknown neighbours i of
// a_ic G(i, X).
HarmonicMeasureRow harmonic_measure_row(const System& system, const GreenField& green);
HarmonicMeasureRow harmonic_measure_row(const System& system, const Point& pole, const SolverOptions& options = {});

// omega^X(E) as the solution at X with data chi_E.
double harmonic_measure(const System& system, const Point& pole, const std::vector<char>& in_set,
                        const SolverOptions& options = {});

// Links boundary samples to absorbing cells. Each sample's sigma is shared
// equally among its nearest absorbing cells; a cell's probability is spread
// over its samples in proportion to those shares, and cells without samples
// hand theirs to the nearest sample.
class SampleCoupling {
public:
    explicit SampleCoupling(const Grid& grid);

    const Grid& grid() const { return *grid_; }
    const std::vector<double>& cell_sigma() const { return cell_sigma_; }
    // Per-sample harmonic measure omega^X({y}).
    std::vector<double> sample_measure(const HarmonicMeasureRow& row) const;
    // Per-absorbing-slot data from per-sample values (sigma-weighted average).
    std::vector<double> cell_data(const std::vector<double>& sample_values) const;
    // Samples that reach at least one absorbing cell.
    const std::vector<char>& coupled() const { return coupled_; }

private:
    struct Share {
        std::size_t sample;
        double weight;
    };
    const Grid* grid_;
    std::vector<std::vector<Share>> cell_shares_;  // per slot
    std::vector<double> cell_sigma_;
    std::vector<std::size_t> fallback_;            // nearest sample per slot
    std::vector<char> coupled_;
};

}  // namespace hmlab
