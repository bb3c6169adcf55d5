#pragma once

#include <memory>
#include <string>
#include <vector>

#include "hmlab/config.hpp"
#include "hmlab/solver.hpp"

namespace hmlab {

// Boundary, grid, assembled system and sample coupling for one scenario at
// one resolution.
class Scenario {
public:
    Scenario(const ScenarioConfig& config, double h = 0, WallMode walls = WallMode::Reflecting);

    const ScenarioConfig& config() const { return config_; }
    double h() const { return grid_->h(); }
    const BoundarySet& gamma() const { return *gamma_; }
    const Grid& grid() const { return *grid_; }
    const System& system() const { return *system_; }
    const SampleCoupling& coupling() const { return *coupling_; }

    SolverOptions solver;  // used by the helpers below

    // Dirichlet solve with per-sample boundary data.
    SolutionField solve(const std::vector<double>& sample_data, const std::string& descriptor = "") const;
    GreenField green(const Point& pole) const;
    // Per-sample harmonic measure omega^X.
    std::vector<double> omega(const Point& pole) const;
    std::vector<double> omega(const GreenField& green) const;

    // Samples inside the grid box that reach an absorbing cell.
    const std::vector<std::size_t>& active_samples() const { return active_; }

private:
    ScenarioConfig config_;
    std::unique_ptr<BoundarySet> gamma_;
    std::unique_ptr<Grid> grid_;
    std::unique_ptr<System> system_;
    std::unique_ptr<SampleCoupling> coupling_;
    std::vector<std::size_t> active_;
};

std::unique_ptr<BoundarySet> make_boundary(const ScenarioConfig& config);

}  // namespace hmlab
