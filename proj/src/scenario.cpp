#include "hmlab/scenario.hpp"

#include "hmlab/errors.hpp"

namespace hmlab {

std::unique_ptr<BoundarySet> make_boundary(const ScenarioConfig& config) {
    return std::make_unique<BoundarySet>(config.ambient_dim, config.boundary_dim, config.gamma, config.footprint(),
                                         config.sample_spacing);
}

Scenario::Scenario(const ScenarioConfig& config, double h, WallMode walls) : config_(config) {
    if (h > 0) config_.grid.h = h;
    gamma_ = make_boundary(config_);
    grid_ = std::make_unique<Grid>(*gamma_, config_.grid_box(), config_.grid.h, config_.grid.r_abs_factor);
    OperatorField op;
    op.preset = config_.op;
    system_ = std::make_unique<System>(*grid_, op, walls);
    coupling_ = std::make_unique<SampleCoupling>(*grid_);
    for (std::size_t s = 0; s < gamma_->size(); ++s)
        if (coupling_->coupled()[s]) active_.push_back(s);
}

SolutionField Scenario::solve(const std::vector<double>& sample_data, const std::string& descriptor) const {
    if (sample_data.size() != gamma_->size()) throw ArgumentError("boundary data must give one value per sample");
    DirichletData data;
    data.absorbing = coupling_->cell_data(sample_data);
    data.descriptor = descriptor;
    return solve_dirichlet(*system_, data, solver);
}

GreenField Scenario::green(const Point& pole) const { return green_function(*system_, pole, solver); }

std::vector<double> Scenario::omega(const GreenField& green) const {
    return coupling_->sample_measure(harmonic_measure_row(*system_, green));
}

std::vector<double> Scenario::omega(const Point& pole) const { return omega(green(pole)); }

}  // namespace hmlab
