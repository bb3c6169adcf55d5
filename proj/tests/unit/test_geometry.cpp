#include <cmath>

#include "doctest.h"

#include "hmlab/config.hpp"
#include "hmlab/dyadic.hpp"
#include "hmlab/errors.hpp"
#include "hmlab/quadrature.hpp"
#include "hmlab/scenario.hpp"
#include "hmlab/stats.hpp"
#include "hmlab/whitney.hpp"

using namespace hmlab;

namespace {

AxisBox cube(double half, int n) {
    AxisBox b;
    for (int i = 0; i < n; ++i) {
        b.lo[i] = -half;
        b.hi[i] = half;
    }
    return b;
}

}  // namespace

TEST_CASE("flat line distance and weight") {
    auto gamma = make_boundary(scenario_preset("flat_line"));
    CHECK(gamma->distance({0.3, 3, 4}) == doctest::Approx(5));
    CHECK(gamma->distance({-0.7, 0, 0.25}) == doctest::Approx(0.25));
    CHECK(gamma->weight_exponent() == -1);
    CHECK(gamma->weight({0, 0, 0.5}) == doctest::Approx(2));
    CHECK_THROWS_AS(gamma->weight({0.1, 0, 0}), SingularPointError);
}

TEST_CASE("point boundary") {
    auto gamma = make_boundary(scenario_preset("point"));
    CHECK(gamma->size() == 1);
    CHECK(gamma->distance({0.3, 0.4, 0}) == doctest::Approx(0.5));
    CHECK(gamma->weight_exponent() == -1);
    CHECK(gamma->sigma_ball({0, 0, 0}, 0.1) == doctest::Approx(1));
}

TEST_CASE("surface balls on the flat line have length 2r") {
    auto gamma = make_boundary(scenario_preset("flat_line"));
    const double tol = gamma->spacing();
    for (double r : {0.5, 0.25, 0.125, 0.0625}) CHECK(std::fabs(gamma->sigma_ball({0.1, 0, 0}, r) - 2 * r) <= tol);
    CHECK(gamma->total_mass() == doctest::Approx(2).epsilon(1e-9));
}

TEST_CASE("sine graph surface measure matches the arc length") {
    auto sc = scenario_preset("sine_graph");
    auto gamma = make_boundary(sc);
    // Arc length of t -> (t, L sin t) over [-w, w] by Simpson's rule.
    const double L = sc.gamma.amplitude, w = sc.footprint_half_width;
    const int m = 20000;
    double s = 0;
    for (int i = 0; i <= m; ++i) {
        double t = -w + 2 * w * i / m;
        double f = std::sqrt(1 + L * L * std::cos(t) * std::cos(t));
        s += f * (i == 0 || i == m ? 1 : (i % 2 ? 4 : 2));
    }
    s *= 2 * w / m / 3;
    CHECK(gamma->total_mass() == doctest::Approx(s).epsilon(1e-6));
}

TEST_CASE("weighted ball volume on the flat line") {
    // m(B(q, r)) = int_B 1/rho dX = pi^2 r^2 for q on the axis.
    auto gamma = make_boundary(scenario_preset("flat_line"));
    for (double r : {0.25, 0.125}) {
        double m = measure_m(*gamma, Region::make_ball({0, 0, 0}, r), 0);
        CHECK(m == doctest::Approx(M_PI * M_PI * r * r).epsilon(0.02));
    }
    // delta^a: int_B rho^(a-1) dX = 2 pi int_{-r}^{r} (r^2-x^2)^((a+1)/2) / (a+1) dx; a = 1 gives 4 pi r^3 / 3.
    double r = 0.25;
    CHECK(measure_m(*gamma, Region::make_ball({0, 0, 0}, r), 1) == doctest::Approx(4 * M_PI * r * r * r / 3).epsilon(0.02));
}

TEST_CASE("log-log fit recovers a power law") {
    std::vector<double> x{1, 2, 4, 8}, y;
    for (double v : x) y.push_back(3 * v * v);
    auto fit = fit_loglog(x, y);
    CHECK(fit.slope == doctest::Approx(2));
    CHECK(relative_drift(1.0, 1.25) == doctest::Approx(0.2));
    CHECK(relative_drift(0.0, 0.0) == 0);
}

TEST_CASE("dyadic lattice on the flat line") {
    auto gamma = make_boundary(scenario_preset("flat_line"));
    DyadicLattice lat(*gamma, 1, 5);
    const auto& rep = lat.report();
    CHECK(rep.properties_hold());
    for (int k = 1; k < 5; ++k)
        for (int id : lat.generation(k)) {
            const auto& c = lat.cube(id);
            CHECK(c.children.size() == 2);
            double mass = 0;
            for (int ch : c.children) mass += lat.cube(ch).sigma_mass;
            CHECK(mass == doctest::Approx(c.sigma_mass));
            CHECK(c.length == doctest::Approx(std::ldexp(1.0, -k)));
        }
    // Every sample belongs to exactly one cube per generation.
    for (int k = 1; k <= 5; ++k) {
        std::vector<int> owner(gamma->size(), 0);
        for (int id : lat.generation(k))
            for (auto s : lat.cube(id).samples) ++owner[s];
        for (int o : owner) CHECK(o == 1);
    }
}

TEST_CASE("dyadic lattice on a point cluster") {
    auto gamma = make_boundary(scenario_preset("point_cluster"));
    DyadicLattice lat(*gamma, 0, 6);
    CHECK(lat.report().properties_hold());
    CHECK(lat.generation(6).size() == 4);
}

TEST_CASE("Whitney boxes around a point satisfy the bracket") {
    auto gamma = make_boundary(scenario_preset("point"));
    WhitneyOptions wo;
    wo.k_max = 6;
    WhitneyDecomposition wd(*gamma, cube(1, 2), wo);
    REQUIRE(!wd.boxes().empty());
    CHECK(wd.report().wbox_violations == 0);
    for (const auto& b : wd.boxes()) {
        // Independent check: 4 diam I <= dist(4I, {0}) for the square I.
        AxisBox box = wd.box(b.id).box;
        double side = box.side(0);
        double diam = side * std::sqrt(2.0);
        double dx = std::max(0.0, std::fabs(box.center()[0]) - 2 * side);
        double dy = std::max(0.0, std::fabs(box.center()[1]) - 2 * side);
        CHECK(4 * diam <= std::hypot(dx, dy) * (1 + 1e-12));
    }
}

TEST_CASE("config validation and presets") {
    auto presets = list_scenarios();
    CHECK(presets.size() >= 5);
    for (const auto& p : presets) {
        auto back = scenario_from_json(to_json(p));
        CHECK(to_json(back).dump() == to_json(p).dump());
    }
    CHECK(scenario_preset("sine_graph").gamma.amplitude == doctest::Approx(0.1));
    RunConfig bad;
    bad.scenario = scenario_preset("point");
    bad.scenario.boundary_dim = 1;
    auto errors = validate(bad);
    REQUIRE(!errors.empty());
    CHECK(errors[0].find("codimension") != std::string::npos);
    RunConfig ok;
    CHECK(validate(ok).empty());
    Json j = Json::object();
    apply_override(j, "scenario=point");
    apply_override(j, "scenario.grid.h=0.03125");
    auto c = run_config_from_json(j);
    CHECK(c.scenario.name == "point");
    CHECK(c.scenario.grid.h == 0.03125);
}
