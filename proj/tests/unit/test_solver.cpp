#include <cmath>
#include <numeric>

#include "doctest.h"

#include "hmlab/config.hpp"
#include "hmlab/scenario.hpp"
#include "hmlab/solver.hpp"

using namespace hmlab;

TEST_CASE("27-cell assembly matches the hand computation") {
    auto gamma = make_boundary(scenario_preset("flat_line"));
    const double h = 0.5;
    AxisBox box;
    box.lo = {-0.75, -0.75, -0.75};
    box.hi = {0.75, 0.75, 0.75};
    Grid grid(*gamma, box, h);
    REQUIRE(grid.size() == 27);
    OperatorField op;
    System sys(grid, op);
    // Centres at -0.5, 0, 0.5; absorbing when rho = sqrt(y^2 + z^2) <= h.
    for (std::size_t idx = 0; idx < 27; ++idx) {
        auto c = grid.coords(idx);
        bool corner = c[1] != 1 && c[2] != 1;
        CHECK(sys.fixed(idx) == !corner);
    }
    CHECK(sys.unknowns() == 12);
    // Cell coefficient 1 / rho, face = harmonic mean * h^(n-2).
    auto coef = [](double rho) { return 1.0 / rho; };
    auto hm = [](double a, double b) { return 2 * a * b / (a + b); };
    double corner = coef(std::sqrt(0.5)), edge = coef(0.5), axis = coef(h / 4);
    std::size_t c0 = grid.index(0, 0, 0);
    CHECK(sys.face(0, c0) == doctest::Approx(corner * h));
    CHECK(sys.face(1, c0) == doctest::Approx(hm(corner, edge) * h));
    CHECK(sys.face(2, c0) == doctest::Approx(hm(corner, edge) * h));
    std::size_t mid = grid.index(1, 1, 0);  // rho = 0.5
    CHECK(sys.face(1, mid) == doctest::Approx(hm(edge, corner) * h));
    std::size_t on_axis = grid.index(0, 1, 1);  // rho = 0, clamped to h/4
    CHECK(sys.face(1, on_axis) == doctest::Approx(hm(axis, edge) * h));
    CHECK(sys.face(2, on_axis) == doctest::Approx(hm(axis, edge) * h));
    // Reflecting walls: diagonal = sum of the faces present.
    for (std::size_t idx = 0; idx < 27; ++idx) {
        double sum = 0;
        sys.for_each_neighbor(idx, [&](std::size_t, double k) { sum += k; });
        CHECK(sys.diagonal(idx) == doctest::Approx(sum));
    }
    CHECK(sys.face(0, grid.index(2, 0, 0)) == 0);
}

TEST_CASE("harmonic measure rows are probability vectors") {
    auto sc = scenario_preset("point_cluster");
    sc.grid.h = 1.0 / 32;
    Scenario s(sc);
    for (Point x : {Point{0.5, 0.5, 0}, Point{-0.6, -0.1, 0}, Point{0.1, 0.1, 0}}) {
        auto row = harmonic_measure_row(s.system(), x);
        CHECK(std::fabs(row.total() - 1) <= 1e-12);
        CHECK(row.min() >= 0);
        auto omega = s.omega(x);
        double sum = std::accumulate(omega.begin(), omega.end(), 0.0);
        CHECK(std::fabs(sum - 1) <= 1e-12);
    }
}

TEST_CASE("constant data and the maximum principle") {
    auto sc = scenario_preset("flat_line");
    sc.grid.h = 1.0 / 16;
    Scenario s(sc);
    std::vector<double> ones(s.gamma().size(), 2.5);
    auto u = s.solve(ones);
    for (double v : u.u) CHECK(v == doctest::Approx(2.5).epsilon(1e-9));
    std::vector<double> f(s.gamma().size());
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = s.gamma().samples()[k][0] > 0 ? 1.0 : 0.0;
    auto v = s.solve(f);
    CHECK(v.max_principle_violation(s.system()) <= 1e-9);
}

TEST_CASE("Green function symmetry") {
    auto sc = scenario_preset("point");
    sc.grid.h = 1.0 / 32;
    Scenario s(sc);
    Point x{0.3, 0.2, 0}, y{-0.4, 0.5, 0};
    auto gx = s.green(x), gy = s.green(y);
    double a = gx.at(std::size_t(s.grid().locate(y))), b = gy.at(std::size_t(s.grid().locate(x)));
    CHECK(a == doctest::Approx(b).epsilon(1e-8));
    CHECK(a > 0);
}
