#include <cmath>
#include <random>

#include "doctest.h"

#include "hmlab/config.hpp"
#include "hmlab/functionals.hpp"
#include "hmlab/io.hpp"
#include "hmlab/scenario.hpp"

using namespace hmlab;

namespace {

AxisBox everything() {
    AxisBox b;
    b.lo = {-10, -10, -10};
    b.hi = {10, 10, 10};
    return b;
}

// Direct evaluation of the BMO seminorm over the census.
double bmo_oracle(const BoundarySet& g, const std::vector<double>& f, const Census& c) {
    double best = 0;
    for (auto q : c.centers)
        for (double r : c.radii) {
            double m = 0, w = 0;
            auto ids = g.samples_in_ball(g.samples()[q], r);
            for (auto s : ids) {
                m += g.sigma_weights()[s] * f[s];
                w += g.sigma_weights()[s];
            }
            if (w <= 0) continue;
            m /= w;
            double v = 0;
            for (auto s : ids) v += g.sigma_weights()[s] * (f[s] - m) * (f[s] - m);
            best = std::max(best, std::sqrt(v / w));
        }
    return best;
}

}  // namespace

TEST_CASE("cone membership") {
    ConeSpec c;
    c.q = {0, 0, 0};
    c.aperture = 1;
    CHECK(cone_contains(c, {0, 1, 0}, 1));
    CHECK(!cone_contains(c, {3, 1, 0}, 1));
    c.truncation = 0.5;
    CHECK(!cone_contains(c, {0, 1, 0}, 1));
}

TEST_CASE("constant fields have zero square function") {
    auto sc = scenario_preset("flat_line");
    sc.grid.h = 1.0 / 16;
    Scenario s(sc);
    std::vector<double> u(s.grid().size(), 0.7);
    FieldView field(s.grid(), u);
    ConeSpec c;
    c.aperture = 4;
    c.truncation = 0.5;
    CHECK(square_function(field, c) == 0);
    CHECK(nontangential_max(field, c) == doctest::Approx(0.7));
}

TEST_CASE("linear field gradient and square function") {
    auto sc = scenario_preset("point");
    sc.grid.h = 1.0 / 32;
    Scenario s(sc);
    std::vector<double> u(s.grid().size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = 3 * s.grid().center(i)[1];
    FieldView field(s.grid(), u);
    std::size_t idx = std::size_t(s.grid().locate({0.5, 0.5, 0}));
    CHECK(field.grad2(idx) == doctest::Approx(9));
    // n = 2, d = 0: S^2 = sum over cone cells of 9 * delta * delta^-1 * h^2 = 9 * area.
    auto ss = square_functions(field, {0, 0, 0}, {1e9}, 0.5);
    double cells = 0;
    field.for_cells_in_box(everything(), [&](std::size_t, const Point& x) { cells += std::hypot(x[0], x[1]) < 0.5; });
    CHECK(ss[0] * ss[0] == doctest::Approx(9 * cells * s.h() * s.h()));
}

TEST_CASE("BMO and maximal function fast paths agree with direct sums") {
    auto sc = scenario_preset("flat_line");
    auto gamma = make_boundary(sc);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unif(-1, 1);
    std::vector<double> f(gamma->size());
    for (auto& v : f) v = unif(rng);
    Census c = make_census(*gamma, everything(), 1, 6, 3);
    CHECK(bmo_norm(*gamma, f, c) == doctest::Approx(bmo_oracle(*gamma, f, c)).epsilon(1e-10));
    auto m = maximal_function_samples(*gamma, f, c, 2);
    for (std::size_t y : {std::size_t(5), gamma->size() / 2, gamma->size() - 3}) {
        const Point& q = gamma->samples()[y];
        double best = 0;
        for (auto ctr : c.centers)
            for (double r : c.radii) {
                if (!(dist(gamma->samples()[ctr], q) < r)) continue;
                double a = 0, w = 0;
                for (auto s : gamma->samples_in_ball(gamma->samples()[ctr], r)) {
                    a += gamma->sigma_weights()[s] * f[s] * f[s];
                    w += gamma->sigma_weights()[s];
                }
                best = std::max(best, std::sqrt(a / w));
            }
        CHECK(m[y] == doctest::Approx(best).epsilon(1e-10));
        CHECK(maximal_function(*gamma, f, q, c, 2) == doctest::Approx(best).epsilon(1e-10));
    }
}

TEST_CASE("BMO of an indicator") {
    auto gamma = make_boundary(scenario_preset("flat_line"));
    std::vector<double> f(gamma->size());
    for (std::size_t k = 0; k < f.size(); ++k) f[k] = gamma->samples()[k][0] > 0;
    Census c = make_census(*gamma, everything(), 1, 7, 1);
    double b = bmo_norm(*gamma, f, c);
    // sqrt(t (1 - t)) peaks at 1/2 for a ball split evenly.
    CHECK(b <= 0.5 + 1e-12);
    CHECK(b >= 0.49);
    std::vector<double> k(gamma->size(), 3.0);
    CHECK(bmo_norm(*gamma, k, c) == doctest::Approx(0).epsilon(1e-12));
}

TEST_CASE("log-maximal data and mollification") {
    auto gamma = make_boundary(scenario_preset("flat_line"));
    std::vector<char> e(gamma->size(), 0);
    for (std::size_t k = 0; k < e.size(); ++k) e[k] = std::fabs(gamma->samples()[k][0]) < 0.02;
    Census c = make_census(*gamma, everything(), 1, 8, 1);
    auto f = log_maximal_data(*gamma, e, 0.25, c);
    for (std::size_t k = 0; k < e.size(); ++k) {
        CHECK(f.values[k] >= 0);
        CHECK(f.values[k] <= 1);
        if (e[k]) CHECK(f.values[k] == doctest::Approx(1));
    }
    std::vector<char> none(gamma->size(), 0);
    CHECK_THROWS(log_maximal_data(*gamma, none, 0.25, c));
    BoundaryFunction flat{std::vector<double>(gamma->size(), 0.4), "constant"};
    auto m = mollify(*gamma, flat, 0.05);
    for (double v : m.values) CHECK(v == doctest::Approx(0.4));
}

TEST_CASE("field dumps round-trip") {
    auto sc = scenario_preset("point");
    sc.grid.h = 1.0 / 16;
    Scenario s(sc);
    std::vector<double> u(s.grid().size());
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::sin(double(i)) / 3;
    for (const char* fmt : {"text", "raw"}) {
        std::string path = std::string("hmlab_unit_field.") + fmt;
        write_field(path, s.grid(), u, fmt, "u");
        auto back = read_field(path);
        CHECK(back.name == "u");
        CHECK(back.dim == 2);
        CHECK(back.dims[0] == 32);
        CHECK(back.h == s.h());
        REQUIRE(back.values.size() == u.size());
        for (std::size_t i = 0; i < u.size(); ++i) CHECK(back.values[i] == u[i]);
    }
    Table t{"demo", "x", "y", {{1, 0.5}, {2, 0.1}}};
    CHECK(table_csv(t) == "x,y\n1,0.5\n2,0.10000000000000001\n");
}
