#include "hmlab/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "hmlab/dyadic.hpp"
#include "hmlab/errors.hpp"
#include "hmlab/functionals.hpp"
#include "hmlab/metric.hpp"
#include "hmlab/parallel.hpp"
#include "hmlab/quadrature.hpp"
#include "hmlab/sawtooth.hpp"
#include "hmlab/scenario.hpp"
#include "hmlab/stats.hpp"
#include "hmlab/structure.hpp"
#include "hmlab/whitney.hpp"

namespace hmlab {

bool ExperimentReport::pass() const {
    if (criteria.empty()) return false;
    return std::all_of(criteria.begin(), criteria.end(), [](const Criterion& c) { return c.pass; });
}

Table& ExperimentReport::table(const std::string& name, const std::string& x_label, const std::string& y_label) {
    tables.push_back({name, x_label, y_label, {}});
    return tables.back();
}

const Table* ExperimentReport::find_table(const std::string& name) const {
    for (const auto& t : tables)
        if (t.name == name) return &t;
    return nullptr;
}

const Constant* ExperimentReport::find_constant(const std::string& name) const {
    for (const auto& [k, c] : constants)
        if (k == name) return &c;
    return nullptr;
}

Constant& ExperimentReport::constant(const std::string& name, double coarse, double fine, double band) {
    Constant c;
    c.coarse = coarse;
    c.fine = fine;
    c.drift = relative_drift(coarse, fine);
    c.band = band;
    constants.emplace_back(name, c);
    return constants.back().second;
}

Criterion& ExperimentReport::criterion(const std::string& name, bool pass, const std::string& detail) {
    criteria.push_back({name, pass, detail});
    return criteria.back();
}

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<double> doubles(const Json& j) {
    std::vector<double> out;
    for (const auto& v : j) out.push_back(v.get<double>());
    return out;
}

Point point_param(const Json& j) {
    Point p{0, 0, 0};
    for (std::size_t i = 0; i < j.size() && i < 3; ++i) p[i] = j[i].get<double>();
    return p;
}

// Constants shared by several experiments.
constexpr double kStabilityBand = 0.25;

// Aperture alpha = 2M with M the corkscrew constant r / delta(A_r(q)).
double default_alpha(const BoundarySet& gamma, const Point& q, double r) {
    Point a = corkscrew_point(gamma, q, r);
    double m = r / gamma.distance(a);
    return 2 * m;
}

// Boundary samples whose first coordinate is within `half` of the footprint
// centre, every `stride`-th one.
std::vector<std::size_t> middle_samples(const BoundarySet& gamma, double half, std::size_t stride,
                                        const std::vector<char>* coupled = nullptr) {
    std::vector<std::size_t> out;
    std::size_t seen = 0;
    double c = gamma.footprint().center()[0];
    for (std::size_t s = 0; s < gamma.size(); ++s) {
        if (coupled && !(*coupled)[s]) continue;
        if (std::fabs(gamma.samples()[s][0] - c) > half) continue;
        if (seen++ % std::max<std::size_t>(stride, 1) == 0) out.push_back(s);
    }
    return out;
}

AxisBox slab(const BoundarySet& gamma, double half) {
    AxisBox b;
    b.lo = {-half, -1e9, -1e9};
    b.hi = {half, 1e9, 1e9};
    for (int i = gamma.ambient_dim(); i < 3; ++i) b.lo[i] = b.hi[i] = 0;
    return b;
}

double weighted_lp(const BoundarySet& gamma, const std::vector<std::size_t>& ids, const std::vector<double>& v, double p) {
    double acc = 0;
    for (std::size_t i = 0; i < ids.size(); ++i) acc += gamma.sigma_weights()[ids[i]] * std::pow(v[i], p);
    return std::pow(acc, 1.0 / p);
}

// Smooth bounded data in [0, 1] built from a few random Fourier modes of x.
std::vector<double> smooth_random_data(const BoundarySet& gamma, std::mt19937_64& rng, int modes) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> a(modes), phase(modes);
    double norm = 0;
    for (int k = 0; k < modes; ++k) {
        a[k] = 2 * unif(rng) - 1;
        phase[k] = 2 * M_PI * unif(rng);
        norm += std::fabs(a[k]) / (k + 1);
    }
    std::vector<double> f(gamma.size());
    for (std::size_t s = 0; s < gamma.size(); ++s) {
        double x = gamma.samples()[s][0], v = 0;
        for (int k = 0; k < modes; ++k) v += a[k] * std::sin((k + 1) * M_PI * x + phase[k]) / (k + 1);
        f[s] = 0.5 + 0.5 * v / std::max(norm, 1e-300);
    }
    return f;
}

// Dyadic martingale on [x0, x0 + len): sum over levels 1..levels of random
// signs times Haar functions.
std::vector<double> martingale_data(const BoundarySet& gamma, std::mt19937_64& rng, double x0, double len, int levels) {
    std::vector<double> f(gamma.size(), 0.0);
    std::bernoulli_distribution coin(0.5);
    for (int k = 0; k < levels; ++k) {
        std::size_t count = std::size_t(1) << k;
        std::vector<double> sign(count);
        for (auto& s : sign) s = coin(rng) ? 1.0 : -1.0;
        double w = len / double(count);
        for (std::size_t s = 0; s < gamma.size(); ++s) {
            double t = (gamma.samples()[s][0] - x0) / w;
            if (t < 0 || t >= double(count)) continue;
            std::size_t i = std::size_t(t);
            f[s] += sign[i] * ((t - double(i)) < 0.5 ? 1.0 : -1.0);
        }
    }
    return f;
}

std::vector<char> interval_set(const BoundarySet& gamma, double lo, double hi) {
    std::vector<char> in(gamma.size(), 0);
    for (std::size_t s = 0; s < gamma.size(); ++s) {
        double x = gamma.samples()[s][0];
        in[s] = x >= lo && x < hi;
    }
    return in;
}

std::vector<double> indicator(const std::vector<char>& in) {
    std::vector<double> f(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) f[i] = in[i] ? 1.0 : 0.0;
    return f;
}

double masked_sum(const std::vector<double>& v, const std::vector<char>& in) {
    double s = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (in[i]) s += v[i];
    return s;
}

// ---------------------------------------------------------------------------
// Exact-solution convergence on the flat line with Dirichlet walls u = delta.

ExperimentReport convergence(const ScenarioConfig& sc, const Json& p) {
    ExperimentReport rep;
    if (!(sc.gamma.kind == GammaKind::Flat && sc.ambient_dim == 3 && sc.boundary_dim == 1))
        throw ScenarioError("the exact-solution study needs the flat line in R^3");
    auto hs = doubles(p["h"]);
    if (hs.size() < 3) throw ConfigError("convergence needs three grid spacings");
    std::vector<double> err;
    std::vector<std::vector<double>> fields;
    std::vector<std::unique_ptr<Scenario>> scen;
    double finest_seconds = 0;
    auto& t = rep.table("max_error", "h", "max |u_h - delta|");
    for (double h : hs) {
        auto t0 = Clock::now();
        auto s = std::make_unique<Scenario>(sc, h, WallMode::Dirichlet);
        DirichletData data;
        data.absorbing.assign(s->grid().absorbing_cells().size(), 0.0);
        const BoundarySet& gamma = s->gamma();
        data.wall = [&gamma](const Point& x) { return gamma.distance(x); };
        data.descriptor = "delta on the walls, 0 on Gamma";
        auto sol = solve_dirichlet(s->system(), data, s->solver);
        double e = 0;
        for (std::size_t idx = 0; idx < s->grid().size(); ++idx)
            if (!s->system().fixed(idx)) e = std::max(e, std::fabs(sol.u[idx] - s->grid().delta(idx)));
        finest_seconds = seconds_since(t0);
        err.push_back(e);
        t.points.push_back({h, e});
        rep.notes.push_back("h=" + fmt(h) + ": iterations " + std::to_string(sol.iterations) + ", residual " +
                            fmt(sol.residual) + ", max-principle excursion " +
                            fmt(sol.max_principle_violation(s->system())));
        fields.push_back(std::move(sol.u));
        scen.push_back(std::move(s));
    }
    double order = fit_loglog(hs, err).slope;
    // Self-convergence: coarse cells against the mean of their children.
    std::vector<double> diff;
    auto& sc_tab = rep.table("self_difference", "h", "max |u_h - R u_h/2|");
    for (std::size_t k = 0; k + 1 < scen.size(); ++k) {
        const Grid& gc = scen[k]->grid();
        const Grid& gf = scen[k + 1]->grid();
        const int n = gc.dim();
        double dmax = 0;
        for (std::size_t idx = 0; idx < gc.size(); ++idx) {
            if (scen[k]->system().fixed(idx)) continue;
            auto c = gc.coords(idx);
            double sum = 0;
            int cnt = 0;
            for (int m = 0; m < (1 << n); ++m) {
                int i = 2 * c[0] + (m & 1), j = 2 * c[1] + (m >> 1 & 1), l = n == 3 ? 2 * c[2] + (m >> 2 & 1) : 0;
                sum += fields[k + 1][gf.index(i, j, l)];
                ++cnt;
            }
            dmax = std::max(dmax, std::fabs(fields[k][idx] - sum / cnt));
        }
        diff.push_back(dmax);
        sc_tab.points.push_back({hs[k], dmax});
    }
    double factor = diff.size() >= 2 && diff[1] > 0 ? diff[0] / diff[1] : 0;
    rep.h = hs[hs.size() - 2];
    rep.h_fine = hs.back();
    rep.constant("max_error", err[err.size() - 2], err.back(), 0);
    rep.constant("order", fit_loglog({hs[0], hs[1]}, {err[0], err[1]}).slope,
                 fit_loglog({hs[1], hs[2]}, {err[1], err[2]}).slope, 0);
    double min_order = p["min_order"].get<double>();
    double min_factor = p["min_factor"].get<double>();
    double max_seconds = p["max_seconds"].get<double>();
    rep.criterion("empirical order >= " + fmt(min_order), order >= min_order, "fitted order " + fmt(order));
    rep.criterion("self-convergence factor >= " + fmt(min_factor), factor >= min_factor, "factor " + fmt(factor));
    rep.criterion("runtime at the finest h <= " + fmt(max_seconds) + " s", finest_seconds <= max_seconds,
                  fmt(finest_seconds) + " s");
    rep.seconds = finest_seconds;
    return rep;
}

// ---------------------------------------------------------------------------
// Row-stochastic harmonic measure, constants, maximum principle, additivity.

ExperimentReport probability(const ScenarioConfig& sc, const Json& p, std::uint64_t seed) {
    ExperimentReport rep;
    double h = p.value("h", 0.0);
    Scenario s(sc, h);
    rep.h = s.h();
    const Grid& grid = s.grid();
    const int n = grid.dim();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    int poles = p["poles"].get<int>();
    double tol = p["tolerance"].get<double>();
    double worst_sum = 0, worst_min = std::numeric_limits<double>::infinity(), worst_sample = 0;
    auto& t = rep.table("row_sum_defect", "pole", "|sum p - 1|");
    int found = 0;
    for (int tries = 0; tries < 100000 && found < poles; ++tries) {
        Point x{0, 0, 0};
        for (int i = 0; i < n; ++i) x[i] = grid.box().lo[i] + grid.box().side(i) * (0.1 + 0.8 * unif(rng));
        long cell = grid.locate(x);
        if (cell < 0 || s.system().fixed(std::size_t(cell)) || grid.delta(std::size_t(cell)) < 2 * grid.h()) continue;
        auto g = s.green(x);
        auto row = harmonic_measure_row(s.system(), g);
        auto omega = s.coupling().sample_measure(row);
        double defect = std::fabs(double(row.total() - 1.0L));
        long double ssum = 0;
        for (double v : omega) ssum += v;
        worst_sum = std::max(worst_sum, defect);
        worst_sample = std::max(worst_sample, std::fabs(double(ssum - 1.0L)));
        worst_min = std::min(worst_min, std::min(row.min(), *std::min_element(omega.begin(), omega.end())));
        t.points.push_back({double(found), defect});
        ++found;
    }
    if (found == 0) throw ScenarioError("no admissible interior pole found");

    // Constant data, random data and an additivity check.
    std::vector<double> ones(s.gamma().size(), 1.0);
    auto u1 = s.solve(ones, "f = 1");
    double const_dev = 0;
    for (double v : u1.u) const_dev = std::max(const_dev, std::fabs(v - 1));
    std::vector<double> rnd(s.gamma().size());
    for (auto& v : rnd) v = unif(rng);
    auto ur = s.solve(rnd, "uniform random data");
    double excursion = ur.max_principle_violation(s.system());

    Point pole = grid.box().center();
    pole[1] += 0.25 * grid.box().side(1);
    std::vector<char> left(grid.absorbing_cells().size(), 0), right(left.size(), 0);
    for (std::size_t k = 0; k < left.size(); ++k) {
        bool l = grid.center(grid.absorbing_cells()[k])[0] < grid.box().center()[0];
        left[k] = l;
        right[k] = !l;
    }
    double wl = harmonic_measure(s.system(), pole, left, s.solver);
    double wr = harmonic_measure(s.system(), pole, right, s.solver);
    double additivity = std::fabs(wl + wr - 1.0);

    rep.constant("row_sum_defect", worst_sum, worst_sum, 0);
    rep.constant("min_probability", worst_min, worst_min, 0);
    rep.criterion("every row sums to 1 within " + fmt(tol), worst_sum <= tol && worst_sample <= tol,
                  "max cell-level defect " + fmt(worst_sum) + ", sample-level " + fmt(worst_sample) + " over " +
                      std::to_string(found) + " poles");
    rep.criterion("rows are nonnegative", worst_min >= 0, "min entry " + fmt(worst_min));
    rep.criterion("f = 1 gives u = 1", const_dev <= 1e-9, "max |u - 1| = " + fmt(const_dev));
    rep.criterion("discrete maximum principle", excursion <= 1e-9, "largest excursion " + fmt(excursion));
    rep.notes.push_back("omega(E) + omega(complement) - 1 = " + fmt(additivity) + " (solver tolerance)");
    return rep;
}

// ---------------------------------------------------------------------------
// Whitney boxes and dyadic cube properties.

ExperimentReport geometry(ScenarioConfig sc, const Json& p) {
    ExperimentReport rep;
    sc.sample_spacing = std::min(sc.sample_spacing, p["sample_spacing"].get<double>());
    auto gamma = make_boundary(sc);
    const int n = gamma->ambient_dim();
    AxisBox domain;
    for (int i = 0; i < n; ++i) {
        domain.lo[i] = -sc.grid.half_width;
        domain.hi[i] = sc.grid.half_width;
    }
    WhitneyOptions wo;
    wo.k_max = p["whitney_k_max"].get<int>();
    WhitneyDecomposition wd(*gamma, domain, wo);
    int bad = 0;
    for (const auto& b : wd.boxes())
        if (!wd.satisfies_wbox(b.id)) ++bad;
    const auto& wr = wd.report();
    double fraction = wd.boxes().empty() ? 0 : 1.0 - double(bad) / double(wd.boxes().size());
    auto& wt = rep.table("whitney_boxes_per_generation", "k", "boxes");
    std::map<int, int> per_k;
    for (const auto& b : wd.boxes()) ++per_k[b.k];
    for (auto [k, c] : per_k) wt.points.push_back({double(k), double(c)});
    rep.criterion("all Whitney boxes satisfy the size-distance bracket", bad == 0 && !wd.boxes().empty(),
                  std::to_string(wd.boxes().size()) + " boxes, fraction " + fmt(fraction) + ", theta " + fmt(wr.theta));
    rep.notes.push_back("uncovered volume " + fmt(wr.uncovered_volume) + " of " + fmt(wr.domain_volume) +
                        (wr.resolution_warning ? " (generation cap reached)" : ""));

    DyadicLattice lat(*gamma, p["lattice_k_min"].get<int>(), p["lattice_k_max"].get<int>());
    const auto& lr = lat.report();
    auto& gt = rep.table("small_boundary_exponent", "rho", "gamma");
    for (std::size_t i = 0; i < lr.rho.size(); ++i) gt.points.push_back({lr.rho[i], lr.gamma_per_rho[i]});
    rep.criterion("dyadic cube properties (i)-(v)", lr.properties_hold(),
                  std::to_string(lr.cubes) + " cubes; violations cover " + std::to_string(lr.cover_violations) +
                      ", nesting " + std::to_string(lr.nesting_violations) + ", diameter " +
                      std::to_string(lr.diameter_violations) + ", inner ball " + std::to_string(lr.inner_ball_violations));
    bool gamma_ok = lr.gamma_per_rho.size() >= 3 &&
                    std::all_of(lr.gamma_per_rho.begin(), lr.gamma_per_rho.end(), [](double g) { return g > 0; });
    rep.criterion("small-boundary exponent gamma > 0 at three rho", gamma_ok, "gamma " + fmt(lr.gamma));
    rep.constant("a0", lr.a0, lr.a0, 0);
    rep.constant("C2", lr.C2, lr.C2, 0);
    return rep;
}

// ---------------------------------------------------------------------------
// Scaling of surface balls, weighted ball volumes and tent integrals.

ExperimentReport scaling(const ScenarioConfig& sc, const Json& p) {
    ExperimentReport rep;
    auto gamma = make_boundary(sc);
    const int d = gamma->boundary_dim();
    auto radii = doubles(p["radii"]);
    std::vector<std::size_t> centers = middle_samples(*gamma, p["region"].get<double>(), 1);
    if (centers.empty()) centers.push_back(0);
    std::size_t want = p["centers"].get<std::size_t>();
    if (centers.size() > want) {
        std::vector<std::size_t> pick;
        for (std::size_t k = 0; k < want; ++k) pick.push_back(centers[k * (centers.size() - 1) / std::max<std::size_t>(want - 1, 1)]);
        centers = pick;
    }
    auto fit = gamma->ahlfors_fit(centers, radii);
    auto& st = rep.table("sigma_ball", "r", "sigma(Delta)");
    for (double r : radii) st.points.push_back({r, gamma->sigma_ball(gamma->samples()[centers[0]], r)});
    double tol_s = p["tol_sigma"].get<double>(), tol_m = p["tol_m"].get<double>(), tol_t = p["tol_tent"].get<double>();
    rep.criterion("sigma slope d +- " + fmt(tol_s), std::fabs(fit.slope - d) <= tol_s, "slope " + fmt(fit.slope));
    rep.constant("ahlfors_C0", fit.constant, fit.constant, 0);

    QuadratureOptions qo;
    auto slope_for = [&](double a, bool tent, Table& tab) {
        std::vector<double> xs, ys;
        for (std::size_t c : centers) {
            for (double r : radii) {
                const Point& q = gamma->samples()[c];
                Region reg = tent ? Region::make_tent(q, r) : Region::make_ball(q, r);
                double v = measure_m(*gamma, reg, a, qo);
                xs.push_back(r);
                ys.push_back(v);
                if (c == centers[0]) tab.points.push_back({r, v});
            }
        }
        return fit_loglog(xs, ys).slope;
    };
    auto& mt = rep.table("m_ball", "r", "m(B)");
    double sm = slope_for(0, false, mt);
    rep.criterion("m(B) slope d+1 +- " + fmt(tol_m), std::fabs(sm - (d + 1)) <= tol_m, "slope " + fmt(sm));
    for (double a : doubles(p["tent_exponents"])) {
        auto& tt = rep.table("tent_a=" + fmt(a), "r", "int_T delta^a dm");
        double s = slope_for(a, true, tt);
        rep.criterion("tent slope d+1+a +- " + fmt(tol_t) + " at a=" + fmt(a), std::fabs(s - (d + 1 + a)) <= tol_t,
                      "slope " + fmt(s));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Harmonic measure structure constants at (h, h/2).

ExperimentReport structure(const ScenarioConfig& sc, const Json& p) {
    ExperimentReport rep;
    auto hs = doubles(p["h"]);
    if (hs.size() != 2) throw ConfigError("structure needs a resolution pair");
    StructureOptions so;
    so.radii = doubles(p["radii"]);
    so.default_centers = p["centers"].get<std::size_t>();
    so.far_pole = point_param(p["far_pole"]);
    if (sc.ambient_dim == 2) so.far_pole[2] = 0;
    double band = p["band"].get<double>();
    std::vector<StructureReport> out;
    std::vector<Point> centers;
    for (double h : hs) {
        Scenario s(sc, h);
        s.solver.refinement_steps = p["refinement_steps"].get<int>();
        if (centers.empty()) centers = default_ball_centers(s, so.default_centers);
        so.centers = centers;
        out.push_back(structure_checks(s, so));
    }
    rep.h = hs[0];
    rep.h_fine = hs[1];
    auto& t = rep.table("cfms_by_radius", "r", "r^(d-1) G(X0, A) / omega(Delta)");
    for (const auto& b : out[1].balls) t.points.push_back({b.r, b.cfms});
    auto& dt = rep.table("doubling_by_radius", "r", "omega(2 Delta) / omega(Delta)");
    for (const auto& b : out[1].balls) dt.points.push_back({b.r, b.doubling});
    struct Item {
        const char* name;
        double StructureReport::*field;
        bool banded;
    };
    const Item items[] = {
        {"doubling", &StructureReport::doubling, true},
        {"cfms_max", &StructureReport::cfms_max, true},
        {"cfms_min", &StructureReport::cfms_min, true},
        {"change_of_pole_max", &StructureReport::change_of_pole_max, true},
        {"change_of_pole_min", &StructureReport::change_of_pole_min, true},
        {"nondegeneracy", &StructureReport::nondegeneracy, true},
        {"caccioppoli", &StructureReport::caccioppoli, false},
        {"moser", &StructureReport::moser, false},
        {"holder_beta", &StructureReport::holder_beta, false},
        {"harnack", &StructureReport::harnack, false},
        {"green_asymmetry", &StructureReport::green_asymmetry, false},
    };
    for (const auto& it : items) {
        auto& c = rep.constant(it.name, out[0].*(it.field), out[1].*(it.field), it.banded ? band : 0);
        if (!it.banded) continue;
        bool ok = c.stable() && c.coarse > 0 && c.fine > 0 && std::isfinite(c.coarse) && std::isfinite(c.fine);
        rep.criterion(std::string(it.name) + " bounded with drift <= " + fmt(band), ok,
                      fmt(c.coarse) + " -> " + fmt(c.fine) + ", drift " + fmt(c.drift));
    }
    rep.notes.push_back("holder exponent fit " + fmt(out[1].holder_beta) + ", Harnack ratio " + fmt(out[1].harnack));
    return rep;
}

// ---------------------------------------------------------------------------
// Sawtooth cutoff properties and the boundary-box harmonic measure sum.

ExperimentReport cutoff(const ScenarioConfig& sc, const Json& p, std::uint64_t seed) {
    ExperimentReport rep;
    Scenario s(sc, p.value("h", 0.0));
    rep.h = s.h();
    const BoundarySet& gamma = s.gamma();
    const int n = gamma.ambient_dim();
    AxisBox domain;
    for (int i = 0; i < n; ++i) {
        domain.lo[i] = -sc.grid.half_width;
        domain.hi[i] = sc.grid.half_width;
    }
    WhitneyOptions wo;
    wo.k_max = p["whitney_k_max"].get<int>();
    WhitneyDecomposition wd(gamma, domain, wo);
    int k_root = p["root_k"].get<int>();
    auto Ns = p["N"].get<std::vector<int>>();
    int n_max = *std::max_element(Ns.begin(), Ns.end());
    DyadicLattice lat(gamma, k_root, k_root + n_max + 1);
    int root = lat.cube_of_sample(p["root_sample"].get<std::size_t>(), k_root);
    WqParams wq;
    wq.eta = p["eta"].get<double>();
    wq.K = p["K"].get<double>();
    auto cubes = lat.descendants(root, true);
    WhitneyRegions regions(lat, wd, wq, cubes);
    rep.notes.push_back("eta " + fmt(regions.eta()) + ", K " + fmt(regions.K()) + ", N0 " +
                        std::to_string(regions.report().max_wq));

    Point pole = point_param(p["pole"]);
    auto omega = s.omega(pole);
    auto cube_mass = [&](int c) {
        double m = 0;
        for (auto smp : lat.cube(c).samples) m += omega[smp];
        return m;
    };
    double wq_root = cube_mass(root);
    if (!(wq_root > 0)) throw ScenarioError("harmonic measure of the root cube vanishes");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const std::size_t tests = p["test_points"].get<std::size_t>();
    auto& tab = rep.table("boundary_sum", "N", "sum omega(Q_I) / omega(Q)");
    auto& tab_alt = rep.table("boundary_sum_alternative", "N", "sum omega(Q_I) / omega(Q)");
    bool props = true;
    double min_psi_in = 1, max_psi_out = 0, worst_grad = 0, worst_interior_grad = 0;
    std::size_t tested = 0;
    double min_pole_distance = std::numeric_limits<double>::infinity();
    CubeFamily empty;
    empty.root = root;
    for (int N : Ns) {
        auto dom = build_sawtooth(regions, root, empty, 1, N);
        CutoffField cf(regions, dom);
        // Test points: random points near the root plus box centres and corners of I***.
        const auto& q = lat.cube(root);
        double reach = std::min(dom.c3, 4.0) * q.length;
        std::vector<Point> pts;
        for (std::size_t k = 0; k < tests; ++k) {
            Point x{0, 0, 0};
            for (int i = 0; i < n; ++i)
                x[i] = std::clamp(q.center[i] + reach * (2 * unif(rng) - 1), domain.lo[i], domain.hi[i]);
            pts.push_back(x);
        }
        for (int id : dom.boxes) {
            AxisBox b = wd.dilated(id, 3);
            pts.push_back(wd.box(id).center());
            pts.push_back(b.lo);
            pts.push_back(b.hi);
        }
        std::vector<char> sigma_flag(wd.boxes().size(), 0);
        for (int id : cf.wn_sigma()) sigma_flag[id] = 1;
        for (const Point& x : pts) {
            double delta = gamma.distance(x);
            if (!(delta > 0)) continue;
            auto v = cf.evaluate(x);
            ++tested;
            if (v.psi < -1e-15 || v.psi > 1 + 1e-15) props = false;
            bool in_omega = dom.contains_at(regions, x, 1);
            bool in_star = dom.contains_at(regions, x, 2);
            if (in_omega) {
                min_psi_in = std::min(min_psi_in, v.psi);
                if (v.overlap > 0 && v.psi < 1.0 / v.overlap - 1e-12) props = false;
            }
            if (!in_star) {
                max_psi_out = std::max(max_psi_out, v.psi);
                if (v.psi != 0) props = false;
            }
            double g = norm(v.grad) * delta;
            worst_grad = std::max(worst_grad, g / std::max(cf.gradient_bound(std::max(v.overlap, 1)), 1e-300));
            if (g > cf.gradient_bound(std::max(v.overlap, 1))) props = false;
            for (int id : wd.covering(x, 3)) {
                if (!dom.has_box(id) || sigma_flag[id]) continue;
                worst_interior_grad = std::max(worst_interior_grad, g);
                if (g > 1e-9) props = false;
                break;
            }
        }
        for (int id : dom.boxes)
            min_pole_distance = std::min(min_pole_distance, point_box_distance(pole, wd.dilated(id, 3), n) / q.length);
        double ratio = sigma_boundary_mass(cf, cube_mass) / wq_root;
        double ratio_alt = sigma_boundary_mass(cf, cube_mass, true) / wq_root;
        tab.points.push_back({double(N), ratio});
        tab_alt.points.push_back({double(N), ratio_alt});
    }
    double first = tab.points.front().y, last = tab.points.back().y, top = 0;
    for (const auto& pt : tab.points) top = std::max(top, pt.y);
    double tail = tab.points.size() >= 3 ? tab.points[tab.points.size() - 3].y : first;
    double saturation = tail > 0 ? last / tail : 0;
    double max_sat = p["max_saturation"].get<double>();
    rep.criterion("cutoff properties (i)-(iii) at every tested point", props,
                  std::to_string(tested) + " points; min psi on Omega " + fmt(min_psi_in) + ", max psi outside Omega* " +
                      fmt(max_psi_out) + ", |grad psi| delta / bound " + fmt(worst_grad) +
                      ", interior |grad psi| delta " + fmt(worst_interior_grad));
    rep.criterion("boundary-box sum bounded over N (last two steps grow by <= " + fmt(max_sat) + "x)",
                  top > 0 && std::isfinite(top) && saturation <= max_sat,
                  "ratios " + fmt(first) + " .. " + fmt(last) + ", max " + fmt(top) + ", growth " + fmt(saturation));
    rep.constant("boundary_sum_max", top, top, 0);
    rep.notes.push_back("pole distance to the fattened sawtooth / l(Q) >= " + fmt(min_pole_distance));
    return rep;
}

// ---------------------------------------------------------------------------
// Cone functionals at a set of boundary samples.

struct Profiles {
    std::vector<std::size_t> ids;
    std::vector<double> s, s1, s2, nu;  // apertures alpha, alpha1, beta; N with beta
};

Profiles cone_profiles(const FieldView& field, const BoundarySet& gamma, const std::vector<std::size_t>& ids,
                       double alpha, double truncation) {
    Profiles pr;
    pr.ids = ids;
    pr.s.resize(ids.size());
    pr.s1 = pr.s2 = pr.nu = pr.s;
    parallel_for(ids.size(), [&](std::size_t i) {
        const Point& q = gamma.samples()[ids[i]];
        auto v = square_functions(field, q, {alpha, 2 * alpha, 4 * alpha}, truncation);
        pr.s[i] = v[0];
        pr.s1[i] = v[1];
        pr.s2[i] = v[2];
        ConeSpec cone;
        cone.q = q;
        cone.aperture = 4 * alpha;
        cone.truncation = truncation;
        pr.nu[i] = nontangential_max(field, cone);
    });
    return pr;
}

// ---------------------------------------------------------------------------
// Square function against the non-tangential maximal function.

ExperimentReport s_less_n(const ScenarioConfig& sc, const Json& p, std::uint64_t seed) {
    ExperimentReport rep;
    auto hs = doubles(p["h"]);
    if (hs.size() != 2) throw ConfigError("s_less_n needs a resolution pair");
    auto ps = doubles(p["p"]);
    int draws = p["data"].get<int>();
    double trunc = p["truncation"].get<double>();
    double band = p["band"].get<double>();
    std::vector<std::vector<double>> worst(2, std::vector<double>(ps.size(), 0.0));
    std::vector<double> worst_wide(2, 0.0), worst_p2(2, 0.0);
    double constant_ratio = 0;
    double alpha = 0;
    for (std::size_t hi = 0; hi < 2; ++hi) {
        Scenario s(sc, hs[hi]);
        s.solver.refinement_steps = 0;
        const auto& gamma = s.gamma();
        auto ids = middle_samples(gamma, p["region"].get<double>(), p["stride"].get<std::size_t>(), &s.coupling().coupled());
        if (ids.empty()) throw ScenarioError("no boundary samples in the test region");
        alpha = p.value("alpha", 0.0) > 0 ? p["alpha"].get<double>() : default_alpha(gamma, gamma.samples()[ids[0]], trunc);
        std::mt19937_64 rng(seed);
        auto& t = rep.table("ratio_p2_h=" + fmt(hs[hi]), "draw", "||Su||_2 / ||Nu||_2");
        for (int k = 0; k <= draws; ++k) {
            std::vector<double> f = k == 0 ? std::vector<double>(gamma.size(), 0.75) : smooth_random_data(gamma, rng, 4);
            auto sol = s.solve(f);
            FieldView field(s.grid(), sol.u);
            auto pr = cone_profiles(field, gamma, ids, alpha, trunc);
            // Wider pair (2 alpha, 2 beta) for the aperture check.
            Profiles wide;
            wide.nu.resize(ids.size());
            parallel_for(ids.size(), [&](std::size_t i) {
                ConeSpec cone;
                cone.q = gamma.samples()[ids[i]];
                cone.aperture = 8 * alpha;
                cone.truncation = trunc;
                wide.nu[i] = nontangential_max(field, cone);
            });
            double nu2 = weighted_lp(gamma, ids, pr.nu, 2);
            if (k == 0) {
                constant_ratio = nu2 > 0 ? weighted_lp(gamma, ids, pr.s, 2) / nu2 : 0;
                continue;
            }
            for (std::size_t j = 0; j < ps.size(); ++j) {
                double r = weighted_lp(gamma, ids, pr.s, ps[j]) / weighted_lp(gamma, ids, pr.nu, ps[j]);
                worst[hi][j] = std::max(worst[hi][j], r);
            }
            double r2 = weighted_lp(gamma, ids, pr.s, 2) / nu2;
            worst_p2[hi] = std::max(worst_p2[hi], r2);
            worst_wide[hi] = std::max(worst_wide[hi], weighted_lp(gamma, ids, pr.s1, 2) / weighted_lp(gamma, ids, wide.nu, 2));
            t.points.push_back({double(k), r2});
        }
    }
    rep.h = hs[0];
    rep.h_fine = hs[1];
    for (std::size_t j = 0; j < ps.size(); ++j) {
        double b = ps[j] == 2 ? band : 0;
        auto& c = rep.constant("max_ratio_p=" + fmt(ps[j]), worst[0][j], worst[1][j], b);
        if (ps[j] == 2)
            rep.criterion("max ||Su||_2/||Nu||_2 bounded with drift <= " + fmt(band),
                          c.stable() && c.fine > 0 && std::isfinite(c.fine),
                          fmt(c.coarse) + " -> " + fmt(c.fine) + ", drift " + fmt(c.drift) + " over " +
                              std::to_string(draws) + " data");
    }
    double sens = worst_p2[1] > 0 ? worst_wide[1] / worst_p2[1] : 0;
    rep.constant("aperture_doubling_ratio", worst_p2[0] > 0 ? worst_wide[0] / worst_p2[0] : 0, sens, 0);
    rep.notes.push_back("constant data ratio " + fmt(constant_ratio) + "; apertures alpha " + fmt(alpha) + ", beta " +
                        fmt(4 * alpha) + "; doubling both apertures changes the ratio by x" + fmt(sens));
    return rep;
}

// ---------------------------------------------------------------------------
// BMO data against the Carleson norm of the solution.

Census bmo_census(const BoundarySet& gamma, const Json& p) {
    auto kk = p["bmo_k"].get<std::vector<int>>();
    return make_census(gamma, gamma.footprint().dilated(1.0 + 1e-9), kk[0], kk[1], p["bmo_stride"].get<std::size_t>());
}

ExperimentReport bmo_carleson(const ScenarioConfig& sc, const Json& p, std::uint64_t seed) {
    ExperimentReport rep;
    auto hs = doubles(p["h"]);
    if (hs.size() != 2) throw ConfigError("bmo_carleson needs a resolution pair");
    double band = p["band"].get<double>();
    auto gamma0 = make_boundary(sc);
    const auto& g0 = *gamma0;
    Census bc = bmo_census(g0, p);

    // The data family, defined on the samples (identical at both resolutions).
    std::vector<std::pair<std::string, std::vector<double>>> family;
    family.push_back({"half_line", indicator(interval_set(g0, 0, 1e9))});
    family.push_back({"interval_quarter", indicator(interval_set(g0, -0.25, 0.25))});
    family.push_back({"interval_eighth", indicator(interval_set(g0, 0, 0.125))});
    family.push_back({"left_ray", indicator(interval_set(g0, -1e9, -0.125))});
    std::mt19937_64 rng(seed);
    int draws = p["martingale_draws"].get<int>();
    for (int k = 0; k < draws; ++k) {
        auto f = martingale_data(g0, rng, -1, 2, p["martingale_levels"].get<int>());
        double b = bmo_norm(g0, f, bc);
        for (auto& v : f) v /= b;
        family.push_back({"martingale_" + std::to_string(k), f});
    }
    Census lm_census = make_census(g0, slab(g0, 1.0), 1, 8, 1);
    for (double gl : {0.5, 0.25}) {
        auto e = interval_set(g0, -1.0 / 64, 1.0 / 64);
        family.push_back({"log_maximal_" + fmt(gl), log_maximal_data(g0, e, gl, lm_census).values});
    }
    std::vector<double> bmo(family.size());
    for (std::size_t i = 0; i < family.size(); ++i) bmo[i] = bmo_norm(g0, family[i].second, bc);

    std::vector<double> fam_max(2, 0.0), beta(2, 0.0);
    std::vector<std::vector<double>> ratios(2);
    for (std::size_t hi = 0; hi < 2; ++hi) {
        Scenario s(sc, hs[hi]);
        s.solver.refinement_steps = 0;
        const auto& gamma = s.gamma();
        auto kk = p["carleson_k"].get<std::vector<int>>();
        Census cc = make_census(gamma, slab(gamma, p["region"].get<double>()), kk[0], kk[1], p["carleson_stride"].get<std::size_t>());
        auto& t = rep.table("carleson_over_bmo2_h=" + fmt(hs[hi]), "member", "carleson / ||f||_BMO^2");
        for (std::size_t i = 0; i < family.size(); ++i) {
            if (!(bmo[i] > 1e-12)) continue;
            auto sol = s.solve(family[i].second, family[i].first);
            FieldView field(s.grid(), sol.u);
            double r = carleson_norm(field, cc) / (bmo[i] * bmo[i]);
            ratios[hi].push_back(r);
            fam_max[hi] = std::max(fam_max[hi], r);
            t.points.push_back({double(i), r});
        }
        // Far-field part u2: data (f - f_D) outside D = 2 Delta, zero on D.
        double r0 = p["decay_radius"].get<double>();
        const auto& f = family[0].second;
        auto in_d = interval_set(gamma, -2 * r0, 2 * r0);
        double m = 0, w = 0;
        for (std::size_t k = 0; k < gamma.size(); ++k)
            if (in_d[k]) {
                m += gamma.sigma_weights()[k] * f[k];
                w += gamma.sigma_weights()[k];
            }
        m /= w;
        std::vector<double> f2(gamma.size(), 0.0);
        for (std::size_t k = 0; k < gamma.size(); ++k)
            if (!in_d[k]) f2[k] = f[k] - m;
        auto sol2 = s.solve(f2, "far part");
        FieldView field2(s.grid(), sol2.u);
        std::vector<double> xs, ys;
        Point q{0, 0, 0};
        for (double layer = r0; layer >= 2 * s.h(); layer /= 2) {
            double top = 0;
            AxisBox b{q, q};
            for (int i = 0; i < gamma.ambient_dim(); ++i) {
                b.lo[i] -= 1.5 * r0;
                b.hi[i] += 1.5 * r0;
            }
            field2.for_cells_in_box(b, [&](std::size_t idx, const Point& x) {
                double dl = s.grid().delta(idx);
                if (dist(x, q) < 1.5 * r0 && dl >= layer / 2 && dl < layer) top = std::max(top, std::fabs(field2.value(idx)));
            });
            if (top > 0) {
                xs.push_back(layer / r0);
                ys.push_back(top);
            }
        }
        beta[hi] = fit_loglog(xs, ys).slope;
    }
    rep.h = hs[0];
    rep.h_fine = hs[1];
    auto& c = rep.constant("carleson_over_bmo2_max", fam_max[0], fam_max[1], band);
    rep.criterion("family max of carleson/||f||_BMO^2 bounded with drift <= " + fmt(band),
                  c.stable() && c.fine > 0 && std::isfinite(c.fine),
                  fmt(c.coarse) + " -> " + fmt(c.fine) + ", drift " + fmt(c.drift) + " over " +
                      std::to_string(ratios[1].size()) + " functions");
    rep.constant("u2_decay_beta", beta[0], beta[1], 0);
    rep.criterion("far-field decay exponent beta > 0", beta[0] > 0 && beta[1] > 0,
                  "beta " + fmt(beta[0]) + " -> " + fmt(beta[1]));
    rep.criterion("family has at least 10 non-constant members", ratios[1].size() >= 10,
                  std::to_string(ratios[1].size()) + " members");
    return rep;
}

// ---------------------------------------------------------------------------
// Log-maximal data, Lemma-type integral bound and the A-infinity direction.

ExperimentReport carleson_ainfty(ScenarioConfig sc, const Json& p) {
    ExperimentReport rep;
    sc.sample_spacing = p["sample_spacing"].get<double>();
    auto hs = doubles(p["h"]);
    if (hs.size() != 2) throw ConfigError("carleson_ainfty needs a resolution pair");
    double band = p["band"].get<double>();
    double r = p["radius"].get<double>();
    auto gls = doubles(p["gl_delta"]);
    auto gamma0 = make_boundary(sc);
    const auto& g0 = *gamma0;
    Point q0{0, 0, 0};
    auto ck = p["census_k"].get<std::vector<int>>();
    Census census = make_census(g0, slab(g0, 3 * r), ck[0], ck[1], 1);
    Census bc = make_census(g0, slab(g0, 3 * r), ck[0], ck[1], p["bmo_stride"].get<std::size_t>());
    double sigma_delta = g0.sigma_ball(q0, r);

    // Bullet properties of the log-maximal function for each gl_delta.
    struct Member {
        std::string name;
        std::vector<double> f;
        double bmo;
    };
    std::vector<Member> members;
    std::vector<std::vector<char>> sets;
    bool bullets = true;
    std::string bullet_detail;
    auto eps = doubles(p["mollifier_eps"]);
    for (double gl : gls) {
        double half = std::exp(-1.0 / gl) * r * (1 - 1e-9);
        auto e = interval_set(g0, -half, half);
        double se = 0;
        for (std::size_t k = 0; k < g0.size(); ++k)
            if (e[k]) se += g0.sigma_weights()[k];
        if (!(se > 0)) throw ResolutionError("boundary sampling too coarse for sigma(E)/sigma(Delta) = exp(-1/gl_delta)");
        auto f = log_maximal_data(g0, e, gl, census);
        double lo = 1, hi = 0, on_e = 1, outside = 0;
        for (std::size_t k = 0; k < g0.size(); ++k) {
            lo = std::min(lo, f.values[k]);
            hi = std::max(hi, f.values[k]);
            if (e[k]) on_e = std::min(on_e, f.values[k]);
            if (f.values[k] > 0 && !(std::fabs(g0.samples()[k][0]) < 2 * r)) outside = std::max(outside, f.values[k]);
        }
        double fb = bmo_norm(g0, f.values, bc);
        // Mollified versions at decreasing widths.
        std::vector<double> defects, bmo_ratio;
        for (double ep : eps) {
            auto fe = mollify(g0, f, ep);
            double defect = 0;
            for (std::size_t k = 0; k < g0.size(); ++k)
                if (std::fabs(g0.samples()[k][0]) < 3 * r) defect = std::max(defect, f.values[k] - fe.values[k]);
            defects.push_back(defect);
            bmo_ratio.push_back(bmo_norm(g0, fe.values, bc) / fb);
        }
        bool mono = std::is_sorted(defects.rbegin(), defects.rend());
        double worst_bmo = *std::max_element(bmo_ratio.begin(), bmo_ratio.end());
        bool ok = lo >= 0 && hi <= 1 && on_e == 1 && outside == 0 && mono && worst_bmo <= p["mollifier_bmo_bound"].get<double>();
        bullets = bullets && ok;
        bullet_detail += "gl " + fmt(gl) + ": sigma(E)/sigma(Delta) " + fmt(se / sigma_delta) + ", range [" + fmt(lo) +
                         ", " + fmt(hi) + "], min on E " + fmt(on_e) + ", max outside 2Delta " + fmt(outside) +
                         ", ||f_eps||/||f|| <= " + fmt(worst_bmo) + ", liminf defects " + fmt(defects.front()) + " -> " +
                         fmt(defects.back()) + "; ";
        members.push_back({"log_maximal_gl=" + fmt(gl), f.values, fb});
        sets.push_back(e);
    }
    // More admissible data: log-maximal functions of small sets at several places.
    const double offsets[] = {-0.5, -0.25, 0.25, 0.5};
    for (double off : offsets) {
        for (double gl : {0.5, 0.25}) {
            if (members.size() >= p["family"].get<std::size_t>()) break;
            double half = std::exp(-1.0 / gl) * r * (1 - 1e-9);
            auto e = interval_set(g0, off * r - half, off * r + half);
            auto f = log_maximal_data(g0, e, gl, census);
            members.push_back({"log_maximal_at_" + fmt(off) + "_gl=" + fmt(gl), f.values, bmo_norm(g0, f.values, bc)});
        }
    }

    std::vector<double> c_int(2, 0.0);
    std::vector<std::vector<double>> ratio(2);
    for (std::size_t hi = 0; hi < 2; ++hi) {
        Scenario s(sc, hs[hi]);
        s.solver.refinement_steps = 0;
        const auto& gamma = s.gamma();
        auto omega_a = s.omega(corkscrew_point(gamma, q0, r));
        auto omega_a3 = s.omega(corkscrew_point(gamma, q0, 3 * r));
        auto& t = rep.table("integral_over_bmo_h=" + fmt(hs[hi]), "member", "int f d omega^A' / ||f||_BMO");
        for (std::size_t i = 0; i < members.size(); ++i) {
            double integral = 0;
            for (std::size_t k = 0; k < gamma.size(); ++k) integral += members[i].f[k] * omega_a3[k];
            double v = integral / members[i].bmo;
            c_int[hi] = std::max(c_int[hi], v);
            t.points.push_back({double(i), v});
        }
        auto& tr = rep.table("omega_E_over_gl_h=" + fmt(hs[hi]), "gl_delta", "omega^A(E) / gl_delta");
        for (std::size_t g = 0; g < gls.size(); ++g) {
            double w = masked_sum(omega_a, sets[g]);
            ratio[hi].push_back(w / gls[g]);
            tr.points.push_back({gls[g], w / gls[g]});
        }
    }
    rep.h = hs[0];
    rep.h_fine = hs[1];
    rep.criterion("log-maximal data: 0 <= f <= 1, f = 1 on E, supp f in 2 Delta, mollifier bounds", bullets, bullet_detail);
    auto& c = rep.constant("integral_over_bmo_max", c_int[0], c_int[1], band);
    rep.criterion("int f d omega^A' <= C ||f||_BMO with drift <= " + fmt(band),
                  c.stable() && c.fine > 0 && std::isfinite(c.fine),
                  fmt(c.coarse) + " -> " + fmt(c.fine) + ", drift " + fmt(c.drift) + " over " +
                      std::to_string(members.size()) + " functions");
    bool bounded = true;
    std::string detail;
    for (std::size_t hi = 0; hi < 2; ++hi) {
        // gl_delta sorted decreasingly: the ratio must not grow as gl_delta shrinks.
        for (std::size_t g = 1; g < gls.size(); ++g) bounded = bounded && ratio[hi][g] <= ratio[hi][0] && ratio[hi][g] > 0;
        detail += "h " + fmt(hs[hi]) + ":";
        for (double v : ratio[hi]) detail += " " + fmt(v);
        detail += "; ";
    }
    rep.criterion("omega^A(E)/gl_delta bounded over the sweep", bounded, detail);
    rep.constant("omega_E_over_gl_max", *std::max_element(ratio[0].begin(), ratio[0].end()),
                 *std::max_element(ratio[1].begin(), ratio[1].end()), 0);
    return rep;
}

// ---------------------------------------------------------------------------
// Good-lambda sweep.

ExperimentReport good_lambda(const ScenarioConfig& sc, const Json& p, std::uint64_t seed) {
    ExperimentReport rep;
    Scenario s(sc, p.value("h", 0.0));
    s.solver.refinement_steps = 0;
    rep.h = s.h();
    const auto& gamma = s.gamma();
    double rq = p["cube_radius"].get<double>();
    double trunc = p["truncation"].get<double>();
    Point xq{0, 0, 0};
    auto ids = middle_samples(gamma, rq, p["stride"].get<std::size_t>(), &s.coupling().coupled());
    auto near = middle_samples(gamma, p["c2"].get<double>() * 2 * rq, p["stride"].get<std::size_t>(), &s.coupling().coupled());
    double alpha = p.value("alpha", 0.0) > 0 ? p["alpha"].get<double>() : default_alpha(gamma, xq, rq);
    std::mt19937_64 rng(seed);
    std::vector<double> f;
    std::string kind = p["data"].get<std::string>();
    if (kind == "smooth") {
        f = smooth_random_data(gamma, rng, p["modes"].get<int>());
    } else if (kind == "martingale") {
        f = martingale_data(gamma, rng, -1, 2, p["modes"].get<int>());
        double lo = *std::min_element(f.begin(), f.end());
        for (auto& v : f) v -= lo;
    } else {
        throw ConfigError("good_lambda data must be smooth or martingale");
    }
    auto sol = s.solve(f);
    FieldView field(s.grid(), sol.u);
    auto pr = cone_profiles(field, gamma, ids, alpha, trunc);
    auto pn = cone_profiles(field, gamma, near, alpha, trunc);
    Point pole = point_param(p["pole"]);
    auto omega = s.omega(pole);
    auto sigma = gamma.sigma_weights();
    double wq = 0, sq = 0;
    for (auto i : ids) {
        wq += omega[i];
        sq += sigma[i];
    }
    double lam_min = *std::min_element(pn.s1.begin(), pn.s1.end());
    double s_max = *std::max_element(pr.s.begin(), pr.s.end());
    auto gls = doubles(p["gl_delta"]);
    int grid_n = p["lambda_grid"].get<int>();
    if (!(s_max / 2 > lam_min))
        rep.notes.push_back("no lambda satisfies min S'u(q1) <= lambda < max Su / 2 (" + fmt(lam_min) + " vs " +
                            fmt(s_max / 2) + "); every ratio is 0");
    auto& t = rep.table("omega_ratio", "gl_delta", "omega{Su > 2 lambda, Nu <= gl lambda} / omega(Q)");
    auto& ts = rep.table("sigma_ratio", "gl_delta", "sigma{Su > 2 lambda, Nu <= gl lambda} / sigma(Q)");
    std::vector<double> xs, ys;
    double max_sn = 0;
    for (std::size_t i = 0; i < ids.size(); ++i) max_sn = std::max(max_sn, pr.nu[i] > 0 ? pr.s[i] / pr.nu[i] : 0);
    for (double gl : gls) {
        double best = 0, best_s = 0;
        for (int k = 0; k <= grid_n && s_max / 2 > lam_min; ++k) {
            double lam = lam_min * std::pow(s_max / 2 / lam_min, double(k) / grid_n);
            double wm = 0, sm = 0;
            for (std::size_t i = 0; i < ids.size(); ++i)
                if (pr.s[i] > 2 * lam && pr.nu[i] <= gl * lam) {
                    wm += omega[ids[i]];
                    sm += sigma[ids[i]];
                }
            best = std::max(best, wm / wq);
            best_s = std::max(best_s, sm / sq);
        }
        t.points.push_back({gl, best});
        ts.points.push_back({gl, best_s});
        xs.push_back(gl);
        ys.push_back(best);
    }
    // Decay exponent: least-squares slope over the positive ratios; a sweep
    // whose ratios vanish below some gl_delta decays faster than any power there.
    std::vector<double> px, py;
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (ys[i] > 0) {
            px.push_back(xs[i]);
            py.push_back(ys[i]);
        }
    double slope = px.size() >= 2 ? fit_loglog(px, py).slope : std::numeric_limits<double>::quiet_NaN();
    double min_exp = p["min_exponent"].get<double>();
    rep.constant("fitted_exponent", slope, slope, 0);
    rep.constant("max_S_over_N", max_sn, max_sn, 0);
    rep.criterion("fitted exponent of the omega ratio >= " + fmt(min_exp) + " over the gl_delta sweep",
                  px.size() >= 2 && slope >= min_exp,
                  std::to_string(px.size()) + " positive ratios of " + std::to_string(xs.size()) + ", slope " + fmt(slope) +
                      ", max Su/Nu " + fmt(max_sn) + ", lambda range [" + fmt(lam_min) + ", " + fmt(s_max / 2) + "]");
    return rep;
}

// ---------------------------------------------------------------------------
// A-infinity test on dyadic pairs with adversarial heaviest-density sets.

ExperimentReport ainfty(const ScenarioConfig& sc, const Json& p) {
    ExperimentReport rep;
    Scenario s(sc, p.value("h", 0.0));
    s.solver.refinement_steps = 0;
    rep.h = s.h();
    const auto& gamma = s.gamma();
    int k0 = p["root_k"].get<int>(), depth = p["depth"].get<int>();
    DyadicLattice lat(gamma, k0, k0 + depth);
    auto fractions = doubles(p["fractions"]);
    auto rs = doubles(p["rh_exponents"]);
    double rh_c = p["rh_constant"].get<double>();
    std::vector<double> worst(fractions.size(), 0.0);
    std::size_t rh_total = 0;
    std::vector<std::size_t> rh_ok(rs.size(), 0);
    bool monotone = true;
    for (int root : lat.generation(k0)) {
        const auto& q = lat.cube(root);
        if (q.edge || q.samples.empty()) continue;
        Point a = corkscrew_point(gamma, q.center, q.outer_radius);
        if (s.grid().locate(a) < 0) continue;
        auto omega = s.omega(a);
        for (int c : lat.descendants(root, true)) {
            const auto& cube = lat.cube(c);
            if (cube.edge || cube.samples.size() < 16) continue;
            std::vector<std::size_t> order = cube.samples;
            auto dens = [&](std::size_t i) { return omega[i] / gamma.sigma_weights()[i]; };
            std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return dens(x) > dens(y); });
            double wtot = 0;
            for (auto i : order) wtot += omega[i];
            if (!(wtot > 0)) throw ScenarioError("degenerate harmonic measure row");
            double prev = 1;
            for (std::size_t fi = 0; fi < fractions.size(); ++fi) {
                double target = fractions[fi] * cube.sigma_mass, sm = 0, wm = 0;
                for (auto i : order) {
                    if (sm >= target) break;
                    sm += gamma.sigma_weights()[i];
                    wm += omega[i];
                }
                double ratio = wm / wtot;
                worst[fi] = std::max(worst[fi], ratio);
                if (ratio > prev + 1e-12) monotone = false;
                prev = ratio;
            }
            if (c == root) continue;
            ++rh_total;
            for (std::size_t ri = 0; ri < rs.size(); ++ri) {
                double mk = 0, mkr = 0, sm = 0;
                for (auto i : cube.samples) {
                    double k = dens(i), w = gamma.sigma_weights()[i];
                    mk += w * k;
                    mkr += w * std::pow(k, rs[ri]);
                    sm += w;
                }
                if (std::pow(mkr / sm, 1.0 / rs[ri]) <= rh_c * mk / sm) ++rh_ok[ri];
            }
        }
    }
    auto& t = rep.table("epsilon_delta", "sigma(E)/sigma(Delta')", "max omega(E)/omega(Delta')");
    for (std::size_t fi = 0; fi < fractions.size(); ++fi) t.points.push_back({fractions[fi], worst[fi]});
    double fitted_r = 0;
    for (std::size_t ri = 0; ri < rs.size(); ++ri)
        if (rh_total > 0 && double(rh_ok[ri]) >= 0.9 * double(rh_total)) fitted_r = std::max(fitted_r, rs[ri]);
    bool decreasing = std::is_sorted(worst.rbegin(), worst.rend());
    rep.constant("reverse_holder_exponent", fitted_r, fitted_r, 0);
    rep.criterion("omega(E)/omega(Delta') decreases with the sigma fraction", monotone && decreasing,
                  "worst ratios " + fmt(worst.front()) + " .. " + fmt(worst.back()));
    rep.criterion("reverse Hoelder exponent r > 1 on >= 90% of cubes", fitted_r > 1,
                  "r = " + fmt(fitted_r) + " over " + std::to_string(rh_total) + " cubes");
    return rep;
}

// ---------------------------------------------------------------------------
// Functional profiles for one solved random datum.

ExperimentReport profiles(const ScenarioConfig& sc, const Json& p, std::uint64_t seed) {
    ExperimentReport rep;
    Scenario s(sc, p.value("h", 0.0));
    s.solver.refinement_steps = 0;
    rep.h = s.h();
    const auto& gamma = s.gamma();
    std::mt19937_64 rng(seed);
    auto f = smooth_random_data(gamma, rng, 4);
    auto sol = s.solve(f, "smooth random data");
    FieldView field(s.grid(), sol.u);
    auto ids = middle_samples(gamma, p["region"].get<double>(), p["stride"].get<std::size_t>(), &s.coupling().coupled());
    double trunc = p["truncation"].get<double>();
    double alpha = p.value("alpha", 0.0) > 0 ? p["alpha"].get<double>()
                                             : (ids.empty() ? 1.0 : default_alpha(gamma, gamma.samples()[ids[0]], trunc));
    auto pr = cone_profiles(field, gamma, ids, alpha, trunc);
    auto kk = p["census_k"].get<std::vector<int>>();
    Census census = make_census(gamma, gamma.footprint().dilated(1 + 1e-9), kk[0], kk[1], 1);
    double mp = p["maximal_p"].get<double>();
    auto m = maximal_function_samples(gamma, f, census, mp);
    auto& ts = rep.table("Su", "sample", "Su");
    auto& ts1 = rep.table("S1u", "sample", "S'u");
    auto& tn = rep.table("Nu", "sample", "Nu");
    auto& tm = rep.table("Mpf", "sample", "M_p f");
    double worst = 0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        ts.points.push_back({double(ids[i]), pr.s[i]});
        ts1.points.push_back({double(ids[i]), pr.s1[i]});
        tn.points.push_back({double(ids[i]), pr.nu[i]});
        tm.points.push_back({double(ids[i]), m[ids[i]]});
        if (m[ids[i]] > 0) worst = std::max(worst, pr.nu[i] / m[ids[i]]);
    }
    bool mono = true;
    for (std::size_t i = 0; i < ids.size(); ++i) mono = mono && pr.s[i] <= pr.s1[i] && pr.s1[i] <= pr.s2[i];
    rep.constant("N_over_Mp_max", worst, worst, 0);
    rep.constant("bmo", bmo_norm(gamma, f, census), 0, 0);
    rep.criterion("aperture monotonicity Su <= S'u <= S''u", mono, std::to_string(ids.size()) + " samples");
    rep.criterion("Nu <= max |f|", *std::max_element(pr.nu.begin(), pr.nu.end()) <= *std::max_element(f.begin(), f.end()) + 1e-9,
                  "max Nu " + fmt(*std::max_element(pr.nu.begin(), pr.nu.end())));
    return rep;
}

// ---------------------------------------------------------------------------

const std::map<std::string, Json>& defaults_table() {
    static const std::map<std::string, Json> table = {
        {"convergence", Json{{"h", {1.0 / 16, 1.0 / 32, 1.0 / 64}}, {"min_order", 0.8}, {"min_factor", 1.7}, {"max_seconds", 300.0}}},
        {"probability", Json{{"h", 0.0}, {"poles", 4}, {"tolerance", 1e-12}}},
        {"geometry", Json{{"sample_spacing", 0x1p-10}, {"whitney_k_max", 5}, {"lattice_k_min", 1}, {"lattice_k_max", 6}}},
        {"scaling",
         Json{{"radii", {0.25, 0.125, 0.0625, 0.03125}}, {"centers", 4}, {"region", 0.25}, {"tol_sigma", 0.1},
              {"tol_m", 0.15}, {"tol_tent", 0.2}, {"tent_exponents", {-0.5, 0.0, 1.0}}}},
        {"structure",
         Json{{"h", {1.0 / 32, 1.0 / 64}}, {"radii", {0.25, 0.125}}, {"centers", 4}, {"far_pole", {0.0, 0.75, 0.75}},
              {"band", kStabilityBand}, {"refinement_steps", 2}}},
        {"cutoff",
         Json{{"h", 0.0}, {"whitney_k_max", 16}, {"root_k", 2}, {"root_sample", 0}, {"N", {2, 3, 4, 5, 6}},
              {"eta", 0x1p-32}, {"K", 16.0}, {"pole", {0.9, 0.9, 0.0}}, {"test_points", 400}, {"max_saturation", 1.25}}},
        {"good_lambda",
         Json{{"h", 0.0}, {"cube_radius", 0.25}, {"c2", 1.0}, {"truncation", 0.5}, {"alpha", 0.0}, {"stride", 2},
              {"data", "martingale"}, {"modes", 6}, {"pole", {0.0, 0.75, 0.75}}, {"gl_delta", {0.4, 0.2, 0.1, 0.05}},
              {"lambda_grid", 64}, {"min_exponent", 1.5}}},
        {"s_less_n",
         Json{{"h", {1.0 / 32, 1.0 / 64}}, {"p", {1.0, 2.0, 4.0}}, {"data", 10}, {"region", 0.25}, {"stride", 4},
              {"truncation", 0.5}, {"alpha", 0.0}, {"band", 0.2}}},
        {"bmo_carleson",
         Json{{"h", {1.0 / 32, 1.0 / 64}}, {"band", kStabilityBand}, {"martingale_draws", 4}, {"martingale_levels", 5},
              {"bmo_k", {1, 7}}, {"bmo_stride", 2}, {"carleson_k", {2, 4}}, {"carleson_stride", 8}, {"region", 0.25},
              {"decay_radius", 0.25}}},
        {"carleson_ainfty",
         Json{{"h", {1.0 / 32, 1.0 / 64}}, {"band", kStabilityBand}, {"radius", 0.25}, {"gl_delta", {0.25, 0.125}},
              {"sample_spacing", 0x1p-15}, {"census_k", {1, 16}}, {"bmo_stride", 16}, {"family", 10},
              {"mollifier_eps", {0x1p-6, 0x1p-8, 0x1p-10}}, {"mollifier_bmo_bound", 1.5}}},
        {"ainfty",
         Json{{"h", 0.0}, {"root_k", 2}, {"depth", 3}, {"fractions", {0.5, 0.25, 0.125, 0.0625}},
              {"rh_exponents", {1.5, 2.0, 3.0, 4.0}}, {"rh_constant", 2.0}}},
        {"functionals",
         Json{{"h", 0.0}, {"region", 0.25}, {"stride", 4}, {"truncation", 0.5}, {"alpha", 0.0}, {"census_k", {1, 7}},
              {"maximal_p", 4.0}}},
    };
    return table;
}

}  // namespace

std::vector<std::string> experiment_names() {
    std::vector<std::string> out;
    for (const auto& [k, v] : defaults_table()) out.push_back(k);
    return out;
}

Json experiment_defaults(const std::string& name) {
    auto it = defaults_table().find(name);
    if (it == defaults_table().end()) throw ConfigError("unknown experiment '" + name + "'");
    return it->second;
}

ExperimentReport run_experiment(const std::string& name, const ScenarioConfig& scenario, const Json& params,
                                std::uint64_t seed) {
    Json p = experiment_defaults(name);
    if (!params.is_null()) {
        if (!params.is_object()) throw ConfigError("experiment parameters must be an object");
        for (auto it = params.begin(); it != params.end(); ++it) {
            if (!p.contains(it.key())) throw ConfigError("unknown parameter '" + it.key() + "' for experiment " + name);
            p[it.key()] = it.value();
        }
    }
    auto t0 = Clock::now();
    ExperimentReport rep;
    if (name == "convergence") rep = convergence(scenario, p);
    else if (name == "probability") rep = probability(scenario, p, seed);
    else if (name == "geometry") rep = geometry(scenario, p);
    else if (name == "scaling") rep = scaling(scenario, p);
    else if (name == "structure") rep = structure(scenario, p);
    else if (name == "cutoff") rep = cutoff(scenario, p, seed);
    else if (name == "good_lambda") rep = good_lambda(scenario, p, seed);
    else if (name == "s_less_n") rep = s_less_n(scenario, p, seed);
    else if (name == "bmo_carleson") rep = bmo_carleson(scenario, p, seed);
    else if (name == "carleson_ainfty") rep = carleson_ainfty(scenario, p);
    else if (name == "ainfty") rep = ainfty(scenario, p);
    else if (name == "functionals") rep = profiles(scenario, p, seed);
    rep.experiment = name;
    rep.scenario = scenario.name;
    if (rep.h == 0) rep.h = scenario.grid.h;
    if (rep.h_fine == 0) rep.h_fine = rep.h / 2;
    rep.params = p;
    rep.seconds = seconds_since(t0);
    return rep;
}

}  // namespace hmlab
