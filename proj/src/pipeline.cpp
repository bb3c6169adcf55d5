#include "hmlab/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <random>

#include "hmlab/dyadic.hpp"
#include "hmlab/errors.hpp"
#include "hmlab/functionals.hpp"
#include "hmlab/io.hpp"
#include "hmlab/metric.hpp"
#include "hmlab/scenario.hpp"
#include "hmlab/whitney.hpp"

namespace hmlab {

StageSelection StageSelection::only(const std::string& stage) {
    StageSelection s{false, false, false, false, false, false};
    if (stage == "geometry") s.geometry = true;
    else if (stage == "lattice") s.lattice = true;
    else if (stage == "whitney") s.whitney = true;
    else if (stage == "solve" || stage == "measure") s.solve = true;
    else if (stage == "functionals") s.functionals = true;
    else if (stage == "verify") s.experiments = true;
    else if (stage == "all") s = StageSelection{};
    else throw ConfigError("unknown stage '" + stage + "'");
    return s;
}

namespace {

AxisBox cube_domain(const ScenarioConfig& sc) {
    AxisBox b;
    for (int i = 0; i < sc.ambient_dim; ++i) {
        b.lo[i] = -sc.grid.half_width;
        b.hi[i] = sc.grid.half_width;
    }
    return b;
}

// An interior pole at half the box half-width off the boundary when possible.
Point default_pole(const Scenario& s) {
    const Grid& grid = s.grid();
    Point best = grid.box().center();
    double best_delta = -1;
    const int n = grid.dim();
    for (int axis = 1; axis < n; ++axis) {
        for (double sign : {1.0, -1.0}) {
            Point x = grid.box().center();
            x[axis] += sign * 0.5 * grid.box().side(axis) / 2;
            if (n == 3 && axis == 1) x[2] += sign * 0.5 * grid.box().side(2) / 2;
            long idx = grid.locate(x);
            if (idx < 0 || s.system().fixed(std::size_t(idx))) continue;
            double dl = s.gamma().distance(x);
            if (dl > best_delta) {
                best_delta = dl;
                best = x;
            }
        }
    }
    if (best_delta < 0) throw ScenarioError("no interior pole found");
    return best;
}

int exit_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ScenarioError*>(&e) ||
        dynamic_cast<const ArgumentError*>(&e) || dynamic_cast<const ParameterError*>(&e))
        return kExitConfig;
    return kExitResource;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

RunResult run(const RunConfig& config, const StageSelection& stages, std::ostream* log) {
    RunResult res;
    auto say = [&](const std::string& s) {
        if (log) *log << s << "\n";
    };
    res.errors = validate(config);
    auto names = experiment_names();
    for (const auto& e : config.experiments)
        if (std::find(names.begin(), names.end(), e.name) == names.end())
            res.errors.push_back("unknown experiment '" + e.name + "'");
    if (!res.errors.empty()) {
        res.exit_code = kExitConfig;
        for (const auto& e : res.errors) say("config error: " + e);
        return res;
    }
    const ScenarioConfig& sc = config.scenario;
    const std::string& dir = config.output_dir;
    std::filesystem::create_directories(dir);
    res.summary["config"] = to_json(config);
    Json& st = res.summary["stages"] = Json::object();

    auto finish = [&]() {
        res.summary["exit_code"] = res.exit_code;
        res.summary["errors"] = res.errors;
        write_text((std::filesystem::path(dir) / "run.json").string(), res.summary.dump(2) + "\n");
    };

    std::string stage = "geometry";
    try {
        auto gamma = make_boundary(sc);
        if (stages.geometry) {
            auto t0 = std::chrono::steady_clock::now();
            std::vector<std::size_t> centers;
            for (std::size_t k = 0; k < 4 && gamma->size() > 0; ++k) centers.push_back(k * (gamma->size() - 1) / 3);
            std::sort(centers.begin(), centers.end());
            centers.erase(std::unique(centers.begin(), centers.end()), centers.end());
            Json g{{"samples", gamma->size()}, {"ambient_dim", gamma->ambient_dim()}, {"boundary_dim", gamma->boundary_dim()}};
            if (gamma->boundary_dim() > 0) {
                auto fit = gamma->ahlfors_fit(centers, {0.25, 0.125, 0.0625});
                g["ahlfors_slope"] = fit.slope;
                g["ahlfors_C0"] = fit.constant;
            }
            g["seconds"] = elapsed(t0);
            st["geometry"] = g;
            say("geometry: " + std::to_string(gamma->size()) + " samples");
        }
        if (stages.lattice) {
            stage = "lattice";
            DyadicLattice lat(*gamma, 1, 6);
            const auto& r = lat.report();
            st["lattice"] = {{"cubes", r.cubes},       {"edge_cubes", r.edge_cubes}, {"a0", r.a0}, {"C2", r.C2},
                             {"gamma", r.gamma},       {"rho", r.rho},             {"gamma_per_rho", r.gamma_per_rho},
                             {"properties_hold", r.properties_hold()}};
            say(std::string("lattice: ") + std::to_string(r.cubes) + " cubes, properties " +
                (r.properties_hold() ? "hold" : "violated"));
        }
        if (stages.whitney) {
            stage = "whitney";
            WhitneyOptions wo;
            WhitneyDecomposition wd(*gamma, cube_domain(sc), wo);
            const auto& r = wd.report();
            st["whitney"] = {{"boxes", r.boxes},
                             {"wbox_violations", r.wbox_violations},
                             {"uncovered_volume", r.uncovered_volume},
                             {"domain_volume", r.domain_volume},
                             {"theta", r.theta},
                             {"resolution_warning", r.resolution_warning}};
            say("whitney: " + std::to_string(r.boxes) + " boxes, " + std::to_string(r.wbox_violations) + " violations");
        }
        if (stages.solve || stages.functionals) {
            stage = "solve";
            auto t0 = std::chrono::steady_clock::now();
            Scenario s(sc);
            Point pole = default_pole(s);
            auto green = s.green(pole);
            auto row = harmonic_measure_row(s.system(), green);
            auto omega = s.omega(green);
            long double total = 0;
            for (double v : omega) total += v;
            Json j{{"h", s.h()},
                   {"cells", s.grid().size()},
                   {"absorbing_cells", s.grid().absorbing_cells().size()},
                   {"pole", {pole[0], pole[1], pole[2]}},
                   {"omega_total", double(total)},
                   {"omega_total_defect", std::fabs(double(total - 1.0L))},
                   {"row_min", row.min()},
                   {"green_iterations", green.iterations},
                   {"ellipticity_c1", s.system().ellipticity().c1}};
            if (config.dump_fields) {
                std::string ext = config.field_format == "raw" ? ".bin" : ".txt";
                auto base = std::filesystem::path(dir) / "fields";
                write_field((base / ("green" + ext)).string(), s.grid(), green.g, config.field_format, "green");
                write_field((base / ("delta" + ext)).string(), s.grid(), s.grid().deltas(), config.field_format, "delta");
            }
            j["seconds"] = elapsed(t0);
            st["solve"] = j;
            say("solve: omega(Gamma) = " + std::to_string(double(total)) + " at h = " + std::to_string(s.h()));

            if (stages.functionals) {
                stage = "functionals";
                std::mt19937_64 rng(config.seed);
                std::uniform_real_distribution<double> unif(0.0, 1.0);
                std::vector<double> f(s.gamma().size());
                for (auto& v : f) v = unif(rng);
                auto sol = s.solve(f, "uniform random data");
                FieldView field(s.grid(), sol.u);
                const auto& active = s.active_samples();
                Json rows = Json::array();
                std::size_t count = std::min<std::size_t>(active.size(), 16);
                for (std::size_t k = 0; k < count; ++k) {
                    std::size_t id = active[k * active.size() / count];
                    const Point& q = s.gamma().samples()[id];
                    double r = 0.25 * sc.grid.half_width;
                    double a = 2 * r / s.gamma().distance(corkscrew_point(s.gamma(), q, r));
                    auto sq = square_functions(field, q, {a, 2 * a}, r);
                    ConeSpec cone;
                    cone.q = q;
                    cone.aperture = 4 * a;
                    cone.truncation = r;
                    rows.push_back({{"sample", id}, {"S", sq[0]}, {"S_wide", sq[1]}, {"N", nontangential_max(field, cone)}});
                }
                st["functionals"] = {{"profiles", rows}, {"max_principle_violation", sol.max_principle_violation(s.system())}};
                if (config.dump_fields) {
                    std::string ext = config.field_format == "raw" ? ".bin" : ".txt";
                    write_field((std::filesystem::path(dir) / "fields" / ("u" + ext)).string(), s.grid(), sol.u,
                                config.field_format, "u");
                }
                say("functionals: " + std::to_string(count) + " sample profiles");
            }
        }
    } catch (const std::exception& e) {
        res.exit_code = exit_for(e);
        res.errors.push_back(stage + ": " + e.what());
        say("error in " + stage + ": " + e.what());
        finish();
        return res;
    }

    if (stages.experiments) {
        Json ex = Json::object();
        bool all_pass = true;
        for (const auto& e : config.experiments) {
            try {
                auto rep = run_experiment(e.name, sc, e.params, config.seed);
                write_report(dir, rep);
                for (const auto& c : rep.criteria) say((c.pass ? "PASS " : "FAIL ") + e.name + ": " + c.name + " (" + c.detail + ")");
                ex[e.name] = rep.pass();
                all_pass = all_pass && rep.pass();
                res.reports.push_back(std::move(rep));
            } catch (const std::exception& err) {
                res.errors.push_back(e.name + ": " + err.what());
                say("error in " + e.name + ": " + err.what());
                ex[e.name] = nullptr;
                res.exit_code = std::max(res.exit_code, exit_for(err));
            }
        }
        st["experiments"] = ex;
        if (res.exit_code == kExitPass && !all_pass) res.exit_code = kExitCriteria;
    }
    finish();
    return res;
}

}  // namespace hmlab
