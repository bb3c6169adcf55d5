#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "hmlab/config.hpp"
#include "hmlab/errors.hpp"
#include "hmlab/parallel.hpp"
#include "hmlab/pipeline.hpp"
#include "hmlab/scenario.hpp"
#include "hmlab/solver.hpp"

using namespace hmlab;

namespace {

struct Common {
    std::string config;
    std::vector<std::string> overrides;
    std::string scenario;
    std::string out;
    long long seed = -1;
    int workers = 0;
    double h = 0;
    bool dump = false;
    std::string format;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("-c,--config", c.config, "JSON run config");
    sub->add_option("-s,--set", c.overrides, "override a config key, e.g. scenario.grid.h=0.03125");
    sub->add_option("--scenario", c.scenario, "scenario preset name");
    sub->add_option("-o,--out", c.out, "output directory");
    sub->add_option("--seed", c.seed, "random seed");
    sub->add_option("-j,--workers", c.workers, "worker threads (default: HMLAB_WORKERS or all cores)");
    sub->add_option("--grid-h", c.h, "grid spacing");
    sub->add_flag("--dump-fields", c.dump, "write cell fields");
    sub->add_option("--field-format", c.format, "text or raw");
}

RunConfig build_config(const Common& c, const std::vector<std::string>& experiments) {
    std::vector<std::string> ov;
    if (!c.scenario.empty()) ov.push_back("scenario.preset=\"" + c.scenario + "\"");
    ov.insert(ov.end(), c.overrides.begin(), c.overrides.end());
    if (c.h > 0) {
        std::ostringstream s;
        s.precision(17);
        s << "scenario.grid.h=" << c.h;
        ov.push_back(s.str());
    }
    if (!c.out.empty()) ov.push_back("output_dir=\"" + c.out + "\"");
    if (c.seed >= 0) ov.push_back("seed=" + std::to_string(c.seed));
    if (c.dump) ov.push_back("dump_fields=true");
    if (!c.format.empty()) ov.push_back("field_format=\"" + c.format + "\"");
    RunConfig cfg = load_run_config(c.config, ov);
    if (!experiments.empty()) {
        cfg.experiments.clear();
        for (const auto& e : experiments) cfg.experiments.push_back({e, Json::object()});
    }
    return cfg;
}

int run_stage(const Common& c, const std::string& stage, const std::vector<std::string>& experiments) {
    if (c.workers > 0) set_worker_count(c.workers);
    RunConfig cfg = build_config(c, experiments);
    if (stage == "verify" && cfg.experiments.empty()) {
        std::cerr << "config error: no experiments selected (use --experiment or the config's experiments list)\n";
        return kExitConfig;
    }
    auto res = run(cfg, StageSelection::only(stage), &std::cout);
    std::cout << "exit " << res.exit_code << " (reports in " << cfg.output_dir << ")\n";
    return res.exit_code;
}

int measure(const Common& c, const std::vector<double>& pole, const std::vector<double>& center, double radius) {
    if (c.workers > 0) set_worker_count(c.workers);
    RunConfig cfg = build_config(c, {});
    auto errors = validate(cfg);
    if (!errors.empty()) {
        for (const auto& e : errors) std::cerr << "config error: " << e << "\n";
        return kExitConfig;
    }
    Scenario s(cfg.scenario);
    Point x{0, 0, 0}, q{0, 0, 0};
    for (std::size_t i = 0; i < pole.size() && i < 3; ++i) x[i] = pole[i];
    for (std::size_t i = 0; i < center.size() && i < 3; ++i) q[i] = center[i];
    auto omega = s.omega(x);
    long double total = 0, ball = 0;
    for (std::size_t k = 0; k < omega.size(); ++k) total += omega[k];
    for (auto k : s.gamma().samples_in_ball(q, radius)) ball += omega[k];
    std::cout.precision(15);
    std::cout << "omega(Gamma) " << double(total) << "\n";
    std::cout << "omega(Delta(q, r)) " << double(ball) << "\n";
    std::cout << "sigma(Delta(q, r)) " << s.gamma().sigma_ball(q, radius) << "\n";
    return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hmlab: harmonic measure experiments for lower-dimensional boundaries"};
    app.require_subcommand(1);
    Common common;
    std::vector<std::string> experiments;
    const char* stage_names[] = {"geometry", "lattice", "whitney", "solve", "functionals", "verify", "all"};
    const char* stage_help[] = {"boundary samples and Ahlfors fit",
                                "dyadic cube lattice and its properties",
                                "Whitney decomposition of the box",
                                "solve for the Green function and harmonic measure at a default pole",
                                "square and maximal functions of a random datum",
                                "run the selected experiments",
                                "every stage followed by the experiments"};
    std::vector<CLI::App*> stage_cmds;
    for (int i = 0; i < 7; ++i) {
        auto* sub = app.add_subcommand(stage_names[i], stage_help[i]);
        add_common(sub, common);
        if (std::string(stage_names[i]) == "verify" || std::string(stage_names[i]) == "all")
            sub->add_option("-e,--experiment", experiments, "experiment name (repeatable)");
        stage_cmds.push_back(sub);
    }
    auto* meas = app.add_subcommand("measure", "harmonic measure of a surface ball from a pole");
    add_common(meas, common);
    std::vector<double> pole, center{0, 0, 0};
    double radius = 0.25;
    meas->add_option("--pole", pole, "pole coordinates")->required()->expected(2, 3);
    meas->add_option("--center", center, "ball centre on the boundary")->expected(2, 3);
    meas->add_option("--radius", radius, "ball radius");
    auto* list = app.add_subcommand("list_scenarios", "print the preset catalogue");
    bool as_json = false;
    list->add_flag("--json", as_json, "print presets as JSON");
    auto* exps = app.add_subcommand("list_experiments", "print experiment names and default parameters");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (list->parsed()) {
            for (const auto& s : list_scenarios()) {
                if (as_json) std::cout << to_json(s).dump() << "\n";
                else
                    std::cout << s.name << "  n=" << s.ambient_dim << " d=" << s.boundary_dim << "  " << s.description
                              << (s.exploratory ? "  [exploratory]" : "") << "\n";
            }
            return 0;
        }
        if (exps->parsed()) {
            for (const auto& n : experiment_names()) std::cout << n << " " << experiment_defaults(n).dump() << "\n";
            return 0;
        }
        if (meas->parsed()) return measure(common, pole, center, radius);
        for (int i = 0; i < 7; ++i)
            if (stage_cmds[i]->parsed()) return run_stage(common, stage_names[i], experiments);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ScenarioError& e) {
        std::cerr << "scenario error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitResource;
    }
    return 0;
}
