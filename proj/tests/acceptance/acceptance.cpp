// Acceptance run: one PASS/FAIL line per criterion. Tolerances are pinned
// here and passed to the experiments explicitly.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "hmlab/config.hpp"
#include "hmlab/experiments.hpp"
#include "hmlab/io.hpp"
#include "hmlab/parallel.hpp"

using namespace hmlab;

namespace {

constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
    bool pass = true;
    std::string detail;
};

void absorb(Outcome& o, const ExperimentReport& r) {
    for (const auto& c : r.criteria) {
        o.pass = o.pass && c.pass;
        o.detail += "\n      " + std::string(c.pass ? "ok   " : "FAIL ") + r.scenario + ": " + c.name + " [" + c.detail + "]";
    }
}

ExperimentReport run(const std::string& experiment, const std::string& scenario, const Json& params) {
    return run_experiment(experiment, scenario_preset(scenario), params, kSeed);
}

Outcome criterion_convergence() {
    Outcome o;
    absorb(o, run("convergence", "flat_line",
                  {{"h", {1.0 / 16, 1.0 / 32, 1.0 / 64}}, {"min_order", 0.8}, {"min_factor", 1.7}, {"max_seconds", 300.0}}));
    return o;
}

Outcome criterion_probability() {
    Outcome o;
    for (const char* s : {"flat_line", "point", "sine_graph", "polyline", "point_cluster"})
        absorb(o, run("probability", s, {{"poles", 4}, {"tolerance", 1e-12}}));
    return o;
}

Outcome criterion_geometry() {
    Outcome o;
    for (const char* s : {"flat_line", "sine_graph", "polyline", "point", "point_cluster"})
        absorb(o, run("geometry", s, {{"whitney_k_max", 5}, {"lattice_k_min", 1}, {"lattice_k_max", 6}}));
    return o;
}

Outcome criterion_scaling() {
    Outcome o;
    for (const char* s : {"flat_line", "sine_graph", "polyline"})
        absorb(o, run("scaling", s, {{"tol_sigma", 0.1}, {"tol_m", 0.15}, {"tol_tent", 0.2}, {"tent_exponents", {-0.5, 0.0, 1.0}}}));
    return o;
}

Outcome criterion_structure() {
    Outcome o;
    for (const char* s : {"flat_line", "sine_graph"})
        absorb(o, run("structure", s, {{"h", {1.0 / 32, 1.0 / 64}}, {"band", 0.25}}));
    return o;
}

Outcome criterion_cutoff() {
    Outcome o;
    absorb(o, run("cutoff", "point_cluster", {{"N", {2, 3, 4, 5, 6}}, {"max_saturation", 1.25}}));
    return o;
}

Outcome criterion_good_lambda() {
    Outcome o;
    absorb(o, run("good_lambda", "flat_line", {{"h", 1.0 / 64}, {"gl_delta", {0.4, 0.2, 0.1, 0.05}}, {"min_exponent", 1.5}}));
    return o;
}

Outcome criterion_s_less_n() {
    Outcome o;
    absorb(o, run("s_less_n", "flat_line", {{"h", {1.0 / 32, 1.0 / 64}}, {"data", 10}, {"band", 0.2}}));
    return o;
}

Outcome criterion_bmo_carleson() {
    Outcome o;
    absorb(o, run("bmo_carleson", "flat_line", {{"h", {1.0 / 32, 1.0 / 64}}, {"band", 0.25}}));
    return o;
}

Outcome criterion_carleson_ainfty() {
    Outcome o;
    absorb(o, run("carleson_ainfty", "flat_line",
                  {{"h", {1.0 / 32, 1.0 / 64}}, {"band", 0.25}, {"gl_delta", {0.25, 0.125}}, {"mollifier_bmo_bound", 1.5}}));
    return o;
}

// Same config and seed under different worker counts must give identical
// table bytes.
Outcome criterion_determinism() {
    Outcome o;
    const std::vector<std::pair<std::string, std::string>> runs = {
        {"probability", "sine_graph"}, {"functionals", "flat_line"}, {"scaling", "polyline"}};
    for (const auto& [exp, scen] : runs) {
        std::vector<std::string> dumps;
        for (int workers : {1, 3, 1}) {
            set_worker_count(workers);
            auto r = run(exp, scen, Json::object());
            std::string bytes;
            for (const auto& t : r.tables) bytes += t.name + "\n" + table_csv(t);
            for (const auto& [name, c] : r.constants) bytes += name + "," + std::to_string(c.coarse) + "," + std::to_string(c.fine) + "\n";
            dumps.push_back(bytes);
        }
        set_worker_count(0);
        bool same = dumps[0] == dumps[1] && dumps[1] == dumps[2];
        o.pass = o.pass && same;
        o.detail += "\n      " + std::string(same ? "ok   " : "FAIL ") + exp + " on " + scen + ": " +
                    std::to_string(dumps[0].size()) + " table bytes, identical across workers {1,3,1}";
    }
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"exact-solution convergence", criterion_convergence},
        {"probability conservation", criterion_probability},
        {"geometry exactness", criterion_geometry},
        {"scaling laws", criterion_scaling},
        {"structural harmonic-measure estimates", criterion_structure},
        {"cutoff lemma", criterion_cutoff},
        {"good-lambda exponent", criterion_good_lambda},
        {"S bounded by N", criterion_s_less_n},
        {"BMO to Carleson", criterion_bmo_carleson},
        {"Carleson to A-infinity", criterion_carleson_ainfty},
        {"determinism", criterion_determinism},
    };
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) only.push_back(std::stoi(argv[i]));
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        int id = int(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("\n      error: ") + e.what();
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (!o.pass) ++failures;
        std::printf("%s  %2d  %s  (%.1f s)%s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(), secs,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
