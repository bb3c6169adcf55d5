#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hmlab/config.hpp"
#include "hmlab/errors.hpp"
#include "hmlab/experiments.hpp"
#include "hmlab/io.hpp"
#include "hmlab/parallel.hpp"
#include "hmlab/pipeline.hpp"

namespace py = pybind11;
using namespace hmlab;

// JSON crosses the boundary as text; the Python wrapper decodes it.
namespace {

ScenarioConfig scenario_arg(const std::string& text) {
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded()) j = text;
    return scenario_from_json(j);
}

std::string list_scenarios_json() {
    Json out = Json::array();
    for (const auto& s : list_scenarios()) out.push_back(to_json(s));
    return out.dump();
}

std::string run_experiment_json(const std::string& name, const std::string& scenario, const std::string& params,
                                std::uint64_t seed) {
    Json p = params.empty() ? Json::object() : Json::parse(params);
    ExperimentReport rep;
    {
        py::gil_scoped_release release;
        rep = run_experiment(name, scenario_arg(scenario), p, seed);
    }
    return report_to_json(rep).dump();
}

std::pair<int, std::string> run_json(const std::string& config, const std::string& stage) {
    RunConfig c = run_config_from_json(Json::parse(config));
    RunResult r;
    {
        py::gil_scoped_release release;
        r = run(c, StageSelection::only(stage));
    }
    Json s = r.summary;
    s["errors"] = r.errors;
    return {r.exit_code, s.dump()};
}

std::vector<std::string> validate_json(const std::string& config) {
    return validate(run_config_from_json(Json::parse(config)));
}

}  // namespace

PYBIND11_MODULE(_hmlab, m) {
    m.doc() = "hmlab core bindings";
    // Translators run newest first, so the subclass goes last.
    py::register_exception<Error>(m, "HmlabError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    m.def("list_scenarios", &list_scenarios_json);
    m.def("experiment_names", &experiment_names);
    m.def("experiment_defaults", [](const std::string& n) { return experiment_defaults(n).dump(); });
    m.def("run_experiment", &run_experiment_json, py::arg("name"), py::arg("scenario"), py::arg("params") = "",
          py::arg("seed") = 1);
    m.def("run", &run_json, py::arg("config"), py::arg("stage") = "all");
    m.def("validate", &validate_json);
    m.def("set_worker_count", &set_worker_count);
}
