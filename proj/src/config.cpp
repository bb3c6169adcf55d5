#include "hmlab/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "hmlab/errors.hpp"

namespace hmlab {

AxisBox ScenarioConfig::grid_box() const {
    AxisBox b{{0, 0, 0}, {0, 0, 0}};
    for (int i = 0; i < ambient_dim; ++i) {
        b.lo[i] = -grid.half_width;
        b.hi[i] = grid.half_width;
    }
    return b;
}

AxisBox ScenarioConfig::footprint() const {
    AxisBox b{{0, 0, 0}, {0, 0, 0}};
    for (int i = 0; i < ambient_dim; ++i) {
        b.lo[i] = -footprint_half_width;
        b.hi[i] = footprint_half_width;
    }
    return b;
}

std::vector<ScenarioConfig> list_scenarios() {
    std::vector<ScenarioConfig> out;

    ScenarioConfig flat;
    flat.name = "flat_line";
    flat.description = "x-axis in R^3 (n=3, d=1)";
    flat.gamma.kind = GammaKind::Flat;
    out.push_back(flat);

    ScenarioConfig point;
    point.name = "point";
    point.description = "origin in R^2 (n=2, d=0)";
    point.ambient_dim = 2;
    point.boundary_dim = 0;
    point.gamma.kind = GammaKind::Flat;
    point.grid.h = 1.0 / 64;
    out.push_back(point);

    ScenarioConfig sine;
    sine.name = "sine_graph";
    sine.description = "graph (t, L sin t, 0) in R^3 with small Lipschitz constant L";
    sine.gamma.kind = GammaKind::LipschitzGraph;
    sine.gamma.amplitude = 0.1;
    sine.gamma.frequency = 1.0;
    sine.footprint_half_width = 3.0;
    out.push_back(sine);

    ScenarioConfig large = sine;
    large.name = "sine_graph_large";
    large.description = "graph (t, L sin t, 0) with L = 2 (exploratory)";
    large.gamma.amplitude = 2.0;
    large.exploratory = true;
    out.push_back(large);

    ScenarioConfig poly;
    poly.name = "polyline";
    poly.description = "corner (-4,-2,0) -> (0,0,0) -> (4,-2,0) in R^3";
    poly.gamma.kind = GammaKind::Polyline;
    poly.gamma.vertices = {{-4, -2, 0}, {0, 0, 0}, {4, -2, 0}};
    out.push_back(poly);

    ScenarioConfig cluster;
    cluster.name = "point_cluster";
    cluster.description = "four points in R^2 (n=2, d=0)";
    cluster.ambient_dim = 2;
    cluster.boundary_dim = 0;
    cluster.gamma.kind = GammaKind::PointCloud;
    cluster.gamma.points = {{-0.25, 0, 0}, {0.25, 0, 0}, {0, 0.375, 0}, {0, -0.5, 0}};
    cluster.grid.h = 1.0 / 64;
    out.push_back(cluster);
    return out;
}

ScenarioConfig scenario_preset(const std::string& name) {
    for (auto& s : list_scenarios())
        if (s.name == name) return s;
    throw ConfigError("unknown scenario preset '" + name + "'");
}

namespace {

Json point_json(const Point& p, int n) {
    Json a = Json::array();
    for (int i = 0; i < n; ++i) a.push_back(p[i]);
    return a;
}

Point point_from(const Json& j) {
    Point p{0, 0, 0};
    if (!j.is_array() || j.size() < 1 || j.size() > 3) throw ConfigError("points must be arrays of 1 to 3 numbers");
    for (std::size_t i = 0; i < j.size(); ++i) p[i] = j[i].get<double>();
    return p;
}

template <class T>
T get_or(const Json& j, const char* key, T fallback) {
    return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

Json to_json(const ScenarioConfig& s) {
    Json g;
    g["kind"] = to_string(s.gamma.kind);
    if (s.gamma.kind == GammaKind::LipschitzGraph) {
        g["amplitude"] = s.gamma.amplitude;
        g["frequency"] = s.gamma.frequency;
        g["lipschitz_constant"] = s.gamma.lipschitz_constant();
    }
    if (s.gamma.kind == GammaKind::Polyline) {
        g["vertices"] = Json::array();
        for (auto& v : s.gamma.vertices) g["vertices"].push_back(point_json(v, s.ambient_dim));
    }
    if (s.gamma.kind == GammaKind::PointCloud) {
        g["points"] = Json::array();
        for (auto& v : s.gamma.points) g["points"].push_back(point_json(v, s.ambient_dim));
        if (!s.gamma.weights.empty()) g["weights"] = s.gamma.weights;
    }
    Json j;
    j["name"] = s.name;
    j["description"] = s.description;
    j["ambient_dim"] = s.ambient_dim;
    j["boundary_dim"] = s.boundary_dim;
    j["gamma"] = g;
    j["sample_spacing"] = s.sample_spacing;
    j["footprint_half_width"] = s.footprint_half_width;
    j["grid"] = {{"h", s.grid.h}, {"half_width", s.grid.half_width}, {"r_abs_factor", s.grid.r_abs_factor}};
    j["operator"] = to_string(s.op);
    j["exploratory"] = s.exploratory;
    return j;
}

ScenarioConfig scenario_from_json(const Json& j) {
    ScenarioConfig s;
    if (j.is_string()) return scenario_preset(j.get<std::string>());
    if (!j.is_object()) throw ConfigError("scenario must be a preset name or an object");
    if (j.contains("preset")) s = scenario_preset(j.at("preset").get<std::string>());
    try {
        s.name = get_or<std::string>(j, "name", s.name);
        s.description = get_or<std::string>(j, "description", s.description);
        s.ambient_dim = get_or<int>(j, "ambient_dim", s.ambient_dim);
        s.boundary_dim = get_or<int>(j, "boundary_dim", s.boundary_dim);
        if (j.contains("gamma")) {
            const Json& g = j.at("gamma");
            if (g.contains("kind")) s.gamma.kind = gamma_kind_from_string(g.at("kind").get<std::string>());
            s.gamma.amplitude = get_or<double>(g, "amplitude", s.gamma.amplitude);
            s.gamma.frequency = get_or<double>(g, "frequency", s.gamma.frequency);
            if (g.contains("lipschitz_constant") && !g.contains("amplitude"))
                s.gamma.amplitude = g.at("lipschitz_constant").get<double>() / s.gamma.frequency;
            if (g.contains("vertices")) {
                s.gamma.vertices.clear();
                for (auto& v : g.at("vertices")) s.gamma.vertices.push_back(point_from(v));
            }
            if (g.contains("points")) {
                s.gamma.points.clear();
                for (auto& v : g.at("points")) s.gamma.points.push_back(point_from(v));
            }
            if (g.contains("weights")) s.gamma.weights = g.at("weights").get<std::vector<double>>();
        }
        s.sample_spacing = get_or<double>(j, "sample_spacing", s.sample_spacing);
        s.footprint_half_width = get_or<double>(j, "footprint_half_width", s.footprint_half_width);
        if (j.contains("grid")) {
            const Json& g = j.at("grid");
            s.grid.h = get_or<double>(g, "h", s.grid.h);
            s.grid.half_width = get_or<double>(g, "half_width", s.grid.half_width);
            s.grid.r_abs_factor = get_or<double>(g, "r_abs_factor", s.grid.r_abs_factor);
        }
        if (j.contains("operator")) s.op = operator_preset_from_string(j.at("operator").get<std::string>());
        s.exploratory = get_or<bool>(j, "exploratory", s.exploratory);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed scenario: ") + e.what());
    }
    return s;
}

Json to_json(const RunConfig& c) {
    Json j;
    j["scenario"] = to_json(c.scenario);
    j["experiments"] = Json::array();
    for (auto& e : c.experiments) j["experiments"].push_back({{"name", e.name}, {"params", e.params}});
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir;
    j["dump_fields"] = c.dump_fields;
    j["field_format"] = c.field_format;
    return j;
}

RunConfig run_config_from_json(const Json& j) {
    RunConfig c;
    if (!j.is_object()) throw ConfigError("run config must be an object");
    try {
        if (j.contains("scenario")) c.scenario = scenario_from_json(j.at("scenario"));
        if (j.contains("experiments")) {
            for (auto& e : j.at("experiments")) {
                ExperimentConfig ec;
                if (e.is_string()) {
                    ec.name = e.get<std::string>();
                } else {
                    ec.name = e.at("name").get<std::string>();
                    if (e.contains("params")) ec.params = e.at("params");
                }
                c.experiments.push_back(ec);
            }
        }
        c.seed = get_or<std::uint64_t>(j, "seed", c.seed);
        c.output_dir = get_or<std::string>(j, "output_dir", c.output_dir);
        c.dump_fields = get_or<bool>(j, "dump_fields", c.dump_fields);
        c.field_format = get_or<std::string>(j, "field_format", c.field_format);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed run config: ") + e.what());
    }
    return c;
}

std::vector<std::string> validate(const RunConfig& c) {
    std::vector<std::string> v;
    const ScenarioConfig& s = c.scenario;
    if (s.ambient_dim < 2 || s.ambient_dim > 3) v.push_back("ambient_dim must be 2 or 3");
    if (s.boundary_dim < 0) v.push_back("boundary_dim must be non-negative");
    if (s.boundary_dim >= s.ambient_dim - 1) v.push_back("codimension >= 2 required (boundary_dim < ambient_dim - 1)");
    if (s.gamma.kind != GammaKind::PointCloud && s.gamma.kind != GammaKind::Flat && s.boundary_dim != 1)
        v.push_back("graph and polyline boundaries are curves (boundary_dim = 1)");
    if (s.gamma.kind == GammaKind::Polyline && s.gamma.vertices.size() < 2)
        v.push_back("polyline needs at least two vertices");
    if (s.gamma.kind == GammaKind::PointCloud && s.gamma.points.empty()) v.push_back("point cloud is empty");
    if (!(s.grid.h > 0)) v.push_back("grid.h must be positive");
    if (!(s.grid.half_width > 0)) v.push_back("grid.half_width must be positive");
    if (s.grid.h > 0 && s.grid.half_width > 0) {
        double cells = 2 * s.grid.half_width / s.grid.h;
        if (std::fabs(cells - std::round(cells)) > 1e-9 * cells || cells < 8)
            v.push_back("grid.h must divide the box side into at least 8 cells");
        double total = std::pow(cells, s.ambient_dim);
        if (total > 2.2e6) v.push_back("grid exceeds 128^3 cells");
    }
    if (!(s.grid.r_abs_factor > 0)) v.push_back("grid.r_abs_factor must be positive");
    if (!(s.sample_spacing > 0)) v.push_back("sample_spacing must be positive");
    if (s.boundary_dim == 1 && s.sample_spacing > s.grid.h) v.push_back("sample_spacing must not exceed grid.h");
    if (s.gamma.kind == GammaKind::LipschitzGraph && s.footprint_half_width < s.grid.half_width)
        v.push_back("footprint must cover the grid box");
    if (c.field_format != "text" && c.field_format != "raw") v.push_back("field_format must be text or raw");
    if (c.output_dir.empty()) v.push_back("output_dir must be set");
    return v;
}

void apply_override(Json& j, const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override must look like key=value: " + assignment);
    std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
    Json value = Json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    Json* node = &j;
    std::stringstream ss(key);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        Json& next = (*node)[parts[i]];
        if (next.is_string() && parts[i] == "scenario") next = Json{{"preset", next.get<std::string>()}};
        if (!next.is_object()) next = Json::object();
        node = &next;
    }
    (*node)[parts.back()] = value;
}

RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides) {
    Json j = Json::object();
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file " + path);
        j = Json::parse(in, nullptr, false);
        if (j.is_discarded()) throw ConfigError("config file " + path + " is not valid JSON");
    }
    for (auto& o : overrides) apply_override(j, o);
    return run_config_from_json(j);
}

}  // namespace hmlab
