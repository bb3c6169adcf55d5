#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "hmlab/boundary.hpp"
#include "hmlab/grid.hpp"

namespace hmlab {

using Json = nlohmann::ordered_json;

struct GridConfig {
    double h = 1.0 / 16;
    double half_width = 1.0;      // grid box [-half_width, half_width]^n
    double r_abs_factor = 1.0;
};

struct ScenarioConfig {
    std::string name = "flat_line";
    std::string description;
    int ambient_dim = 3;
    int boundary_dim = 1;
    GammaSpec gamma;
    double sample_spacing = 1.0 / 128;  // curve parameter step
    double footprint_half_width = 1.0;  // sampled parameter range [-w, w] for graphs and lines
    GridConfig grid;
    OperatorPreset op = OperatorPreset::PureWeight;
    bool exploratory = false;

    AxisBox grid_box() const;
    AxisBox footprint() const;
};

struct ExperimentConfig {
    std::string name;
    Json params = Json::object();
};

struct RunConfig {
    ScenarioConfig scenario;
    std::vector<ExperimentConfig> experiments;
    std::uint64_t seed = 1;
    std::string output_dir = "hmlab_out";
    bool dump_fields = false;
    std::string field_format = "text";  // text | raw
};

// Preset catalogue.
std::vector<ScenarioConfig> list_scenarios();
ScenarioConfig scenario_preset(const std::string& name);

Json to_json(const ScenarioConfig& s);
ScenarioConfig scenario_from_json(const Json& j);
Json to_json(const RunConfig& c);
RunConfig run_config_from_json(const Json& j);

// Every violation found, empty when the config is usable.
std::vector<std::string> validate(const RunConfig& c);

// Applies "dotted.key=value" overrides; values parse as JSON, falling back to strings.
void apply_override(Json& j, const std::string& assignment);

RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides = {});

}  // namespace hmlab
