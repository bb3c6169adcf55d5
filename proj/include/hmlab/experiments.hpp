#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <utility>
#include <vector>

#include "hmlab/config.hpp"

namespace hmlab {

struct TablePoint {
    double x = 0;
    double y = 0;
};

struct Table {
    std::string name;
    std::string x_label;
    std::string y_label;
    std::vector<TablePoint> points;
};

// A measured constant at the resolution pair (h, h/2).
struct Constant {
    double coarse = 0;
    double fine = 0;
    double drift = 0;
    double band = 0;  // allowed drift, 0 when the constant is report-only
    bool stable() const { return band <= 0 || drift <= band; }
};

struct Criterion {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct ExperimentReport {
    std::string experiment;
    std::string scenario;
    double h = 0;
    double h_fine = 0;
    Json params = Json::object();
    // Deques so references returned by table() and constant() stay valid.
    std::deque<Table> tables;
    std::deque<std::pair<std::string, Constant>> constants;
    std::vector<Criterion> criteria;
    std::vector<std::string> notes;
    double seconds = 0;  // wall time, kept out of the tables

    bool pass() const;
    Table& table(const std::string& name, const std::string& x_label, const std::string& y_label);
    const Table* find_table(const std::string& name) const;
    const Constant* find_constant(const std::string& name) const;
    Constant& constant(const std::string& name, double coarse, double fine, double band);
    Criterion& criterion(const std::string& name, bool pass, const std::string& detail);
};

// Names accepted by run_experiment.
std::vector<std::string> experiment_names();

// Runs one experiment. Parameters missing from `params` take their defaults;
// the effective parameters are echoed in the report.
ExperimentReport run_experiment(const std::string& name, const ScenarioConfig& scenario, const Json& params,
                                std::uint64_t seed);

// Default parameters of an experiment.
Json experiment_defaults(const std::string& name);

}  // namespace hmlab
