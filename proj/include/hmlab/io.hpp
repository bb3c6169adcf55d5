#pragma once

#include <string>
#include <vector>

#include "hmlab/config.hpp"
#include "hmlab/experiments.hpp"
#include "hmlab/grid.hpp"

namespace hmlab {

// Report JSON: {experiment, scenario, h, h_fine, params, tables, constants,
// criteria, notes, pass, seconds}. See docs/formats.md.
Json report_to_json(const ExperimentReport& report);

// CSV twin of a table: header "x,y" then one row per point, values printed
// with 17 significant digits.
std::string table_csv(const Table& table);

// File-name safe form of a table or experiment name.
std::string slug(const std::string& name);

// Writes <dir>/<experiment>.json and one <experiment>__<table>.csv per table.
// Returns the paths written.
std::vector<std::string> write_report(const std::string& dir, const ExperimentReport& report);

// Cell-centred field dump. "text": a '#'-prefixed header followed by one value
// per line in storage order; "raw": the binary layout in docs/formats.md.
void write_field(const std::string& path, const Grid& grid, const std::vector<double>& values, const std::string& format,
                 const std::string& name);

struct FieldDump {
    std::string name;
    int dim = 0;
    std::array<int, 3> dims{1, 1, 1};
    double h = 0;
    Point origin{0, 0, 0};
    std::vector<double> values;
};

FieldDump read_field(const std::string& path);

void write_text(const std::string& path, const std::string& content);

}  // namespace hmlab
