#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "hodo/multiindex.hpp"

namespace hodo {

// Flat key-value scenario document with typed sections; no nested includes.
struct ScenarioConfig {
    // [model]
    double q = 0.5;
    int n = 2;
    int m = 1;
    // [ck]
    int order = 8;
    double R = 0.5;
    double r = 0.1;
    double C0 = -1;          // < 0: calibrated at run time
    double eps0 = 1e-2;      // data-norm target for the invariant rescaling
    // [data]: tangential multi-index (n-1 entries) -> m-vector
    std::vector<std::pair<std::vector<int>, std::vector<double>>> data;
    // [grid]
    int tangential = 65;
    int vertical = 65;
    double lo = -0.3, hi = 0.3, height = 0.6;
    bool graded = true;
    // [checks]
    bool direct_check = false;
    bool weiss_check = true;
    // [output]
    std::string out_dir = "out";
    unsigned seed = 1;

    bool operator==(const ScenarioConfig&) const = default;
};

ScenarioConfig parse_config(std::istream& in);
ScenarioConfig parse_config_file(const std::string& path);
std::string serialize_config(const ScenarioConfig& cfg);

// Checks every module precondition the config feeds into; throws on violation.
void validate_config(const ScenarioConfig& cfg);

}  // namespace hodo
