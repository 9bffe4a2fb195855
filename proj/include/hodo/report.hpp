#pragma once

#include <string>
#include <vector>

namespace hodo {

struct CheckRecord {
    std::string name;
    std::string inputs;
    double measured = 0;
    double bound = 0;
    bool pass = false;
};

// Named CSV-serializable table attached to a run (plot data).
struct PlotTable {
    std::string header;
    std::vector<std::vector<double>> rows;
};

struct ReportDocument {
    std::vector<CheckRecord> checks;
    std::vector<std::pair<std::string, PlotTable>> tables;
    std::string environment;
    double elapsed_ms = 0;

    bool all_pass() const {
        for (auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
    void add(std::string name, std::string inputs, double measured, double bound, bool pass) {
        checks.push_back({std::move(name), std::move(inputs), measured, bound, pass});
    }
    const PlotTable* table(const std::string& name) const {
        for (auto& [k, t] : tables)
            if (k == name) return &t;
        return nullptr;
    }

    // timing excluded on request so reports can be compared for determinism
    std::string to_json(bool include_timing = true) const;
};

std::string environment_stamp();

// Writes one CSV per selector: "fb", "weiss", "norms", "residual".
// Unknown selectors raise an error listing the valid ones.
void emit_plot_data(const ReportDocument& doc, const std::string& what, const std::string& out_dir);

}  // namespace hodo
