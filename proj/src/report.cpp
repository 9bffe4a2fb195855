#include "hodo/report.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace hodo {

std::string environment_stamp() {
    std::string s = "c++";
    s += std::to_string(__cplusplus);
#if defined(__GNUC__) && !defined(__clang__)
    s += " gcc-" + std::to_string(__GNUC__) + "." + std::to_string(__GNUC_MINOR__);
#elif defined(__clang__)
    s += " clang-" + std::to_string(__clang_major__);
#endif
    s += " float64";
    return s;
}

std::string ReportDocument::to_json(bool include_timing) const {
    nlohmann::json j;
    j["environment"] = environment;
    if (include_timing) j["elapsed_ms"] = elapsed_ms;
    j["pass"] = all_pass();
    j["checks"] = nlohmann::json::array();
    for (auto& c : checks) {
        j["checks"].push_back({{"name", c.name},
                               {"inputs", c.inputs},
                               {"measured", c.measured},
                               {"bound", c.bound},
                               {"pass", c.pass}});
    }
    for (auto& [name, t] : tables) {
        nlohmann::json tbl;
        tbl["header"] = t.header;
        tbl["rows"] = t.rows;
        j["tables"][name] = tbl;
    }
    return j.dump(2);
}

void emit_plot_data(const ReportDocument& doc, const std::string& what, const std::string& out_dir) {
    static const std::vector<std::string> valid = {"fb", "weiss", "norms", "residual"};
    bool known = false;
    for (auto& v : valid) known = known || v == what;
    if (!known) {
        std::string msg = "emit_plot_data: unknown selector '" + what + "', valid selectors:";
        for (auto& v : valid) msg += " " + v;
        throw std::invalid_argument(msg);
    }
    const PlotTable* t = doc.table(what);
    if (!t) throw std::runtime_error("emit_plot_data: run produced no '" + what + "' data");
    std::filesystem::create_directories(out_dir);
    std::ofstream os(out_dir + "/" + what + ".csv");
    os.precision(17);
    os << t->header << "\n";
    for (auto& row : t->rows) {
        for (size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << "\n";
    }
}

}  // namespace hodo
