#include "hodo/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hodo {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

ScenarioConfig parse_config(std::istream& in) {
    ScenarioConfig cfg;
    cfg.data.clear();
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = t.substr(1, t.size() - 2);
            continue;
        }
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config: expected key = value at line " + std::to_string(lineno));
        std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));
        std::istringstream vs(val);

        if (section == "model") {
            if (key == "q") vs >> cfg.q;
            else if (key == "n") vs >> cfg.n;
            else if (key == "m") vs >> cfg.m;
            else throw std::runtime_error("config: unknown key '" + key + "' in [model]");
        } else if (section == "ck") {
            if (key == "order") vs >> cfg.order;
            else if (key == "R") vs >> cfg.R;
            else if (key == "r") vs >> cfg.r;
            else if (key == "C0") vs >> cfg.C0;
            else if (key == "eps0") vs >> cfg.eps0;
            else throw std::runtime_error("config: unknown key '" + key + "' in [ck]");
        } else if (section == "data") {
            // coeff <mu_1 ... mu_{n-1}> = <m values>
            std::istringstream ks(key);
            std::string tag;
            ks >> tag;
            if (tag != "coeff") throw std::runtime_error("config: [data] lines must start with 'coeff'");
            std::vector<int> mu;
            int e;
            while (ks >> e) mu.push_back(e);
            std::vector<double> vals;
            double x;
            while (vs >> x) vals.push_back(x);
            cfg.data.emplace_back(std::move(mu), std::move(vals));
        } else if (section == "grid") {
            if (key == "tangential") vs >> cfg.tangential;
            else if (key == "vertical") vs >> cfg.vertical;
            else if (key == "lo") vs >> cfg.lo;
            else if (key == "hi") vs >> cfg.hi;
            else if (key == "height") vs >> cfg.height;
            else if (key == "graded") vs >> std::boolalpha >> cfg.graded;
            else throw std::runtime_error("config: unknown key '" + key + "' in [grid]");
        } else if (section == "checks") {
            if (key == "direct") vs >> std::boolalpha >> cfg.direct_check;
            else if (key == "weiss") vs >> std::boolalpha >> cfg.weiss_check;
            else throw std::runtime_error("config: unknown key '" + key + "' in [checks]");
        } else if (section == "output") {
            if (key == "dir") cfg.out_dir = val;
            else if (key == "seed") vs >> cfg.seed;
            else throw std::runtime_error("config: unknown key '" + key + "' in [output]");
        } else {
            throw std::runtime_error("config: unknown section '" + section + "'");
        }
        // [data] and [output] consume their values by loop / verbatim
        if (section != "output" && section != "data" && vs.fail())
            throw std::runtime_error("config: bad value for '" + key + "' at line " + std::to_string(lineno));
    }
    return cfg;
}

ScenarioConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    return parse_config(in);
}

std::string serialize_config(const ScenarioConfig& cfg) {
    std::ostringstream os;
    os.precision(17);
    os << "[model]\nq = " << cfg.q << "\nn = " << cfg.n << "\nm = " << cfg.m << "\n\n";
    os << "[ck]\norder = " << cfg.order << "\nR = " << cfg.R << "\nr = " << cfg.r << "\nC0 = " << cfg.C0
       << "\neps0 = " << cfg.eps0 << "\n\n";
    os << "[data]\n";
    for (auto& [mu, vals] : cfg.data) {
        os << "coeff";
        for (int e : mu) os << " " << e;
        os << " =";
        for (double v : vals) os << " " << v;
        os << "\n";
    }
    os << "\n[grid]\ntangential = " << cfg.tangential << "\nvertical = " << cfg.vertical << "\nlo = " << cfg.lo
       << "\nhi = " << cfg.hi << "\nheight = " << cfg.height << "\ngraded = " << (cfg.graded ? "true" : "false")
       << "\n\n";
    os << "[checks]\ndirect = " << (cfg.direct_check ? "true" : "false")
       << "\nweiss = " << (cfg.weiss_check ? "true" : "false") << "\n\n";
    os << "[output]\ndir = " << cfg.out_dir << "\nseed = " << cfg.seed << "\n";
    return os.str();
}

void validate_config(const ScenarioConfig& cfg) {
    if (!(cfg.q >= 0 && cfg.q < 1)) throw std::invalid_argument("config: q must be in [0,1)");
    if (cfg.n != 2 && cfg.n != 3) throw std::invalid_argument("config: n must be 2 or 3");
    if (cfg.m < 1) throw std::invalid_argument("config: m must be >= 1");
    if (cfg.order < 2 || cfg.order > 16) throw std::invalid_argument("config: order must be in [2,16]");
    if (!(cfg.R > 0) || !(cfg.r > 0 && cfg.r < 1))
        throw std::invalid_argument("config: norm parameters need R > 0 and r in (0,1)");
    for (auto& [mu, vals] : cfg.data) {
        if (static_cast<int>(mu.size()) != cfg.n - 1)
            throw std::invalid_argument("config: data multi-indices need n-1 entries");
        if (static_cast<int>(vals.size()) != cfg.m)
            throw std::invalid_argument("config: data values need m entries");
        for (int e : mu)
            if (e < 0) throw std::invalid_argument("config: negative multi-index entry");
    }
    if (cfg.tangential < 5 || cfg.vertical < 5) throw std::invalid_argument("config: grid too small");
    if (!(cfg.hi > cfg.lo) || !(cfg.height > 0)) throw std::invalid_argument("config: bad grid extents");
}

}  // namespace hodo
