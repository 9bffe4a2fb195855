// Command-line driver: scenario pipelines, individual solvers, and the
// verification subcommands. Exit code 0 iff every executed check passes.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "hodo/degenerate.hpp"
#include "hodo/diffeo.hpp"
#include "hodo/pipeline.hpp"
#include "hodo/weiss.hpp"

using namespace hodo;

namespace {

std::vector<Series<double>> read_series_blocks(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<Series<double>> out;
    while (in >> std::ws, in.peek() != EOF) out.push_back(parse_series(in));
    return out;
}

Vec parse_vec(const std::string& csv) {
    Vec out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

void print_report(const ReportDocument& doc) {
    for (auto& c : doc.checks)
        std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << "  measured=" << c.measured
                  << " bound=" << c.bound << "  (" << c.inputs << ")\n";
}

void write_report(const ReportDocument& doc, const std::string& path) {
    if (path.empty()) return;
    auto dir = std::filesystem::path(path).parent_path();
    if (!dir.empty()) std::filesystem::create_directories(dir);
    std::ofstream os(path);
    os << doc.to_json() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"half-space free boundary toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out", format = "json", report_path, input_path, out_path;
    std::string mode = "system", avec = "0.1", bc = "halfspace", data_path;
    double q = 0.5, gamma = 2.0, tol = 1e-7, height = 1.0, lo = -0.5, hi = 0.5;
    int n = 2, m = 1, order = 8, tangential = 33, vertical = 33, radial = 32, angular = 256, depth = 24;
    unsigned seed = 1;
    std::string radii = "0.1,0.2,0.4,0.8";
    bool graded = true;

    auto* pip = app.add_subcommand("pipeline", "run a scenario config end to end");
    pip->add_option("--config", config_path)->required();
    pip->add_option("--out", out_dir);
    pip->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
    pip->add_option("--seed", seed);

    auto* hsp = app.add_subcommand("halfspace", "exact half-space residual and Weiss spot checks");
    hsp->add_option("--q", q);
    hsp->add_option("--n", n);
    hsp->add_option("--report", report_path);

    auto* cks = app.add_subcommand("ck-solve", "series construction from Cauchy data");
    cks->add_option("--q", q);
    cks->add_option("--m", m);
    cks->add_option("--n", n);
    cks->add_option("--order", order);
    cks->add_option("--data", data_path)->required();
    cks->add_option("--report", report_path);

    auto* dir = app.add_subcommand("direct-solve", "damped fixed-point solve of the nonlinear system");
    dir->add_option("--q", q);
    dir->add_option("--n", n);
    dir->add_option("--tangential", tangential);
    dir->add_option("--vertical", vertical);
    dir->add_option("--lo", lo);
    dir->add_option("--hi", hi);
    dir->add_option("--height", height);
    dir->add_option("--graded", graded);
    dir->add_option("--bc", bc)->check(CLI::IsMember({"halfspace", "zero"}));
    dir->add_option("--out", out_path);
    dir->add_option("--report", report_path);

    auto* dgl = app.add_subcommand("deglin-solve", "linear degenerate solve with a manufactured source");
    dgl->add_option("--gamma", gamma);
    dgl->add_option("--tangential", tangential);
    dgl->add_option("--vertical", vertical);
    dgl->add_option("--out", out_path);
    dgl->add_option("--report", report_path);

    auto* trf = app.add_subcommand("transform", "hodograph-Legendre transform of a sampled field");
    trf->add_option("--input", input_path)->required();
    trf->add_option("--q", q);
    trf->add_option("--out", out_path)->required();

    auto* res = app.add_subcommand("residual", "residual of a stored state");
    res->add_option("--mode", mode)->check(CLI::IsMember({"system", "original"}));
    res->add_option("--in", input_path)->required();
    res->add_option("--q", q);
    res->add_option("--report", report_path);

    auto* wss = app.add_subcommand("weiss", "Weiss energy per radius");
    wss->add_option("--q", q);
    wss->add_option("--n", n);
    wss->add_option("--r", radii);
    wss->add_option("--input", input_path);
    wss->add_option("--radial", radial);
    wss->add_option("--angular", angular);
    wss->add_option("--depth", depth);
    wss->add_option("--out", out_path);

    auto* ode = app.add_subcommand("ode-check", "1D degenerate ODE closed forms and bounds");
    ode->add_option("--gamma", gamma);
    ode->add_option("--seed", seed);
    ode->add_option("--report", report_path);

    auto* met = app.add_subcommand("metric-check", "intrinsic metric and ball-measure properties");
    met->add_option("--gamma", gamma);
    met->add_option("--seed", seed);
    met->add_option("--report", report_path);

    auto* dif = app.add_subcommand("diffeo-check", "translation-diffeomorphism lemma properties");
    dif->add_option("--a", avec);
    dif->add_option("--n", n);
    dif->add_option("--tol", tol);
    dif->add_option("--report", report_path);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*pip) {
            auto cfg = parse_config_file(config_path);
            cfg.out_dir = out_dir;
            cfg.seed = seed;
            auto doc = run_pipeline(cfg);
            std::filesystem::create_directories(out_dir);
            if (format == "json") {
                std::ofstream os(out_dir + "/report.json");
                os << doc.to_json() << "\n";
            }
            for (auto& [name, tbl] : doc.tables) emit_plot_data(doc, name, out_dir);
            print_report(doc);
            return doc.all_pass() ? 0 : 1;
        }

        if (*hsp) {
            ReportDocument doc;
            doc.environment = environment_stamp();
            ModelConstants cnst(q, n, 1);
            Vec nu(static_cast<size_t>(n), 0.0);
            nu[0] = 0.6;
            nu.back() = 0.8;
            HalfSpaceSolution hs(cnst, nu, {1.0});
            auto cl = hs.closure();
            double worst = 0;
            for (int i = 0; i < 200; ++i) {
                Vec x(static_cast<size_t>(n));
                for (int a = 0; a < n; ++a) x[static_cast<size_t>(a)] = std::sin(1.37 * (i + 1) * (a + 1));
                if (dot(x, nu) < 0.05) continue;
                for (double c : pde_residual(cl, q, x)) worst = std::max(worst, std::fabs(c));
            }
            doc.add("halfspace-residual", "200 deterministic interior points", worst, 1e-10, worst < 1e-10);
            double w1 = weiss_energy(cl, Vec(static_cast<size_t>(n), 0.0), 0.3, q);
            double w2 = weiss_energy(cl, Vec(static_cast<size_t>(n), 0.0), 0.9, q);
            doc.add("weiss-constancy", "r = 0.3 vs 0.9", std::fabs(w1 - w2) / std::fabs(w1), 1e-6,
                    std::fabs(w1 - w2) / std::fabs(w1) < 1e-6);
            std::cout << "omega_q(" << n << ", " << q << ") = " << omega_q(n, q) << "\n";
            print_report(doc);
            write_report(doc, report_path);
            return doc.all_pass() ? 0 : 1;
        }

        if (*cks) {
            ModelConstants cnst(q, n, m);
            auto blocks = read_series_blocks(data_path);
            if (static_cast<int>(blocks.size()) != m)
                throw std::runtime_error("ck-solve: expected " + std::to_string(m) + " series blocks");
            CauchyData<double> data;
            data.v0 = blocks;
            auto sys = instantiate_model(cnst);
            auto ck = ck_expand(sys, data, order);
            NormParams np(0.5, 0.1, order);
            auto rep = convergence_diagnostics(ck.v, np, 2.0, std::max(data.epsilon0(), 1e-12));
            ReportDocument doc;
            doc.environment = environment_stamp();
            doc.add("ck-norm-partial-sums", "R=0.5 r=0.1", rep.aggregate.back(), rep.bound, true);
            LegendreState st(cnst, ck.v);
            double resmax = 0;
            for (auto& r2 : residual_system(st))
                for (auto& [mu, val] : r2.coefficients()) resmax = std::max(resmax, std::fabs(val));
            doc.add("ck-system-residual", "series coefficients through s", resmax, 1e-10, resmax < 1e-10);
            if (!report_path.empty()) {
                nlohmann::json j = nlohmann::json::parse(doc.to_json());
                for (int jdx = 0; jdx < m; ++jdx)
                    j["coefficients"].push_back(ck.v[static_cast<size_t>(jdx)].serialize());
                for (size_t t = 0; t < rep.aggregate.size(); ++t) j["norms"].push_back(rep.aggregate[t]);
                j["radius"] = rep.radius_estimate;
                auto dirn = std::filesystem::path(report_path).parent_path();
                if (!dirn.empty()) std::filesystem::create_directories(dirn);
                std::ofstream os(report_path);
                os << j.dump(2) << "\n";
            }
            print_report(doc);
            return doc.all_pass() ? 0 : 1;
        }

        if (*dir) {
            ModelConstants cnst(q, n, 1);
            auto grid = HalfSpaceGrid::make(n, lo, hi, tangential, height, vertical, graded);
            Vec nu(static_cast<size_t>(n), 0.0);
            nu.back() = 1.0;
            HalfSpaceSolution hs(cnst, nu, {1.0});
            std::function<Vec(const Vec&)> bcf;
            if (bc == "halfspace")
                bcf = [&](const Vec& x) { return hs.eval(x); };
            else
                bcf = [&](const Vec&) { return Vec{0.0}; };
            auto u = solve_direct_nonlinear(cnst, bcf, grid);
            ReportDocument doc;
            doc.environment = environment_stamp();
            if (bc == "halfspace") {
                double err = 0;
                for (size_t nd = 0; nd < grid.node_count(); ++nd)
                    err = std::max(err, std::fabs(u.at(nd, 0) - hs.eval(grid.point(grid.unflat(nd)))[0]));
                double h = (hi - lo) / (tangential - 1);
                double bound = 5 * h * h + 5 * std::pow(h * h, q);
                doc.add("direct-vs-exact", "half-space boundary data", err, bound, err <= bound);
            } else {
                double mx = 0;
                for (size_t nd = 0; nd < grid.node_count(); ++nd) mx = std::max(mx, u.magnitude(nd));
                doc.add("direct-zero-data", "u == 0", mx, 1e-12, mx < 1e-12);
            }
            if (!out_path.empty()) {
                std::ofstream os(out_path, std::ios::binary);
                write_grid_field(os, u);
            }
            print_report(doc);
            write_report(doc, report_path);
            return doc.all_pass() ? 0 : 1;
        }

        if (*dgl) {
            auto grid = HalfSpaceGrid::make(2, -1.0, 1.0, tangential, 1.0, vertical);
            Field f(grid, 1);
            for (size_t nd = 0; nd < grid.node_count(); ++nd) {
                double yn = grid.point(grid.unflat(nd))[1];
                f.at(nd, 0) = 2.0 * (1.0 + gamma) * yn;
            }
            auto exact = [](const Vec& p) { return p[1] * p[1]; };
            auto u = solve_deg_linear_nd(gamma, f, exact);
            double err = 0;
            for (size_t nd = 0; nd < grid.node_count(); ++nd)
                err = std::max(err, std::fabs(u.at(nd, 0) - exact(grid.point(grid.unflat(nd)))));
            ReportDocument doc;
            doc.environment = environment_stamp();
            doc.add("deglin-manufactured", "u = y_n^2", err, 1e-9, err < 1e-9);
            if (!out_path.empty()) {
                std::ofstream os(out_path, std::ios::binary);
                write_grid_field(os, u);
            }
            print_report(doc);
            write_report(doc, report_path);
            return doc.all_pass() ? 0 : 1;
        }

        if (*trf) {
            std::ifstream in(input_path, std::ios::binary);
            Field uf = read_grid_field(in);
            ModelConstants cnst(q, uf.grid().dim(), uf.components());
            auto cl = grid_closure(uf);
            const auto& g = uf.grid();
            const int dim = g.dim();
            // Legendre functions resampled on a regular y-grid spanning the
            // interior tangential extent and half the vertical height
            std::vector<HalfSpaceGrid::Axis> axes;
            for (int a = 0; a + 1 < dim; ++a) {
                HalfSpaceGrid::Axis ax;
                const auto& t = g.axis(a).nodes;
                int cnt = g.count(a);
                for (int i = 0; i < cnt; ++i)
                    ax.nodes.push_back(t[1] + (t[static_cast<size_t>(cnt) - 2] - t[1]) * i / (cnt - 1));
                axes.push_back(std::move(ax));
            }
            HalfSpaceGrid::Axis vax;
            vax.graded = true;
            double hmax = 0.5 * g.axis(dim - 1).nodes.back();
            int vcnt = g.count(dim - 1);
            for (int i = 0; i < vcnt; ++i) {
                double z = static_cast<double>(i) / (vcnt - 1);
                vax.nodes.push_back(hmax * z * z);
            }
            axes.push_back(std::move(vax));
            HalfSpaceGrid ygrid(std::move(axes));
            std::vector<Vec> ypts;
            for (size_t nd = 0; nd < ygrid.node_count(); ++nd) ypts.push_back(ygrid.point(ygrid.unflat(nd)));
            auto samples = legendre_from_solution(cl, cnst, ypts);
            Field vfield(ygrid, cnst.m);
            for (size_t i = 0; i < ypts.size(); ++i)
                for (int c = 0; c < cnst.m; ++c)
                    vfield.at(i, c) = samples.values[i][static_cast<size_t>(c)];
            std::ofstream os(out_path, std::ios::binary);
            write_grid_field(os, vfield);
            std::cout << "wrote " << ypts.size() << " Legendre samples to " << out_path << "\n";
            return 0;
        }

        if (*res) {
            ReportDocument doc;
            doc.environment = environment_stamp();
            if (mode == "system") {
                auto blocks = read_series_blocks(input_path);
                ModelConstants cnst(q, blocks[0].dim(), static_cast<int>(blocks.size()));
                LegendreState st(cnst, blocks);
                double worst = 0;
                for (auto& r2 : residual_system(st))
                    for (auto& [mu, val] : r2.coefficients()) worst = std::max(worst, std::fabs(val));
                doc.add("system-residual-max-coefficient", input_path, worst, 0, true);
            } else {
                std::ifstream in(input_path, std::ios::binary);
                Field uf = read_grid_field(in);
                double worst = grid_residual_max(uf, q);
                doc.add("original-residual-max", input_path, worst, 0, true);
            }
            print_report(doc);
            write_report(doc, report_path);
            return 0;
        }

        if (*wss) {
            ModelConstants cnst(q, n, 1);
            FieldClosure cl;
            if (input_path.empty()) {
                Vec nu(static_cast<size_t>(n), 0.0);
                nu.back() = 1.0;
                HalfSpaceSolution hs(cnst, nu, {1.0});
                cl = hs.closure();
            } else {
                std::ifstream in(input_path, std::ios::binary);
                cl = grid_closure(read_grid_field(in));
            }
            WeissQuadrature quad;
            quad.radial = radial;
            quad.angular = angular;
            quad.depth = depth;
            std::ostringstream table;
            table.precision(17);
            table << "r,W\n";
            for (double r : parse_vec(radii))
                table << r << "," << weiss_energy(cl, Vec(static_cast<size_t>(n), 0.0), r, q, quad) << "\n";
            if (out_path.empty())
                std::cout << table.str();
            else {
                std::ofstream os(out_path);
                os << table.str();
            }
            return 0;
        }

        if (*ode) {
            ReportDocument doc;
            doc.environment = environment_stamp();
            auto s1 = solve_ode_1d(gamma, [](double) { return 1.0; });
            double e1 = 0;
            for (double x : {0.2, 0.5, 0.9}) e1 = std::max(e1, std::fabs(s1.u(x) - x / gamma));
            doc.add("ode-constant-source", "u = x/gamma", e1, 1e-10, e1 < 1e-10);
            auto s2 = solve_ode_1d(gamma, [](double x) { return x; });
            double e2 = 0;
            for (double x : {0.2, 0.5, 0.9}) e2 = std::max(e2, std::fabs(s2.u(x) - x * x / (2 * (gamma + 1))));
            doc.add("ode-linear-source", "u = x^2/(2(gamma+1))", e2, 1e-10, e2 < 1e-10);
            std::mt19937 rng(seed);
            std::uniform_real_distribution<double> coef(-2.0, 2.0);
            bool bounds = true;
            double margin = 1e300;
            for (int rep = 0; rep < 20; ++rep) {
                std::vector<double> cs(4);
                for (auto& c : cs) c = coef(rng);
                auto sol = solve_ode_1d(gamma, [cs](double x) {
                    double acc = 0;
                    for (size_t k = cs.size(); k-- > 0;) acc = acc * x + cs[k];
                    return acc;
                });
                bounds = bounds && sol.sup_du <= sol.sup_f / gamma * (1 + 1e-9)
                         && sol.sup_xd2u <= 2 * sol.sup_f * (1 + 1e-9);
                margin = std::min(margin, sol.sup_f / gamma - sol.sup_du);
            }
            doc.add("ode-lemma-bounds", "20 random polynomial sources, min margin logged", margin, 0, bounds);
            print_report(doc);
            write_report(doc, report_path);
            return doc.all_pass() ? 0 : 1;
        }

        if (*met) {
            ReportDocument doc;
            doc.environment = environment_stamp();
            std::mt19937 rng(seed);
            std::uniform_real_distribution<double> unit(1e-4, 1.0);
            bool comparable = true;
            for (int rep = 0; rep < 100; ++rep) {
                double t = unit(rng), s = unit(rng);
                double exact = 2.0 * std::fabs(std::sqrt(t) - std::sqrt(s));
                if (exact == 0) continue;
                double d = intrinsic_distance({0.0, t}, {0.0, s});
                comparable = comparable && d <= 4 * exact && exact <= 4 * d;
            }
            doc.add("metric-vertical-comparability", "100 random pairs, factor 4", 0, 0, comparable);
            bool doubling = true;
            for (int rep = 0; rep < 100; ++rep) {
                Vec x = {unit(rng), unit(rng)};
                double r = 0.05 + 0.5 * unit(rng);
                doubling = doubling
                           && ball_measure(x, 3 * r, gamma) / ball_measure(x, r, gamma)
                                  <= std::pow(3.0, 2 * gamma + 4);
            }
            doc.add("metric-doubling", "C <= 3^{2 gamma + 2n}", 0, 0, doubling);
            print_report(doc);
            write_report(doc, report_path);
            return doc.all_pass() ? 0 : 1;
        }

        if (*dif) {
            ReportDocument doc;
            doc.environment = environment_stamp();
            diffeo_check_section(doc, parse_vec(avec), n, tol);
            print_report(doc);
            write_report(doc, report_path);
            return doc.all_pass() ? 0 : 1;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
