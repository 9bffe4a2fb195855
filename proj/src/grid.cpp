#include "hodo/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <memory>
#include <ostream>

namespace hodo {

namespace {

// nonuniform centered first derivative weights at interior node k
void d1_weights(const std::vector<double>& t, size_t k, double& wm, double& w0, double& wp) {
    double hm = t[k] - t[k - 1], hp = t[k + 1] - t[k];
    wm = -hp / (hm * (hm + hp));
    w0 = (hp - hm) / (hm * hp);
    wp = hm / (hp * (hm + hp));
}

// nearest-cell extension outside the sampled box
int locate(const std::vector<double>& nodes, double x) {
    auto it = std::upper_bound(nodes.begin(), nodes.end(), x);
    int cell = static_cast<int>(it - nodes.begin()) - 1;
    return std::clamp(cell, 0, static_cast<int>(nodes.size()) - 2);
}

}  // namespace

FieldClosure grid_closure(const Field& f) {
    const auto& g = f.grid();
    const int n = g.dim();
    const int m = f.components();

    // nodal gradients, one field per axis
    auto grads = std::make_shared<std::vector<Field>>();
    for (int a = 0; a < n; ++a) grads->emplace_back(g, m);
    for (size_t nd = 0; nd < g.node_count(); ++nd) {
        auto idx = g.unflat(nd);
        for (int a = 0; a < n; ++a) {
            const auto& t = g.axis(a).nodes;
            int k = idx[static_cast<size_t>(a)];
            auto at = [&](int kk, int c) {
                auto j = idx;
                j[static_cast<size_t>(a)] = kk;
                return f.at(g.flat(j), c);
            };
            for (int c = 0; c < m; ++c) {
                double d;
                if (k == 0) {
                    d = (at(1, c) - at(0, c)) / (t[1] - t[0]);
                } else if (k == static_cast<int>(t.size()) - 1) {
                    d = (at(k, c) - at(k - 1, c)) / (t[static_cast<size_t>(k)] - t[static_cast<size_t>(k) - 1]);
                } else {
                    double wm, w0, wp;
                    d1_weights(t, static_cast<size_t>(k), wm, w0, wp);
                    d = wm * at(k - 1, c) + w0 * at(k, c) + wp * at(k + 1, c);
                }
                (*grads)[static_cast<size_t>(a)].at(nd, c) = d;
            }
        }
    }

    auto fld = std::make_shared<Field>(f);

    auto interp = [](const Field& fd, const Vec& x) {
        const auto& g2 = fd.grid();
        const int dim = g2.dim();
        std::vector<int> cell(static_cast<size_t>(dim));
        std::vector<double> w(static_cast<size_t>(dim));
        for (int a = 0; a < dim; ++a) {
            const auto& t = g2.axis(a).nodes;
            int c = locate(t, x[static_cast<size_t>(a)]);
            cell[static_cast<size_t>(a)] = c;
            w[static_cast<size_t>(a)] = (x[static_cast<size_t>(a)] - t[static_cast<size_t>(c)])
                                        / (t[static_cast<size_t>(c) + 1] - t[static_cast<size_t>(c)]);
        }
        Vec out(static_cast<size_t>(fd.components()), 0.0);
        int corners = 1 << dim;
        for (int msk = 0; msk < corners; ++msk) {
            double wt = 1;
            auto idx = cell;
            for (int a = 0; a < dim; ++a) {
                if (msk & (1 << a)) {
                    wt *= w[static_cast<size_t>(a)];
                    idx[static_cast<size_t>(a)] += 1;
                } else {
                    wt *= 1.0 - w[static_cast<size_t>(a)];
                }
            }
            size_t nd = g2.flat(idx);
            for (int c = 0; c < fd.components(); ++c) out[static_cast<size_t>(c)] += wt * fd.at(nd, c);
        }
        return out;
    };

    FieldClosure out;
    out.n = n;
    out.m = m;
    out.value = [fld, interp](const Vec& x) { return interp(*fld, x); };
    out.grad = [grads, interp, n, m](const Vec& x) {
        Mat gm(static_cast<size_t>(m), Vec(static_cast<size_t>(n), 0.0));
        for (int a = 0; a < n; ++a) {
            Vec col = interp((*grads)[static_cast<size_t>(a)], x);
            for (int c = 0; c < m; ++c) gm[static_cast<size_t>(c)][static_cast<size_t>(a)] = col[static_cast<size_t>(c)];
        }
        return gm;
    };
    return out;
}

void write_grid_field(std::ostream& os, const Field& f) {
    const auto& g = f.grid();
    os << "hodo-grid 1\n";
    os << "components " << f.components() << "\n";
    os << "axes " << g.dim() << "\n";
    for (int a = 0; a < g.dim(); ++a)
        os << "axis " << g.count(a) << " graded " << (g.axis(a).graded ? 1 : 0) << "\n";
    os << "payload\n";
    for (int a = 0; a < g.dim(); ++a)
        os.write(reinterpret_cast<const char*>(g.axis(a).nodes.data()),
                 static_cast<std::streamsize>(g.axis(a).nodes.size() * sizeof(double)));
    os.write(reinterpret_cast<const char*>(f.raw().data()),
             static_cast<std::streamsize>(f.raw().size() * sizeof(double)));
}

Field read_grid_field(std::istream& is) {
    std::string word;
    int version = 0, m = 0, n = 0;
    if (!(is >> word >> version) || word != "hodo-grid" || version != 1)
        throw std::runtime_error("read_grid_field: bad magic");
    if (!(is >> word >> m) || word != "components") throw std::runtime_error("read_grid_field: bad components line");
    if (!(is >> word >> n) || word != "axes") throw std::runtime_error("read_grid_field: bad axes line");
    std::vector<HalfSpaceGrid::Axis> axes(static_cast<size_t>(n));
    std::vector<int> counts(static_cast<size_t>(n));
    for (int a = 0; a < n; ++a) {
        int cnt = 0, graded = 0;
        if (!(is >> word >> cnt) || word != "axis") throw std::runtime_error("read_grid_field: bad axis line");
        if (!(is >> word >> graded) || word != "graded") throw std::runtime_error("read_grid_field: bad axis line");
        counts[static_cast<size_t>(a)] = cnt;
        axes[static_cast<size_t>(a)].graded = graded != 0;
    }
    if (!(is >> word) || word != "payload") throw std::runtime_error("read_grid_field: missing payload");
    is.get();  // newline
    for (int a = 0; a < n; ++a) {
        axes[static_cast<size_t>(a)].nodes.resize(static_cast<size_t>(counts[static_cast<size_t>(a)]));
        is.read(reinterpret_cast<char*>(axes[static_cast<size_t>(a)].nodes.data()),
                static_cast<std::streamsize>(axes[static_cast<size_t>(a)].nodes.size() * sizeof(double)));
    }
    HalfSpaceGrid g(std::move(axes));
    Field f(g, m);
    is.read(reinterpret_cast<char*>(f.raw().data()),
            static_cast<std::streamsize>(f.raw().size() * sizeof(double)));
    if (!is) throw std::runtime_error("read_grid_field: truncated payload");
    return f;
}

}  // namespace hodo
