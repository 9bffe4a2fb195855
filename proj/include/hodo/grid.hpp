#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "hodo/model.hpp"

namespace hodo {

// Tensor grid on a half-box. The vertical axis (last) may be graded with
// nodes zeta_k^2 so that the intrinsic distance 2|sqrt(t)-sqrt(s)| between
// adjacent nodes is uniform; tangential axes are uniform.
class HalfSpaceGrid {
public:
    struct Axis {
        std::vector<double> nodes;  // strictly increasing
        bool graded = false;
    };

    HalfSpaceGrid() = default;
    explicit HalfSpaceGrid(std::vector<Axis> axes) : axes_(std::move(axes)) { validate(); }

    // tangential axes uniform on [lo, hi], vertical axis on [0, height]
    static HalfSpaceGrid make(int n, double lo, double hi, int tangential_count, double height,
                              int vertical_count, bool graded = true) {
        std::vector<Axis> axes;
        for (int a = 0; a < n - 1; ++a) {
            Axis ax;
            for (int i = 0; i < tangential_count; ++i)
                ax.nodes.push_back(lo + (hi - lo) * i / (tangential_count - 1));
            axes.push_back(std::move(ax));
        }
        Axis v;
        v.graded = graded;
        for (int i = 0; i < vertical_count; ++i) {
            double z = static_cast<double>(i) / (vertical_count - 1);
            v.nodes.push_back(graded ? height * z * z : height * z);
        }
        axes.push_back(std::move(v));
        return HalfSpaceGrid(std::move(axes));
    }

    int dim() const { return static_cast<int>(axes_.size()); }
    const Axis& axis(int a) const { return axes_[static_cast<size_t>(a)]; }
    int count(int a) const { return static_cast<int>(axes_[static_cast<size_t>(a)].nodes.size()); }

    size_t node_count() const {
        size_t c = 1;
        for (auto& ax : axes_) c *= ax.nodes.size();
        return c;
    }

    // last axis fastest
    size_t flat(const std::vector<int>& idx) const {
        size_t f = 0;
        for (int a = 0; a < dim(); ++a) f = f * axes_[static_cast<size_t>(a)].nodes.size() + static_cast<size_t>(idx[static_cast<size_t>(a)]);
        return f;
    }
    std::vector<int> unflat(size_t f) const {
        std::vector<int> idx(static_cast<size_t>(dim()));
        for (int a = dim() - 1; a >= 0; --a) {
            size_t c = axes_[static_cast<size_t>(a)].nodes.size();
            idx[static_cast<size_t>(a)] = static_cast<int>(f % c);
            f /= c;
        }
        return idx;
    }

    Vec point(const std::vector<int>& idx) const {
        Vec x(static_cast<size_t>(dim()));
        for (int a = 0; a < dim(); ++a) x[static_cast<size_t>(a)] = axes_[static_cast<size_t>(a)].nodes[static_cast<size_t>(idx[static_cast<size_t>(a)])];
        return x;
    }

    bool operator==(const HalfSpaceGrid& o) const {
        if (dim() != o.dim()) return false;
        for (int a = 0; a < dim(); ++a)
            if (axes_[static_cast<size_t>(a)].nodes != o.axes_[static_cast<size_t>(a)].nodes) return false;
        return true;
    }

private:
    void validate() const {
        if (axes_.empty()) throw std::invalid_argument("HalfSpaceGrid: needs at least one axis");
        for (auto& ax : axes_) {
            if (ax.nodes.size() < 3) throw std::invalid_argument("HalfSpaceGrid: axes need >= 3 nodes");
            for (size_t i = 1; i < ax.nodes.size(); ++i)
                if (!(ax.nodes[i] > ax.nodes[i - 1]))
                    throw std::invalid_argument("HalfSpaceGrid: nodes must be strictly increasing");
        }
    }

    std::vector<Axis> axes_;
};

// Sampled scalar/vector values on a grid, component index fastest.
class Field {
public:
    Field() = default;
    Field(HalfSpaceGrid grid, int ncomp)
        : grid_(std::move(grid)), ncomp_(ncomp), values_(grid_.node_count() * static_cast<size_t>(ncomp), 0.0) {}

    const HalfSpaceGrid& grid() const { return grid_; }
    int components() const { return ncomp_; }

    double& at(size_t node, int comp) { return values_[node * static_cast<size_t>(ncomp_) + static_cast<size_t>(comp)]; }
    double at(size_t node, int comp) const { return values_[node * static_cast<size_t>(ncomp_) + static_cast<size_t>(comp)]; }

    const std::vector<double>& raw() const { return values_; }
    std::vector<double>& raw() { return values_; }

    double magnitude(size_t node) const {
        double s = 0;
        for (int c = 0; c < ncomp_; ++c) s += at(node, c) * at(node, c);
        return std::sqrt(s);
    }

    static Field sample(const HalfSpaceGrid& g, const FieldClosure& u) {
        Field f(g, u.m);
        for (size_t nd = 0; nd < g.node_count(); ++nd) {
            Vec v = u.value(g.point(g.unflat(nd)));
            for (int c = 0; c < u.m; ++c) f.at(nd, c) = v[static_cast<size_t>(c)];
        }
        return f;
    }

private:
    HalfSpaceGrid grid_;
    int ncomp_ = 1;
    std::vector<double> values_;
};

// Multilinear-interpolation closure over a sampled field; gradients are
// nodal finite differences interpolated the same way.
FieldClosure grid_closure(const Field& f);

// Grid file: text header, then axis node arrays and row-major float64 values.
void write_grid_field(std::ostream& os, const Field& f);
Field read_grid_field(std::istream& is);

}  // namespace hodo
