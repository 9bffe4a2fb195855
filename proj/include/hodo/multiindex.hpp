#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace hodo {

// Multi-index mu = (mu_1,...,mu_n) of partial-derivative orders.
// The last axis is the "vertical" one and counts double in the weighted
// order: wo(mu) = mu_1 + ... + mu_{n-1} + 2*mu_n = |mu| + mu_n.
class MultiIndex {
public:
    MultiIndex() = default;
    explicit MultiIndex(int dim) : e_(static_cast<size_t>(dim), 0) {
        if (dim < 1) throw std::invalid_argument("MultiIndex: dim must be >= 1");
    }
    MultiIndex(std::initializer_list<int> init) : e_(init) { validate(); }
    explicit MultiIndex(std::vector<int> entries) : e_(std::move(entries)) { validate(); }

    static MultiIndex unit(int dim, int axis) {
        MultiIndex m(dim);
        m.e_.at(static_cast<size_t>(axis)) = 1;
        return m;
    }

    int dim() const { return static_cast<int>(e_.size()); }
    int operator[](int i) const { return e_[static_cast<size_t>(i)]; }
    int& operator[](int i) { return e_[static_cast<size_t>(i)]; }
    const std::vector<int>& entries() const { return e_; }

    // |mu| = mu_1 + ... + mu_n
    int total() const { return std::accumulate(e_.begin(), e_.end(), 0); }
    // |mu| + mu_n
    int weighted_order() const { return total() + e_.back(); }
    int vertical() const { return e_.back(); }

    bool is_zero() const {
        return std::all_of(e_.begin(), e_.end(), [](int k) { return k == 0; });
    }

    MultiIndex plus(int axis, int amount = 1) const {
        MultiIndex m = *this;
        m.e_[static_cast<size_t>(axis)] += amount;
        if (m.e_[static_cast<size_t>(axis)] < 0)
            throw std::invalid_argument("MultiIndex: negative entry");
        return m;
    }

    bool operator==(const MultiIndex& o) const { return e_ == o.e_; }
    bool operator!=(const MultiIndex& o) const { return e_ != o.e_; }

    // componentwise sigma <= mu
    bool dominates(const MultiIndex& sigma) const {
        if (sigma.dim() != dim()) return false;
        for (int i = 0; i < dim(); ++i)
            if (sigma.e_[static_cast<size_t>(i)] > e_[static_cast<size_t>(i)]) return false;
        return true;
    }

    MultiIndex operator+(const MultiIndex& o) const {
        MultiIndex m = *this;
        for (int i = 0; i < dim(); ++i) m.e_[static_cast<size_t>(i)] += o[i];
        return m;
    }
    // requires o <= *this
    MultiIndex operator-(const MultiIndex& o) const {
        MultiIndex m = *this;
        for (int i = 0; i < dim(); ++i) {
            m.e_[static_cast<size_t>(i)] -= o[i];
            if (m.e_[static_cast<size_t>(i)] < 0)
                throw std::invalid_argument("MultiIndex: subtraction would go negative");
        }
        return m;
    }

    // graded-lexicographic on (weighted_order, entries); reproducible iteration order
    bool operator<(const MultiIndex& o) const {
        int wa = weighted_order(), wb = o.weighted_order();
        if (wa != wb) return wa < wb;
        return e_ < o.e_;
    }

    std::string str() const {
        std::string s = "(";
        for (int i = 0; i < dim(); ++i) {
            if (i) s += ",";
            s += std::to_string(e_[static_cast<size_t>(i)]);
        }
        return s + ")";
    }

private:
    void validate() const {
        if (e_.empty()) throw std::invalid_argument("MultiIndex: dim must be >= 1");
        for (int k : e_)
            if (k < 0) throw std::invalid_argument("MultiIndex: negative entry");
    }

    std::vector<int> e_;
};

inline unsigned long long factorial_u64(int k) {
    unsigned long long f = 1;
    for (int i = 2; i <= k; ++i) f *= static_cast<unsigned long long>(i);
    return f;
}

// mu! = prod mu_i!
inline unsigned long long multifactorial_u64(const MultiIndex& mu) {
    unsigned long long f = 1;
    for (int i = 0; i < mu.dim(); ++i) f *= factorial_u64(mu[i]);
    return f;
}

inline unsigned long long binomial_u64(int n, int k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    unsigned long long b = 1;
    for (int i = 1; i <= k; ++i) b = b * static_cast<unsigned long long>(n - k + i) / static_cast<unsigned long long>(i);
    return b;
}

// binomial(mu, sigma) = prod binomial(mu_i, sigma_i); defined iff sigma <= mu
inline unsigned long long binomial_u64(const MultiIndex& mu, const MultiIndex& sigma) {
    if (!mu.dominates(sigma))
        throw std::invalid_argument("binomial(mu,sigma): requires sigma <= mu componentwise");
    unsigned long long b = 1;
    for (int i = 0; i < mu.dim(); ++i) b *= binomial_u64(mu[i], sigma[i]);
    return b;
}

// All multi-indices of dimension dim with weighted order <= cap, graded-lex order.
inline std::vector<MultiIndex> indices_up_to(int dim, int cap) {
    std::vector<MultiIndex> out;
    std::vector<int> cur(static_cast<size_t>(dim), 0);
    // enumerate recursively, then sort graded-lex
    std::vector<int> stack;
    std::function<void(int, int)> rec = [&](int axis, int used) {
        if (axis == dim) {
            out.emplace_back(cur);
            return;
        }
        int weight = (axis == dim - 1) ? 2 : 1;
        for (int k = 0; weight * k + used <= cap; ++k) {
            cur[static_cast<size_t>(axis)] = k;
            rec(axis + 1, used + weight * k);
        }
        cur[static_cast<size_t>(axis)] = 0;
    };
    rec(0, 0);
    std::sort(out.begin(), out.end());
    return out;
}

// Multi-indices with weighted order exactly w.
inline std::vector<MultiIndex> indices_of_order(int dim, int w) {
    std::vector<MultiIndex> out;
    for (auto& mu : indices_up_to(dim, w))
        if (mu.weighted_order() == w) out.push_back(mu);
    return out;
}

// All sigma <= mu componentwise.
inline std::vector<MultiIndex> subindices(const MultiIndex& mu) {
    std::vector<MultiIndex> out;
    MultiIndex cur(mu.dim());
    std::function<void(int)> rec = [&](int axis) {
        if (axis == mu.dim()) {
            out.push_back(cur);
            return;
        }
        for (int k = 0; k <= mu[axis]; ++k) {
            cur[axis] = k;
            rec(axis + 1);
        }
        cur[axis] = 0;
    };
    rec(0);
    return out;
}

}  // namespace hodo
