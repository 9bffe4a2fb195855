#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "hodo/rational.hpp"

namespace hodo {

// Dense square solve with partial pivoting; generic over the scalar so the
// exact-rational mode can reuse it. A is row-major n x n, destroyed in place.
template <class T>
std::vector<T> solve_dense(std::vector<T> A, std::vector<T> b) {
    const size_t n = b.size();
    if (A.size() != n * n) throw std::invalid_argument("solve_dense: shape mismatch");
    for (size_t col = 0; col < n; ++col) {
        size_t piv = col;
        double best = scalar_traits<T>::to_double(scalar_traits<T>::abs(A[col * n + col]));
        for (size_t r = col + 1; r < n; ++r) {
            double cand = scalar_traits<T>::to_double(scalar_traits<T>::abs(A[r * n + col]));
            if (cand > best) {
                best = cand;
                piv = r;
            }
        }
        if (scalar_traits<T>::is_zero(A[piv * n + col]))
            throw std::runtime_error("solve_dense: singular matrix");
        if (piv != col) {
            for (size_t c = 0; c < n; ++c) std::swap(A[col * n + c], A[piv * n + c]);
            std::swap(b[col], b[piv]);
        }
        for (size_t r = col + 1; r < n; ++r) {
            if (scalar_traits<T>::is_zero(A[r * n + col])) continue;
            T f = A[r * n + col] / A[col * n + col];
            for (size_t c = col; c < n; ++c) A[r * n + c] = A[r * n + c] - f * A[col * n + c];
            b[r] = b[r] - f * b[col];
        }
    }
    std::vector<T> x(n, T{});
    for (size_t ri = n; ri-- > 0;) {
        T s = b[ri];
        for (size_t c = ri + 1; c < n; ++c) s = s - A[ri * n + c] * x[c];
        x[ri] = s / A[ri * n + ri];
    }
    return x;
}

// Banded LU with partial pivoting (LAPACK gbtrf layout, lite). Row i couples
// to columns within [i-kl, i+ku]; fill from pivoting widens the upper band.
class BandedMatrix {
public:
    BandedMatrix(int n, int kl, int ku)
        : n_(n), kl_(kl), ku_(ku), store_(static_cast<size_t>(n) * static_cast<size_t>(2 * kl + ku + 1), 0.0) {}

    int size() const { return n_; }

    double& at(int row, int col) {
        check(row, col);
        return store_[idx(row, col)];
    }
    double get(int row, int col) const {
        if (col < 0 || col >= n_ || col < row - kl_ || col > row + ku_ + kl_) return 0.0;
        return store_[idx(row, col)];
    }

    // overwrites the matrix with its LU factors
    void factor() {
        piv_.assign(static_cast<size_t>(n_), 0);
        for (int col = 0; col < n_; ++col) {
            int last = std::min(n_ - 1, col + kl_);
            int piv = col;
            double best = std::fabs(store_[idx(col, col)]);
            for (int r = col + 1; r <= last; ++r) {
                double cand = std::fabs(store_[idx(r, col)]);
                if (cand > best) {
                    best = cand;
                    piv = r;
                }
            }
            if (best == 0.0) throw std::runtime_error("BandedMatrix: singular");
            piv_[static_cast<size_t>(col)] = piv;
            int cend = std::min(n_ - 1, col + ku_ + kl_);
            if (piv != col)
                for (int c = col; c <= cend; ++c) std::swap(store_[idx(col, c)], store_[idx(piv, c)]);
            for (int r = col + 1; r <= last; ++r) {
                double f = store_[idx(r, col)] / store_[idx(col, col)];
                store_[idx(r, col)] = f;
                for (int c = col + 1; c <= cend; ++c) store_[idx(r, c)] -= f * store_[idx(col, c)];
            }
        }
        factored_ = true;
    }

    std::vector<double> solve(std::vector<double> b) const {
        if (!factored_) throw std::logic_error("BandedMatrix::solve before factor");
        for (int col = 0; col < n_; ++col) {
            int piv = piv_[static_cast<size_t>(col)];
            if (piv != col) std::swap(b[static_cast<size_t>(col)], b[static_cast<size_t>(piv)]);
            int last = std::min(n_ - 1, col + kl_);
            for (int r = col + 1; r <= last; ++r)
                b[static_cast<size_t>(r)] -= store_[idx(r, col)] * b[static_cast<size_t>(col)];
        }
        for (int row = n_ - 1; row >= 0; --row) {
            int cend = std::min(n_ - 1, row + ku_ + kl_);
            double s = b[static_cast<size_t>(row)];
            for (int c = row + 1; c <= cend; ++c) s -= store_[idx(row, c)] * b[static_cast<size_t>(c)];
            b[static_cast<size_t>(row)] = s / store_[idx(row, row)];
        }
        return b;
    }

private:
    size_t idx(int row, int col) const {
        // diagonal-offset storage: entry (row, col) lives at band kl+ku+row-col
        return static_cast<size_t>(col) * static_cast<size_t>(2 * kl_ + ku_ + 1)
               + static_cast<size_t>(kl_ + ku_ + row - col);
    }
    void check(int row, int col) const {
        if (row < 0 || row >= n_ || col < 0 || col >= n_)
            throw std::out_of_range("BandedMatrix: index out of range");
        if (col < row - kl_ || col > row + ku_ + kl_)
            throw std::out_of_range("BandedMatrix: entry outside band");
    }

    int n_, kl_, ku_;
    std::vector<double> store_;
    std::vector<int> piv_;
    bool factored_ = false;
};

}  // namespace hodo
