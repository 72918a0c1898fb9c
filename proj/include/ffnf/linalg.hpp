#ifndef FFNF_LINALG_HPP
#define FFNF_LINALG_HPP

#include "scalar.hpp"

#include <optional>
#include <vector>

namespace ffnf {

struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<Scalar> a;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c) {}

    Scalar& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    const Scalar& operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }
};

// In-place reduced row echelon form; returns pivot columns in row order.
inline std::vector<std::size_t> rref(Matrix& m) {
    std::vector<std::size_t> piv;
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols && r < m.rows; ++c) {
        std::size_t sel = r;
        while (sel < m.rows && m(sel, c) == 0) ++sel;
        if (sel == m.rows) continue;
        if (sel != r)
            for (std::size_t j = 0; j < m.cols; ++j) std::swap(m(sel, j), m(r, j));
        Scalar inv = 1 / m(r, c);
        for (std::size_t j = c; j < m.cols; ++j)
            if (m(r, j) != 0) m(r, j) *= inv;
        for (std::size_t i = 0; i < m.rows; ++i) {
            if (i == r || m(i, c) == 0) continue;
            Scalar f = m(i, c);
            for (std::size_t j = c; j < m.cols; ++j)
                if (m(r, j) != 0) m(i, j) -= f * m(r, j);
        }
        piv.push_back(c);
        ++r;
    }
    return piv;
}

inline std::size_t rank(Matrix m) { return rref(m).size(); }

// Basis of {v : m v = 0}, one vector per free column (free entry 1).
inline std::vector<std::vector<Scalar>> nullspace(Matrix m) {
    auto piv = rref(m);
    std::vector<bool> is_piv(m.cols, false);
    for (auto c : piv) is_piv[c] = true;
    std::vector<std::vector<Scalar>> out;
    for (std::size_t f = 0; f < m.cols; ++f) {
        if (is_piv[f]) continue;
        std::vector<Scalar> v(m.cols);
        v[f] = 1;
        for (std::size_t i = 0; i < piv.size(); ++i) v[piv[i]] = -m(i, f);
        out.push_back(std::move(v));
    }
    return out;
}

// Rows of `vs` brought to reduced echelon form (zero rows dropped).
inline std::vector<std::vector<Scalar>> echelon_rows(const std::vector<std::vector<Scalar>>& vs, std::size_t width) {
    Matrix m(vs.size(), width);
    for (std::size_t i = 0; i < vs.size(); ++i)
        for (std::size_t j = 0; j < width; ++j) m(i, j) = vs[i][j];
    auto piv = rref(m);
    std::vector<std::vector<Scalar>> out;
    for (std::size_t i = 0; i < piv.size(); ++i) {
        std::vector<Scalar> row(width);
        for (std::size_t j = 0; j < width; ++j) row[j] = m(i, j);
        out.push_back(std::move(row));
    }
    return out;
}

// Grows a linearly independent set one vector at a time.
class IncrementalBasis {
public:
    explicit IncrementalBasis(std::size_t width) : width_(width) {}

    // true if v was independent of the vectors inserted so far
    bool insert(std::vector<Scalar> v) {
        for (std::size_t k = 0; k < rows_.size(); ++k) {
            const Scalar& f = v[piv_[k]];
            if (f == 0) continue;
            Scalar ff = f;
            for (std::size_t j = 0; j < width_; ++j)
                if (rows_[k][j] != 0) v[j] -= ff * rows_[k][j];
        }
        std::size_t p = 0;
        while (p < width_ && v[p] == 0) ++p;
        if (p == width_) return false;
        Scalar inv = 1 / v[p];
        for (auto& x : v)
            if (x != 0) x *= inv;
        rows_.push_back(std::move(v));
        piv_.push_back(p);
        return true;
    }
    std::size_t size() const { return rows_.size(); }

private:
    std::size_t width_;
    std::vector<std::vector<Scalar>> rows_;
    std::vector<std::size_t> piv_;
};

// Factored square system; solve() returns nullopt if the matrix was singular.
class SquareSolver {
public:
    SquareSolver() = default;
    explicit SquareSolver(const Matrix& m) : n_(m.rows) {
        if (m.rows != m.cols) throw std::invalid_argument("SquareSolver needs a square matrix");
        Matrix aug(n_, 2 * n_);
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) aug(i, j) = m(i, j);
            aug(i, n_ + i) = 1;
        }
        auto piv = rref(aug);
        ok_ = piv.size() >= n_ && piv[n_ - 1] == n_ - 1;
        if (n_ == 0) ok_ = true;
        if (!ok_) return;
        inv_ = Matrix(n_, n_);
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j < n_; ++j) inv_(i, j) = aug(i, n_ + j);
    }
    bool invertible() const { return ok_; }
    std::size_t size() const { return n_; }

    std::optional<std::vector<Scalar>> solve(const std::vector<Scalar>& b) const {
        if (!ok_) return std::nullopt;
        std::vector<Scalar> x(n_);
        for (std::size_t j = 0; j < n_; ++j) {
            if (b[j] == 0) continue;
            for (std::size_t i = 0; i < n_; ++i)
                if (inv_(i, j) != 0) x[i] += inv_(i, j) * b[j];
        }
        return x;
    }

private:
    std::size_t n_ = 0;
    bool ok_ = false;
    Matrix inv_;
};

// Any solution of m x = b (free variables zero), or nullopt if inconsistent.
inline std::optional<std::vector<Scalar>> solve_any(const Matrix& m, const std::vector<Scalar>& b) {
    Matrix aug(m.rows, m.cols + 1);
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t j = 0; j < m.cols; ++j) aug(i, j) = m(i, j);
        aug(i, m.cols) = b[i];
    }
    auto piv = rref(aug);
    std::vector<Scalar> x(m.cols);
    for (std::size_t i = 0; i < piv.size(); ++i) {
        if (piv[i] == m.cols) return std::nullopt;
        x[piv[i]] = aug(i, m.cols);
    }
    return x;
}

} // namespace ffnf

#endif
