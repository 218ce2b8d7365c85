#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "gf.hpp"

namespace ecrg {

// Dense row-major matrix over GF(2^m). Pure value type; all arithmetic goes
// through free functions that take the Field explicitly.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<Elem> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_) throw DimensionError("matrix data size mismatch");
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Elem& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    Elem operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const Elem> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    std::span<Elem> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

    const std::vector<Elem>& data() const { return data_; }

    bool operator==(const Matrix&) const = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Elem> data_;
};

inline Matrix mat_mul(const Field& gf, const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw DimensionError("matrix product dimension mismatch");
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t t = 0; t < a.cols(); ++t) {
            const Elem v = a(i, t);
            if (v == 0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) ^= gf.mul(v, b(t, j));
        }
    return out;
}

inline Matrix mat_add(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("matrix sum dimension mismatch");
    Matrix out = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) ^= b(i, j);
    return out;
}

inline Matrix transpose(const Matrix& a) {
    Matrix out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
    return out;
}

// Column submatrix in the given index order (duplicates allowed).
inline Matrix select_columns(const Matrix& a, std::span<const std::size_t> cols) {
    Matrix out(a.rows(), cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
        if (cols[j] >= a.cols()) throw DimensionError("column index out of range");
        for (std::size_t i = 0; i < a.rows(); ++i) out(i, j) = a(i, cols[j]);
    }
    return out;
}

inline Matrix select_rows(const Matrix& a, std::span<const std::size_t> rows) {
    Matrix out(rows.size(), a.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i] >= a.rows()) throw DimensionError("row index out of range");
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(rows[i], j);
    }
    return out;
}

// Gauss-Jordan with pivoting on nonzero entries.
inline Matrix mat_inv(const Field& gf, Matrix a) {
    if (a.rows() != a.cols()) throw DimensionError("inverse of non-square matrix");
    const std::size_t n = a.rows();
    Matrix inv = Matrix::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && a(pivot, col) == 0) ++pivot;
        if (pivot == n) throw SingularMatrix("matrix is singular");
        if (pivot != col)
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a(pivot, j), a(col, j));
                std::swap(inv(pivot, j), inv(col, j));
            }
        const Elem scale = gf.inv(a(col, col));
        for (std::size_t j = 0; j < n; ++j) {
            a(col, j) = gf.mul(a(col, j), scale);
            inv(col, j) = gf.mul(inv(col, j), scale);
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == col || a(i, col) == 0) continue;
            const Elem f = a(i, col);
            for (std::size_t j = 0; j < n; ++j) {
                a(i, j) ^= gf.mul(f, a(col, j));
                inv(i, j) ^= gf.mul(f, inv(col, j));
            }
        }
    }
    return inv;
}

inline std::size_t mat_rank(const Field& gf, Matrix a) {
    std::size_t rank = 0;
    for (std::size_t col = 0; col < a.cols() && rank < a.rows(); ++col) {
        std::size_t pivot = rank;
        while (pivot < a.rows() && a(pivot, col) == 0) ++pivot;
        if (pivot == a.rows()) continue;
        if (pivot != rank)
            for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(pivot, j), a(rank, j));
        const Elem scale = gf.inv(a(rank, col));
        for (std::size_t j = 0; j < a.cols(); ++j) a(rank, j) = gf.mul(a(rank, j), scale);
        for (std::size_t i = 0; i < a.rows(); ++i) {
            if (i == rank || a(i, col) == 0) continue;
            const Elem f = a(i, col);
            for (std::size_t j = 0; j < a.cols(); ++j) a(i, j) ^= gf.mul(f, a(rank, j));
        }
        ++rank;
    }
    return rank;
}

// Packed symmetric matrix: the upper triangle stored row-major, so row i
// contributes positions (i,i)..(i,order-1).
struct SymPacked {
    std::size_t order = 0;
    std::vector<Elem> symbols;
};

inline std::size_t sym_packed_len(std::size_t order) { return order * (order + 1) / 2; }

inline Matrix unpack_symmetric(const SymPacked& p) {
    if (p.symbols.size() != sym_packed_len(p.order)) throw DimensionError("packed symmetric symbol count");
    Matrix m(p.order, p.order);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < p.order; ++i)
        for (std::size_t j = i; j < p.order; ++j) {
            m(i, j) = p.symbols[idx];
            m(j, i) = p.symbols[idx];
            ++idx;
        }
    return m;
}

inline SymPacked pack_symmetric(const Matrix& m) {
    if (m.rows() != m.cols()) throw DimensionError("packing a non-square matrix");
    SymPacked p;
    p.order = m.rows();
    p.symbols.reserve(sym_packed_len(p.order));
    for (std::size_t i = 0; i < p.order; ++i)
        for (std::size_t j = i; j < p.order; ++j) p.symbols.push_back(m(i, j));
    return p;
}

// Update complexity of a generator matrix: the maximum number of coded
// symbols touched by a single message-symbol update, i.e. the maximum row
// Hamming weight. eta is that weight relative to an all-nonzero row.
struct UpdateComplexity {
    std::size_t max_row_weight = 0;
    std::size_t row_len = 0;
    double eta() const { return static_cast<double>(max_row_weight) / static_cast<double>(row_len); }
};

inline UpdateComplexity update_complexity(const Matrix& g) {
    UpdateComplexity uc;
    uc.row_len = g.cols();
    for (std::size_t i = 0; i < g.rows(); ++i) {
        std::size_t w = 0;
        for (std::size_t j = 0; j < g.cols(); ++j)
            if (g(i, j) != 0) ++w;
        if (w > uc.max_row_weight) uc.max_row_weight = w;
    }
    if (uc.max_row_weight == 0) throw InvalidParameter("update complexity of a zero matrix");
    return uc;
}

}  // namespace ecrg
