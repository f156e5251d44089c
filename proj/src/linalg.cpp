#include "cremona/linalg.hpp"

#include "cremona/error.hpp"

namespace cremona {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<Elem> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols) fail(ErrorCode::LengthMismatch, "matrix data size mismatch");
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = Elem{1};
    return m;
}

Matrix multiply(const Field& f, const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) fail(ErrorCode::DimensionMismatch, "matrix product shape mismatch");
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Elem x = a(i, k);
            if (x.v == 0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) = f.add(out(i, j), f.mul(x, b(k, j)));
        }
    }
    return out;
}

std::vector<Elem> apply(const Field& f, const Matrix& a, std::span<const Elem> v) {
    if (a.cols() != v.size()) fail(ErrorCode::DimensionMismatch, "matrix-vector shape mismatch");
    std::vector<Elem> out(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        Elem acc{0};
        for (std::size_t k = 0; k < v.size(); ++k) acc = f.add(acc, f.mul(a(i, k), v[k]));
        out[i] = acc;
    }
    return out;
}

Matrix scale(const Field& f, const Matrix& a, Elem c) {
    Matrix out = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = f.mul(a(i, j), c);
    return out;
}

Matrix rref(const Field& f, Matrix a, std::vector<std::size_t>* pivots) {
    if (pivots) pivots->clear();
    std::size_t row = 0;
    for (std::size_t col = 0; col < a.cols() && row < a.rows(); ++col) {
        std::size_t pr = row;
        while (pr < a.rows() && a(pr, col).v == 0) ++pr;
        if (pr == a.rows()) continue;
        if (pr != row) {
            for (std::size_t j = 0; j < a.cols(); ++j) std::swap(a(pr, j), a(row, j));
        }
        const Elem inv = f.inv(a(row, col));
        for (std::size_t j = col; j < a.cols(); ++j) a(row, j) = f.mul(a(row, j), inv);
        for (std::size_t r = 0; r < a.rows(); ++r) {
            if (r == row) continue;
            const Elem factor = a(r, col);
            if (factor.v == 0) continue;
            for (std::size_t j = col; j < a.cols(); ++j) a(r, j) = f.sub(a(r, j), f.mul(factor, a(row, j)));
        }
        if (pivots) pivots->push_back(col);
        ++row;
    }
    return a;
}

std::size_t rank(const Field& f, Matrix a) {
    std::vector<std::size_t> pivots;
    rref(f, std::move(a), &pivots);
    return pivots.size();
}

Elem determinant(const Field& f, Matrix a) {
    if (a.rows() != a.cols()) fail(ErrorCode::DimensionMismatch, "determinant of a non-square matrix");
    const std::size_t n = a.rows();
    Elem det = f.one();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pr = col;
        while (pr < n && a(pr, col).v == 0) ++pr;
        if (pr == n) return f.zero();
        if (pr != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(pr, j), a(col, j));
            det = f.neg(det);
        }
        const Elem pivot = a(col, col);
        det = f.mul(det, pivot);
        const Elem inv = f.inv(pivot);
        for (std::size_t r = col + 1; r < n; ++r) {
            const Elem factor = f.mul(a(r, col), inv);
            if (factor.v == 0) continue;
            for (std::size_t j = col; j < n; ++j) a(r, j) = f.sub(a(r, j), f.mul(factor, a(col, j)));
        }
    }
    return det;
}

std::optional<Matrix> inverse(const Field& f, Matrix a) {
    if (a.rows() != a.cols()) fail(ErrorCode::DimensionMismatch, "inverse of a non-square matrix");
    const std::size_t n = a.rows();
    Matrix aug(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
        aug(i, n + i) = f.one();
    }
    std::vector<std::size_t> pivots;
    aug = rref(f, std::move(aug), &pivots);
    if (pivots.size() < n || pivots[n - 1] != n - 1) return std::nullopt;
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) = aug(i, n + j);
    return out;
}

std::vector<std::vector<Elem>> nullspace(const Field& f, const Matrix& a) {
    std::vector<std::size_t> pivots;
    const Matrix r = rref(f, a, &pivots);
    std::vector<bool> is_pivot(a.cols(), false);
    for (auto p : pivots) is_pivot[p] = true;
    std::vector<std::vector<Elem>> basis;
    for (std::size_t free = 0; free < a.cols(); ++free) {
        if (is_pivot[free]) continue;
        std::vector<Elem> v(a.cols());
        v[free] = f.one();
        for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = f.neg(r(i, free));
        basis.push_back(std::move(v));
    }
    return basis;
}

Matrix matrix_power(const Field& f, const Matrix& a, std::uint64_t e) {
    Matrix result = Matrix::identity(a.rows());
    Matrix base = a;
    while (e) {
        if (e & 1) result = multiply(f, result, base);
        base = multiply(f, base, base);
        e >>= 1;
    }
    return result;
}

Matrix projective_normalize(const Field& f, Matrix a) {
    for (const Elem x : a.data()) {
        if (x.v != 0) return scale(f, a, f.inv(x));
    }
    fail(ErrorCode::DegenerateInput, "zero matrix has no projective class");
}

}  // namespace cremona
