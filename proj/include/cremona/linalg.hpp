#pragma once

// Dense matrices over a finite field. Entries are stored row-major; the field
// is passed explicitly so that matrices stay plain values.

#include <optional>
#include <span>
#include <vector>

#include "cremona/field.hpp"

namespace cremona {

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
    Matrix(std::size_t rows, std::size_t cols, std::vector<Elem> data);

    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    Elem& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    Elem operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    const std::vector<Elem>& data() const noexcept { return data_; }
    std::span<const Elem> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Elem> data_;
};

Matrix multiply(const Field& f, const Matrix& a, const Matrix& b);
std::vector<Elem> apply(const Field& f, const Matrix& a, std::span<const Elem> v);
Matrix scale(const Field& f, const Matrix& a, Elem c);
Elem determinant(const Field& f, Matrix a);
std::optional<Matrix> inverse(const Field& f, Matrix a);
std::size_t rank(const Field& f, Matrix a);
/// Reduced row echelon form; pivot columns are returned through `pivots`.
Matrix rref(const Field& f, Matrix a, std::vector<std::size_t>* pivots = nullptr);
/// Basis of {v : a v = 0}, one vector per free column of the RREF (free entry 1).
std::vector<std::vector<Elem>> nullspace(const Field& f, const Matrix& a);
Matrix matrix_power(const Field& f, const Matrix& a, std::uint64_t e);
/// Canonical projective representative: first nonzero entry scaled to 1.
Matrix projective_normalize(const Field& f, Matrix a);

}  // namespace cremona
