#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace bqk {

using Integer = mpz_class;

// Dense matrix of arbitrary-precision integers, row-major.
class IntegerMatrix {
public:
    IntegerMatrix() = default;
    IntegerMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0) {}
    IntegerMatrix(std::size_t rows, std::size_t cols, std::initializer_list<long> values);

    static IntegerMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Integer& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const Integer& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    IntegerMatrix transpose() const;
    bool is_zero() const;
    bool operator==(const IntegerMatrix& other) const;

    // elementary operations
    void swap_rows(std::size_t a, std::size_t b);
    void swap_cols(std::size_t a, std::size_t b);
    void add_row_multiple(std::size_t target, std::size_t source, const Integer& factor);  // R_t += f R_s
    void add_col_multiple(std::size_t target, std::size_t source, const Integer& factor);  // C_t += f C_s
    void negate_row(std::size_t r);
    void negate_col(std::size_t c);

    std::string to_string() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Integer> data_;
};

IntegerMatrix operator*(const IntegerMatrix& a, const IntegerMatrix& b);

// Exact determinant (fraction-free Bareiss elimination).
Integer determinant(const IntegerMatrix& a);

// U * A * V = S with U, V unimodular and S diagonal, d1 | d2 | ...
// The inverses of U and V are tracked alongside.
struct SmithForm {
    IntegerMatrix U, S, V;
    IntegerMatrix U_inv, V_inv;
    std::size_t rank = 0;

    std::vector<Integer> invariant_factors() const;  // nonzero diagonal, in order
};

// Deterministic: the pivot is the entry of smallest nonzero absolute value,
// ties broken by lowest row, then lowest column.
SmithForm smith_normal_form(const IntegerMatrix& a);

}  // namespace bqk
