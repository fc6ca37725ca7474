#include "bqk/integer_matrix.hpp"

#include <sstream>
#include <stdexcept>
#include <utility>

namespace bqk {

IntegerMatrix::IntegerMatrix(std::size_t rows, std::size_t cols, std::initializer_list<long> values)
    : IntegerMatrix(rows, cols) {
    if (values.size() != rows * cols) throw std::invalid_argument("IntegerMatrix: wrong number of values");
    std::size_t i = 0;
    for (long v : values) data_[i++] = v;
}

IntegerMatrix IntegerMatrix::identity(std::size_t n) {
    IntegerMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) out(i, i) = 1;
    return out;
}

IntegerMatrix IntegerMatrix::transpose() const {
    IntegerMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
    return out;
}

bool IntegerMatrix::is_zero() const {
    for (const auto& x : data_)
        if (x != 0) return false;
    return true;
}

bool IntegerMatrix::operator==(const IntegerMatrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && data_ == other.data_;
}

void IntegerMatrix::swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(a, c), (*this)(b, c));
}

void IntegerMatrix::swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t r = 0; r < rows_; ++r) std::swap((*this)(r, a), (*this)(r, b));
}

void IntegerMatrix::add_row_multiple(std::size_t target, std::size_t source, const Integer& factor) {
    if (factor == 0) return;
    for (std::size_t c = 0; c < cols_; ++c) {
        const Integer& s = (*this)(source, c);
        if (s != 0) (*this)(target, c) += factor * s;
    }
}

void IntegerMatrix::add_col_multiple(std::size_t target, std::size_t source, const Integer& factor) {
    if (factor == 0) return;
    for (std::size_t r = 0; r < rows_; ++r) {
        const Integer& s = (*this)(r, source);
        if (s != 0) (*this)(r, target) += factor * s;
    }
}

void IntegerMatrix::negate_row(std::size_t r) {
    for (std::size_t c = 0; c < cols_; ++c) (*this)(r, c) = -(*this)(r, c);
}

void IntegerMatrix::negate_col(std::size_t c) {
    for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = -(*this)(r, c);
}

std::string IntegerMatrix::to_string() const {
    std::ostringstream out;
    out << "[";
    for (std::size_t r = 0; r < rows_; ++r) {
        out << (r ? ", [" : "[");
        for (std::size_t c = 0; c < cols_; ++c) out << (c ? ", " : "") << (*this)(r, c).get_str();
        out << "]";
    }
    out << "]";
    return out.str();
}

IntegerMatrix operator*(const IntegerMatrix& a, const IntegerMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("IntegerMatrix: shape mismatch in product");
    IntegerMatrix out(a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const Integer& x = a(r, k);
            if (x == 0) continue;
            for (std::size_t c = 0; c < b.cols(); ++c) out(r, c) += x * b(k, c);
        }
    return out;
}

Integer determinant(const IntegerMatrix& a_in) {
    if (a_in.rows() != a_in.cols()) throw std::invalid_argument("determinant: matrix is not square");
    const std::size_t n = a_in.rows();
    if (n == 0) return 1;
    IntegerMatrix a = a_in;
    Integer sign = 1;
    Integer prev = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a(k, k) == 0) {
            std::size_t swap = k + 1;
            while (swap < n && a(swap, k) == 0) ++swap;
            if (swap == n) return 0;
            a.swap_rows(k, swap);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                Integer v = a(i, j) * a(k, k) - a(i, k) * a(k, j);
                mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
                a(i, j) = v;
            }
        prev = a(k, k);
    }
    return sign * a(n - 1, n - 1);
}

std::vector<Integer> SmithForm::invariant_factors() const {
    std::vector<Integer> out;
    for (std::size_t i = 0; i < rank; ++i) out.push_back(S(i, i));
    return out;
}

namespace {

// Tracks U, U^{-1}, V, V^{-1} through elementary operations on S.
struct SmithState {
    SmithForm f;

    void swap_rows(std::size_t a, std::size_t b) {
        f.S.swap_rows(a, b);
        f.U.swap_rows(a, b);
        f.U_inv.swap_cols(a, b);
    }
    void swap_cols(std::size_t a, std::size_t b) {
        f.S.swap_cols(a, b);
        f.V.swap_cols(a, b);
        f.V_inv.swap_rows(a, b);
    }
    // R_t += q R_s
    void add_row(std::size_t t, std::size_t s, const Integer& q) {
        f.S.add_row_multiple(t, s, q);
        f.U.add_row_multiple(t, s, q);
        f.U_inv.add_col_multiple(s, t, -q);
    }
    // C_t += q C_s
    void add_col(std::size_t t, std::size_t s, const Integer& q) {
        f.S.add_col_multiple(t, s, q);
        f.V.add_col_multiple(t, s, q);
        f.V_inv.add_row_multiple(s, t, -q);
    }
    void negate_row(std::size_t r) {
        f.S.negate_row(r);
        f.U.negate_row(r);
        f.U_inv.negate_col(r);
    }
};

}  // namespace

SmithForm smith_normal_form(const IntegerMatrix& a) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    SmithState st;
    st.f.S = a;
    st.f.U = IntegerMatrix::identity(m);
    st.f.U_inv = IntegerMatrix::identity(m);
    st.f.V = IntegerMatrix::identity(n);
    st.f.V_inv = IntegerMatrix::identity(n);
    IntegerMatrix& S = st.f.S;

    std::size_t t = 0;
    for (; t < std::min(m, n); ++t) {
        while (true) {
            // pivot: smallest |entry|, then lowest row, then lowest column
            std::size_t pr = m, pc = n;
            Integer best;
            for (std::size_t r = t; r < m; ++r)
                for (std::size_t c = t; c < n; ++c) {
                    const Integer& x = S(r, c);
                    if (x == 0) continue;
                    if (pr == m || abs(x) < best) {
                        best = abs(x);
                        pr = r;
                        pc = c;
                    }
                }
            if (pr == m) break;
            st.swap_rows(t, pr);
            st.swap_cols(t, pc);

            bool clean = true;
            for (std::size_t r = t + 1; r < m; ++r) {
                if (S(r, t) == 0) continue;
                const Integer q = S(r, t) / S(t, t);
                st.add_row(r, t, -q);
                if (S(r, t) != 0) clean = false;
            }
            for (std::size_t c = t + 1; c < n; ++c) {
                if (S(t, c) == 0) continue;
                const Integer q = S(t, c) / S(t, t);
                st.add_col(c, t, -q);
                if (S(t, c) != 0) clean = false;
            }
            if (!clean) continue;

            // divisibility: fold an offending row into row t and retry
            bool divides = true;
            for (std::size_t r = t + 1; r < m && divides; ++r)
                for (std::size_t c = t + 1; c < n; ++c)
                    if (S(r, c) % S(t, t) != 0) {
                        st.add_row(t, r, 1);
                        divides = false;
                        break;
                    }
            if (divides) break;
        }
        if (S(t, t) == 0) break;
        if (S(t, t) < 0) st.negate_row(t);
    }
    st.f.rank = 0;
    while (st.f.rank < std::min(m, n) && S(st.f.rank, st.f.rank) != 0) ++st.f.rank;
    return std::move(st.f);
}

}  // namespace bqk
