// Dense matrices over the rational-function field, plus exact rational
// linear algebra used by sampling-based solves.
#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "nframes/symcore.hpp"

namespace nf {

struct SingularMatrix : std::runtime_error {
    using std::runtime_error::runtime_error;
};

class Matrix {
public:
    Matrix() = default;
    Matrix(size_t r, size_t c) : rows_(r), cols_(c), a_(r * c) {}
    Matrix(std::initializer_list<std::initializer_list<Expr>> init);
    static Matrix identity(size_t n);

    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }
    Expr& operator()(size_t i, size_t j) { return a_.at(i * cols_ + j); }
    const Expr& operator()(size_t i, size_t j) const { return a_.at(i * cols_ + j); }

    Matrix transpose() const;
    Matrix minor_matrix(size_t skip_row, size_t skip_col) const;
    bool is_zero() const;
    Matrix map(const std::function<Expr(const Expr&)>& f) const;

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
    }
    friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }

private:
    size_t rows_ = 0, cols_ = 0;
    std::vector<Expr> a_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(const Expr& s, const Matrix& a);
Matrix operator-(const Matrix& a);

Expr det(const Matrix& m);
// throws SingularMatrix
Matrix inverse(const Matrix& m);
// entry (i,j) = det of m without row i and column j (unsigned)
Matrix first_minors(const Matrix& m);
Matrix substitute(const Matrix& m, const Bindings& b);
std::string to_string(const Matrix& m);

// exact rational linear algebra
using QMatrix = std::vector<std::vector<mpq_class>>;
// rank of a rational matrix
size_t rank(QMatrix m);
// solve A x = b column-wise where b has Expr entries; A is m x n with rank n.
// Returns nullopt when A does not have full column rank.
std::optional<std::vector<Expr>> solve_overdetermined(const QMatrix& A, const std::vector<Expr>& b);

}  // namespace nf
