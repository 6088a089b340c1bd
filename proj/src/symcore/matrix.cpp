#include "nframes/matrix.hpp"

#include <functional>

namespace nf {

Matrix::Matrix(std::initializer_list<std::initializer_list<Expr>> init) {
    rows_ = init.size();
    cols_ = rows_ ? init.begin()->size() : 0;
    for (const auto& r : init) {
        if (r.size() != cols_) throw std::invalid_argument("ragged matrix literal");
        for (const auto& e : r) a_.push_back(e);
    }
}

Matrix Matrix::identity(size_t n) {
    Matrix m(n, n);
    for (size_t i = 0; i < n; ++i) m(i, i) = Expr(1);
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (size_t i = 0; i < rows_; ++i)
        for (size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Matrix Matrix::minor_matrix(size_t skip_row, size_t skip_col) const {
    Matrix m(rows_ - 1, cols_ - 1);
    for (size_t i = 0, r = 0; i < rows_; ++i) {
        if (i == skip_row) continue;
        for (size_t j = 0, c = 0; j < cols_; ++j) {
            if (j == skip_col) continue;
            m(r, c++) = (*this)(i, j);
        }
        ++r;
    }
    return m;
}

bool Matrix::is_zero() const {
    for (const auto& e : a_)
        if (!e.is_zero()) return false;
    return true;
}

Matrix Matrix::map(const std::function<Expr(const Expr&)>& f) const {
    Matrix m(rows_, cols_);
    for (size_t k = 0; k < a_.size(); ++k) m.a_[k] = f(a_[k]);
    return m;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matrix product shape mismatch");
    Matrix r(a.rows(), b.cols());
    for (size_t i = 0; i < a.rows(); ++i)
        for (size_t j = 0; j < b.cols(); ++j) {
            Expr s;
            for (size_t k = 0; k < a.cols(); ++k) {
                if (a(i, k).is_zero() || b(k, j).is_zero()) continue;
                s += a(i, k) * b(k, j);
            }
            r(i, j) = s;
        }
    return r;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("matrix sum shape mismatch");
    Matrix r(a.rows(), a.cols());
    for (size_t i = 0; i < a.rows(); ++i)
        for (size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) + b(i, j);
    return r;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("matrix difference shape mismatch");
    Matrix r(a.rows(), a.cols());
    for (size_t i = 0; i < a.rows(); ++i)
        for (size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) - b(i, j);
    return r;
}

Matrix operator*(const Expr& s, const Matrix& a) {
    return a.map([&](const Expr& e) { return s * e; });
}

Matrix operator-(const Matrix& a) {
    return a.map([](const Expr& e) { return -e; });
}

namespace {

size_t weight(const Expr& e) { return e.num().nterms() + e.den().nterms(); }

// Gaussian elimination with the lightest nonzero pivot in each column.
// Returns determinant; when `inv` is given it is reduced alongside.
Expr eliminate(Matrix m, Matrix* inv) {
    const size_t n = m.rows();
    if (n != m.cols()) throw std::invalid_argument("square matrix required");
    Expr d(1);
    for (size_t c = 0; c < n; ++c) {
        size_t piv = n;
        for (size_t r = c; r < n; ++r) {
            if (m(r, c).is_zero()) continue;
            if (piv == n || weight(m(r, c)) < weight(m(piv, c))) piv = r;
        }
        if (piv == n) return Expr();
        if (piv != c) {
            for (size_t j = 0; j < n; ++j) std::swap(m(piv, j), m(c, j));
            if (inv)
                for (size_t j = 0; j < n; ++j) std::swap((*inv)(piv, j), (*inv)(c, j));
            d = -d;
        }
        Expr p = m(c, c);
        d *= p;
        Expr pinv = Expr(1) / p;
        for (size_t j = 0; j < n; ++j) {
            if (!m(c, j).is_zero()) m(c, j) *= pinv;
            if (inv && !(*inv)(c, j).is_zero()) (*inv)(c, j) *= pinv;
        }
        for (size_t r = 0; r < n; ++r) {
            if (r == c || m(r, c).is_zero()) continue;
            Expr f = m(r, c);
            if (!inv && r < c) continue;
            for (size_t j = 0; j < n; ++j) {
                if (!m(c, j).is_zero()) m(r, j) -= f * m(c, j);
                if (inv && !(*inv)(c, j).is_zero()) (*inv)(r, j) -= f * (*inv)(c, j);
            }
        }
    }
    return d;
}

}  // namespace

Expr det(const Matrix& m) {
    const size_t n = m.rows();
    if (n != m.cols()) throw std::invalid_argument("det of non-square matrix");
    if (n == 0) return Expr(1);
    if (n == 1) return m(0, 0);
    if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    if (n == 3) {
        return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
               m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
    }
    return eliminate(m, nullptr);
}

Matrix inverse(const Matrix& m) {
    const size_t n = m.rows();
    if (n != m.cols()) throw std::invalid_argument("inverse of non-square matrix");
    if (n <= 3) {
        Expr d = det(m);
        if (d.is_zero()) throw SingularMatrix("matrix is singular");
        Matrix r(n, n);
        if (n == 1) {
            r(0, 0) = Expr(1) / d;
            return r;
        }
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j) {
                Expr c = det(m.minor_matrix(j, i));
                r(i, j) = ((i + j) % 2 ? -c : c) / d;
            }
        return r;
    }
    Matrix inv = Matrix::identity(n);
    Expr d = eliminate(m, &inv);
    if (d.is_zero()) throw SingularMatrix("matrix is singular");
    return inv;
}

Matrix first_minors(const Matrix& m) {
    const size_t n = m.rows();
    Matrix r(n, n);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) r(i, j) = det(m.minor_matrix(i, j));
    return r;
}

Matrix substitute(const Matrix& m, const Bindings& b) {
    return m.map([&](const Expr& e) { return substitute(e, b); });
}

std::string to_string(const Matrix& m) {
    std::string s = "[";
    for (size_t i = 0; i < m.rows(); ++i) {
        s += i ? ", [" : "[";
        for (size_t j = 0; j < m.cols(); ++j) s += (j ? ", " : "") + to_string(m(i, j));
        s += "]";
    }
    return s + "]";
}

size_t rank(QMatrix m) {
    size_t r = 0;
    const size_t rows = m.size(), cols = rows ? m[0].size() : 0;
    for (size_t c = 0; c < cols && r < rows; ++c) {
        size_t piv = rows;
        for (size_t i = r; i < rows; ++i)
            if (m[i][c] != 0) {
                piv = i;
                break;
            }
        if (piv == rows) continue;
        std::swap(m[piv], m[r]);
        for (size_t i = r + 1; i < rows; ++i) {
            if (m[i][c] == 0) continue;
            mpq_class f = m[i][c] / m[r][c];
            for (size_t j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
        }
        ++r;
    }
    return r;
}

std::optional<std::vector<Expr>> solve_overdetermined(const QMatrix& A, const std::vector<Expr>& b) {
    const size_t rows = A.size(), n = rows ? A[0].size() : 0;
    // pick n independent rows greedily
    std::vector<size_t> chosen;
    QMatrix basis;
    for (size_t i = 0; i < rows && chosen.size() < n; ++i) {
        QMatrix trial = basis;
        trial.push_back(A[i]);
        if (rank(trial) == trial.size()) {
            basis = std::move(trial);
            chosen.push_back(i);
        }
    }
    if (chosen.size() < n) return std::nullopt;
    // Gauss-Jordan on the square system with symbolic right-hand side
    QMatrix M = basis;
    std::vector<Expr> rhs;
    for (auto i : chosen) rhs.push_back(b[i]);
    for (size_t c = 0; c < n; ++c) {
        size_t piv = c;
        while (M[piv][c] == 0) ++piv;
        std::swap(M[piv], M[c]);
        std::swap(rhs[piv], rhs[c]);
        mpq_class p = M[c][c];
        for (size_t j = 0; j < n; ++j) M[c][j] /= p;
        rhs[c] = rhs[c] * Expr(mpq_class(1 / p));
        for (size_t r = 0; r < n; ++r) {
            if (r == c || M[r][c] == 0) continue;
            mpq_class f = M[r][c];
            for (size_t j = 0; j < n; ++j) M[r][j] -= f * M[c][j];
            rhs[r] -= Expr(f) * rhs[c];
        }
    }
    return rhs;
}

}  // namespace nf
