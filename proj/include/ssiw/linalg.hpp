#pragma once

// Exact dense linear algebra over Z and Q. Row reduction is fraction-free:
// rows are integer vectors kept primitive (content 1) after each combination,
// and rational data enters only when solving for pivot variables.

#include <ssiw/core.hpp>

#include <algorithm>
#include <cstddef>
#include <ostream>
#include <vector>

namespace ssiw::linalg {

using IntRow = std::vector<Integer>;
using QVector = std::vector<Rational>;

/// Dense row-major rational matrix.
class QMatrix {
public:
    QMatrix() = default;
    QMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    static QMatrix identity(std::size_t n) {
        QMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    Rational& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const Rational& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    friend QMatrix operator*(const QMatrix& a, const QMatrix& b) {
        if (a.cols_ != b.rows_) throw Error(Errc::InvalidArgument, "matrix shape mismatch");
        QMatrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const Rational& aik = a(i, k);
                if (aik == 0) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend QMatrix operator-(const QMatrix& a, const QMatrix& b) {
        QMatrix c = a;
        for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] -= b.data_[i];
        return c;
    }

    QMatrix shifted(const Rational& lambda) const {
        QMatrix c = *this;
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) c(i, i) -= lambda;
        return c;
    }

    Rational trace() const {
        Rational t;
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
        return t;
    }

    bool is_zero() const {
        return std::all_of(data_.begin(), data_.end(), [](const Rational& x) { return x == 0; });
    }

    bool operator==(const QMatrix& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
    }

    /// Stack `below` under this matrix (same column count).
    QMatrix vstack(const QMatrix& below) const {
        if (rows_ != 0 && below.cols_ != cols_) throw Error(Errc::InvalidArgument, "vstack shape mismatch");
        QMatrix c(rows_ + below.rows_, below.cols_ ? below.cols_ : cols_);
        std::copy(data_.begin(), data_.end(), c.data_.begin());
        std::copy(below.data_.begin(), below.data_.end(), c.data_.begin() + data_.size());
        return c;
    }

    QVector apply(const QVector& v) const {
        QVector out(rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out[i] += (*this)(i, j) * v[j];
        return out;
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<Rational> data_;
};

inline std::ostream& operator<<(std::ostream& os, const QMatrix& m) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        os << '[';
        for (std::size_t j = 0; j < m.cols(); ++j) os << (j ? " " : "") << m(i, j);
        os << "]\n";
    }
    return os;
}

inline Integer content(const IntRow& row) {
    Integer g;
    for (const auto& x : row) {
        if (x != 0) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
        if (g == 1) break;
    }
    return g;
}

inline void make_primitive(IntRow& row) {
    Integer g = content(row);
    if (g > 1)
        for (auto& x : row) mpz_divexact(x.get_mpz_t(), x.get_mpz_t(), g.get_mpz_t());
}

/// Clear denominators of a rational row and make it primitive.
inline IntRow to_integer_row(const QVector& row) {
    Integer l = 1;
    for (const auto& x : row) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
    IntRow out(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) out[j] = row[j].get_num() * (l / row[j].get_den());
    make_primitive(out);
    return out;
}

/// Reduced row echelon form over Z: each nonzero row is primitive, has a
/// positive pivot, and every other row is zero in its pivot column.
struct Echelon {
    std::size_t cols = 0;
    std::vector<IntRow> rows;
    std::vector<std::size_t> pivots;  // pivots[r] = pivot column of rows[r]

    std::size_t rank() const { return rows.size(); }

    std::vector<std::size_t> free_columns() const {
        std::vector<bool> is_pivot(cols, false);
        for (auto c : pivots) is_pivot[c] = true;
        std::vector<std::size_t> out;
        for (std::size_t c = 0; c < cols; ++c)
            if (!is_pivot[c]) out.push_back(c);
        return out;
    }
};

inline Echelon row_reduce(std::vector<IntRow> rows, std::size_t cols) {
    Echelon e;
    e.cols = cols;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
        // smallest nonzero entry in this column keeps growth down
        std::size_t best = rows.size();
        for (std::size_t i = r; i < rows.size(); ++i) {
            if (rows[i][c] == 0) continue;
            if (best == rows.size() || abs(rows[i][c]) < abs(rows[best][c])) best = i;
        }
        if (best == rows.size()) continue;
        std::swap(rows[r], rows[best]);
        if (rows[r][c] < 0)
            for (auto& x : rows[r]) x = -x;
        make_primitive(rows[r]);
        const IntRow& piv = rows[r];
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == r || rows[i][c] == 0) continue;
            Integer g;
            mpz_gcd(g.get_mpz_t(), piv[c].get_mpz_t(), rows[i][c].get_mpz_t());
            Integer mp = rows[i][c] / g, mi = piv[c] / g;
            for (std::size_t j = 0; j < cols; ++j) rows[i][j] = mi * rows[i][j] - mp * piv[j];
            make_primitive(rows[i]);
        }
        e.pivots.push_back(c);
        ++r;
    }
    rows.resize(r);
    e.rows = std::move(rows);
    return e;
}

inline Echelon row_reduce(const QMatrix& m) {
    std::vector<IntRow> rows;
    rows.reserve(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        QVector row(m.cols());
        for (std::size_t j = 0; j < m.cols(); ++j) row[j] = m(i, j);
        rows.push_back(to_integer_row(row));
    }
    return row_reduce(std::move(rows), m.cols());
}

inline std::size_t rank(const QMatrix& m) { return row_reduce(m).rank(); }

/// Basis of the right kernel {x : E x = 0}, one primitive integer vector per
/// free column (free variable set to a positive value, others zero).
inline std::vector<IntRow> kernel(const Echelon& e) {
    std::vector<IntRow> basis;
    for (auto f : e.free_columns()) {
        QVector x(e.cols);
        x[f] = 1;
        for (std::size_t r = 0; r < e.rows.size(); ++r) {
            const IntRow& row = e.rows[r];
            x[e.pivots[r]] = Rational(-row[f], row[e.pivots[r]]);
        }
        for (auto& q : x) q.canonicalize();
        basis.push_back(to_integer_row(x));
    }
    return basis;
}

inline std::vector<IntRow> kernel(const QMatrix& m) { return kernel(row_reduce(m)); }

}  // namespace ssiw::linalg
