#include <ssiw/linalg.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace ssiw;
using namespace ssiw::linalg;

namespace {

QMatrix from_rows(std::initializer_list<std::initializer_list<long>> rows) {
    QMatrix m(rows.size(), rows.begin()->size());
    std::size_t i = 0;
    for (const auto& r : rows) {
        std::size_t j = 0;
        for (long x : r) m(i, j++) = x;
        ++i;
    }
    return m;
}

// Oracle: rank by floating-free Bareiss elimination over Q.
std::size_t rank_oracle(QMatrix m) {
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
        std::size_t piv = r;
        while (piv < m.rows() && m(piv, c) == 0) ++piv;
        if (piv == m.rows()) continue;
        for (std::size_t j = 0; j < m.cols(); ++j) std::swap(m(r, j), m(piv, j));
        for (std::size_t i = r + 1; i < m.rows(); ++i) {
            const Rational f = m(i, c) / m(r, c);
            for (std::size_t j = 0; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
        }
        ++r;
    }
    return r;
}

}  // namespace

TEST(QMatrix, Arithmetic) {
    const auto a = from_rows({{1, 2}, {3, 4}});
    const auto b = from_rows({{0, 1}, {1, 0}});
    EXPECT_EQ(a * b, from_rows({{2, 1}, {4, 3}}));
    EXPECT_EQ(a - a, QMatrix(2, 2));
    EXPECT_TRUE((a - a).is_zero());
    EXPECT_EQ(a.trace(), Rational(5));
    EXPECT_EQ(a.shifted(1), from_rows({{0, 2}, {3, 3}}));
    EXPECT_EQ(QMatrix::identity(2) * a, a);
    EXPECT_EQ(a.vstack(b).rows(), 4u);
    EXPECT_THROW(a * QMatrix(3, 1), Error);
}

TEST(Rows, ContentAndPrimitive) {
    IntRow r{6, -9, 0, 15};
    EXPECT_EQ(content(r), Integer(3));
    make_primitive(r);
    EXPECT_EQ(r, (IntRow{2, -3, 0, 5}));
    EXPECT_EQ(to_integer_row({Rational(1, 2), Rational(-1, 3)}), (IntRow{3, -2}));
}

TEST(RowReduce, EchelonShape) {
    const auto e = row_reduce(from_rows({{2, 4, 6}, {1, 2, 3}, {0, 1, 1}}));
    EXPECT_EQ(e.rank(), 2u);
    EXPECT_EQ(e.pivots, (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(e.free_columns(), (std::vector<std::size_t>{2}));
    for (std::size_t r = 0; r < e.rank(); ++r) {
        EXPECT_GT(e.rows[r][e.pivots[r]], 0);
        EXPECT_EQ(content(e.rows[r]), 1);
        for (std::size_t s = 0; s < e.rank(); ++s)
            if (s != r) {
                EXPECT_EQ(e.rows[s][e.pivots[r]], 0);
            }
    }
}

TEST(RowReduce, RandomRankAndKernelAgainstOracle) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<long> entry(-3, 3);
    for (int t = 0; t < 100; ++t) {
        const std::size_t rows = 1 + rng() % 6, cols = 1 + rng() % 7;
        QMatrix m(rows, cols);
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j) m(i, j) = (rng() % 3 == 0) ? 0 : entry(rng);
        const auto r = rank(m);
        ASSERT_EQ(r, rank_oracle(m));
        const auto ker = kernel(m);
        ASSERT_EQ(ker.size(), cols - r);
        QMatrix k(cols, ker.size());
        for (std::size_t c = 0; c < ker.size(); ++c) {
            EXPECT_EQ(content(ker[c]), 1);
            for (std::size_t j = 0; j < cols; ++j) k(j, c) = ker[c][j];
        }
        if (!ker.empty()) {
            EXPECT_TRUE((m * k).is_zero());
            EXPECT_EQ(rank(k), ker.size());
        }
    }
}
