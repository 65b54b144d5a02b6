#include <doctest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "cobord/lattice.hpp"

using namespace cobord;

namespace {

using Matrix = std::vector<std::vector<Integer>>;

Integer det(Matrix m) {
    // Bareiss fraction-free elimination
    const std::size_t n = m.size();
    Integer sign = 1, prev = 1;
    for (std::size_t k = 0; k < n; ++k) {
        if (m[k][k] == 0) {
            std::size_t p = k + 1;
            while (p < n && m[p][k] == 0) ++p;
            if (p == n) return 0;
            std::swap(m[p], m[k]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
        prev = m[k][k];
    }
    return sign * m[n - 1][n - 1];
}

void subsets(std::size_t n, std::size_t k, std::size_t start, std::vector<std::size_t>& cur,
             std::vector<std::vector<std::size_t>>& out) {
    if (cur.size() == k) {
        out.push_back(cur);
        return;
    }
    for (std::size_t i = start; i < n; ++i) {
        cur.push_back(i);
        subsets(n, k, i + 1, cur, out);
        cur.pop_back();
    }
}

/// Invariant factors from gcds of k x k minors.
std::vector<Integer> determinantal_factors(const Matrix& m) {
    const std::size_t rows = m.size(), cols = m.front().size();
    std::vector<Integer> d{1};
    for (std::size_t k = 1; k <= std::min(rows, cols); ++k) {
        std::vector<std::vector<std::size_t>> rs, cs;
        std::vector<std::size_t> cur;
        subsets(rows, k, 0, cur, rs);
        subsets(cols, k, 0, cur, cs);
        Integer g = 0;
        for (const auto& r : rs)
            for (const auto& c : cs) {
                Matrix minor(k, std::vector<Integer>(k));
                for (std::size_t i = 0; i < k; ++i)
                    for (std::size_t j = 0; j < k; ++j) minor[i][j] = m[r[i]][c[j]];
                Integer x = det(minor);
                mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
            }
        if (g == 0) break;
        d.push_back(g);
    }
    std::vector<Integer> s;
    for (std::size_t k = 1; k < d.size(); ++k) s.push_back(d[k] / d[k - 1]);
    return s;
}

std::map<std::size_t, Integer> row_map(const std::vector<Integer>& row) {
    std::map<std::size_t, Integer> m;
    for (std::size_t j = 0; j < row.size(); ++j)
        if (row[j] != 0) m[j] = row[j];
    return m;
}

Matrix random_matrix(std::mt19937& rng, std::size_t rows, std::size_t cols, int bound) {
    std::uniform_int_distribution<int> dist(-bound, bound);
    Matrix m(rows, std::vector<Integer>(cols));
    for (auto& r : m)
        for (auto& x : r) x = dist(rng);
    return m;
}

}  // namespace

TEST_SUITE("lattice") {
    TEST_CASE("invariant factors agree with determinantal divisors") {
        std::mt19937 rng(20261014);
        for (int trial = 0; trial < 200; ++trial) {
            std::size_t rows = 1 + trial % 4, cols = 1 + (trial / 4) % 5;
            Matrix m = random_matrix(rng, rows, cols, trial % 3 == 0 ? 1 : 6);
            HermiteLattice lat(cols);
            for (const auto& r : m) lat.add(row_map(r));
            auto expected = determinantal_factors(m);
            CAPTURE(trial);
            CHECK(lat.invariant_factors() == expected);
            CHECK(smith_diagonal(m) == expected);
            CHECK(lat.rank() == expected.size());
            CHECK(lat.quotient_rank() == cols - expected.size());
        }
    }

    TEST_CASE("reduction is a canonical coset representative") {
        std::mt19937 rng(7);
        std::uniform_int_distribution<int> coef(-5, 5);
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t cols = 5;
            Matrix m = random_matrix(rng, 3, cols, 9);
            HermiteLattice lat(cols);
            for (const auto& r : m) lat.add(row_map(r));
            std::vector<Integer> v(cols), w(cols);
            for (auto& x : v) x = coef(rng);
            w = v;
            for (const auto& r : m) {
                Integer c = coef(rng);
                for (std::size_t j = 0; j < cols; ++j) w[j] += c * r[j];
            }
            CHECK(lat.reduce(row_map(v)) == lat.reduce(row_map(w)));
            // v - reduce(v) is a lattice vector
            auto rv = lat.reduce(row_map(v));
            std::vector<Integer> diff = v;
            for (const auto& [j, x] : rv) diff[j] -= x;
            CHECK(lat.contains(row_map(diff)));
            // rows and their combinations are members
            for (const auto& r : m) CHECK(lat.contains(row_map(r)));
        }
    }

    TEST_CASE("torsion of Z^2 / <(2,0),(0,4)> and of <(2,4)>") {
        HermiteLattice a(2);
        a.add(std::map<std::size_t, Integer>{{0, 2}});
        a.add(std::map<std::size_t, Integer>{{1, 4}});
        CHECK(a.torsion() == std::vector<Integer>{2, 4});
        CHECK(a.quotient_rank() == 0);
        HermiteLattice b(2);
        b.add(std::map<std::size_t, Integer>{{0, 2}, {1, 4}});
        CHECK(b.torsion() == std::vector<Integer>{2});
        CHECK(b.quotient_rank() == 1);
        CHECK_FALSE(b.contains(std::map<std::size_t, Integer>{{0, 1}, {1, 2}}));
    }

    TEST_CASE("zero and duplicate generators do not change the lattice") {
        HermiteLattice a(3);
        a.add(std::map<std::size_t, Integer>{});
        a.add(std::map<std::size_t, Integer>{{1, 3}, {2, -6}});
        a.add(std::map<std::size_t, Integer>{{1, -3}, {2, 6}});
        a.add(std::map<std::size_t, Integer>{{1, 0}});
        CHECK(a.rank() == 1);
        CHECK(a.pivots().front().second == 3);
    }
}
